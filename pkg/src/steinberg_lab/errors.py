"""Exception types shared across the package."""


class InvariantError(RuntimeError):
    """A structural invariant (d∘d = 0, naturality, functoriality...) failed."""


class OracleMismatch(InvariantError):
    """Two independent computations of the same quantity disagree."""


class CapError(ValueError):
    """A size parameter exceeds the configured cap."""
