"""Optional on-disk cache of Steinberg cycle bases.

If ``STEINBERG_LAB_CACHE`` names a directory, files ``steinberg_n<N>.json``
found there are used instead of recomputing the cycle basis of St_N.  The
cache is only read during computations; :func:`populate` writes it.  A
cached basis is checked before use: the flags must match, every row must be
a cycle, and the rows must be independent and as many as dim ker ∂.
"""
from __future__ import annotations

import json
import os
from pathlib import Path

from .gf2 import GF2Matrix, rank


def cache_dir() -> Path | None:
    d = os.environ.get("STEINBERG_LAB_CACHE")
    return Path(d) if d else None


def _path(root: Path, n: int) -> Path:
    return root / f"steinberg_n{n}.json"


def lookup_steinberg(lo, hi, flags, boundary: GF2Matrix) -> GF2Matrix | None:
    root = cache_dir()
    if root is None or lo.dim != 0 or hi.dim != hi.n:
        return None
    p = _path(root, hi.n)
    if not p.is_file():
        return None
    try:
        data = json.loads(p.read_text())
        keys = [[u.key for u in fl] for fl in flags]
        if data.get("flags") != keys:
            return None
        basis = GF2Matrix.from_int_rows([int(r) for r in data["basis"]], len(flags))
    except (OSError, ValueError, KeyError, TypeError):
        return None
    expected = len(flags) - rank(boundary)
    if basis.rows != expected or rank(basis) != expected:
        return None
    if basis.rows and not (boundary @ basis.T).is_zero():
        return None
    return basis


def populate(root: str | Path, n_max: int) -> list[Path]:
    """Write cycle bases of St_n for 2 <= n <= n_max into ``root``."""
    from .steinberg import steinberg

    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    written = []
    for n in range(2, n_max + 1):
        st = steinberg(n)
        payload = {
            "n": n,
            "flags": [[u.key for u in fl] for fl in st.flags],
            "basis": [str(r) for r in st.cycle_basis.int_rows()],
        }
        p = _path(root, n)
        p.write_text(json.dumps(payload))
        written.append(p)
    return written
