"""Steinberg modules, the maps r and s, and the two Lusztig complexes.

Everything is computed on intervals of the subspace lattice: for B ⊆ A the
module St(B, A) is the top reduced homology of the open interval
{U : B < U < A}, which is the order complex of B_{1,1}(A/B) without choosing
quotient coordinates.  With k = dim A - dim B the interval is graded of
length k - 1, so its top simplices are the complete flags and St(B, A) is the
space of top cycles (there are no boundaries to divide by).  For k <= 1 the
module is F2 by convention, carried by the empty flag.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapError, InvariantError
from .gf2 import (ChainComplex, GF2Matrix, assemble, kernel_basis,
                  solve_linear_system)
from .lattice import (GLElement, PosetView, Subspace, act, enumerate_subspaces,
                      project_subspace, quotient_chart)

ST_MAX_N = 4

Flag = tuple  # tuple[Subspace, ...]


@dataclass(eq=False)
class SteinbergModule:
    lo: Subspace
    hi: Subspace
    flags: list
    flag_index: dict
    cycle_basis: GF2Matrix  # dim x len(flags)
    boundary: GF2Matrix | None  # faces x flags, None when k <= 1

    @property
    def rank(self) -> int:
        """dim hi - dim lo."""
        return self.hi.dim - self.lo.dim

    @property
    def dim(self) -> int:
        return self.cycle_basis.rows

    def is_cycle(self, chains: GF2Matrix) -> bool:
        if self.boundary is None:
            return True
        return (self.boundary @ chains.T).is_zero()

    def coordinates(self, chains: GF2Matrix) -> GF2Matrix:
        """Express cycle rows (over flags) in the cycle basis; dim x rows."""
        if chains.cols != len(self.flags):
            raise ValueError("chain length mismatch")
        if not self.is_cycle(chains):
            raise InvariantError(f"chain is not a cycle of St{self.lo!r},{self.hi!r}")
        sol = solve_linear_system(self.cycle_basis.T, chains.T)
        if not sol.consistent:
            raise InvariantError("cycle not expressible in the Steinberg basis")
        return sol.particular


def _interval_subspaces(lo: Subspace, hi: Subspace) -> list[Subspace]:
    return [w for w in enumerate_subspaces(lo.n)
            if lo.is_subspace_of(w) and w.is_subspace_of(hi)]


def _check_cap(n: int, cap: int | None) -> None:
    if n > (ST_MAX_N if cap is None else cap):
        raise CapError(f"Steinberg modules are capped at n = {ST_MAX_N} (got {n})")


@lru_cache(maxsize=None)
def steinberg_interval(lo: Subspace, hi: Subspace) -> SteinbergModule:
    if not lo.is_subspace_of(hi):
        raise ValueError("interval endpoints are not nested")
    k = hi.dim - lo.dim
    if k <= 1:
        return SteinbergModule(lo, hi, [()], {(): 0}, GF2Matrix.identity(1), None)
    poset = PosetView.interval(lo, hi)
    flags = [tuple(poset.elements[i] for i in c) for c in poset.chain_indices(k - 2)]
    faces = [tuple(poset.elements[i] for i in c) for c in poset.chain_indices(k - 3)] if k > 2 else [()]
    fidx = {f: i for i, f in enumerate(faces)}
    dense = np.zeros((len(faces), len(flags)), dtype=np.uint8)
    for j, fl in enumerate(flags):
        for t in range(len(fl)):
            dense[fidx[fl[:t] + fl[t + 1:]], j] ^= 1
    bd = GF2Matrix.from_dense(dense)
    from . import cache

    basis = cache.lookup_steinberg(lo, hi, flags, bd)
    if basis is None:
        basis = kernel_basis(bd)
    return SteinbergModule(lo, hi, flags, {f: i for i, f in enumerate(flags)}, basis, bd)


def steinberg(n: int, cap: int | None = None) -> SteinbergModule:
    """St of F2^n: top reduced homology of B_{1,1}(F2^n)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    _check_cap(n, cap)
    return steinberg_interval(Subspace.zero(n), Subspace.full(n))


def _selection(dst: SteinbergModule, src: SteinbergModule, pairs) -> GF2Matrix:
    dense = np.zeros((len(dst.flags), len(src.flags)), dtype=np.uint8)
    for s_flag, d_flag in pairs:
        dense[dst.flag_index[d_flag], src.flag_index[s_flag]] ^= 1
    return GF2Matrix.from_dense(dense)


def _push(dst: SteinbergModule, src: SteinbergModule, sel: GF2Matrix) -> GF2Matrix:
    chains = src.cycle_basis @ sel.T
    return dst.coordinates(chains)


@lru_cache(maxsize=None)
def r_interval(lo: Subspace, hi: Subspace, h: Subspace) -> GF2Matrix:
    """r: St(lo, hi) -> St(lo, h) for a hyperplane lo ⊆ h ⊂ hi.

    Keeps the flags whose largest member is h and deletes it.
    """
    if not (lo.is_subspace_of(h) and h.is_subspace_of(hi) and h.dim == hi.dim - 1):
        raise ValueError("h must be a hyperplane of hi containing lo")
    if hi.dim - lo.dim == 1:
        return GF2Matrix.identity(1)
    src, dst = steinberg_interval(lo, hi), steinberg_interval(lo, h)
    pairs = [(fl, fl[:-1]) for fl in src.flags if fl[-1] == h]
    return _push(dst, src, _selection(dst, src, pairs))


@lru_cache(maxsize=None)
def s_interval(lo: Subspace, hi: Subspace, d: Subspace) -> GF2Matrix:
    """s: St(lo, hi) -> St(d, hi) for lo ⊂ d ⊆ hi with dim d/lo = 1.

    Keeps the flags whose smallest member is d and deletes it.
    """
    if not (lo.is_subspace_of(d) and d.is_subspace_of(hi) and d.dim == lo.dim + 1):
        raise ValueError("d must contain lo with quotient a line, inside hi")
    if hi.dim - lo.dim == 1:
        return GF2Matrix.identity(1)
    src, dst = steinberg_interval(lo, hi), steinberg_interval(d, hi)
    pairs = [(fl, fl[1:]) for fl in src.flags if fl[0] == d]
    return _push(dst, src, _selection(dst, src, pairs))


def r_map(n: int, h: Subspace) -> GF2Matrix:
    """r_{V,H}: St_V -> St_H for a hyperplane H of V = F2^n."""
    if h.n != n or h.codim != 1:
        raise ValueError("H must be a hyperplane of F2^n")
    _check_cap(n, None)
    return r_interval(Subspace.zero(n), Subspace.full(n), h)


def quotient_transport(lo: Subspace, hi: Subspace) -> GF2Matrix:
    """St(lo, hi) -> St(F2^{dim hi - dim lo}) through the quotient chart of lo.

    Requires hi = F2^n; flags are pushed elementwise through the projection.
    """
    n = lo.n
    if hi != Subspace.full(n):
        raise ValueError("quotient transport expects hi to be the whole space")
    proj, _ = quotient_chart(n, lo)
    m = n - lo.dim
    src = steinberg_interval(lo, hi)
    dst = steinberg_interval(Subspace.zero(m), Subspace.full(m))
    pairs = [(fl, tuple(project_subspace(proj, u) for u in fl)) for fl in src.flags]
    return _push(dst, src, _selection(dst, src, pairs))


def s_map(n: int, d: Subspace) -> GF2Matrix:
    """s_{V,V/D}: St_V -> St_{V/D}, with V/D identified with F2^{n-1}."""
    if d.n != n or d.dim != 1:
        raise ValueError("D must be a line of F2^n")
    _check_cap(n, None)
    if n == 1:
        return GF2Matrix.identity(1)
    full = Subspace.full(n)
    return quotient_transport(d, full) @ s_interval(Subspace.zero(n), full, d)


def transport(alpha: GLElement, lo: Subspace, hi: Subspace) -> GF2Matrix:
    """St(α lo, α hi) -> St(lo, hi), (T c)_σ = c_{ασ}."""
    src = steinberg_interval(act(alpha, lo), act(alpha, hi))
    dst = steinberg_interval(lo, hi)
    if dst.rank <= 1:
        return GF2Matrix.identity(1)
    pairs = [(tuple(act(alpha, u) for u in fl), fl) for fl in dst.flags]
    return _push(dst, src, _selection(dst, src, pairs))


def gl_on_steinberg(g: GLElement, n: int) -> GF2Matrix:
    """Right action of g on St_n: (R(g) c)_σ = c_{gσ}; R(gh) = R(h) R(g)."""
    if g.n != n:
        raise ValueError("ambient mismatch")
    _check_cap(n, None)
    return transport(g, Subspace.zero(n), Subspace.full(n))


def gl_on_steinberg_dual(g: GLElement, n: int) -> GF2Matrix:
    """Right action on St_n^*: R*(g) = R(g^{-1})^T."""
    return gl_on_steinberg(g.inverse(), n).T


# ------------------------------------------------------------ Lusztig complexes

class LusztigComplex(ChainComplex):
    """Chain complex with the subspaces indexing each summand recorded."""

    def __init__(self, dims, boundaries, summands, variant):
        self.summands = summands
        self.variant = variant
        super().__init__(dims, boundaries, check=True)


def lusztig_complex(n: int | None = None, variant: int = 1,
                    lo: Subspace | None = None, hi: Subspace | None = None) -> LusztigComplex:
    """Lu of F2^n, or of the interval (lo, hi).

    Variant 1: Lu_p = ⊕ St(lo, W) over dim W/lo = p with blocks r.
    Variant 2: Lu_p = ⊕ St(W, hi) over dim hi/W = p with blocks s.
    """
    if lo is None or hi is None:
        if n is None:
            raise ValueError("give n or an interval")
        if n < 1:
            raise ValueError("Lusztig complexes need n >= 1")
        _check_cap(n, None)
        lo, hi = Subspace.zero(n), Subspace.full(n)
    if variant not in (1, 2):
        raise ValueError("variant must be 1 or 2")
    k = hi.dim - lo.dim
    between = _interval_subspaces(lo, hi)
    if variant == 1:
        levels = [[w for w in between if w.dim - lo.dim == p] for p in range(k + 1)]
        mod = lambda w: steinberg_interval(lo, w)  # noqa: E731
    else:
        levels = [[w for w in between if hi.dim - w.dim == p] for p in range(k + 1)]
        mod = lambda w: steinberg_interval(w, hi)  # noqa: E731
    sizes = [[mod(w).dim for w in lev] for lev in levels]
    bds = []
    for p in range(1, k + 1):
        blocks = []
        for j, w in enumerate(levels[p]):
            for i, w2 in enumerate(levels[p - 1]):
                if variant == 1 and w2.is_subspace_of(w):
                    blocks.append((i, j, r_interval(lo, w, w2)))
                elif variant == 2 and w.is_subspace_of(w2):
                    blocks.append((i, j, s_interval(w, hi, w2)))
        bds.append(assemble(sizes[p - 1], sizes[p], blocks))
    return LusztigComplex([sum(s) for s in sizes], bds, levels, variant)


def euler_recursion_dims(n_max: int) -> list[int]:
    """dim St_n forced by Σ_p (-1)^p [n choose p]_2 dim St_p = 0 for n >= 1."""
    from .lattice import gaussian_binomial

    st = [1]
    for n in range(1, n_max + 1):
        s = sum((-1) ** p * gaussian_binomial(n, p) * st[p] for p in range(n))
        st.append(-s * (-1) ** n)
    return st


# ------------------------------------------------------------ fault injection

def fault_report(c: ChainComplex) -> dict:
    """How a (possibly corrupted) Lusztig complex deviates from being acyclic."""
    d2 = c.is_square_zero()
    hom = c.homology_dims() if d2 else None
    return {"d2_zero": d2, "homology": hom, "detected": (not d2) or any(hom)}


def random_mutation(c: ChainComplex, rng: np.random.Generator) -> tuple[tuple[int, int, int], ChainComplex]:
    """Flip one uniformly chosen entry among all boundary entries."""
    sizes = [c.dims[p - 1] * c.dims[p] for p in range(1, len(c.dims))]
    t = int(rng.integers(0, sum(sizes)))
    for p, s in enumerate(sizes, start=1):
        if t < s:
            i, j = divmod(t, c.dims[p])
            return (p, i, j), c.with_flipped_bit(p, i, j)
        t -= s
    raise ValueError("complex has no boundary entries")
