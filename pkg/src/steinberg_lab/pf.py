"""Derived finite parts of ideals e^h·H*V and the modules M(V;h).

For a product e of nonzero forms, the functor Ψ̂ on the full lattice sends W
to the ideal generated by e_W^h (e_W keeps the forms of e vanishing on W);
Ψ̂(0) is the ideal itself and Ψ is the restriction to nonzero W.  Everything
is done one internal degree at a time.  In degree d, Ψ̂_d(W) has basis
e_W^h·m over the monomials m of degree d - h·deg e_W, and for W ⊆ W′ the
inclusion multiplies coordinates by (e_W / e_W′)^h.

RᵏPf is read off the augmented complex M_d -> L⁰(Ψ_d) -> L¹(Ψ_d) -> ...
placed so that M_d sits in degree -1: RᵏPf = H^{k-1}.  Ext^k(S_0, Ψ̂_d)
gives a second computation that must agree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import CapError, InvariantError, OracleMismatch
from .functors import L_complex, PosetFunctor, lambda_phi, simplex_layout
from .gf2 import (CochainComplex, GF2Matrix, assemble, hstack, kernel_basis,
                  kron, rank, row_basis, vstack)
from .lattice import GLElement, PosetView, Subspace, act, enumerate_GL
from .resolutions import ext_dims
from .steenrod import FormProduct, Poly, c_V, e_sub_W, monomials, mult_matrix
from .steinberg import gl_on_steinberg_dual

PF_MAX_N = 3
PF_MAX_D = 12


def _check_caps(n: int, D: int, unsafe: bool) -> None:
    if n < 0 or D < 0:
        raise ValueError("n and D must be >= 0")
    if unsafe:
        return
    if n > PF_MAX_N:
        raise CapError(f"n = {n} exceeds the cap {PF_MAX_N} (pass unsafe=True to lift it)")
    if D > PF_MAX_D:
        raise CapError(f"D = {D} exceeds the cap {PF_MAX_D} (pass unsafe=True to lift it)")


# ------------------------------------------------------------ Ψ

@dataclass
class IdealFunctorFamily:
    e: FormProduct
    h: int
    D: int
    hat: list  # degree d -> PosetFunctor on 𝒲
    base: dict  # Subspace -> h·deg e_W

    @property
    def n(self) -> int:
        return self.e.n

    def on_W0(self, d: int) -> PosetFunctor:
        return self.hat[d].restrict(PosetView.W0(self.n))

    def value_rows(self, w: Subspace, d: int) -> GF2Matrix:
        """Basis of Ψ̂_d(W) as rows over the degree-d monomials."""
        b = self.base[w]
        ew = e_sub_W(self.e, w) ** self.h
        ncols = len(monomials(self.n, d))
        if d < b:
            return GF2Matrix.zeros(0, ncols)
        return mult_matrix(ew.poly(), d - b)


def _psi_degree(e: FormProduct, h: int, d: int, base: dict) -> PosetFunctor:
    P = PosetView.W(e.n)
    els = P.elements
    dims = [len(monomials(e.n, d - base[w])) for w in els]
    maps = {}
    for i, j in P.cover_pairs():
        if dims[i] == 0:
            continue
        q = (e_sub_W(e, els[i]) / e_sub_W(e, els[j])) ** h
        maps[i, j] = mult_matrix(q.poly(), d - base[els[i]]).T
    return PosetFunctor(P, dims, maps, check=False)


def psi_of_ideal(e: FormProduct, h: int, D: int, unsafe: bool = False) -> IdealFunctorFamily:
    if h < 0:
        raise ValueError("h must be >= 0")
    _check_caps(e.n, D, unsafe)
    base = {w: h * e_sub_W(e, w).degree for w in PosetView.W(e.n).elements}
    hat = [_psi_degree(e, h, d, base) for d in range(D + 1)]
    return IdealFunctorFamily(e, h, D, hat, base)


# ------------------------------------------------------------ RᵏPf

def augmented_complex(fhat: PosetFunctor) -> CochainComplex:
    """Ψ̂(0) -> L•(Ψ) with Ψ̂(0) in degree -1."""
    n = fhat.poset.n
    zero = Subspace.zero(n)
    m = fhat.dim(zero)
    W0 = PosetView.W0(n)
    if len(W0) == 0:
        return CochainComplex([m], [], lo=-1)
    psi = fhat.restrict(W0)
    L = L_complex(psi)
    simp, sizes = simplex_layout(psi, 0)
    blocks = [(r, 0, fhat.map(zero, W0.elements[s[0]])) for r, s in enumerate(simp)]
    rho = assemble(sizes, [m], blocks)
    return CochainComplex([m] + L.dims, [rho] + L.diffs, lo=-1)


def _hdim(c: CochainComplex, k: int) -> int:
    if k < c.lo or k > c.hi:
        return 0
    return c.homology(k).dim


def r_pf_table(e: FormProduct, h: int, D: int, cross_check: bool = True,
               unsafe: bool = False) -> list[list[int]]:
    """table[k][d] = dim (RᵏPf(e^h·H*V))_d for 0 <= k <= n, d <= D."""
    fam = psi_of_ideal(e, h, D, unsafe)
    n = e.n
    table = [[0] * (D + 1) for _ in range(n + 1)]
    for d in range(D + 1):
        c = augmented_complex(fam.hat[d])
        col = [_hdim(c, k - 1) for k in range(n + 1)]
        if cross_check:
            other = ext_dims(fam.hat[d])
            other = other + [0] * (n + 1 - len(other))
            if other[:n + 1] != col:
                raise OracleMismatch(f"RᵏPf via L• {col} != Ext(S_0, Ψ̂) {other} in degree {d}")
        for k in range(n + 1):
            table[k][d] = col[k]
    return table


def r_pf(e: FormProduct, h: int, k: int, D: int, cross_check: bool = True,
         unsafe: bool = False) -> list[int]:
    """Graded dims of RᵏPf(e^h·H*V) in degrees 0..D (zero for k > n)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > e.n:
        _check_caps(e.n, D, unsafe)
        return [0] * (D + 1)
    return r_pf_table(e, h, D, cross_check, unsafe)[k]


def M_of_V(n: int, h: int, D: int, cross_check: bool = True, unsafe: bool = False) -> list[int]:
    """Poincaré table of M(V;h) = RⁿPf(c_V^h·H*V) in degrees 0..D."""
    return r_pf(c_V(n), h, n, D, cross_check, unsafe)


# ------------------------------------------------------------ generation

def _form_mult_components(fam: IdealFunctorFamily, d: int, u: int) -> list[GF2Matrix]:
    """Multiplication by the form u from the degree-d augmented complex to degree d+1."""
    n = fam.n
    ell = Poly.form(n, u)
    zero = Subspace.zero(n)

    def block(w: Subspace) -> GF2Matrix:
        src = len(monomials(n, d - fam.base[w]))
        dst = len(monomials(n, d + 1 - fam.base[w]))
        if src == 0:
            return GF2Matrix(dst, 0)
        return mult_matrix(ell, d - fam.base[w]).T

    comps = [block(zero)]
    W0 = PosetView.W0(n)
    if len(W0):
        src_f, dst_f = fam.hat[d].restrict(W0), fam.hat[d + 1].restrict(W0)
        for k in range(W0.max_chain_length()):
            simp, ssz = simplex_layout(src_f, k)
            _, dsz = simplex_layout(dst_f, k)
            blocks = [(r, r, block(W0.elements[s[-1]])) for r, s in enumerate(simp)]
            comps.append(assemble(dsz, ssz, blocks))
    return comps


@dataclass
class PfReport:
    ok: bool
    data: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, **self.data, "failures": self.failures}


def module_action(fam: IdealFunctorFamily, d: int, u: int, deg: int,
                  complexes: dict | None = None) -> GF2Matrix:
    """Multiplication by u on H^deg of the augmented complexes, degree d -> d+1.

    Checks that the cochain-level map commutes with the differentials and
    sends boundaries to boundaries before descending.
    """
    complexes = complexes if complexes is not None else {}
    for t in (d, d + 1):
        if t not in complexes:
            complexes[t] = augmented_complex(fam.hat[t])
    src, dst = complexes[d], complexes[d + 1]
    comps = _form_mult_components(fam, d, u)
    for i in range(len(comps) - 1):
        k = src.lo + i
        if comps[i + 1] @ src.diff(k) != dst.diff(k) @ comps[i]:
            raise InvariantError(f"form multiplication does not commute with d at degree {k}")
    if deg < src.lo or deg > src.hi:
        return GF2Matrix(0, 0)
    hs, ht = src.homology(deg), dst.homology(deg)
    x = comps[deg - src.lo]
    if hs.boundaries.rows and ht.dim:
        if not ht.coordinates(hs.boundaries @ x.T).is_zero():
            raise InvariantError("form multiplication is not well defined on cohomology")
    if hs.dim == 0:
        return GF2Matrix(ht.dim, 0)
    return ht.coordinates(hs.basis @ x.T)


def generation_check(n: int, h: int, D: int, unsafe: bool = False) -> PfReport:
    """Is M(V;h) spanned over H*V by its degree-0 part, degrees 0..D?"""
    fam = psi_of_ideal(c_V(n), h, D, unsafe)
    complexes: dict = {}
    deg = n - 1
    dims = []
    spanned = []
    for d in range(D + 1):
        complexes.setdefault(d, augmented_complex(fam.hat[d]))
        dims.append(_hdim(complexes[d], deg))
    cur = GF2Matrix.identity(dims[0])  # columns span the generated part
    spanned.append(dims[0])
    failures = []
    for d in range(D):
        imgs = [module_action(fam, d, 1 << i, deg, complexes) @ cur for i in range(n)]
        cols = hstack(imgs) if imgs and cur.cols else GF2Matrix(dims[d + 1], 0)
        cur = row_basis(cols.T).T if cols.cols else GF2Matrix(dims[d + 1], 0)
        spanned.append(cur.cols)
        if cur.cols != dims[d + 1] and not failures:
            failures.append({"degree": d + 1, "dim": dims[d + 1], "generated": cur.cols})
    return PfReport(not failures, {"n": n, "h": h, "D": D, "dims": dims, "generated": spanned}, failures)


# ------------------------------------------------------------ GL action on M⁰

def _group(n: int) -> list[GLElement]:
    return enumerate_GL(n, full=True)


def gl_on_M0(n: int, h: int = 1, group: list | None = None) -> list[tuple[GLElement, GF2Matrix]]:
    """Right action of GL_n on M⁰(V;h) through λ on L^{n-1}(Ψ_0)."""
    if h < 1:
        raise ValueError("h must be >= 1")
    _check_caps(n, 0, False)
    group = _group(n) if group is None else group
    if n == 0:
        return [(g, GF2Matrix.identity(1)) for g in group]
    fam = psi_of_ideal(c_V(n), h, 0)
    if fam.hat[0].dim(Subspace.zero(n)) != 0:
        raise InvariantError("degree-0 slice of the ideal should vanish")
    psi = fam.on_W0(0)
    out = []
    for g in group:
        cm = lambda_phi(psi, lambda w, g=g: act(g, w))
        if cm.target_functor != psi:
            raise InvariantError("Ψ_0∘α differs from Ψ_0")
        out.append((g, cm.on_cohomology(n - 1)))
    return out


def check_right_action(action: list, pairs: int | None = None,
                       rng: np.random.Generator | None = None) -> list:
    """Pairs (g, h) with R(gh) != R(h)R(g); all pairs unless ``pairs`` is given."""
    table = {g.rows: m for g, m in action}
    idx = list(range(len(action)))
    if pairs is None:
        todo = list(itertools.product(idx, idx))
    else:
        rng = rng or np.random.default_rng(0)
        todo = [tuple(rng.integers(0, len(action), 2)) for _ in range(pairs)]
    bad = []
    for a, b in todo:
        g, rg = action[a]
        k, rk = action[b]
        if table[(g * k).rows] != rk @ rg:
            bad.append((g.rows, k.rows))
    return bad


def _intertwiner_system(pairs: list) -> GF2Matrix:
    """Equations T·A_g = B_g·T on vec(T) (row-major), stacked over g."""
    a0, b0 = pairs[0]
    m, s = a0.rows, b0.rows
    eqs = []
    for a, b in pairs:
        eqs.append(kron(GF2Matrix.identity(s), a.T) + kron(b, GF2Matrix.identity(m)))
    return vstack(eqs, cols=s * m)


def steinberg_dual_intertwiner(n: int, h: int = 1, seed: int = 0,
                               tries: int = 4096) -> tuple[GF2Matrix, PfReport]:
    """Invertible T : M⁰(V;h) -> St*_V with T·R_M(g) = R_{St*}(g)·T for all g."""
    action = gl_on_M0(n, h)
    if n <= 1:
        pairs = [(m, GF2Matrix.identity(1)) for _, m in action]
    else:
        pairs = [(m, gl_on_steinberg_dual(g, n)) for g, m in action]
    m_dim, s_dim = pairs[0][0].rows, pairs[0][1].rows
    data = {"n": n, "h": h, "dim_M0": m_dim, "dim_St": s_dim, "group_order": len(action)}
    if m_dim != s_dim:
        return GF2Matrix(s_dim, m_dim), PfReport(False, data, [{"reason": "dimension mismatch"}])
    ker = kernel_basis(_intertwiner_system(pairs))
    data["hom_dim"] = ker.rows

    def as_matrix(v: int) -> GF2Matrix:
        return GF2Matrix.from_int_rows([(v >> (a * m_dim)) & ((1 << m_dim) - 1) for a in range(s_dim)], m_dim)

    rows = ker.int_rows()
    if len(rows) <= 12:
        candidates = (c for c in itertools.product((0, 1), repeat=len(rows)) if any(c))
    else:
        rng = np.random.default_rng(seed)
        candidates = (tuple(rng.integers(0, 2, len(rows))) for _ in range(tries))
    for coeffs in itertools.chain(((int(i == j) for j in range(len(rows))) for i in range(len(rows))),
                                  candidates):
        v = 0
        for c, r in zip(coeffs, rows):
            if c:
                v ^= r
        t = as_matrix(v)
        if rank(t) == m_dim:
            for a, b in pairs:
                if t @ a != b @ t:
                    raise InvariantError("intertwiner equation violated")
            return t, PfReport(True, data)
    return GF2Matrix(s_dim, m_dim), PfReport(False, data, [{"reason": "no invertible intertwiner"}])


# ------------------------------------------------------------ doubling

def ephi_doubling_check(n: int, h: int, D: int, unsafe: bool = False) -> PfReport:
    """P_{M(V;2h)}(t) = (1+t)^n P_{M(V;h)}(t^2) up to degree D."""
    big = M_of_V(n, 2 * h, D, unsafe=unsafe)
    small = M_of_V(n, h, D // 2, unsafe=unsafe)
    rhs = [sum(comb(n, d - 2 * j) * small[j] for j in range(d // 2 + 1) if 0 <= d - 2 * j <= n)
           for d in range(D + 1)]
    failures = [{"degree": d, "lhs": big[d], "rhs": rhs[d]} for d in range(D + 1) if big[d] != rhs[d]]
    return PfReport(not failures, {"n": n, "h": h, "D": D, "lhs": big, "rhs": rhs}, failures)


# ------------------------------------------------------------ e-finite modules

@dataclass(frozen=True)
class EFiniteModule:
    """⊕_U H*V ⊗_{H*(V/U)} N_U, kept as summands (U, graded dims of N_U)."""

    n: int
    summands: tuple = ()

    def __post_init__(self):
        norm = []
        for u, dims in self.summands:
            if u.n != self.n:
                raise ValueError("summand subspace in the wrong ambient space")
            dims = tuple(int(x) for x in dims)
            if min(dims, default=0) < 0:
                raise ValueError("graded dims must be non-negative")
            norm.append((u, dims))
        object.__setattr__(self, "summands", tuple(norm))

    def keep(self, pred) -> "EFiniteModule":
        return EFiniteModule(self.n, tuple(s for s in self.summands if pred(s[0])))

    def subspaces(self) -> list[Subspace]:
        return [u for u, _ in self.summands]


def efix(m: EFiniteModule, w: Subspace) -> EFiniteModule:
    return m.keep(lambda u: w.is_subspace_of(u))


def filtration_F(m: EFiniteModule, p: int) -> EFiniteModule:
    return m.keep(lambda u: u.codim >= p)


def graded_Gr(m: EFiniteModule, p: int) -> EFiniteModule:
    return m.keep(lambda u: u.codim == p)


def finite_part(m: EFiniteModule) -> EFiniteModule:
    """F^n: the summands with U = 0, whose induced module is N_U itself."""
    return filtration_F(m, m.n)


def efinite_toolkit(m: EFiniteModule, w: Subspace, p: int) -> dict:
    return {"efix": efix(m, w), "F": filtration_F(m, p), "Gr": graded_Gr(m, p), "Pf": finite_part(m)}

