"""Resolutions and Ext computations for functors on the subspace lattice.

Summands are labelled by subspaces (or pairs W ⊆ Z) and live in
:class:`~steinberg_lab.functors.SummandFunctor` objects, so the maps ν
between representables are literal identity blocks wherever both ends are
nonzero.  St* matrices are transposes of the St matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvariantError, OracleMismatch
from .functors import (PosetFunctor, SummandFunctor, derived_limit_dims,
                       summand_morphism, L_complex)
from .gf2 import (CochainComplex, GF2Matrix, Homology, apply_rows, assemble,
                  filtered_e1, homology_dim, kernel_basis, kron, rank,
                  row_basis, vstack)
from .lattice import PosetView, Subspace, enumerate_subspaces
from .steinberg import r_interval, s_interval, steinberg_interval


def _st(lo: Subspace, hi: Subspace) -> int:
    return steinberg_interval(lo, hi).dim


# ------------------------------------------------------------ functor complexes

@dataclass
class FunctorComplex:
    """Cochain complex of functors; ``diffs[i]`` maps terms[i] -> terms[i+1].

    ``augmentation`` is ``None``, ``("left", F, maps)`` for F -> terms[0], or
    ``("right", F, maps)`` for terms[-1] -> F, maps given per element index.
    """

    terms: list
    diffs: list
    lo: int = 0
    augmentation: tuple | None = None

    @property
    def poset(self) -> PosetView:
        return self.terms[0].poset

    def evaluate(self, i: int, augmented: bool = True) -> CochainComplex:
        dims = [t.dims[i] for t in self.terms]
        diffs = [d[i] for d in self.diffs]
        lo = self.lo
        if augmented and self.augmentation is not None:
            side, F, maps = self.augmentation
            if side == "left":
                dims = [F.dims[i]] + dims
                diffs = [maps[i]] + diffs
                lo -= 1
            else:
                dims = dims + [F.dims[i]]
                diffs = diffs + [maps[i]]
        return CochainComplex(dims, diffs, lo)

    def check_natural(self) -> None:
        P = self.poset
        pairs = [(self.terms[t], self.terms[t + 1], d) for t, d in enumerate(self.diffs)]
        if self.augmentation is not None:
            side, F, maps = self.augmentation
            pairs.append((F, self.terms[0], maps) if side == "left" else (self.terms[-1], F, maps))
        for src, dst, d in pairs:
            for i, j in P.cover_pairs():
                if d[j] @ src.maps[i, j] != dst.maps[i, j] @ d[i]:
                    raise InvariantError(
                        f"differential not natural along {P.elements[i]!r} -> {P.elements[j]!r}")

    def exactness_failures(self) -> list:
        """(element, degree, homology dim) for every nonzero homology group."""
        bad = []
        for i, u in enumerate(self.poset.elements):
            c = self.evaluate(i)
            for k in c.degrees():
                h = homology_dim(c, k)
                if h:
                    bad.append((u, k, h))
        return bad

    def is_exact(self) -> bool:
        return not self.exactness_failures()


def _between(lo: Subspace, hi: Subspace) -> list[Subspace]:
    return [w for w in enumerate_subspaces(lo.n) if lo.is_subspace_of(w) and w.is_subspace_of(hi)]


def proj_resolution_simple(n: int, w: Subspace) -> FunctorComplex:
    """P_{k,W} = ⊕_{Z ⊇ W, dim Z/W = k} St(W,Z) ⊗ ℙ_Z, ending in S_W.

    Term k sits in cochain degree -k.
    """
    P = PosetView.W(n)
    V = Subspace.full(n)
    top = n - w.dim
    terms = []
    for k in range(top + 1):
        zs = [z for z in _between(w, V) if z.dim - w.dim == k]
        terms.append(SummandFunctor(P, [(z, _st(w, z), {i for i, u in enumerate(P.elements)
                                                         if z.is_subspace_of(u)}) for z in zs], check=False))
    diffs = []
    for k in range(top, 0, -1):
        src, dst = terms[k], terms[k - 1]
        blocks = {}
        for z2, _, _ in src.summands:
            for z, _, _ in dst.summands:
                if z.is_subspace_of(z2):
                    blocks[z, z2] = r_interval(w, z2, z)
        diffs.append(summand_morphism(src, dst, blocks))
    terms = terms[::-1]
    from .functors import simple_functor

    sw = simple_functor(P, w)
    eps = {}
    for i, u in enumerate(P.elements):
        eps[i] = GF2Matrix.identity(1) if u == w else GF2Matrix(sw.dims[i], terms[-1].dims[i])
    return FunctorComplex(terms, diffs, -top, ("right", sw, eps))


def inj_resolution_simple(n: int, z: Subspace) -> FunctorComplex:
    """I^{k,Z} = ⊕_{W ⊆ Z, dim Z/W = k} St*(W,Z) ⊗ 𝕀^W, starting from S_Z."""
    P = PosetView.W(n)
    top = z.dim
    terms = []
    for k in range(top + 1):
        ws = [w for w in _between(Subspace.zero(n), z) if z.dim - w.dim == k]
        terms.append(SummandFunctor(P, [(w, _st(w, z), {i for i, u in enumerate(P.elements)
                                                         if u.is_subspace_of(w)}) for w in ws], check=False))
    diffs = []
    for k in range(top):
        src, dst = terms[k], terms[k + 1]
        blocks = {}
        for w, _, _ in src.summands:
            for w2, _, _ in dst.summands:
                if w2.is_subspace_of(w):
                    blocks[w2, w] = s_interval(w2, z, w).T
        diffs.append(summand_morphism(src, dst, blocks))
    from .functors import simple_functor

    sz = simple_functor(P, z)
    eta = {}
    for i, u in enumerate(P.elements):
        eta[i] = GF2Matrix.identity(1) if u == z else GF2Matrix(terms[0].dims[i], sz.dims[i])
    return FunctorComplex(terms, diffs, 0, ("left", sz, eta))


# ------------------------------------------------------------ bicomplexes

@dataclass
class Bicomplex:
    """Bicomplex of F2-spaces; dh: (p,q) -> (p+1,q), dv: (p,q) -> (p,q+1)."""

    dims: dict
    dh: dict
    dv: dict

    def dim(self, p: int, q: int) -> int:
        return self.dims.get((p, q), 0)

    def h(self, p: int, q: int) -> GF2Matrix:
        return self.dh.get((p, q), GF2Matrix(self.dim(p + 1, q), self.dim(p, q)))

    def v(self, p: int, q: int) -> GF2Matrix:
        return self.dv.get((p, q), GF2Matrix(self.dim(p, q + 1), self.dim(p, q)))

    def check(self) -> None:
        for (p, q) in self.dims:
            if not (self.h(p + 1, q) @ self.h(p, q)).is_zero():
                raise InvariantError(f"d_h∘d_h != 0 at {(p, q)}")
            if not (self.v(p, q + 1) @ self.v(p, q)).is_zero():
                raise InvariantError(f"d_v∘d_v != 0 at {(p, q)}")
            if self.v(p + 1, q) @ self.h(p, q) != self.h(p, q + 1) @ self.v(p, q):
                raise InvariantError(f"square at {(p, q)} does not commute")

    def vertical_e1(self) -> tuple[dict, dict]:
        """E1 = vertical cohomology, with d1 induced by d_h: (dims, d1 ranks)."""
        dims, ranks = {}, {}
        for (p, q) in sorted(self.dims):
            z = kernel_basis(self.v(p, q))
            b = _image_rows(self.v(p, q - 1))
            dims[p, q] = z.rows - b.rows
            nb = _image_rows(self.v(p + 1, q - 1))
            img = apply_rows(self.h(p, q), z) if z.rows else GF2Matrix(0, self.dim(p + 1, q))
            ranks[p, q] = rank(vstack([img, nb], cols=self.dim(p + 1, q))) - nb.rows
        return dims, ranks


def _image_rows(d: GF2Matrix) -> GF2Matrix:
    if d.rows == 0 or d.cols == 0:
        return GF2Matrix(0, d.rows)
    return row_basis(d.T)


@dataclass
class FunctorBicomplex:
    grid: dict  # (p, q) -> SummandFunctor
    dh: dict  # (p, q) -> {element index: matrix}
    dv: dict

    def evaluate(self, i: int) -> Bicomplex:
        dims = {pq: f.dims[i] for pq, f in self.grid.items()}
        return Bicomplex(dims, {pq: m[i] for pq, m in self.dh.items()},
                         {pq: m[i] for pq, m in self.dv.items()})

    def check(self) -> None:
        P = next(iter(self.grid.values())).poset
        for i in range(len(P.elements)):
            self.evaluate(i).check()
        for maps, step in ((self.dh, (1, 0)), (self.dv, (0, 1))):
            for (p, q), d in maps.items():
                src, dst = self.grid[p, q], self.grid[p + step[0], q + step[1]]
                for i, j in P.cover_pairs():
                    if d[j] @ src.maps[i, j] != dst.maps[i, j] @ d[i]:
                        raise InvariantError("bicomplex differential is not natural")


def _pairs(n: int):
    subs = enumerate_subspaces(n)
    return [(w, z) for z in subs for w in subs if w.is_subspace_of(z)]


def bicomplex_I(f: PosetFunctor) -> FunctorBicomplex:
    """I^{p,q}F = ⊕ St*(W,Z) ⊗ F(Z) ⊗ 𝕀^W over codim W = p, codim Z = -q."""
    P = f.poset
    if P.kind != "W":
        raise ValueError("bicomplex_I needs a functor on 𝒲")
    n = P.n
    cells: dict = {}
    for w, z in _pairs(n):
        cells.setdefault((w.codim, -z.codim), []).append((w, z))
    down = {w: {i for i, u in enumerate(P.elements) if u.is_subspace_of(w)}
            for w in enumerate_subspaces(n)}
    grid = {}
    for pq, lst in cells.items():
        grid[pq] = SummandFunctor(P, [((w, z), _st(w, z) * f.dim(z), down[w]) for w, z in lst], check=False)
    dh, dv = {}, {}
    for (p, q), src in grid.items():
        if (p + 1, q) in grid:
            dst = grid[p + 1, q]
            blocks = {}
            for (w, z), _, _ in src.summands:
                for (w2, z2), _, _ in dst.summands:
                    if z2 == z and w2.is_subspace_of(w):
                        blocks[(w2, z), (w, z)] = kron(s_interval(w2, z, w).T, GF2Matrix.identity(f.dim(z)))
            dh[p, q] = summand_morphism(src, dst, blocks)
        if (p, q + 1) in grid:
            dst = grid[p, q + 1]
            blocks = {}
            for (w, z), _, _ in src.summands:
                for (w2, z2), _, _ in dst.summands:
                    if w2 == w and z.is_subspace_of(z2):
                        blocks[(w, z2), (w, z)] = kron(r_interval(w, z2, z).T, f.map(z, z2))
            dv[p, q] = summand_morphism(src, dst, blocks)
    bic = FunctorBicomplex(grid, dh, dv)
    bic.check()
    return bic


def tot_resolution(f: PosetFunctor) -> FunctorComplex:
    """Tot I••F with the augmentation η: F -> ⊕_W F(W) ⊗ 𝕀^W."""
    P = f.poset
    if P.kind != "W":
        raise ValueError("tot_resolution needs a functor on 𝒲")
    n = P.n
    down = {w: {i for i, u in enumerate(P.elements) if u.is_subspace_of(w)}
            for w in enumerate_subspaces(n)}
    terms = []
    for k in range(n + 1):
        lst = [(w, z) for w, z in _pairs(n) if z.dim - w.dim == k]
        terms.append(SummandFunctor(P, [((w, z), _st(w, z) * f.dim(z), down[w]) for w, z in lst], check=False))
    diffs = []
    for k in range(n):
        src, dst = terms[k], terms[k + 1]
        blocks = {}
        for (w, z), _, _ in src.summands:
            for (w2, z2), _, _ in dst.summands:
                if z2 == z and w2.is_subspace_of(w):
                    blocks[(w2, z), (w, z)] = kron(s_interval(w2, z, w).T, GF2Matrix.identity(f.dim(z)))
                elif w2 == w and z.is_subspace_of(z2):
                    blocks[(w, z2), (w, z)] = kron(r_interval(w, z2, z).T, f.map(z, z2))
        diffs.append(summand_morphism(src, dst, blocks))
    eta = {}
    t0 = terms[0]
    for i, u in enumerate(P.elements):
        blocks = []
        rows = []
        for t, off in t0.layout[i]:
            (w, _z), sz, _ = t0.summands[t]
            rows.append(sz)
            blocks.append((len(rows) - 1, 0, f.map(u, w)))
        eta[i] = assemble(rows, [f.dims[i]], blocks) if rows else GF2Matrix(0, f.dims[i])
    fc = FunctorComplex(terms, diffs, 0, ("left", f, eta))
    for i in range(len(P.elements)):
        fc.evaluate(i)  # asserts d∘d = 0 including the augmentation
    return fc


# ------------------------------------------------------------ Ext(S_0, -) and Oliver

def _st_complex(f: PosetFunctor, shift: int) -> CochainComplex:
    """⊕_{dim Z = k + shift} St*_Z ⊗ F(Z) with blocks r*_{Z',Z} ⊗ F(Z ⊆ Z')."""
    P = f.poset
    n = P.n
    zero = Subspace.zero(n)
    levels = []
    for k in range(n + 1 - shift):
        levels.append([z for z in P.elements if z.dim == k + shift])
    sizes = [[_st(zero, z) * f.dim(z) for z in lev] for lev in levels]
    diffs = []
    for k in range(len(levels) - 1):
        blocks = []
        for j, z in enumerate(levels[k]):
            for i, z2 in enumerate(levels[k + 1]):
                if z.is_subspace_of(z2):
                    blocks.append((i, j, kron(r_interval(zero, z2, z).T, f.map(z, z2))))
        diffs.append(assemble(sizes[k + 1], sizes[k], blocks))
    return CochainComplex([sum(s) for s in sizes], diffs, 0)


def C1_complex(f: PosetFunctor) -> CochainComplex:
    if f.poset.kind != "W":
        raise ValueError("C₁ needs a functor on 𝒲")
    return _st_complex(f, 0)


def ext_from_S0(f: PosetFunctor, k: int) -> Homology:
    """Ext^k(S_0, F) as H^k of C₁•F."""
    return C1_complex(f).homology(k)


def ext_dims(f: PosetFunctor) -> list[int]:
    c = C1_complex(f)
    return [homology_dim(c, k) for k in c.degrees()]


def oliver_complex(f: PosetFunctor) -> CochainComplex:
    """C^k = ⊕_{dim W = k+1} St*_W ⊗ F(W) for a functor on 𝒲₀."""
    if f.poset.kind != "W0":
        raise ValueError("the Oliver complex needs a functor on 𝒲₀")
    return _st_complex(f, 1)


def oliver_limits(f: PosetFunctor, k: int) -> int:
    return homology_dim(oliver_complex(f), k)


# ------------------------------------------------------------ Klim bridge

@dataclass
class Report:
    ok: bool
    data: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, **self.data, "failures": self.failures}


def klim_bridge(f: PosetFunctor) -> Report:
    """Compare lim^k over 𝒲₀ with Ext^{k+1}(S_0, F), and the k = 0 sequence."""
    P = f.poset
    if P.kind != "W":
        raise ValueError("klim_bridge needs a functor on 𝒲")
    n = P.n
    P0 = PosetView.W0(n)
    f0 = f.restrict(P0)
    lim = derived_limit_dims(f0) if len(P0) else []
    ext = ext_dims(f)
    failures = []
    for k in range(1, n + 1):
        lk = lim[k] if k < len(lim) else 0
        ek = ext[k + 1] if k + 1 < len(ext) else 0
        if lk != ek:
            failures.append({"k": k, "lim": lk, "ext_k_plus_1": ek})
    zero = Subspace.zero(n)
    i0 = P.index[zero]
    # ρ: F(0) -> L^0(F∘i), then the four-term sequence
    if len(P0):
        blocks = [(t, 0, f.map(zero, w)) for t, w in enumerate(P0.elements)]
        rho = assemble([f.dim(w) for w in P0.elements], [f.dims[i0]], blocks)
        L0 = L_complex(f0)
        if not (L0.diff(0) @ rho).is_zero():
            raise InvariantError("F(0) does not land in lim(F∘i)")
        r = rank(rho)
    else:
        r = 0
    lim0 = lim[0] if lim else 0
    ext0 = ext[0] if ext else 0
    ext1 = ext[1] if len(ext) > 1 else 0
    lines = [w for w in P.elements if w.dim == 1]
    if lines and f.dims[i0]:
        hom = kernel_basis(vstack([f.map(zero, w) for w in lines], cols=f.dims[i0])).rows
    else:
        hom = f.dims[i0]
    seq = {"hom_S0_F": hom, "F0": f.dims[i0], "rank_rho": r, "lim0": lim0, "ext0": ext0, "ext1": ext1}
    if hom != ext0 or f.dims[i0] - hom != r or lim0 - ext1 != r:
        failures.append({"k": 0, **seq})
    return Report(not failures, {"lim": lim, "ext": ext, "sequence": seq}, failures)


# ------------------------------------------------------------ B••F and E1

def B_bicomplex(f: PosetFunctor) -> Bicomplex:
    """B^{p,q}F = (I^{p,q}F)(0)."""
    bic = bicomplex_I(f)
    i0 = f.poset.index[Subspace.zero(f.poset.n)]
    return bic.evaluate(i0)


def filt2_e1(f: PosetFunctor) -> tuple[dict, dict]:
    """E1 of the filt₂ filtration on (Tot I••F)(0), from transition kernels."""
    P = f.poset
    n = P.n
    tot = tot_resolution(f)
    i0 = P.index[Subspace.zero(n)]
    c = tot.evaluate(i0, augmented=False)

    def filt(p: int, k: int) -> GF2Matrix:
        term = tot.terms[k]
        d = term.dims[i0]
        maps = [term.map_idx(i0, P.index[w]) for w in P.elements if w.codim < p]
        if not maps or d == 0:
            return GF2Matrix.identity(d)
        return row_basis(kernel_basis(vstack(maps, cols=d)))

    return filtered_e1(c, filt, 0, n)


def BE1_check(f: PosetFunctor) -> Report:
    B = B_bicomplex(f)
    vdims, vranks = B.vertical_e1()
    fdims, franks = filt2_e1(f)
    keys = sorted(set(vdims) | set(fdims))
    failures = []
    for key in keys:
        a, b = vdims.get(key, 0), fdims.get(key, 0)
        ra, rb = vranks.get(key, 0), franks.get(key, 0)
        if a != b or ra != rb:
            failures.append({"p": key[0], "q": key[1], "vertical": [a, ra], "filt2": [b, rb]})
    data = {
        "e1": {f"{p},{q}": vdims.get((p, q), 0) for p, q in keys if vdims.get((p, q), 0) or fdims.get((p, q), 0)},
        "d1_ranks": {f"{p},{q}": vranks.get((p, q), 0) for p, q in keys if vranks.get((p, q), 0)},
    }
    return Report(not failures, data, failures)


def cross_check_oliver(f: PosetFunctor) -> Report:
    """Oliver cohomology against L• cohomology, every degree."""
    L = derived_limit_dims(f)
    O = [oliver_limits(f, k) for k in range(max(len(L), f.poset.n))]
    L = L + [0] * (len(O) - len(L))
    failures = [{"k": k, "L": a, "oliver": b} for k, (a, b) in enumerate(zip(L, O)) if a != b]
    return Report(not failures, {"L": L, "oliver": O}, failures)


def require(report: Report, what: str) -> Report:
    if not report.ok:
        raise OracleMismatch(f"{what}: {report.failures}")
    return report
