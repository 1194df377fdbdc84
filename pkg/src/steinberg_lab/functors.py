"""Functors from subspace posets to finite F2-spaces and their derived limits.

A functor stores one matrix per covering pair; longer transitions are
composed along the lexicographically least saturated chain.  Derived limits
are the cohomology of L•(F), whose k-th term is the sum over k-simplices σ of
F(sup σ) and whose coboundary has the block F(sup σ -> sup τ) for each face
σ ⊂ τ.  No signs are needed over F2.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import InvariantError
from .gf2 import (CochainComplex, GF2Matrix, Homology, assemble, kernel_basis,
                  row_basis, solve_linear_system, vstack)
from .lattice import PosetView, Subspace, canonical_rows, poset_from_label, subspace_sum


class PosetFunctor:
    """Covariant functor on a :class:`PosetView`."""

    def __init__(self, poset: PosetView, dims, maps: Mapping | None = None, check: bool = True):
        self.poset = poset
        if isinstance(dims, Mapping):
            self.dims = [int(dims.get(w, 0)) for w in poset.elements]
        else:
            self.dims = [int(d) for d in dims]
        if len(self.dims) != len(poset.elements) or min(self.dims, default=0) < 0:
            raise ValueError("dims must give a non-negative size per element")
        self.maps: dict[tuple[int, int], GF2Matrix] = {}
        maps = dict(maps or {})
        for (a, b), m in maps.items():
            i = a if isinstance(a, int) else poset.index[a]
            j = b if isinstance(b, int) else poset.index[b]
            if j not in poset.covers[i]:
                raise ValueError(f"{poset.elements[i]!r} -> {poset.elements[j]!r} is not a covering pair")
            if m.shape != (self.dims[j], self.dims[i]):
                raise ValueError(f"map {poset.elements[i]!r} -> {poset.elements[j]!r} has shape "
                                 f"{m.shape}, expected {(self.dims[j], self.dims[i])}")
            self.maps[i, j] = m
        for i, j in poset.cover_pairs():
            if (i, j) not in self.maps:
                self.maps[i, j] = GF2Matrix(self.dims[j], self.dims[i])
        self._composite: dict[tuple[int, int], GF2Matrix] = {}
        if check:
            self.check_functoriality()

    # -- access
    def dim(self, w: Subspace) -> int:
        return self.dims[self.poset.index[w]]

    def map_idx(self, i: int, j: int) -> GF2Matrix:
        """Transition for elements i <= j (by index)."""
        if i == j:
            return GF2Matrix.identity(self.dims[i])
        key = (i, j)
        if key in self._composite:
            return self._composite[key]
        if (i, j) in self.maps:
            m = self.maps[i, j]
        else:
            if not self.poset.leq(i, j):
                raise ValueError("transition requested between incomparable elements")
            # first cover of i below j, in index order
            nxt = next(c for c in self.poset.covers[i] if self.poset.leq(c, j))
            m = self.map_idx(nxt, j) @ self.maps[i, nxt]
        self._composite[key] = m
        return m

    def map(self, u: Subspace, w: Subspace) -> GF2Matrix:
        return self.map_idx(self.poset.index[u], self.poset.index[w])

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PosetFunctor):
            return NotImplemented
        return (self.poset == other.poset and self.dims == other.dims
                and all(self.maps[k] == other.maps[k] for k in self.maps))

    __hash__ = None

    def __repr__(self) -> str:
        return f"PosetFunctor({self.poset.label}, n={self.poset.n}, dims={self.dims})"

    # -- invariants
    def check_functoriality(self, exhaustive: bool = False) -> None:
        """Compare composites along saturated chains.

        By default every length-two interval is checked (all middles agree),
        which implies agreement along all saturated chains in these graded
        lattices; ``exhaustive`` enumerates every saturated chain instead.
        """
        P = self.poset
        for i in range(len(P.elements)):
            for j in P.above[i]:
                if P.elements[j].dim - P.elements[i].dim != 2 and not exhaustive:
                    continue
                comps = []
                for path in _saturated_paths(P, i, j):
                    m = GF2Matrix.identity(self.dims[i])
                    for a, b in zip(path, path[1:]):
                        m = self.maps[a, b] @ m
                    comps.append((path, m))
                for path, m in comps[1:]:
                    if m != comps[0][1]:
                        raise InvariantError(
                            "functoriality fails: "
                            f"{[P.elements[t] for t in comps[0][0]]} vs {[P.elements[t] for t in path]}")

    # -- constructions
    def restrict(self, sub: PosetView) -> "PosetFunctor":
        idx = [self.poset.index[w] for w in sub.elements]
        dims = [self.dims[i] for i in idx]
        maps = {(a, b): self.maps[idx[a], idx[b]] for a, b in sub.cover_pairs()}
        return PosetFunctor(sub, dims, maps, check=False)

    def compose(self, phi: Callable[[Subspace], Subspace]) -> "PosetFunctor":
        """F∘φ for an order automorphism φ of the poset."""
        P = self.poset
        img = [P.index[phi(w)] for w in P.elements]
        dims = [self.dims[img[i]] for i in range(len(img))]
        maps = {(i, j): self.map_idx(img[i], img[j]) for i, j in P.cover_pairs()}
        return PosetFunctor(P, dims, maps, check=False)

    def to_json(self) -> dict:
        P = self.poset
        return {
            "poset": P.label,
            "n": P.n,
            "dims": {json_key(w): d for w, d in zip(P.elements, self.dims)},
            "maps": {f"{json_key(P.elements[i])}<{json_key(P.elements[j])}": m.to_dense().tolist()
                     for (i, j), m in sorted(self.maps.items()) if m.rows and m.cols},
        }


def _saturated_paths(P: PosetView, i: int, j: int) -> list[list[int]]:
    if i == j:
        return [[i]]
    out = []
    for c in P.covers[i]:
        if P.leq(c, j):
            out += [[i] + rest for rest in _saturated_paths(P, c, j)]
    return out


def json_key(w: Subspace) -> str:
    return json.dumps(w.to_json(), separators=(",", ":"))


def parse_key(key: str, n: int) -> Subspace:
    key = key.strip()
    try:
        if key.startswith("{"):
            w = Subspace.from_json(json.loads(key))
        else:
            w = Subspace.from_key(key)
    except (ValueError, json.JSONDecodeError) as exc:
        raise ValueError(f"malformed subspace key {key!r}: {exc}") from exc
    if w.n != n:
        raise ValueError(f"subspace key {key!r} lives in dimension {w.n}, expected {n}")
    return w


def functor_from_json(obj) -> PosetFunctor:
    """Parse the JSON functor format; errors name the offending field."""
    if not isinstance(obj, dict):
        raise ValueError("functor file must hold a JSON object")
    for fld in ("poset", "n", "dims"):
        if fld not in obj:
            raise ValueError(f"missing field '{fld}'")
    if not isinstance(obj["n"], int) or obj["n"] < 0:
        raise ValueError("field 'n' must be a non-negative integer")
    n = obj["n"]
    P = poset_from_label(str(obj["poset"]), n)
    dims = {}
    if not isinstance(obj["dims"], dict):
        raise ValueError("field 'dims' must be an object")
    for key, d in obj["dims"].items():
        w = parse_key(key, n)
        if w not in P:
            raise ValueError(f"dims: {key} is not an element of {P.label}")
        if not isinstance(d, int) or d < 0:
            raise ValueError(f"dims: value for {key} must be a non-negative integer")
        dims[w] = d
    maps = {}
    raw = obj.get("maps", {})
    if not isinstance(raw, dict):
        raise ValueError("field 'maps' must be an object")
    for key, rows in raw.items():
        if key.count("<") != 1:
            raise ValueError(f"maps: key {key!r} must have the form 'U<U2'")
        a, b = (parse_key(t, n) for t in key.split("<"))
        if a not in P or b not in P:
            raise ValueError(f"maps: {key} names an element outside {P.label}")
        i, j = P.index[a], P.index[b]
        if j not in P.covers[i]:
            raise ValueError(f"maps: {key} is not a covering pair")
        try:
            arr = np.asarray(rows, dtype=np.int64).reshape(dims.get(b, 0), dims.get(a, 0))
        except ValueError as exc:
            raise ValueError(f"maps: {key} has the wrong shape") from exc
        if ((arr != 0) & (arr != 1)).any():
            raise ValueError(f"maps: {key} entries must be 0 or 1")
        maps[i, j] = GF2Matrix.from_dense(arr) if arr.size else GF2Matrix(*arr.shape)
    dim_list = [dims.get(w, 0) for w in P.elements]
    for i, j in P.cover_pairs():
        if (i, j) not in maps and dim_list[i] and dim_list[j]:
            raise ValueError(f"maps: missing map {json_key(P.elements[i])}<{json_key(P.elements[j])} "
                             "between nonzero spaces")
    return PosetFunctor(P, dim_list, maps, check=False)


# ------------------------------------------------------------ standard functors

class SummandFunctor(PosetFunctor):
    """Direct sum of constant spaces each supported on a set of elements.

    Transitions are identity blocks on summands supported at both ends.
    With upward-closed supports this is a sum of projectives ℙ_Z ⊗ E, with
    downward-closed supports a sum of injectives 𝕀^W ⊗ E.
    """

    def __init__(self, poset: PosetView, summands: list, check: bool = True):
        # summands: list of (label, size, support) with support a set of indices
        self.summands = [(lab, int(sz), frozenset(sup)) for lab, sz, sup in summands]
        self.labels = {lab: t for t, (lab, _, _) in enumerate(self.summands)}
        self.layout = []  # per element: list of (summand number, offset)
        dims = []
        for i in range(len(poset.elements)):
            off, lay = 0, []
            for t, (_, sz, sup) in enumerate(self.summands):
                if i in sup:
                    lay.append((t, off))
                    off += sz
            self.layout.append(lay)
            dims.append(off)
        maps = {}
        for i, j in poset.cover_pairs():
            dense = np.zeros((dims[j], dims[i]), dtype=np.uint8)
            tgt = dict(self.layout[j])
            for t, off in self.layout[i]:
                if t in tgt:
                    sz = self.summands[t][1]
                    dense[tgt[t]:tgt[t] + sz, off:off + sz] = np.eye(sz, dtype=np.uint8)
            maps[i, j] = GF2Matrix.from_dense(dense) if dense.size else GF2Matrix(*dense.shape)
        super().__init__(poset, dims, maps, check=check)

    def offset(self, i: int, label) -> int | None:
        t = self.labels[label]
        for s, off in self.layout[i]:
            if s == t:
                return off
        return None


def summand_morphism(src: SummandFunctor, dst: SummandFunctor, blocks: Mapping) -> dict:
    """Natural transformation given by constant blocks ``{(dst_label, src_label): M}``.

    At an element the block acts wherever both summands are supported.
    Returns a matrix per element index.
    """
    P = src.poset
    out = {}
    for i in range(len(P.elements)):
        dense = np.zeros((dst.dims[i], src.dims[i]), dtype=np.uint8)
        for (dl, sl), m in blocks.items():
            so, do = src.offset(i, sl), dst.offset(i, dl)
            if so is None or do is None or not (m.rows and m.cols):
                continue
            dense[do:do + m.rows, so:so + m.cols] ^= m.to_dense()
        out[i] = GF2Matrix.from_dense(dense) if dense.size else GF2Matrix(*dense.shape)
    return out


def _support(poset: PosetView, pred) -> set:
    return {i for i, u in enumerate(poset.elements) if pred(u)}


def constant_functor(poset: PosetView, dim: int = 1) -> SummandFunctor:
    return SummandFunctor(poset, [("E", dim, set(range(len(poset.elements))))])


def simple_functor(poset: PosetView, w: Subspace) -> SummandFunctor:
    _require(poset, w)
    return SummandFunctor(poset, [(w, 1, {poset.index[w]})])


def projective_functor(poset: PosetView, w: Subspace, dim: int = 1) -> SummandFunctor:
    """ℙ_W: F2 on every U ⊇ W."""
    _require(poset, w)
    return SummandFunctor(poset, [(w, dim, _support(poset, lambda u: w.is_subspace_of(u)))])


def injective_functor(poset: PosetView, w: Subspace, dim: int = 1) -> SummandFunctor:
    """𝕀^W: F2 on every U ⊆ W."""
    _require(poset, w)
    return SummandFunctor(poset, [(w, dim, _support(poset, lambda u: u.is_subspace_of(w)))])


def co_induced_functor(poset: PosetView, gamma: Subspace, dim: int = 1) -> SummandFunctor:
    """J^{Hom(-, γ)} with values E^{Hom(U, γ)}: E on U ≤ γ, zero elsewhere."""
    return injective_functor(poset, gamma, dim)


def make_standard_functor(kind: str, poset: PosetView, w: Subspace | None = None, dim: int = 1) -> SummandFunctor:
    kinds = {
        "constant": lambda: constant_functor(poset, dim),
        "simple": lambda: simple_functor(poset, w),
        "projective": lambda: projective_functor(poset, w, dim),
        "injective": lambda: injective_functor(poset, w, dim),
        "co-induced": lambda: co_induced_functor(poset, w, dim),
    }
    if kind not in kinds:
        raise ValueError(f"unknown functor kind {kind!r}")
    if kind != "constant" and w is None:
        raise ValueError(f"{kind} functor needs a subspace")
    return kinds[kind]()


def _require(poset: PosetView, w: Subspace) -> None:
    if w not in poset:
        raise ValueError(f"{w!r} is not an element of {poset.label}")


def direct_sum(*fs: PosetFunctor) -> PosetFunctor:
    P = fs[0].poset
    if any(f.poset != P for f in fs):
        raise ValueError("direct sum over different posets")
    dims = [sum(f.dims[i] for f in fs) for i in range(len(P.elements))]
    maps = {}
    for i, j in P.cover_pairs():
        blocks = [(t, t, f.maps[i, j]) for t, f in enumerate(fs)]
        maps[i, j] = assemble([f.dims[j] for f in fs], [f.dims[i] for f in fs], blocks)
    return PosetFunctor(P, dims, maps, check=False)


def random_functor(poset: PosetView, rng: np.random.Generator, max_ambient: int = 3) -> PosetFunctor:
    """A random subquotient (A(U) + K(U)) / K(U) of a constant space.

    A and K are increasing families, so the induced maps form a functor.
    """
    m = int(rng.integers(1, max_ambient + 1))
    P = poset
    N = len(P.elements)

    def increasing(p_new: float) -> list[tuple[int, ...]]:
        seeds = [tuple(int(rng.integers(1, 1 << m)) for _ in range(int(rng.random() < p_new)))
                 for _ in range(N)]
        fam = []
        for i in range(N):
            vecs = [v for j in range(N) if P.leq(j, i) for v in seeds[j]]
            fam.append(canonical_rows(vecs))
        return fam

    A = increasing(0.45)
    Kf = increasing(0.25)
    reps: list[GF2Matrix] = []
    for i in range(N):
        chosen = []
        cur = list(Kf[i])
        for v in A[i]:
            if len(canonical_rows(cur + [v])) > len(canonical_rows(cur)):
                chosen.append(v)
                cur.append(v)
        reps.append(GF2Matrix.from_int_rows(chosen, m))
    maps = {}
    for i, j in P.cover_pairs():
        tgt = vstack([reps[j], GF2Matrix.from_int_rows(Kf[j], m)], cols=m)
        if reps[i].rows == 0 or reps[j].rows == 0:
            maps[i, j] = GF2Matrix(reps[j].rows, reps[i].rows)
            continue
        sol = solve_linear_system(tgt.T, reps[i].T)
        if not sol.consistent:
            raise InvariantError("random functor construction left the ambient span")
        maps[i, j] = sol.particular.take_rows(range(reps[j].rows))
    return PosetFunctor(P, [r.rows for r in reps], maps, check=True)


# ------------------------------------------------------------ L•(F) and limits

def simplex_layout(f: PosetFunctor, k: int) -> tuple[list, list[int]]:
    """k-simplices (index tuples) and the size F(sup σ) of each block."""
    simp = f.poset.chain_indices(k)
    return simp, [f.dims[s[-1]] for s in simp]


def L_complex(f: PosetFunctor) -> CochainComplex:
    P = f.poset
    top = P.max_chain_length()
    layouts = [simplex_layout(f, k) for k in range(top)]
    dims = [sum(sz) for _, sz in layouts]
    diffs = []
    for k in range(top - 1):
        src, ssz = layouts[k]
        dst, dsz = layouts[k + 1]
        sidx = {s: t for t, s in enumerate(src)}
        blocks = []
        for r, tau in enumerate(dst):
            for pos in range(len(tau)):
                sigma = tau[:pos] + tau[pos + 1:]
                c = sidx[sigma]
                if pos == len(tau) - 1:
                    blk = f.map_idx(tau[-2], tau[-1])
                else:
                    blk = GF2Matrix.identity(f.dims[tau[-1]])
                blocks.append((r, c, blk))
        diffs.append(assemble(dsz, ssz, blocks))
    return CochainComplex(dims, diffs, 0)


def derived_limit(f: PosetFunctor, k: int) -> Homology:
    """lim^k F as the cohomology of L•(F); has ``dim`` and ``basis``."""
    return L_complex(f).homology(k)


def derived_limit_dims(f: PosetFunctor) -> list[int]:
    c = L_complex(f)
    return [c.homology(k).dim for k in c.degrees()] if c.dims else []


# ------------------------------------------------------------ λ_φ

@dataclass
class CochainMap:
    source: CochainComplex
    target: CochainComplex
    components: list  # degree k -> GF2Matrix
    target_functor: PosetFunctor | None = None

    def check(self) -> None:
        for k in range(len(self.components) - 1):
            lhs = self.components[k + 1] @ self.source.diff(k)
            rhs = self.target.diff(k) @ self.components[k]
            if lhs != rhs:
                raise InvariantError(f"cochain map does not commute at degree {k}")

    def on_cohomology(self, k: int) -> GF2Matrix:
        hs, ht = self.source.homology(k), self.target.homology(k)
        if hs.dim == 0:
            return GF2Matrix(ht.dim, 0)
        reps = hs.lift(GF2Matrix.identity(hs.dim))
        return ht.coordinates(reps @ self.components[k].T)


def _check_automorphism(P: PosetView, phi) -> list[int]:
    img = []
    for w in P.elements:
        u = phi(w)
        if u not in P:
            raise ValueError(f"φ sends {w!r} outside the poset")
        img.append(P.index[u])
    if sorted(img) != list(range(len(img))):
        raise ValueError("φ is not a bijection")
    for i in range(len(img)):
        for j in range(len(img)):
            if P.leq(i, j) != P.leq(img[i], img[j]):
                raise ValueError("φ is not an order automorphism")
    return img


def lambda_phi(f: PosetFunctor, phi) -> CochainMap:
    """λ_φ: L•(F) -> L•(F∘φ) with (λ x)_σ = x_{φσ}."""
    P = f.poset
    if isinstance(phi, Mapping):
        table = dict(phi)
        phi = table.__getitem__
    img = _check_automorphism(P, phi)
    g = f.compose(phi)
    Lf, Lg = L_complex(f), L_complex(g)
    comps = []
    for k in range(len(Lf.dims)):
        simp, fsz = simplex_layout(f, k)
        sidx = {s: t for t, s in enumerate(simp)}
        gsz = [g.dims[s[-1]] for s in simp]
        blocks = []
        for r, s in enumerate(simp):
            ps = tuple(img[i] for i in s)
            blocks.append((r, sidx[ps], GF2Matrix.identity(gsz[r])))
        comps.append(assemble(gsz, fsz, blocks))
    cm = CochainMap(Lf, Lg, comps, g)
    cm.check()
    return cm


# ------------------------------------------------------------ filtrations

@dataclass
class SubFunctor:
    functor: PosetFunctor
    inclusion: dict  # element index -> GF2Matrix of shape (dim F(U), dim sub(U))


def _subfunctor(f: PosetFunctor, bases: list[GF2Matrix]) -> SubFunctor:
    P = f.poset
    maps = {}
    for i, j in P.cover_pairs():
        src, dst = bases[i], bases[j]
        if src.rows == 0 or dst.rows == 0:
            if src.rows and not (f.maps[i, j] @ src.T).is_zero():
                raise InvariantError("filtration is not a sub-functor")
            maps[i, j] = GF2Matrix(dst.rows, src.rows)
            continue
        img = f.maps[i, j] @ src.T
        sol = solve_linear_system(dst.T, img)
        if not sol.consistent:
            raise InvariantError("filtration is not a sub-functor")
        maps[i, j] = sol.particular
    sub = PosetFunctor(P, [b.rows for b in bases], maps, check=False)
    return SubFunctor(sub, {i: b.T for i, b in enumerate(bases)})


def filtrations(f: PosetFunctor, p: int, which: str) -> SubFunctor:
    """filt₁^p or filt₂^p of a functor on 𝒲 as a verified sub-functor."""
    P = f.poset
    if P.kind != "W":
        raise ValueError("filtrations are defined on the full lattice 𝒲")
    bases = []
    for i, u in enumerate(P.elements):
        d = f.dims[i]
        if which == "filt1":
            bases.append(GF2Matrix.identity(d) if u.dim >= p else GF2Matrix(0, d))
        elif which == "filt2":
            maps = [f.map(u, subspace_sum(u, w)) for w in P.elements if w.codim < p]
            if not maps or d == 0:
                bases.append(GF2Matrix.identity(d))
            else:
                bases.append(row_basis(kernel_basis(vstack(maps, cols=d))))
        else:
            raise ValueError("which must be 'filt1' or 'filt2'")
    return _subfunctor(f, bases)
