"""Subspaces of F2^n, the posets built from them, and GL_n(F2).

A vector of F2^n is an int whose bit i is the i-th coordinate.  A subspace is
stored by its reduced echelon basis, pivots being the lowest set bits, rows
sorted by pivot; that encoding is canonical so equality and hashing are
structural.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import CapError
from .gf2 import GF2Matrix, kernel_basis

MAX_N = 6


def _lowbit(v: int) -> int:
    return (v & -v).bit_length() - 1


def canonical_rows(vectors: Iterable[int]) -> tuple[int, ...]:
    """Reduced echelon basis (lowest-bit pivots, increasing) of a span."""
    basis: dict[int, int] = {}
    for v in vectors:
        v = int(v)
        for p, row in basis.items():
            if (v >> p) & 1:
                v ^= row
        if v == 0:
            continue
        p = _lowbit(v)
        for q in list(basis):
            if (basis[q] >> p) & 1:
                basis[q] ^= v
        basis[p] = v
    return tuple(basis[p] for p in sorted(basis))


@dataclass(frozen=True)
class Subspace:
    n: int
    rows: tuple[int, ...]

    @classmethod
    def span(cls, n: int, vectors: Iterable[int]) -> "Subspace":
        vectors = list(vectors)
        for v in vectors:
            if v < 0 or v >> n:
                raise ValueError(f"vector {v:b} does not live in F2^{n}")
        return cls(n, canonical_rows(vectors))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_json(cls, obj) -> "Subspace":
        if not isinstance(obj, dict) or "n" not in obj or "rows" not in obj:
            raise ValueError("subspace must be an object with fields 'n' and 'rows'")
        n = int(obj["n"])
        rows = tuple(int(r) for r in obj["rows"])
        w = cls.span(n, rows)
        if w.rows != rows:
            raise ValueError(f"rows {list(rows)} are not in canonical reduced form")
        return w

    def to_json(self) -> dict:
        return {"n": self.n, "rows": list(self.rows)}

    @property
    def key(self) -> str:
        """Compact text key, e.g. ``3:[1,6]``."""
        return f"{self.n}:[{','.join(str(r) for r in self.rows)}]"

    @classmethod
    def from_key(cls, key: str) -> "Subspace":
        try:
            n_s, rows_s = key.split(":", 1)
            rows_s = rows_s.strip()
            assert rows_s[0] == "[" and rows_s[-1] == "]"
            inner = rows_s[1:-1].strip()
            rows = [int(t) for t in inner.split(",")] if inner else []
        except Exception as exc:  # noqa: BLE001
            raise ValueError(f"malformed subspace key {key!r}") from exc
        return cls.from_json({"n": int(n_s), "rows": rows})

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def codim(self) -> int:
        return self.n - len(self.rows)

    @property
    def sort_key(self) -> tuple:
        return (len(self.rows), self.rows)

    def contains_vector(self, v: int) -> bool:
        for row in self.rows:
            if (v >> _lowbit(row)) & 1:
                v ^= row
        return v == 0

    def is_subspace_of(self, other: "Subspace") -> bool:
        _same_ambient(self, other)
        return all(other.contains_vector(r) for r in self.rows)

    def vectors(self) -> list[int]:
        out = [0]
        for r in self.rows:
            out += [v ^ r for v in out]
        return sorted(out)

    def matrix(self) -> GF2Matrix:
        return GF2Matrix.from_int_rows(self.rows, self.n)

    def __repr__(self) -> str:
        body = ",".join(format(r, f"0{self.n}b")[::-1] for r in self.rows)
        return f"<{body}>" if self.rows else "<0>"


def _same_ambient(a: Subspace, b: Subspace) -> None:
    if a.n != b.n:
        raise ValueError(f"ambient dimensions differ: {a.n} vs {b.n}")


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    return Subspace(a.n, canonical_rows(a.rows + b.rows))


def subspace_intersection(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    if not a.rows or not b.rows:
        return Subspace.zero(a.n)
    # (x, y) with x A + y B = 0 gives x A in both spans
    stacked = GF2Matrix.from_int_rows(a.rows + b.rows, a.n)
    ker = kernel_basis(stacked.T)
    vecs = []
    for row in ker.int_rows():
        v = 0
        for i, r in enumerate(a.rows):
            if (row >> i) & 1:
                v ^= r
        vecs.append(v)
    return Subspace(a.n, canonical_rows(vecs))


def lattice_ops(a: Subspace, b: Subspace) -> tuple[Subspace, Subspace, bool]:
    """(a + b, a ∩ b, a ⊆ b)."""
    return subspace_sum(a, b), subspace_intersection(a, b), a.is_subspace_of(b)


@lru_cache(maxsize=None)
def _all_subspaces(n: int) -> tuple[Subspace, ...]:
    out = []
    for k in range(n + 1):
        for piv in itertools.combinations(range(n), k):
            pivset = set(piv)
            slots = []  # per row, the free positions above its pivot
            for p in piv:
                slots.append([j for j in range(p + 1, n) if j not in pivset])
            total = sum(len(s) for s in slots)
            for bits in range(1 << total):
                rows, t = [], 0
                for p, s in zip(piv, slots):
                    r = 1 << p
                    for j in s:
                        if (bits >> t) & 1:
                            r |= 1 << j
                        t += 1
                    rows.append(r)
                out.append(Subspace(n, tuple(rows)))
    out.sort(key=lambda w: w.sort_key)
    return tuple(out)


def enumerate_subspaces(n: int, dim: int | None = None) -> list[Subspace]:
    """All subspaces of F2^n (optionally of one dimension), sorted."""
    if n < 0 or n > MAX_N:
        raise CapError(f"n = {n} outside 0..{MAX_N}")
    subs = _all_subspaces(n)
    if dim is None:
        return list(subs)
    return [w for w in subs if w.dim == dim]


def gaussian_binomial(n: int, k: int, q: int = 2) -> int:
    if k < 0 or k > n:
        return 0
    num, den = 1, 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def quotient_chart(n: int, w: Subspace) -> tuple[GF2Matrix, GF2Matrix]:
    """Coordinates on F2^n / W.

    The complement of W is spanned by standard vectors picked greedily in
    index order.  Returns ``(proj, section)`` with proj of shape (n - dim W, n),
    section of shape (n, n - dim W), proj @ section = id and ker proj = W.
    """
    if w.n != n:
        raise ValueError("ambient mismatch")
    comp: list[int] = []
    span = list(w.rows)
    for i in range(n):
        e = 1 << i
        if not Subspace(n, canonical_rows(span)).contains_vector(e):
            comp.append(i)
            span.append(e)
    m = len(comp)
    # express each e_j in the basis (rows of W, then e_comp) and keep the
    # complement coordinates
    basis = list(w.rows) + [1 << i for i in comp]
    B = GF2Matrix.from_int_rows(basis, n).T  # columns are basis vectors
    from .gf2 import solve_linear_system

    sol = solve_linear_system(B, GF2Matrix.identity(n))
    coords = sol.particular  # (dim W + m) x n
    proj = coords.take_rows(range(w.dim, w.dim + m))
    section = GF2Matrix.from_int_rows([1 << i for i in comp], n).T if m else GF2Matrix(n, 0)
    return proj, section


def project_subspace(proj: GF2Matrix, u: Subspace) -> Subspace:
    """Image of ``u`` under a linear map given as a matrix on columns."""
    m = proj.rows
    if not u.rows:
        return Subspace.zero(m)
    img = (proj @ u.matrix().T).T
    return Subspace(m, canonical_rows(img.int_rows()))


# ------------------------------------------------------------ GL_n(F2)

def _parity(v: int) -> int:
    return bin(v).count("1") & 1


@dataclass(frozen=True)
class GLElement:
    """Invertible matrix; ``rows[i]`` is row i as a bitmask."""

    n: int
    rows: tuple[int, ...]

    def apply(self, v: int) -> int:
        out = 0
        for i, r in enumerate(self.rows):
            if _parity(r & v):
                out |= 1 << i
        return out

    def __mul__(self, other: "GLElement") -> "GLElement":
        # (g h)_i = sum_j g_ij h_j
        rows = []
        for r in self.rows:
            acc = 0
            for j in range(self.n):
                if (r >> j) & 1:
                    acc ^= other.rows[j]
            rows.append(acc)
        return GLElement(self.n, tuple(rows))

    def inverse(self) -> "GLElement":
        cols = [self.apply(1 << j) for j in range(self.n)]
        # invert by solving g x = e_i through the column images
        table = {}
        for bits in range(1 << self.n):
            v = 0
            for j in range(self.n):
                if (bits >> j) & 1:
                    v ^= cols[j]
            table[v] = bits
        inv_cols = [table[1 << i] for i in range(self.n)]
        rows = []
        for i in range(self.n):
            rows.append(sum(((c >> i) & 1) << j for j, c in enumerate(inv_cols)))
        return GLElement(self.n, tuple(rows))

    def matrix(self) -> GF2Matrix:
        return GF2Matrix.from_int_rows(self.rows, self.n)

    @classmethod
    def identity(cls, n: int) -> "GLElement":
        return cls(n, tuple(1 << i for i in range(n)))


def act(g: GLElement, w: Subspace) -> Subspace:
    """g·W, the span of g applied to the rows of W."""
    if g.n != w.n:
        raise ValueError("ambient mismatch")
    return Subspace(w.n, canonical_rows(g.apply(r) for r in w.rows))


def _is_invertible(n: int, rows: Sequence[int]) -> bool:
    return len(canonical_rows(rows)) == n


@lru_cache(maxsize=None)
def _full_gl(n: int) -> tuple[GLElement, ...]:
    out = []
    for rows in itertools.product(range(1, 1 << n), repeat=n):
        if _is_invertible(n, rows):
            out.append(GLElement(n, tuple(rows)))
    return tuple(out)


def gl_generators(n: int) -> list[GLElement]:
    """A transvection and the cyclic shift of coordinates; they generate GL_n(F2)."""
    if n <= 1:
        return [GLElement.identity(n)]
    t = list(GLElement.identity(n).rows)
    t[0] |= 1 << 1  # x_0 -> x_0 + x_1
    shift = tuple(1 << ((i + 1) % n) for i in range(n))
    return [GLElement(n, tuple(t)), GLElement(n, shift)]


def enumerate_GL(n: int, full: bool = False) -> list[GLElement]:
    """All of GL_n(F2) for n <= 3; for n = 4 the generators unless ``full``."""
    if n <= 3 or (full and n <= 4):
        return list(_full_gl(n))
    if n == 4:
        return gl_generators(4)
    raise CapError(f"GL_{n}(F2) enumeration is capped at n = 4")


# ------------------------------------------------------------ posets

@dataclass(eq=False)
class PosetView:
    """A finite poset of subspaces ordered by inclusion."""

    kind: str
    n: int
    elements: tuple[Subspace, ...]
    params: tuple = ()
    index: dict = field(init=False, repr=False)
    above: list = field(init=False, repr=False)
    covers: list = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.elements)}
        self.above = []
        self.covers = []
        for i, a in enumerate(self.elements):
            up = [j for j, b in enumerate(self.elements)
                  if b.dim > a.dim and a.is_subspace_of(b)]
            self.above.append(up)
            self.covers.append([j for j in up if self.elements[j].dim == a.dim + 1])
        self._chains: dict[int, list[tuple[int, ...]]] = {}

    # -- named constructions
    @classmethod
    def W(cls, n: int) -> "PosetView":
        return _named("W", n, ())

    @classmethod
    def W0(cls, n: int) -> "PosetView":
        return _named("W0", n, ())

    @classmethod
    def B(cls, n: int, d: int, c: int) -> "PosetView":
        return _named("B", n, (d, c))

    @classmethod
    def interval(cls, lo: Subspace, hi: Subspace) -> "PosetView":
        """Open interval {U : lo < U < hi}."""
        return _interval(lo, hi)

    @property
    def label(self) -> str:
        if self.kind == "B":
            return f"B({self.params[0]},{self.params[1]})"
        if self.kind == "interval":
            return f"({self.params[0].key},{self.params[1].key})"
        return self.kind

    def __eq__(self, other) -> bool:
        return isinstance(other, PosetView) and (self.kind, self.n, self.params) == (other.kind, other.n, other.params)

    def __hash__(self) -> int:
        return hash((self.kind, self.n, self.params))

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, w: Subspace) -> bool:
        return w in self.index

    def leq(self, i: int, j: int) -> bool:
        return i == j or j in self.above[i]

    def cover_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(len(self.elements)) for j in self.covers[i]]

    def chain_indices(self, k: int) -> list[tuple[int, ...]]:
        """k-simplices as increasing index tuples, sorted lexicographically."""
        if k < 0:
            return []
        if k not in self._chains:
            if k == 0:
                res = [(i,) for i in range(len(self.elements))]
            else:
                res = [c + (j,) for c in self.chain_indices(k - 1) for j in self.above[c[-1]]]
                res.sort()
            self._chains[k] = res
        return self._chains[k]

    def max_chain_length(self) -> int:
        k = 0
        while self.chain_indices(k):
            k += 1
        return k  # number of elements in a longest chain


@lru_cache(maxsize=None)
def _named(kind: str, n: int, params: tuple) -> PosetView:
    subs = enumerate_subspaces(n)
    if kind == "W":
        elems = subs
    elif kind == "W0":
        elems = [w for w in subs if w.dim > 0]
    elif kind == "B":
        d, c = params
        elems = [w for w in subs if w.dim >= d and w.codim >= c]
    else:
        raise ValueError(f"unknown poset kind {kind!r}")
    return PosetView(kind, n, tuple(elems), params)


@lru_cache(maxsize=None)
def _interval(lo: Subspace, hi: Subspace) -> PosetView:
    if not lo.is_subspace_of(hi):
        raise ValueError("interval endpoints are not nested")
    elems = [w for w in enumerate_subspaces(lo.n)
             if lo.dim < w.dim < hi.dim and lo.is_subspace_of(w) and w.is_subspace_of(hi)]
    return PosetView("interval", lo.n, tuple(elems), (lo, hi))


def poset_from_label(label: str, n: int) -> PosetView:
    label = label.strip()
    if label == "W":
        return PosetView.W(n)
    if label == "W0":
        return PosetView.W0(n)
    if label.startswith("B(") and label.endswith(")"):
        try:
            d, c = (int(t) for t in label[2:-1].split(","))
        except ValueError as exc:
            raise ValueError(f"malformed poset label {label!r}") from exc
        return PosetView.B(n, d, c)
    raise ValueError(f"unknown poset label {label!r}")


def chains(p: PosetView, k: int) -> list[tuple[Subspace, ...]]:
    """k-simplices of the order complex, each sorted by inclusion."""
    return [tuple(p.elements[i] for i in c) for c in p.chain_indices(k)]
