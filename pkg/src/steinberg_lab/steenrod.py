"""Truncated polynomial algebras F2[x_1..x_n] with Steenrod squares.

Polynomials are sets of exponent tuples (coefficients are in F2).  Linear
forms are bitmasks: bit i of u is the coefficient of x_{i+1}, so u vanishes on
a vector w exactly when popcount(u & w) is even.  Degree-d elements are stored
as rows over the degree-d monomials, listed in graded lex order (x_1^d first).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .errors import CapError, InvariantError
from .gf2 import (GF2Matrix, kernel_basis, rank, reduce_rows, row_basis,
                  rowspace_intersection, vstack)
from .lattice import Subspace, enumerate_subspaces

# degree limit for intermediate results (Sq images, Frobenius powers)
INTERNAL_CAP = 64


# ------------------------------------------------------------------ monomials

@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple:
    """Exponent tuples of total degree d, descending lex order."""
    if d < 0:
        return ()
    if n == 0:
        return ((),) if d == 0 else ()
    out = []
    for a in range(d, -1, -1):
        out.extend((a,) + rest for rest in monomials(n - 1, d - a))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict:
    return {m: i for i, m in enumerate(monomials(n, d))}


class Poly:
    """Polynomial over F2 in n variables."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=()):
        self.n = n
        self.terms = frozenset(terms)

    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls(n)

    @classmethod
    def one(cls, n: int) -> "Poly":
        return cls(n, [(0,) * n])

    @classmethod
    def monomial(cls, exps) -> "Poly":
        return cls(len(exps), [tuple(exps)])

    @classmethod
    def variable(cls, n: int, i: int) -> "Poly":
        e = [0] * n
        e[i] = 1
        return cls(n, [tuple(e)])

    @classmethod
    def form(cls, n: int, u: int) -> "Poly":
        if u <= 0 or u >> n:
            raise ValueError(f"form {u} is not a nonzero form on F2^{n}")
        return cls(n, [tuple(int(i == j) for j in range(n)) for i in range(n) if u >> i & 1])

    @classmethod
    def from_row(cls, n: int, d: int, row: int) -> "Poly":
        mons = monomials(n, d)
        return cls(n, [mons[j] for j in range(len(mons)) if row >> j & 1])

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Top degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def component(self, d: int) -> "Poly":
        return Poly(self.n, [m for m in self.terms if sum(m) == d])

    def row(self, d: int) -> int:
        """Degree-d component as an int row over monomials(n, d)."""
        idx = monomial_index(self.n, d)
        r = 0
        for m in self.terms:
            if sum(m) == d:
                r |= 1 << idx[m]
        return r

    def _check(self, other: "Poly") -> None:
        if self.n != other.n:
            raise ValueError("polynomials in different rings")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        return Poly(self.n, self.terms ^ other.terms)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        out: set = set()
        for a in self.terms:
            for b in other.terms:
                out ^= {tuple(x + y for x, y in zip(a, b))}
        return Poly(self.n, out)

    def __pow__(self, k: int) -> "Poly":
        out, base = Poly.one(self.n), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def square(self) -> "Poly":
        # Frobenius is additive mod 2
        return Poly(self.n, [tuple(2 * x for x in m) for m in self.terms])

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, self.terms))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (-sum(m), tuple(-x for x in m))):
            s = "*".join(f"x{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(m) if a)
            parts.append(s or "1")
        return " + ".join(parts)


# ------------------------------------------------------------------ squares

def _submask_splits(a: tuple, i: int):
    """Tuples j with j_k a bitwise submask of a_k and sum j = i (Lucas)."""
    if not a:
        if i == 0:
            yield ()
        return
    head, rest = a[0], a[1:]
    budget = sum(rest)
    s = head
    while True:
        if s <= i and i - s <= budget:
            for tail in _submask_splits(rest, i - s):
                yield (s,) + tail
        if s == 0:
            break
        s = (s - 1) & head


def sq(i: int, p: Poly, cap: int = INTERNAL_CAP) -> Poly:
    """Sq^i p, using Sq^i(x^a) = Σ_{|j|=i} Π C(a_k, j_k) x^{a+j}."""
    if i < 0:
        raise ValueError("Sq^i needs i >= 0")
    if p.is_zero():
        return p
    if p.degree + i > cap:
        raise CapError(f"Sq^{i} of a degree-{p.degree} polynomial exceeds the degree cap {cap}")
    out: set = set()
    for m in p.terms:
        for j in _submask_splits(m, i):
            out ^= {tuple(x + y for x, y in zip(m, j))}
    return Poly(p.n, out)


def total_sq(p: Poly, cap: int = INTERNAL_CAP) -> Poly:
    out = Poly.zero(p.n)
    for i in range(max(p.degree, 0) + 1):
        out = out + sq(i, p, cap)
    return out


# ------------------------------------------------------------------ form products

@dataclass(frozen=True)
class FormProduct:
    """Product of nonzero linear forms, kept as a sorted multiset of bitmasks."""

    n: int
    forms: tuple = field(default=())

    def __post_init__(self):
        for u in self.forms:
            if u <= 0 or u >> self.n:
                raise ValueError(f"form {u} is not a nonzero form on F2^{self.n}")
        object.__setattr__(self, "forms", tuple(sorted(self.forms)))

    @property
    def degree(self) -> int:
        return len(self.forms)

    def poly(self) -> Poly:
        out = Poly.one(self.n)
        for u in self.forms:
            out = out * Poly.form(self.n, u)
        return out

    def __mul__(self, other: "FormProduct") -> "FormProduct":
        if self.n != other.n:
            raise ValueError("ambient mismatch")
        return FormProduct(self.n, self.forms + other.forms)

    def __pow__(self, h: int) -> "FormProduct":
        return FormProduct(self.n, self.forms * h)

    def is_squarefree(self) -> bool:
        return len(set(self.forms)) == len(self.forms)

    def __truediv__(self, other: "FormProduct") -> "FormProduct":
        rest = list(self.forms)
        for u in other.forms:
            if u not in rest:
                raise ValueError("divisor is not a sub-multiset")
            rest.remove(u)
        return FormProduct(self.n, tuple(rest))

    def to_json(self) -> list:
        return list(self.forms)


def vanishes_on(u: int, w: Subspace) -> bool:
    return all(bin(u & r).count("1") % 2 == 0 for r in w.rows)


def e_sub_W(e: FormProduct, w: Subspace) -> FormProduct:
    """Product of the forms of e that vanish on W."""
    if w.n != e.n:
        raise ValueError("ambient mismatch")
    return FormProduct(e.n, tuple(u for u in e.forms if vanishes_on(u, w)))


def c_V(n: int) -> FormProduct:
    return FormProduct(n, tuple(range(1, 1 << n)))


def c_VW(n: int, w: Subspace) -> FormProduct:
    return e_sub_W(c_V(n), w)


def kernel_of_form(n: int, u: int) -> Subspace:
    return Subspace.span(n, [v for v in range(1 << n) if bin(u & v).count("1") % 2 == 0])


# ------------------------------------------------------------------ linear algebra in H^d

def mult_matrix(q: Poly, d: int) -> GF2Matrix:
    """Multiplication by homogeneous q from degree d; rows are images."""
    if not q.is_homogeneous():
        raise ValueError("multiplier must be homogeneous")
    dq = max(q.degree, 0)
    rows = [(Poly.monomial(m) * q).row(d + dq) for m in monomials(q.n, d)]
    return GF2Matrix.from_int_rows(rows, len(monomials(q.n, d + dq)))


def ideal_basis(e: FormProduct, d: int) -> GF2Matrix:
    """Rows e·m over the monomials m of degree d - deg e (independent)."""
    ncols = len(monomials(e.n, d))
    if d < e.degree:
        return GF2Matrix.zeros(0, ncols)
    return mult_matrix(e.poly(), d - e.degree)


def restriction_matrix(w: Subspace, d: int) -> GF2Matrix:
    """Degree-d restriction H^d V -> H^d W in the coordinates of W's basis.

    x_i restricts to Σ_j bit_i(w_j) t_j where w_1..w_k are the rows of W.
    Rows of the result are the images of the monomials of H^d V.
    """
    n, k = w.n, w.dim
    ts = [Poly(k, [tuple(int(a == j) for a in range(k)) for j in range(k) if w.rows[j] >> i & 1])
          for i in range(n)]
    rows = []
    for m in monomials(n, d):
        img = Poly.one(k)
        for i, a in enumerate(m):
            if a:
                img = img * ts[i] ** a
        rows.append(img.row(d))
    return GF2Matrix.from_int_rows(rows, len(monomials(k, d)))


def prime_ideal_P_W(w: Subspace, d: int) -> GF2Matrix:
    """Basis of (P_W)_d = ker(H^d V -> H^d W), as rows over monomials."""
    return kernel_basis(restriction_matrix(w, d).T)


class TruncatedPolyAlgebra:
    """F2[x_1..x_n] in degrees 0..D."""

    def __init__(self, n: int, D: int):
        if n < 0 or D < 0:
            raise ValueError("n and D must be >= 0")
        self.n, self.D = n, D

    def basis(self, d: int) -> tuple:
        self._check(d)
        return monomials(self.n, d)

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def poincare(self) -> list[int]:
        return [self.dim(d) for d in range(self.D + 1)]

    def form_mult(self, u: int, d: int) -> GF2Matrix:
        self._check(d + 1)
        return mult_matrix(Poly.form(self.n, u), d)

    def _check(self, d: int) -> None:
        if d > self.D:
            raise CapError(f"degree {d} exceeds the algebra cap D = {self.D}")


class GradedIdeal:
    """Homogeneous ideal with degreewise bases up to D."""

    def __init__(self, n: int, D: int, bases: dict, label: str = ""):
        self.n, self.D, self.label = n, D, label
        self.bases = {d: bases.get(d, GF2Matrix.zeros(0, len(monomials(n, d)))) for d in range(D + 1)}

    @classmethod
    def principal(cls, e: FormProduct, D: int) -> "GradedIdeal":
        return cls(e.n, D, {d: ideal_basis(e, d) for d in range(D + 1)}, f"({list(e.forms)})")

    @classmethod
    def generated(cls, gens: list, D: int) -> "GradedIdeal":
        """Ideal generated by homogeneous polynomials."""
        n = gens[0].n
        bases = {}
        for d in range(D + 1):
            parts = [mult_matrix(g, d - g.degree) for g in gens if not g.is_zero() and g.degree <= d]
            bases[d] = row_basis(vstack(parts, cols=len(monomials(n, d))))
        return cls(n, D, bases, repr(gens))

    @classmethod
    def prime(cls, w: Subspace, D: int) -> "GradedIdeal":
        return cls(w.n, D, {d: prime_ideal_P_W(w, d) for d in range(D + 1)}, f"P_{w.key}")

    def dim(self, d: int) -> int:
        return rank(self.bases[d])

    def contains(self, p: Poly) -> bool:
        for d in {sum(m) for m in p.terms}:
            if d > self.D:
                raise CapError(f"degree {d} exceeds the ideal cap D = {self.D}")
            v = GF2Matrix.from_int_rows([p.row(d)], len(monomials(self.n, d)))
            if not reduce_rows(v, row_basis(self.bases[d])).is_zero():
                return False
        return True

    def is_ideal(self) -> bool:
        """Closure under each variable, degreewise."""
        for d in range(self.D):
            b = self.bases[d]
            if b.rows == 0:
                continue
            target = row_basis(self.bases[d + 1])
            for i in range(self.n):
                img = b @ mult_matrix(Poly.variable(self.n, i), d)
                if not reduce_rows(img, target).is_zero():
                    return False
        return True


# ------------------------------------------------------------------ checks

@dataclass
class SteenrodReport:
    ok: bool
    data: dict
    failures: list

    def to_json(self) -> dict:
        return {"ok": self.ok, "data": self.data, "failures": self.failures}


def a_stability_check(ideal: GradedIdeal, Dmax: int | None = None) -> SteenrodReport:
    """Sq^i of every basis element of degree d lands in the ideal (d+i <= Dmax)."""
    Dmax = ideal.D if Dmax is None else Dmax
    if Dmax > ideal.D:
        raise CapError(f"Dmax = {Dmax} exceeds the ideal cap D = {ideal.D}")
    failures = []
    checked = 0
    for d in range(Dmax + 1):
        for row in ideal.bases[d].int_rows():
            p = Poly.from_row(ideal.n, d, row)
            for i in range(1, Dmax - d + 1):
                checked += 1
                img = sq(i, p)
                if not ideal.contains(img):
                    failures.append({"degree": d, "i": i, "element": repr(p), "image": repr(img)})
    return SteenrodReport(not failures, {"ideal": ideal.label, "Dmax": Dmax, "checked": checked}, failures)


def frobenius_matrix(n: int, d: int, m: int) -> GF2Matrix:
    """x -> x^{2^m} from degree d to degree d·2^m."""
    q = 1 << m
    tgt = monomial_index(n, d * q)
    rows = [1 << tgt[tuple(a * q for a in mon)] for mon in monomials(n, d)]
    return GF2Matrix.from_int_rows(rows, len(tgt))


def _same_rowspace(a: GF2Matrix, b: GF2Matrix) -> bool:
    ra, rb = rank(a), rank(b)
    return ra == rb and rank(vstack([a, b], cols=a.cols)) == ra


def serre_radical_check(e: FormProduct, d: int, m_max: int,
                        cap: int = INTERNAL_CAP) -> SteenrodReport:
    """Compare ⋂_{u|e} P_{ker u} with {x : x^{2^m} ∈ (e), m <= m_max} in degree d."""
    if not e.is_squarefree():
        raise ValueError("forms of e must be pairwise distinct")
    if d < 0 or m_max < 0:
        raise ValueError("d and m_max must be >= 0")
    if d * (1 << m_max) > cap:
        raise CapError(f"d·2^m_max = {d * (1 << m_max)} exceeds the internal cap {cap}")
    n = e.n
    ncols = len(monomials(n, d))
    lhs = GF2Matrix.identity(ncols)
    for u in e.forms:
        lhs = rowspace_intersection(lhs, prime_ideal_P_W(kernel_of_form(n, u), d))
    rhs_dims = []
    rhs = None
    prev = None
    for m in range(m_max + 1):
        target = row_basis(ideal_basis(e, d * (1 << m)))
        reduced = reduce_rows(frobenius_matrix(n, d, m), target)
        rhs = kernel_basis(reduced.T)
        if prev is not None and rank(vstack([prev, rhs], cols=ncols)) != rank(rhs):
            raise InvariantError("Frobenius membership sets are not nested")
        prev = rhs
        rhs_dims.append(rhs.rows)
    ok = _same_rowspace(lhs, rhs)
    data = {"forms": list(e.forms), "d": d, "m_max": m_max,
            "lhs_dim": rank(lhs), "rhs_dims": rhs_dims}
    return SteenrodReport(ok, data, [] if ok else [{"lhs_dim": rank(lhs), "rhs_dim": rhs.rows}])


def squarefree_products(n: int, max_forms: int) -> list[FormProduct]:
    """All products of at most max_forms distinct nonzero forms (including 1)."""
    out = []
    for k in range(max_forms + 1):
        for c in combinations(range(1, 1 << n), k):
            out.append(FormProduct(n, c))
    return out


def all_primes(n: int, D: int) -> list[GradedIdeal]:
    return [GradedIdeal.prime(w, D) for w in enumerate_subspaces(n)]
