"""Bit-packed linear algebra over F2 and cochain-complex homology.

Every linear map in the package is a :class:`GF2Matrix` acting on column
vectors, so a map F2^m -> F2^k has shape (k, m).  Subspaces of a coordinate
space are carried around as matrices whose rows span them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels as K
from .errors import InvariantError


class GF2Matrix:
    """Immutable dense matrix over F2 with rows packed into uint64 words."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray | None = None):
        rows, cols = int(rows), int(cols)
        if rows < 0 or cols < 0:
            raise ValueError("negative shape")
        nw = K.nwords(cols)
        if data is None:
            data = np.zeros((rows, nw), dtype=np.uint64)
        else:
            data = np.array(data, dtype=np.uint64, copy=True).reshape(rows, nw)
            tail = cols & 63
            if nw and tail:
                data[:, -1] &= np.uint64((1 << tail) - 1)
        data.flags.writeable = False
        self.rows = rows
        self.cols = cols
        self.data = data

    # -- construction
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "GF2Matrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "GF2Matrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, dense) -> "GF2Matrix":
        arr = np.asarray(dense)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        r, c = arr.shape
        return cls(r, c, K.pack(arr.astype(np.int64) & 1, c) if c else None)

    @classmethod
    def from_int_rows(cls, ints: Sequence[int], cols: int) -> "GF2Matrix":
        """Rows given as Python ints, bit j being the entry in column j."""
        nw = K.nwords(cols)
        data = np.zeros((len(ints), nw), dtype=np.uint64)
        mask = (1 << 64) - 1
        for i, v in enumerate(ints):
            v = int(v)
            if v < 0 or (cols < v.bit_length()):
                raise ValueError(f"row {i} does not fit in {cols} columns")
            for k in range(nw):
                data[i, k] = (v >> (64 * k)) & mask
        return cls(len(ints), cols, data)

    # -- views
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        return K.unpack(self.data, self.cols)

    def int_rows(self) -> list[int]:
        out = []
        for i in range(self.rows):
            v = 0
            for k, w in enumerate(self.data[i]):
                v |= int(w) << (64 * k)
            out.append(v)
        return out

    def get(self, i: int, j: int) -> int:
        return int((int(self.data[i, j >> 6]) >> (j & 63)) & 1)

    def flip(self, i: int, j: int) -> "GF2Matrix":
        """Copy with entry (i, j) toggled."""
        d = self.data.copy()
        d[i, j >> 6] ^= np.uint64(1) << np.uint64(j & 63)
        return GF2Matrix(self.rows, self.cols, d)

    def is_zero(self) -> bool:
        return not self.data.any()

    def weight(self) -> int:
        return int(self.to_dense().sum())

    # -- algebra
    @property
    def T(self) -> "GF2Matrix":
        return GF2Matrix.from_dense(self.to_dense().T) if self.rows and self.cols else GF2Matrix(self.cols, self.rows)

    def __matmul__(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = K.matmul(self.data, other.data, self.cols, other.cols)
        return GF2Matrix(self.rows, other.cols, out)

    def __add__(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return GF2Matrix(self.rows, self.cols, self.data ^ other.data)

    __sub__ = __add__

    def __eq__(self, other) -> bool:
        if not isinstance(other, GF2Matrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data.tobytes()))

    def __repr__(self) -> str:
        if self.rows * self.cols <= 64:
            body = "; ".join("".join(str(b) for b in row) for row in self.to_dense())
            return f"GF2Matrix({self.rows}x{self.cols}: {body})"
        return f"GF2Matrix({self.rows}x{self.cols})"

    def take_rows(self, idx: Iterable[int]) -> "GF2Matrix":
        idx = np.asarray(list(idx), dtype=np.int64)
        return GF2Matrix(len(idx), self.cols, self.data[idx] if len(idx) else None)

    def take_cols(self, idx: Iterable[int]) -> "GF2Matrix":
        idx = list(idx)
        return GF2Matrix.from_dense(self.to_dense()[:, idx]) if self.rows else GF2Matrix(0, len(idx))

    def rank(self) -> int:
        return rank(self)


def hstack(mats: Sequence[GF2Matrix]) -> GF2Matrix:
    rows = {m.rows for m in mats}
    if len(rows) != 1:
        raise ValueError("hstack needs equal row counts")
    r = rows.pop()
    cols = sum(m.cols for m in mats)
    if r == 0:
        return GF2Matrix(0, cols)
    return GF2Matrix.from_dense(np.hstack([m.to_dense() for m in mats]))


def vstack(mats: Sequence[GF2Matrix], cols: int | None = None) -> GF2Matrix:
    cs = {m.cols for m in mats}
    if cols is not None:
        cs.add(cols)
    if len(cs) != 1:
        raise ValueError("vstack needs equal column counts")
    c = cs.pop()
    rows = sum(m.rows for m in mats)
    if rows == 0:
        return GF2Matrix(0, c)
    return GF2Matrix(rows, c, np.vstack([m.data for m in mats if m.rows]))


def kron(a: GF2Matrix, b: GF2Matrix) -> GF2Matrix:
    if not (a.rows and a.cols and b.rows and b.cols):
        return GF2Matrix(a.rows * b.rows, a.cols * b.cols)
    return GF2Matrix.from_dense(np.kron(a.to_dense(), b.to_dense()))


def assemble(row_dims: Sequence[int], col_dims: Sequence[int],
             blocks: Iterable[tuple[int, int, GF2Matrix]]) -> GF2Matrix:
    """Block matrix from ``(row_block, col_block, matrix)`` triples.

    Blocks with the same position are added.
    """
    roff = np.concatenate([[0], np.cumsum(row_dims, dtype=np.int64)])
    coff = np.concatenate([[0], np.cumsum(col_dims, dtype=np.int64)])
    R, C = int(roff[-1]), int(coff[-1])
    dense = np.zeros((R, C), dtype=np.uint8)
    for i, j, blk in blocks:
        if blk.shape != (row_dims[i], col_dims[j]):
            raise ValueError(f"block ({i},{j}) has shape {blk.shape}, "
                             f"expected {(row_dims[i], col_dims[j])}")
        if blk.rows and blk.cols:
            dense[roff[i]:roff[i + 1], coff[j]:coff[j + 1]] ^= blk.to_dense()
    return GF2Matrix.from_dense(dense) if R and C else GF2Matrix(R, C)


# ------------------------------------------------------------ elimination

@dataclass(frozen=True)
class RREF:
    reduced: GF2Matrix
    rank: int
    pivots: tuple[int, ...]


def rref(m: GF2Matrix) -> RREF:
    """Reduced row-echelon form; zero rows are kept at the bottom."""
    a = np.array(m.data, dtype=np.uint64, copy=True)
    r, piv = K.rref_inplace(a, m.cols)
    return RREF(GF2Matrix(m.rows, m.cols, a), r, tuple(int(p) for p in piv))


def rank(m: GF2Matrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    a = np.array(m.data, dtype=np.uint64, copy=True)
    return K.rref_inplace(a, m.cols)[0]


def _kernel_from_rref(red: RREF, ncols: int) -> GF2Matrix:
    piv = list(red.pivots)
    free = [c for c in range(ncols) if c not in set(piv)]
    if not free:
        return GF2Matrix(0, ncols)
    ker = np.zeros((len(free), ncols), dtype=np.uint8)
    ker[np.arange(len(free)), free] = 1
    if piv:
        R = red.reduced.take_rows(range(red.rank)).to_dense()
        ker[:, piv] = R[:, free].T
    return GF2Matrix.from_dense(ker)


def kernel_basis(m: GF2Matrix) -> GF2Matrix:
    """Rows form a basis of {v : m v = 0}."""
    return _kernel_from_rref(rref(m), m.cols)


@dataclass(frozen=True)
class LinearSolution:
    consistent: bool
    particular: GF2Matrix | None
    kernel: GF2Matrix


def solve_linear_system(a: GF2Matrix, b: GF2Matrix) -> LinearSolution:
    """Solve a x = b column by column.

    ``particular`` has shape (cols(a), cols(b)); ``kernel`` rows span the
    solutions of a x = 0.  Inconsistency is reported through ``consistent``.
    """
    if a.rows != b.rows:
        raise ValueError(f"incompatible shapes {a.shape} and {b.shape}")
    n = a.cols
    aug = hstack([a, b]) if a.rows else GF2Matrix(0, n + b.cols)
    red = rref(aug)
    ker = _kernel_from_rref(
        RREF(red.reduced.take_cols(range(n)) if a.rows else GF2Matrix(0, n),
             sum(1 for p in red.pivots if p < n),
             tuple(p for p in red.pivots if p < n)),
        n,
    )
    if any(p >= n for p in red.pivots):
        return LinearSolution(False, None, ker)
    x = np.zeros((n, b.cols), dtype=np.uint8)
    if red.rank and b.cols:
        R = red.reduced.take_rows(range(red.rank)).to_dense()
        x[list(red.pivots), :] = R[:, n:]
    part = GF2Matrix.from_dense(x) if n and b.cols else GF2Matrix(n, b.cols)
    return LinearSolution(True, part, ker)


# ------------------------------------------------------------ row spaces

def row_basis(m: GF2Matrix) -> GF2Matrix:
    """Reduced echelon basis of the row space."""
    red = rref(m)
    return red.reduced.take_rows(range(red.rank))


def _pivots_of_basis(basis: GF2Matrix) -> list[int]:
    # first set bit of each row of a reduced echelon basis
    d = basis.to_dense()
    return [int(np.flatnonzero(row)[0]) for row in d]


def reduce_rows(vectors: GF2Matrix, basis: GF2Matrix) -> GF2Matrix:
    """Reduce rows modulo the span of a reduced echelon ``basis``."""
    if basis.rows == 0 or vectors.rows == 0:
        return vectors
    piv = _pivots_of_basis(basis)
    return vectors + vectors.take_cols(piv) @ basis


def rowspace_sum(*mats: GF2Matrix) -> GF2Matrix:
    return row_basis(vstack(list(mats)))


def rowspace_intersection(a: GF2Matrix, b: GF2Matrix) -> GF2Matrix:
    if a.rows == 0 or b.rows == 0:
        return GF2Matrix(0, a.cols)
    stacked = vstack([a, b])
    ker = kernel_basis(stacked.T)
    if ker.rows == 0:
        return GF2Matrix(0, a.cols)
    return row_basis(ker.take_cols(range(a.rows)) @ a)


def apply_rows(d: GF2Matrix, x: GF2Matrix) -> GF2Matrix:
    """Images d v of the rows v of x, returned as rows."""
    return x @ d.T


def express_rows(basis: GF2Matrix, vectors: GF2Matrix) -> GF2Matrix:
    """Coefficients c with vectors = c @ basis; raises if not in the span."""
    sol = solve_linear_system(basis.T, vectors.T)
    if not sol.consistent:
        raise InvariantError("vector outside the span of the given basis")
    return sol.particular.T


def preimage_rows(d: GF2Matrix, domain: GF2Matrix, target: GF2Matrix) -> GF2Matrix:
    """Basis of {x in rowspan(domain) : d x in rowspan(target)}."""
    if domain.rows == 0:
        return GF2Matrix(0, domain.cols)
    images = apply_rows(d, domain)
    images = reduce_rows(images, row_basis(target)) if target.rows else images
    ker = kernel_basis(images.T)
    if ker.rows == 0:
        return GF2Matrix(0, domain.cols)
    return row_basis(ker @ domain)


# ------------------------------------------------------------ homology

class Homology:
    """Homology at one spot of a complex with a deterministic basis.

    ``basis`` rows are cycle representatives chosen pivot-greedily: cycles of
    the kernel basis are taken in order whenever they are independent modulo
    the boundaries.  Homology coordinates are column vectors.
    """

    def __init__(self, incoming: GF2Matrix | None, outgoing: GF2Matrix | None, dim_space: int):
        self.space_dim = dim_space
        self._out = outgoing
        if incoming is not None and incoming.rows and incoming.cols:
            self.boundaries = row_basis(incoming.T)
        else:
            self.boundaries = GF2Matrix(0, dim_space)
        if outgoing is not None and outgoing.rows:
            cycles = kernel_basis(outgoing)
        else:
            cycles = GF2Matrix.identity(dim_space)
        self.cycles = cycles
        red = reduce_rows(cycles, self.boundaries)
        if red.rows:
            chosen = list(rref(red.T).pivots)
        else:
            chosen = []
        self.basis = cycles.take_rows(chosen)
        self._basis_red = red.take_rows(chosen)
        self.dim = len(chosen)
        if self.cycles.rows - self.boundaries.rows != self.dim:
            raise InvariantError("boundaries are not contained in cycles")

    def is_cycle(self, z: GF2Matrix) -> bool:
        if self._out is None or self._out.rows == 0:
            return True
        return (self._out @ z.T).is_zero()

    def coordinates(self, z: GF2Matrix) -> GF2Matrix:
        """Homology coordinates (dim x s) of the cycle rows of ``z``."""
        if z.cols != self.space_dim:
            raise ValueError("cycle length mismatch")
        if not self.is_cycle(z):
            raise InvariantError("coordinates requested for a non-cycle")
        if self.dim == 0:
            return GF2Matrix(0, z.rows)
        red = reduce_rows(z, self.boundaries)
        return express_rows(self._basis_red, red).T

    def lift(self, coords: GF2Matrix) -> GF2Matrix:
        """Cycle rows representing the columns of ``coords``."""
        if coords.rows != self.dim:
            raise ValueError("coordinate length mismatch")
        if self.dim == 0:
            return GF2Matrix(coords.cols, self.space_dim)
        return coords.T @ self.basis


class CochainComplex:
    """Finite cochain complex; ``diffs[i]`` maps degree lo+i to lo+i+1."""

    def __init__(self, dims: Sequence[int], diffs: Sequence[GF2Matrix], lo: int = 0, check: bool = True):
        self.dims = [int(x) for x in dims]
        self.diffs = list(diffs)
        self.lo = int(lo)
        if len(self.diffs) != max(len(self.dims) - 1, 0):
            raise ValueError("need one differential between consecutive degrees")
        for i, d in enumerate(self.diffs):
            if d.shape != (self.dims[i + 1], self.dims[i]):
                raise ValueError(f"differential {self.lo + i} has shape {d.shape}")
        if check:
            self.check()

    @property
    def hi(self) -> int:
        return self.lo + len(self.dims) - 1

    def degrees(self) -> range:
        return range(self.lo, self.lo + len(self.dims))

    def dim(self, k: int) -> int:
        i = k - self.lo
        return self.dims[i] if 0 <= i < len(self.dims) else 0

    def diff(self, k: int) -> GF2Matrix:
        i = k - self.lo
        if 0 <= i < len(self.diffs):
            return self.diffs[i]
        return GF2Matrix(self.dim(k + 1), self.dim(k))

    def check(self) -> None:
        for i in range(len(self.diffs) - 1):
            if not (self.diffs[i + 1] @ self.diffs[i]).is_zero():
                raise InvariantError(f"d∘d != 0 at degree {self.lo + i}")

    def homology(self, k: int) -> Homology:
        return Homology(self.diff(k - 1), self.diff(k), self.dim(k))

    def homology_dims(self) -> list[int]:
        return [homology_dim(self, k) for k in self.degrees()]

    def euler_characteristic(self) -> int:
        return sum((-1) ** (k % 2) * self.dim(k) for k in self.degrees())

    def with_flipped_bit(self, k: int, i: int, j: int) -> "CochainComplex":
        diffs = list(self.diffs)
        diffs[k - self.lo] = diffs[k - self.lo].flip(i, j)
        return CochainComplex(self.dims, diffs, self.lo, check=False)


class ChainComplex:
    """Finite chain complex C_0 <- C_1 <- ... ; ``boundary(p)`` maps C_p -> C_{p-1}."""

    def __init__(self, dims: Sequence[int], boundaries: Sequence[GF2Matrix], check: bool = True):
        self.dims = [int(x) for x in dims]
        self.boundaries = [None] + list(boundaries)
        if len(self.boundaries) != len(self.dims):
            raise ValueError("need one boundary for each positive degree")
        for p in range(1, len(self.dims)):
            if self.boundaries[p].shape != (self.dims[p - 1], self.dims[p]):
                raise ValueError(f"boundary {p} has shape {self.boundaries[p].shape}")
        if check:
            self.check()

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def dim(self, p: int) -> int:
        return self.dims[p] if 0 <= p < len(self.dims) else 0

    def boundary(self, p: int) -> GF2Matrix:
        if 1 <= p < len(self.dims):
            return self.boundaries[p]
        return GF2Matrix(self.dim(p - 1), self.dim(p))

    def check(self) -> None:
        for p in range(2, len(self.dims)):
            if not (self.boundaries[p - 1] @ self.boundaries[p]).is_zero():
                raise InvariantError(f"∂∘∂ != 0 at degree {p}")

    def homology(self, p: int) -> Homology:
        return Homology(self.boundary(p + 1), self.boundary(p), self.dim(p))

    def homology_dims(self) -> list[int]:
        out = []
        for p in range(len(self.dims)):
            out.append(self.dim(p) - rank(self.boundary(p)) - rank(self.boundary(p + 1)))
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** p * d for p, d in enumerate(self.dims))

    def with_flipped_bit(self, p: int, i: int, j: int) -> "ChainComplex":
        bds = list(self.boundaries[1:])
        bds[p - 1] = bds[p - 1].flip(i, j)
        return ChainComplex(self.dims, bds, check=False)

    def is_square_zero(self) -> bool:
        try:
            self.check()
        except InvariantError:
            return False
        return True


def homology_dim(c: CochainComplex, k: int) -> int:
    """dim ker d_k - rank d_{k-1}, by ranks only."""
    return c.dim(k) - rank(c.diff(k)) - rank(c.diff(k - 1))


# ------------------------------------------------------------ filtered complexes

def filtered_e1(c: CochainComplex, filt: Callable[[int, int], GF2Matrix],
                p_min: int, p_max: int) -> tuple[dict, dict]:
    """E1 page of a decreasing filtration of a cochain complex.

    ``filt(p, k)`` returns rows spanning F^p C^k; F^p must equal C^k for
    p <= p_min and vanish for p > p_max.  Returns ``(dims, d1_ranks)`` keyed
    by ``(p, q)`` with total degree k = p + q.
    """
    def F(p: int, k: int) -> GF2Matrix:
        n = c.dim(k)
        if k not in c.degrees():
            return GF2Matrix(0, 0)
        if p <= p_min:
            return GF2Matrix.identity(n)
        if p > p_max:
            return GF2Matrix(0, n)
        return filt(p, k)

    Z, B = {}, {}
    for k in c.degrees():
        for p in range(p_min, p_max + 1):
            z = preimage_rows(c.diff(k), F(p, k), F(p + 1, k + 1))
            im = apply_rows(c.diff(k - 1), F(p, k - 1)) if c.dim(k - 1) else GF2Matrix(0, c.dim(k))
            b = rowspace_sum(F(p + 1, k), im)
            Z[p, k], B[p, k] = z, b
    dims, ranks = {}, {}
    for (p, k), z in Z.items():
        b = B[p, k]
        if rank(vstack([z, b])) != z.rows:
            raise InvariantError("E1 boundaries escape the cycles")
        dims[p, k - p] = z.rows - b.rows
        nb = B.get((p + 1, k + 1))
        if nb is None:
            nb = GF2Matrix(0, c.dim(k + 1))
        img = apply_rows(c.diff(k), z) if z.rows else GF2Matrix(0, c.dim(k + 1))
        ranks[p, k - p] = rank(vstack([img, nb])) - nb.rows
    return dims, ranks
