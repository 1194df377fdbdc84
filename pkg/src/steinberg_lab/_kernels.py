"""Hot loops for packed GF(2) elimination and products.

Two interchangeable implementations live here: numba-compiled loops and a
vectorised numpy fallback.  The active one is chosen at import time from the
``STEINBERG_LAB_BACKEND`` environment variable (``numba`` or ``numpy``) and
can be switched at runtime with :func:`set_backend`.

Packed layout: a matrix with ``ncols`` columns is a C-contiguous ``uint64``
array of shape ``(nrows, ceil(ncols / 64))``; column ``j`` lives in word
``j >> 6`` at bit ``j & 63``.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_ONE = np.uint64(1)


# ---------------------------------------------------------------- numpy path

def _rref_numpy(a: np.ndarray, ncols: int) -> tuple[int, np.ndarray]:
    nrows = a.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w = c >> 6
        bit = _ONE << np.uint64(c & 63)
        col = (a[r:, w] & bit) != 0
        hits = np.flatnonzero(col)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        mask = (a[:, w] & bit) != 0
        mask[r] = False
        if mask.any():
            a[mask, w:] ^= a[r, w:]
        pivots.append(c)
        r += 1
    return r, np.asarray(pivots, dtype=np.int64)


def _matmul_numpy(a: np.ndarray, b: np.ndarray, inner: int, ncols: int) -> np.ndarray:
    # a is (m, words(inner)), b is (inner, words(ncols)); go through dense
    # integer products, exact because inner dimensions stay far below 2**53
    m = a.shape[0]
    if m == 0 or inner == 0 or ncols == 0:
        return np.zeros((m, b.shape[1]), dtype=np.uint64)
    ad = unpack(a, inner).astype(np.float64)
    bd = unpack(b, ncols).astype(np.float64)
    prod = (ad @ bd).astype(np.int64) & 1
    return pack(prod.astype(np.uint8), ncols)


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _rref_numba(a, ncols):
        nrows, nwords = a.shape
        pivots = np.empty(min(nrows, ncols), dtype=np.int64)
        r = 0
        for c in range(ncols):
            if r == nrows:
                break
            w = c >> 6
            bit = np.uint64(1) << np.uint64(c & 63)
            p = -1
            for i in range(r, nrows):
                if a[i, w] & bit:
                    p = i
                    break
            if p < 0:
                continue
            if p != r:
                for k in range(w, nwords):
                    t = a[r, k]
                    a[r, k] = a[p, k]
                    a[p, k] = t
            for i in range(nrows):
                if i != r and (a[i, w] & bit):
                    for k in range(w, nwords):
                        a[i, k] ^= a[r, k]
            pivots[r] = c
            r += 1
        return r, pivots[:r].copy()

    @njit(cache=True)
    def _matmul_numba(a, b, inner, ncols):
        m = a.shape[0]
        nw = b.shape[1]
        out = np.zeros((m, nw), dtype=np.uint64)
        for i in range(m):
            for j in range(inner):
                if (a[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1):
                    for k in range(nw):
                        out[i, k] ^= b[j, k]
        return out


# ---------------------------------------------------------------- packing

def nwords(ncols: int) -> int:
    return (ncols + 63) >> 6


def pack(dense: np.ndarray, ncols: int) -> np.ndarray:
    """Pack a 0/1 array of shape (rows, ncols) into uint64 words."""
    dense = np.asarray(dense, dtype=np.uint8).reshape(-1, ncols) & 1
    rows = dense.shape[0]
    nw = nwords(ncols)
    if nw == 0:
        return np.zeros((rows, 0), dtype=np.uint64)
    padded = np.zeros((rows, nw * 64), dtype=np.uint8)
    padded[:, :ncols] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64).reshape(rows, nw)


def unpack(words: np.ndarray, ncols: int) -> np.ndarray:
    """Inverse of :func:`pack`; returns a uint8 array of shape (rows, ncols)."""
    rows = words.shape[0]
    if words.shape[1] == 0:
        return np.zeros((rows, ncols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :ncols]


# ---------------------------------------------------------------- dispatch

_BACKEND = "numpy"


def set_backend(name: str) -> None:
    """Select ``"numba"`` or ``"numpy"`` for subsequent kernel calls."""
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    _BACKEND = name


def get_backend() -> str:
    return _BACKEND


def rref_inplace(a: np.ndarray, ncols: int) -> tuple[int, np.ndarray]:
    """Gauss-Jordan elimination of packed rows, in place.

    Returns the rank and the pivot columns in row order.
    """
    if a.shape[0] == 0 or ncols == 0:
        return 0, np.zeros(0, dtype=np.int64)
    if _BACKEND == "numba":
        r, piv = _rref_numba(a, ncols)
        return int(r), piv
    return _rref_numpy(a, ncols)


def matmul(a: np.ndarray, b: np.ndarray, inner: int, ncols: int) -> np.ndarray:
    if _BACKEND == "numba":
        return _matmul_numba(a, b, inner, ncols)
    return _matmul_numpy(a, b, inner, ncols)


_env = os.environ.get("STEINBERG_LAB_BACKEND", "").strip().lower()
if _env == "numpy" or not HAVE_NUMBA:
    _BACKEND = "numpy"
elif _env in ("", "numba"):
    _BACKEND = "numba"
else:
    raise ValueError(f"STEINBERG_LAB_BACKEND must be 'numba' or 'numpy', got {_env!r}")
