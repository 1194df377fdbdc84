import numpy as np
import pytest

from steinberg_lab import _kernels as K
from steinberg_lab.gf2 import GF2Matrix, kernel_basis, rank, rref
from steinberg_lab.steinberg import lusztig_complex

pytestmark = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not importable")


@pytest.fixture
def restore_backend():
    old = K.get_backend()
    yield
    K.set_backend(old)


def _both(fn):
    out = {}
    for name in ("numba", "numpy"):
        K.set_backend(name)
        out[name] = fn()
    return out["numba"], out["numpy"]


@pytest.mark.parametrize("shape", [(1, 1), (17, 63), (40, 64), (33, 65), (90, 200), (200, 90)])
def test_rref_and_matmul_agree(shape, restore_backend):
    rng = np.random.default_rng(sum(shape))
    a = GF2Matrix.from_dense(rng.integers(0, 2, shape, dtype=np.uint8))
    b = GF2Matrix.from_dense(rng.integers(0, 2, (shape[1], 70), dtype=np.uint8))
    r1, r2 = _both(lambda: rref(a))
    assert r1 == r2
    p1, p2 = _both(lambda: a @ b)
    assert p1 == p2
    assert p1.to_dense().tolist() == ((a.to_dense().astype(int) @ b.to_dense()) % 2).tolist()
    k1, k2 = _both(lambda: kernel_basis(a))
    assert k1 == k2


def test_lusztig_homology_same_on_both(restore_backend):
    h1, h2 = _both(lambda: lusztig_complex(3).homology_dims())
    assert h1 == h2 == [0, 0, 0, 0]


def test_backend_validation(restore_backend):
    with pytest.raises(ValueError):
        K.set_backend("fortran")
    K.set_backend("numpy")
    assert K.get_backend() == "numpy"
    assert rank(GF2Matrix.identity(5)) == 5
