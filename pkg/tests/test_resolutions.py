import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steinberg_lab.errors import OracleMismatch
from steinberg_lab.gf2 import GF2Matrix
from steinberg_lab.functors import (PosetFunctor, constant_functor, derived_limit_dims, injective_functor,
                                    projective_functor, random_functor, simple_functor)
from steinberg_lab.lattice import PosetView, Subspace, enumerate_subspaces
from steinberg_lab.resolutions import (B_bicomplex, BE1_check, Report, bicomplex_I,
                                       cross_check_oliver, ext_dims, ext_from_S0,
                                       inj_resolution_simple, klim_bridge, oliver_complex,
                                       oliver_limits, proj_resolution_simple, require,
                                       tot_resolution)
from steinberg_lab.steinberg import steinberg

SEEDS = settings(max_examples=15, deadline=None)


def _at(fc, w):
    return fc.evaluate(fc.poset.index[w])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_simple_resolutions_exact_and_natural(n):
    for w in enumerate_subspaces(n):
        for fc in (proj_resolution_simple(n, w), inj_resolution_simple(n, w)):
            fc.check_natural()
            assert fc.is_exact(), fc.exactness_failures()


def test_projective_resolution_examples():
    V, z = Subspace.full(2), Subspace.zero(2)
    top = proj_resolution_simple(2, V)
    assert len(top.terms) == 1 and top.terms[0] == projective_functor(PosetView.W(2), V)
    res = proj_resolution_simple(2, z)
    # terms run P_2, P_1, P_0
    assert [t.dims[res.poset.index[z]] for t in res.terms] == [0, 0, 1]
    # evaluated at V: the Lusztig complex of V, ordered St_V first
    assert _at(res, V).dims == [2, 3, 1, 0]


def test_injective_resolution_examples():
    z, V = Subspace.zero(2), Subspace.full(2)
    assert len(inj_resolution_simple(2, z).terms) == 1
    res = inj_resolution_simple(2, V)
    assert _at(res, z).dims == [0, 1, 3, 2]


@pytest.mark.parametrize("n", [1, 2])
def test_tot_of_simple_matches_injective(n):
    for z in enumerate_subspaces(n):
        tot = tot_resolution(simple_functor(PosetView.W(n), z))
        inj = inj_resolution_simple(n, z)
        for i in range(len(tot.poset)):
            a, b = tot.evaluate(i).dims, inj.evaluate(i).dims
            assert a[: len(b)] == b and not any(a[len(b):])


@SEEDS
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_tot_exact_on_random(seed, n):
    f = random_functor(PosetView.W(n), np.random.default_rng(seed))
    tot = tot_resolution(f)
    tot.check_natural()
    assert tot.is_exact()


def test_zero_functor_bicomplex_is_zero():
    P = PosetView.W(2)
    f = PosetFunctor(P, [0] * len(P), {pair: GF2Matrix(0, 0) for pair in P.cover_pairs()})
    B = B_bicomplex(f)
    assert not any(B.dims.values())


def test_bicomplex_support_is_triangle():
    n = 3
    bic = bicomplex_I(constant_functor(PosetView.W(n)))
    for p, q in bic.grid:
        assert 0 <= p <= n and q <= 0 and p + q >= 0


def test_ext_examples():
    for n in (1, 2, 3):
        P = PosetView.W(n)
        for w in enumerate_subspaces(n):
            e = ext_dims(simple_functor(P, w))
            assert e == [steinberg(w.dim).dim if k == w.dim else 0 for k in range(n + 1)]
        # C1 of the constant functor is the dual Lusztig complex, hence acyclic
        assert ext_dims(constant_functor(P)) == [0] * (n + 1)
        for w in enumerate_subspaces(n):
            # injectives are acyclic for Hom(S_0, -); projectives are not (P_V = S_V)
            assert ext_dims(injective_functor(P, w)) == [int(w.dim == 0)] + [0] * n
        assert ext_dims(projective_functor(P, Subspace.full(n)))[n] == steinberg(n).dim
    assert ext_from_S0(simple_functor(PosetView.W(0), Subspace.zero(0)), 0).dim == 1
    assert ext_dims(constant_functor(PosetView.W(0))) == [1]


def test_oliver_examples():
    P = PosetView.W0(2)
    c = oliver_complex(constant_functor(P))
    assert c.dims == [3, 2]
    assert [oliver_limits(constant_functor(P), k) for k in (0, 1)] == [1, 0]
    assert oliver_limits(simple_functor(P, Subspace.full(2)), 1) == 2
    with pytest.raises(ValueError):
        oliver_complex(constant_functor(PosetView.W(2)))


@SEEDS
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_oliver_matches_L(seed, n):
    f = random_functor(PosetView.W0(n), np.random.default_rng(seed))
    r = cross_check_oliver(f)
    assert r.ok, r.failures
    assert r.data["L"][: len(derived_limit_dims(f))] == derived_limit_dims(f)


def test_klim_examples():
    P = PosetView.W(2)
    r = klim_bridge(injective_functor(P, Subspace.full(2)))
    assert r.ok and not any(r.data["lim"][1:])
    r = klim_bridge(simple_functor(P, Subspace.full(2)))
    assert r.ok and r.data["lim"][1] == 2 == r.data["ext"][2]


@SEEDS
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_klim_on_random(seed, n):
    r = klim_bridge(random_functor(PosetView.W(n), np.random.default_rng(seed)))
    assert r.ok, r.failures


def test_BE1_simple_top_row():
    r = BE1_check(simple_functor(PosetView.W(2), Subspace.full(2)))
    assert r.ok
    # only q = 0 survives, and that row is Lu2 of V
    rows = {key: d for key, d in r.data["e1"].items()}
    assert set(int(k.split(",")[1]) for k in rows) == {0}
    assert [rows.get(f"{p},0", 0) for p in range(3)] == [1, 3, 2]


@pytest.mark.parametrize("seed", range(10))
def test_BE1_random_n2(seed):
    r = BE1_check(random_functor(PosetView.W(2), np.random.default_rng(seed)))
    assert r.ok, r.failures


def test_require_raises():
    with pytest.raises(OracleMismatch):
        require(Report(False, {}, [{"k": 0}]), "demo")
    assert require(Report(True), "demo").ok
