import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_subspaces, count_subspaces, gl_order, span
from steinberg_lab.errors import CapError
from steinberg_lab.lattice import (GLElement, PosetView, Subspace, act, chains, enumerate_GL,
                                   enumerate_subspaces, gaussian_binomial, gl_generators,
                                   lattice_ops, poset_from_label, project_subspace,
                                   quotient_chart, subspace_intersection, subspace_sum)

SETTINGS = settings(max_examples=80, deadline=None)


def subspaces(n):
    return st.lists(st.integers(0, (1 << n) - 1), max_size=n + 1).map(lambda vs: Subspace.span(n, vs))


@pytest.mark.parametrize("n", range(5))
def test_counts_match_brute_force(n):
    for k in range(n + 1):
        assert len(enumerate_subspaces(n, k)) == gaussian_binomial(n, k) == count_subspaces(n, k)
    got = {frozenset(w.vectors()) for w in enumerate_subspaces(n)}
    assert got == set(all_subspaces(n))


def test_gaussian_binomial_values():
    assert [gaussian_binomial(4, k) for k in range(5)] == [1, 15, 35, 15, 1]
    assert gaussian_binomial(3, 5) == 0


def test_enumeration_order_and_cap():
    ws = enumerate_subspaces(3)
    assert ws[0] == Subspace.zero(3) and ws[-1] == Subspace.full(3)
    assert [w.sort_key for w in ws] == sorted(w.sort_key for w in ws)
    with pytest.raises(CapError):
        enumerate_subspaces(7)


@SETTINGS
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(subspaces(n), subspaces(n))))
def test_modular_law_and_canonical_form(pair):
    a, b = pair
    s, i, sub = lattice_ops(a, b)
    assert s.dim + i.dim == a.dim + b.dim
    assert set(s.vectors()) == span(a.vectors() + b.vectors())
    assert set(i.vectors()) == set(a.vectors()) & set(b.vectors())
    assert sub == (set(a.vectors()) <= set(b.vectors()))
    assert Subspace.span(a.n, reversed(a.vectors())) == a


@SETTINGS
@given(st.integers(0, 5).flatmap(subspaces))
def test_json_and_key_roundtrip(w):
    assert Subspace.from_json(json.loads(json.dumps(w.to_json()))) == w
    assert Subspace.from_key(w.key) == w


def test_noncanonical_json_rejected():
    with pytest.raises(ValueError, match="canonical"):
        Subspace.from_json({"n": 2, "rows": [3, 1]})
    with pytest.raises(ValueError):
        Subspace.span(2, [4])
    with pytest.raises(ValueError):
        Subspace.from_key("2:1,2")


@pytest.mark.parametrize("n", range(4))
def test_gl_orders(n):
    G = enumerate_GL(n)
    assert len(G) == len(set(G)) == gl_order(n)


def test_gl4_generators_generate():
    gens = gl_generators(4)
    assert len(enumerate_GL(4)) == 2
    seen = {GLElement.identity(4)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = g * s
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    assert len(seen) == gl_order(4) == 20160


@SETTINGS
@given(st.integers(0, 3), st.data())
def test_group_law(n, data):
    G = enumerate_GL(n)
    g = data.draw(st.sampled_from(G))
    h = data.draw(st.sampled_from(G))
    v = data.draw(st.integers(0, (1 << n) - 1))
    assert (g * h).apply(v) == g.apply(h.apply(v))
    assert (g * g.inverse()) == GLElement.identity(n)
    a = data.draw(subspaces(n))
    b = data.draw(subspaces(n))
    assert act(g, subspace_sum(a, b)) == subspace_sum(act(g, a), act(g, b))
    assert act(g, subspace_intersection(a, b)) == subspace_intersection(act(g, a), act(g, b))


@pytest.mark.parametrize("n", range(1, 5))
def test_quotient_chart(n):
    for w in enumerate_subspaces(n):
        proj, section = quotient_chart(n, w)
        assert proj.shape == (n - w.dim, n)
        assert proj @ section == proj.__class__.identity(n - w.dim)
        assert project_subspace(proj, w) == Subspace.zero(n - w.dim)
        assert project_subspace(proj, Subspace.full(n)) == Subspace.full(n - w.dim)


def test_posets():
    assert len(PosetView.W(3)) == 16 and len(PosetView.W0(3)) == 15
    b11 = PosetView.B(3, 1, 1)
    assert len(b11) == 14
    assert b11.max_chain_length() == 2
    assert len(chains(b11, 1)) == 21  # incident point-line pairs of the Fano plane
    assert poset_from_label("B(1,1)", 3) == b11
    with pytest.raises(ValueError):
        poset_from_label("Q", 3)
    lo, hi = Subspace.zero(3), Subspace.full(3)
    assert PosetView.interval(lo, hi).elements == b11.elements
    W = PosetView.W(2)
    assert len(W.cover_pairs()) == 6
