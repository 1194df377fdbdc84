"""Acceptance suite: one test per criterion, each recording PASS/FAIL.

Run under pytest for the summary block, or directly with
``python3 tests/test_acceptance.py``.
"""
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from oracles import sq_oracle, steinberg_dim_formula, top_homology_of_building  # noqa: E402
from steinberg_lab.functors import (injective_functor,  # noqa: E402
                                    projective_functor, random_functor, simple_functor)
from steinberg_lab.lattice import PosetView, enumerate_subspaces  # noqa: E402
from steinberg_lab.pf import (M_of_V, ephi_doubling_check, generation_check, r_pf,  # noqa: E402
                              steinberg_dual_intertwiner)
from steinberg_lab.resolutions import (cross_check_oliver, ext_dims,  # noqa: E402
                                       inj_resolution_simple, klim_bridge,
                                       proj_resolution_simple, tot_resolution)
from steinberg_lab.steenrod import (FormProduct, GradedIdeal, Poly, a_stability_check,  # noqa: E402
                                    all_primes, monomials, serre_radical_check, sq,
                                    squarefree_products, total_sq)
from steinberg_lab.steinberg import (euler_recursion_dims, fault_report, lusztig_complex,  # noqa: E402
                                     random_mutation, steinberg)

RESULTS: dict = {}

TITLES = {
    1: "Steinberg dims 1,1,2,8,64 = Euler recursion, n=4 < 60 s",
    2: "Lusztig complexes (both variants) acyclic, d∘d = 0, n = 1..4",
    3: "Ext(S_0, S_W) = St_W in degree dim W only, n <= 3",
    4: "Oliver = L• on simples, standard functors, >= 50 random",
    5: "lim^k(F∘i) = Ext^{k+1}(S_0, F) on >= 30 random",
    6: "projective/injective/Tot resolutions exact, simples + >= 20 random",
    7: "M(V;h): n<=1 table, M^0 = St, intertwiner, Pf(H*V) derived = 0 to D=12",
    8: "doubling identity, n=2 D=8 and n=3 D=4",
    9: "generation by degree 0, n=2 D=8 and n=3 D=6, h <= 2",
    10: "Steenrod suite: Cartan x100, instability, A-stability D=8, radical",
    11: "mutation sensitivity: 50 seeded single-bit flips at n=2 all detected",
}


def record(num: int, ok: bool, detail: str = "") -> None:
    RESULTS[num] = (bool(ok), detail)
    assert ok, f"criterion {num} failed: {detail}"


def summary_lines() -> list[str]:
    out = []
    for num in sorted(TITLES):
        if num in RESULTS:
            ok, detail = RESULTS[num]
            tag = "PASS" if ok else "FAIL"
        else:
            tag, detail = "FAIL", "not run"
        line = f"[{tag}] criterion {num:2d}: {TITLES[num]}"
        out.append(line + (f"  ({detail})" if detail else ""))
    return out


def _random(poset, count, seed0):
    return [random_functor(poset(n), np.random.default_rng(seed0 + i)) for i in range(count)
            for n in [1 + i % 3]]


# ---------------------------------------------------------------- 1

def test_criterion_01_steinberg_dims():
    t = time.perf_counter()
    dims = [steinberg(n).dim for n in range(5)]
    elapsed = time.perf_counter() - t
    euler = euler_recursion_dims(4)
    oracle = [steinberg_dim_formula(n) for n in range(5)]
    building = [top_homology_of_building(n) for n in range(4)]
    ok = dims == euler == oracle == [1, 1, 2, 8, 64] and building == dims[:4] and elapsed < 60
    record(1, ok, f"dims={dims}, euler={euler}, {elapsed:.2f}s")


# ---------------------------------------------------------------- 2

def test_criterion_02_lusztig_acyclic():
    bad = []
    t = time.perf_counter()
    for n in range(1, 5):
        for v in (1, 2):
            c = lusztig_complex(n, v)
            if not c.is_square_zero() or any(c.homology_dims()):
                bad.append((n, v))
    record(2, not bad, f"8 complexes, {time.perf_counter() - t:.2f}s" if not bad else f"bad={bad}")


# ---------------------------------------------------------------- 3

def test_criterion_03_ext_table():
    bad = []
    count = 0
    for n in range(4):
        P = PosetView.W(n)
        for w in enumerate_subspaces(n):
            got = ext_dims(simple_functor(P, w))
            want = [steinberg_dim_formula(w.dim) if k == w.dim else 0 for k in range(n + 1)]
            count += 1
            if got != want:
                bad.append((n, w.key, got, want))
    record(3, not bad, f"{count} simples" if not bad else f"bad={bad}")


# ---------------------------------------------------------------- 4

def test_criterion_04_oliver():
    functors = []
    for n in (1, 2, 3):
        W, W0 = PosetView.W(n), PosetView.W0(n)
        for w in W0.elements:
            functors.append(simple_functor(W0, w))
        for w in W.elements:
            functors.append(injective_functor(W, w).restrict(W0))
            functors.append(projective_functor(W, w).restrict(W0))
    standard = len(functors)
    functors += _random(PosetView.W0, 60, 1000)
    bad = [f.to_json() for f in functors if not cross_check_oliver(f).ok]
    record(4, not bad, f"{standard} standard + 60 random" if not bad else f"{len(bad)} mismatches")


# ---------------------------------------------------------------- 5

def test_criterion_05_klim():
    bad = []
    fs = _random(PosetView.W, 36, 2000)
    for f in fs:
        r = klim_bridge(f)
        if not r.ok:
            bad.append(r.failures)
    record(5, not bad, f"{len(fs)} random" if not bad else f"bad={bad[:2]}")


# ---------------------------------------------------------------- 6

def test_criterion_06_resolutions():
    bad = []
    simples = 0
    for n in (1, 2, 3):
        P = PosetView.W(n)
        for w in enumerate_subspaces(n):
            for fc in (proj_resolution_simple(n, w), inj_resolution_simple(n, w),
                       tot_resolution(simple_functor(P, w))):
                fc.check_natural()
                simples += 1
                if not fc.is_exact():
                    bad.append((n, w.key))
    fs = _random(PosetView.W, 24, 3000)
    for f in fs:
        tot = tot_resolution(f)
        tot.check_natural()
        if not tot.is_exact():
            bad.append(f.to_json())
    record(6, not bad, f"{simples} simple resolutions + {len(fs)} random Tot" if not bad else f"bad={bad[:2]}")


# ---------------------------------------------------------------- 7

def test_criterion_07_M_of_V():
    t = time.perf_counter()
    fails = []
    D = 12
    for n in (0, 1):
        if M_of_V(n, 1, D) != [1] + [0] * D:
            fails.append(f"(a) n={n}")
    for n in range(4):
        for h in (1, 2, 3):
            if M_of_V(n, h, 0)[0] != steinberg_dim_formula(n):
                fails.append(f"(b) n={n} h={h}")
            _, rep = steinberg_dual_intertwiner(n, h)
            if not rep.ok:
                fails.append(f"(c) n={n} h={h}")
    for n in (1, 2, 3):
        if any(r_pf(FormProduct(n), 1, n, D)):
            fails.append(f"(d) n={n}")
    elapsed = time.perf_counter() - t
    if elapsed > 300:
        fails.append(f"time {elapsed:.0f}s")
    record(7, not fails, f"{elapsed:.1f}s" if not fails else "; ".join(fails))


# ---------------------------------------------------------------- 8

def test_criterion_08_doubling():
    reps = [ephi_doubling_check(2, 1, 8), ephi_doubling_check(3, 1, 4)]
    record(8, all(r.ok for r in reps), "; ".join(f"n={r.data['n']} lhs={r.data['lhs']}" for r in reps))


# ---------------------------------------------------------------- 9

def test_criterion_09_generation():
    reps = [generation_check(n, h, D) for n, D in ((2, 8), (3, 6)) for h in (1, 2)]
    bad = [r.failures for r in reps if not r.ok]
    record(9, not bad, "4 runs" if not bad else f"bad={bad}")


# ---------------------------------------------------------------- 10

def _random_poly(rng, n, max_deg=5):
    terms = set()
    for _ in range(int(rng.integers(0, 6))):
        d = int(rng.integers(0, max_deg + 1))
        ms = monomials(n, d)
        terms ^= {ms[int(rng.integers(0, len(ms)))]}
    return Poly(n, terms)


def test_criterion_10_steenrod():
    rng = np.random.default_rng(10)
    fails = []
    for _ in range(100):
        n = int(rng.integers(1, 4))
        p, q = _random_poly(rng, n), _random_poly(rng, n)
        if total_sq(p * q) != total_sq(p) * total_sq(q):
            fails.append("cartan")
        for i in range(8):
            if sq(i, p).terms != sq_oracle(i, p.terms):
                fails.append("oracle")
    for n in (1, 2, 3):
        for d in range(6):
            for m in monomials(n, d):
                p = Poly.monomial(m)
                if sq(d, p) != p.square() or not all(sq(i, p).is_zero() for i in range(d + 1, d + 4)):
                    fails.append("instability")
    for n in (1, 2, 3):
        for e in squarefree_products(n, 3):
            if not a_stability_check(GradedIdeal.principal(e, 8)).ok:
                fails.append(f"stability ({e.forms})")
        for e in (FormProduct(n, (1,)) ** 3, FormProduct(n, (1, 1, 1 << (n - 1)))):
            if not a_stability_check(GradedIdeal.principal(e, 8)).ok:
                fails.append(f"stability ({e.forms})")
        for ideal in all_primes(n, 8):
            if not a_stability_check(ideal).ok:
                fails.append(f"stability {ideal.label}")
    radical = 0
    for n in (1, 2):
        for e in squarefree_products(n, 3):
            for d in range(4):
                radical += 1
                if not serre_radical_check(e, d, 2).ok:
                    fails.append(f"radical {e.forms} d={d}")
    record(10, not fails, f"100 pairs, {radical} radical checks" if not fails else "; ".join(sorted(set(fails))[:5]))


# ---------------------------------------------------------------- 11

def test_criterion_11_mutations():
    detected = 0
    for seed in range(50):
        c = lusztig_complex(2, 1 + seed % 2)
        _, mutated = random_mutation(c, np.random.default_rng(seed))
        detected += fault_report(mutated)["detected"]
    exhaustive = total = 0
    for v in (1, 2):
        c = lusztig_complex(2, v)
        for p in range(1, len(c.dims)):
            rows, cols = c.boundary(p).shape
            for i in range(rows):
                for j in range(cols):
                    total += 1
                    exhaustive += fault_report(c.with_flipped_bit(p, i, j))["detected"]
    ok = detected == 50 and exhaustive == total
    record(11, ok, f"seeded {detected}/50, exhaustive {exhaustive}/{total}")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) and len(RESULTS) == len(TITLES) else 1)
