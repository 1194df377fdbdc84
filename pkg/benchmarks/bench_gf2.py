"""numba vs numpy kernels on bit-packed GF(2) matrices.

    python3 benchmarks/bench_gf2.py [--repeat 5]

Times rank, product, and the n = 4 Lusztig homology on both backends and
checks that the results agree. The first numba call per shape is a warm-up
(JIT compilation) and is not timed.
"""
import argparse
import time

import numpy as np

from steinberg_lab import _kernels as K
from steinberg_lab.gf2 import GF2Matrix, rank
from steinberg_lab.steinberg import lusztig_complex, steinberg_interval


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(rng):
    for r, c in ((64, 64), (256, 256), (512, 1024), (1024, 1024)):
        a = GF2Matrix.from_dense(rng.integers(0, 2, (r, c), dtype=np.uint8))
        b = GF2Matrix.from_dense(rng.integers(0, 2, (c, r), dtype=np.uint8))
        yield f"rank {r}x{c}", lambda a=a: rank(a)
        yield f"matmul {r}x{c} @ {c}x{r}", lambda a=a, b=b: (a @ b).int_rows()

    def lusztig4():
        steinberg_interval.cache_clear()
        return [lusztig_complex(4, v).homology_dims() for v in (1, 2)]
    yield "Lusztig n=4 homology", lusztig4


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    print(f"{'case':34s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    old = K.get_backend()
    try:
        for name, fn in cases(np.random.default_rng(args.seed)):
            K.set_backend("numba")
            fn()  # compile
            t_nb, r_nb = best_of(fn, args.repeat)
            K.set_backend("numpy")
            t_np, r_np = best_of(fn, args.repeat)
            if r_nb != r_np:
                raise SystemExit(f"backends disagree on {name}")
            print(f"{name:34s} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:7.1f}x")
    finally:
        K.set_backend(old)


if __name__ == "__main__":
    main()
