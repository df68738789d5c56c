"""Compare the compiled and numpy context-count kernels.

    python benchmarks/bench_kernel.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from ufcast.kernel import BACKENDS, order_profile

CASES = [
    ("binary t=20000 D=32", 2, 20_000, 32),
    ("binary t=2000 D=32", 2, 2_000, 32),
    ("level-10 t=2000 D=32", 1024, 2_000, 32),
    ("4-ary t=50000 D=8", 4, 50_000, 8),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    names = sorted(BACKENDS)
    print(f"{'case':<24}" + "".join(f"{n:>12}" for n in names) + ("   speedup" if len(names) > 1 else ""))
    for label, size, t, depth in CASES:
        x = rng.integers(size, size=t)
        res = {n: best_of(lambda n=n: order_profile(x, size, depth, backend=n), args.repeat) for n in names}
        row = f"{label:<24}" + "".join(f"{res[n]:>11.4f}s" for n in names)
        if "cython" in res:
            row += f"   {res['python'] / res['cython']:>6.1f}x"
        print(row)


if __name__ == "__main__":
    main()
