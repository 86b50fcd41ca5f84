"""Compare the numba and numpy verifier kernels.

Times subgroup closure and the h*g*k product search over SL(2, F_q) for a
few field sizes. Run: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from dcsep import kernels

CASES = [(101, (0, 1)), (1009, (0, 1)), (7, (1, 0, 1)), (31, (1, 0, 1)), (4099, (0, 1))]


def random_sl2(rng, T):
    while True:
        a, b, c = (int(x) for x in rng.integers(1, T.p, 3))
        d = (1 + b * c) * pow(a, -1, T.p) % T.p
        return [a, b, c, d]


def diag_gen(T):
    # diag(x, 1/x) with x the primitive element: cyclic of order q - 1
    x = int(T.exp[1])
    return [x, 0, 0, int(T.exp[(T.q - 2) % (T.q - 1)])]


def unipotent(T):
    return [1, 1, 0, 1]


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    kernels.warmup()
    print(f"{'q':>6} {'|H|':>6} {'|K|':>6} {'backend':>8} {'closure s':>10} {'search s':>10} {'products':>10}")
    rng = np.random.default_rng(0)
    for p, factor in CASES:
        T = kernels.fq_tables(p, factor)
        H = [diag_gen(T)]
        K = [unipotent(T)] if len(factor) == 2 else [[1, T.encode([0, 1]), 0, 1], unipotent(T)]
        g = random_sl2(rng, T)
        target = random_sl2(rng, T)
        rows = []
        for be in backends:
            tc, Hs = timed(lambda: kernels.closure(H, T, False, backend=be), args.repeat)
            Ks = kernels.closure(K, T, False, backend=be)
            ts, (found, n) = timed(lambda: kernels.find_product(Hs, [g], Ks, [target], T, False, be), args.repeat)
            rows.append((be, tc, ts, found, n))
            print(f"{T.q:>6} {len(Hs):>6} {len(Ks):>6} {be:>8} {tc:>10.4f} {ts:>10.4f} {n:>10}")
        if len(rows) == 2:
            assert rows[0][3] == rows[1][3], "backends disagree"
            print(f"{'':>6} speedup (numpy/numba) closure {rows[0][1] / rows[1][1]:.1f}x, search {rows[0][2] / rows[1][2]:.1f}x")


if __name__ == "__main__":
    main()
