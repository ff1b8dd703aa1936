"""Timing comparison of the compiled and pure kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Times the three hot kernels on the same inputs through both backends
and prints a small table.  The compiled module is loaded directly, so
the VALIM_PURE switch does not matter here.
"""

import argparse
import random
import statistics
import time

from valim._kernels import pure

try:
    from valim._kernels import _fastcore
except ImportError:
    _fastcore = None


def rand_up(rng, n):
    # random poset as up-masks, built from a random DAG on 0..n-1
    up = [1 << i for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.3:
                up[i] |= 1 << j
    for i in range(n - 1, -1, -1):
        m = up[i]
        acc = m
        while m:
            b = m & -m
            acc |= up[b.bit_length() - 1]
            m ^= b
        up[i] = acc
    return up


def timeit(fn, repeat):
    best = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best.append(time.perf_counter() - t0)
    return min(best), statistics.median(best)


def bench(repeat):
    rng = random.Random(17)
    cases = []
    for _ in range(40):
        n = rng.randint(10, 16)
        up = rand_up(rng, n)
        opens = pure.enumerate_upsets(up, n, 1 << 22)
        opens.sort(key=lambda m: (bin(m).count("1"), m))
        weights = [rng.randrange(0, 1 << 30) for _ in range(n)]
        values = pure.eval_weights(weights, opens)
        cases.append((n, up, opens, weights, values))

    rows = []

    def add(name, pure_fn, fast_fn):
        p_best, p_med = timeit(pure_fn, repeat)
        if fast_fn is None:
            rows.append((name, p_best, p_med, None, None))
            return
        f_best, f_med = timeit(fast_fn, repeat)
        rows.append((name, p_best, p_med, f_best, f_med))

    add(
        "enumerate_upsets",
        lambda: [pure.enumerate_upsets(up, n, 1 << 22)
                 for n, up, *_ in cases],
        None if _fastcore is None else
        lambda: [_fastcore.enumerate_upsets(list(up), n, 1 << 22)
                 for n, up, *_ in cases],
    )
    add(
        "scan_axioms",
        lambda: [pure.scan_axioms(opens, values)
                 for n, up, opens, w, values in cases],
        None if _fastcore is None else
        lambda: [_fastcore.scan_axioms(opens, values, n)
                 for n, up, opens, w, values in cases],
    )
    add(
        "eval_weights",
        lambda: [pure.eval_weights(w, opens)
                 for n, up, opens, w, values in cases],
        None if _fastcore is None else
        lambda: [_fastcore.eval_weights(w, opens)
                 for n, up, opens, w, values in cases],
    )
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _fastcore is None:
        print("compiled backend not built; timing the pure path only")
    rows = bench(args.repeat)
    print(f"{'kernel':<18} {'pure best':>10} {'compiled best':>14} "
          f"{'speedup':>8}")
    for name, p_best, p_med, f_best, f_med in rows:
        if f_best is None:
            print(f"{name:<18} {p_best * 1e3:>8.2f}ms {'-':>14} {'-':>8}")
        else:
            print(
                f"{name:<18} {p_best * 1e3:>8.2f}ms {f_best * 1e3:>12.2f}ms "
                f"{p_best / f_best:>7.1f}x"
            )


if __name__ == "__main__":
    main()
