"""Compare the numba and pure-numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]

Both backends are called directly (no env flag needed); outputs are checked
for equality before timing.  The numba kernels are warmed up first so JIT
compilation is not counted.
"""

import argparse
import time

import numpy as np

from aritylab import corpus, kernels
from aritylab.arity import Analyzer

CASES = [("Z5", 5), ("S3", 5), ("Z6", 6), ("C5", 6), ("flat_monoid_5", 6)]
QUICK = [("Z5", 4), ("S3", 4)]


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="small cases only")
    args = ap.parse_args(argv)
    if "numba" not in kernels.BACKENDS:
        raise SystemExit("numba backend unavailable")
    np_orbit, np_refine = kernels.BACKENDS["numpy"]
    nb_orbit, nb_refine = kernels.BACKENDS["numba"]

    print(f"{'case':<16} {'m':>2} {'tuples':>8} {'kernel':<8} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for name, m in QUICK if args.quick else CASES:
        s = corpus.load(name)
        an = Analyzer(s)
        perms = an.aut.generator_array()
        labels = np.zeros(s.size**m, dtype=np.int64)
        column = an.partition(2).class_of[kernels.ranks_of(kernels.tuple_digits(s.size, m)[:, :2], s.size)]

        a, b = np_orbit(perms, s.size, m), nb_orbit(perms, s.size, m)
        assert np.array_equal(a[0], b[0]) and a[1] == b[1]
        a, b = np_refine(labels, column), nb_refine(labels, column)
        assert np.array_equal(a[0], b[0]) and a[1] == b[1]

        for kernel, f_np, f_nb, call in [
            ("orbits", np_orbit, nb_orbit, lambda f: f(perms, s.size, m)),
            ("refine", np_refine, nb_refine, lambda f: f(labels, column)),
        ]:
            t_np = best_of(lambda: call(f_np), args.repeat)
            t_nb = best_of(lambda: call(f_nb), args.repeat)
            print(
                f"{name:<16} {m:>2} {s.size**m:>8} {kernel:<8} {t_np * 1e3:>10.2f} {t_nb * 1e3:>10.2f} "
                f"{t_np / t_nb:>7.1f}x"
            )


if __name__ == "__main__":
    main()
