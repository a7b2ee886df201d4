"""Compute the oracle values that tests/test_pinned.py freezes.

Run once before trusting the engine; the printed numbers are copied into the
test module by hand.
"""

import time

from aritylab import oracle
from aritylab.relations import graph_of
from aritylab.structures import cyclic, symmetric


def main():
    for q in (3, 4, 5):
        z = cyclic(q)
        t0 = time.perf_counter()
        v = oracle.brute_relation_arity(z, graph_of(z, "mul"))
        print(f"relation_arity graph(mul) Z{q} = {v}  ({time.perf_counter() - t0:.1f}s)")
    for z in (cyclic(3), cyclic(4), symmetric(3)):
        t0 = time.perf_counter()
        v = oracle.brute_theory_arity(z)
        print(f"theory_arity {z.name} = {v}  ({time.perf_counter() - t0:.1f}s)")
    z3 = cyclic(3)
    t0 = time.perf_counter()
    v = oracle.brute_delta_based(z3, [graph_of(z3, "mul")], max_m=3)
    print(f"delta_based Z3 {{graph(mul)}} max_m=3: {v}  ({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
