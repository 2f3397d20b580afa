#!/usr/bin/env python3
"""Cross-check the feasible-flow routing decision against the exhaustive
backtracking oracle on random instances and report the disagreement count.
"""

import argparse
import random
import time

from shapegraph import RoutingInstance, witness_exists_basic, witness_exists_general
from shapegraph.core import ONE, OPT, PLUS, STAR

BASIC = [ONE, OPT, PLUS, STAR]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--max-side", type=int, default=4, help="max sources/sinks per instance")
    ap.add_argument("--density", type=float, default=0.6, help="edge probability")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    disagreements = 0
    positives = 0
    start = time.monotonic()
    for _ in range(args.samples):
        ns, nu = rng.randint(1, args.max_side), rng.randint(1, args.max_side)
        sources = tuple((f"v{i}", rng.choice(BASIC)) for i in range(ns))
        sinks = tuple((f"u{j}", rng.choice(BASIC)) for j in range(nu))
        allowed = frozenset(
            (v, u) for v, _ in sources for u, _ in sinks if rng.random() < args.density
        )
        inst = RoutingInstance(sources, sinks, allowed)
        flow = witness_exists_basic(inst) is not None
        oracle = witness_exists_general(inst) is not None
        positives += oracle
        disagreements += flow != oracle
    elapsed = time.monotonic() - start
    print(f"samples:       {args.samples}")
    print(f"positives:     {positives}")
    print(f"disagreements: {disagreements}")
    print(f"seconds:       {elapsed:.2f}")


if __name__ == "__main__":
    main()
