#!/usr/bin/env python3
"""Measure how the minimal counter-example grows with the parameter of the
built-in exponential schema family.

For each n, runs the bounded search with increasing node budgets until a
counter-example appears, then reports its size and the wall-clock time.
"""

import argparse
import time

from shapegraph import Budget, NotContained, exponential_family, find_counterexample


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=2, help="largest family parameter")
    ap.add_argument("--max-nodes", type=int, default=10, help="node budget ceiling")
    ap.add_argument("--timeout", type=float, default=300.0, help="per-search timeout (s)")
    args = ap.parse_args()

    print(f"{'n':>3} {'nodes':>6} {'seconds':>9}")
    for n in range(1, args.max_n + 1):
        h, k = exponential_family(n)
        start = time.monotonic()
        found = None
        for budget_nodes in range(1, args.max_nodes + 1):
            v = find_counterexample(
                h, k, Budget(max_nodes=budget_nodes, max_card=1, timeout=args.timeout)
            )
            if isinstance(v, NotContained):
                found = len(v.witness.nodes)
                break
        elapsed = time.monotonic() - start
        print(f"{n:>3} {found if found is not None else '-':>6} {elapsed:>9.2f}")


if __name__ == "__main__":
    main()
