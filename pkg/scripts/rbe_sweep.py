#!/usr/bin/env python3
"""Exhaustively compare flat-expression membership with the general matcher
over every atom multiset up to a size bound, on all bags up to a size bound.
"""

import argparse
import time
from collections import Counter
from itertools import combinations_with_replacement

from shapegraph.core import ONE, OPT, PLUS, STAR
from shapegraph.errors import AlphabetError
from shapegraph.rbe import Rbe0, bag_matches, rbe0_matches, rbe0_to_rbe

BASIC = [ONE, OPT, PLUS, STAR]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-atoms", type=int, default=4)
    ap.add_argument("--max-bag", type=int, default=6)
    ap.add_argument("--symbols", default="a,b,c")
    args = ap.parse_args()

    symbols = tuple(args.symbols.split(","))
    atoms = [(s, iv) for s in symbols for iv in BASIC]
    bags = []

    def gen(idx, budget, cur):
        if idx == len(symbols):
            bags.append(Counter(cur))
            return
        for c in range(budget + 1):
            nxt = dict(cur)
            if c:
                nxt[symbols[idx]] = c
            gen(idx + 1, budget - c, nxt)

    gen(0, args.max_bag, {})

    comparisons = disagreements = 0
    start = time.monotonic()
    for k in range(args.max_atoms + 1):
        for chosen in combinations_with_replacement(atoms, k):
            e0 = Rbe0(tuple(chosen))
            e = rbe0_to_rbe(e0)
            for w in bags:
                try:
                    general = bag_matches(e, w)
                except AlphabetError:
                    general = False
                comparisons += 1
                disagreements += rbe0_matches(e0, w) != general
    elapsed = time.monotonic() - start
    print(f"comparisons:   {comparisons}")
    print(f"disagreements: {disagreements}")
    print(f"seconds:       {elapsed:.2f}")


if __name__ == "__main__":
    main()
