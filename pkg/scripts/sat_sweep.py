#!/usr/bin/env python3
"""Sweep small CNF formulas through the satisfiability-to-embedding encoding
and compare the embedding verdict with brute-force satisfiability.
"""

import argparse
import time
from itertools import combinations, product

from shapegraph import (
    CnfFormula,
    cnf_satisfiable,
    embeds,
    normalize_cnf,
    sat_embedding_instance,
)


def consistent_clauses(num_vars: int):
    out = []
    for signs in product((0, 1, -1), repeat=num_vars):
        clause = tuple(i * s for i, s in zip(range(1, num_vars + 1), signs) if s)
        if clause:
            out.append(clause)
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-vars", type=int, default=3)
    ap.add_argument("--max-clauses", type=int, default=2)
    args = ap.parse_args()

    total = disagreements = 0
    max_k = 0
    start = time.monotonic()
    for v in range(1, args.max_vars + 1):
        clauses = consistent_clauses(v)
        for m in range(1, args.max_clauses + 1):
            for cls in combinations(clauses, m):
                phi = normalize_cnf(CnfFormula(v, cls))
                max_k = max(max_k, phi.occurrences_per_variable)
                h, k = sat_embedding_instance(phi)
                ok, _ = embeds(h, k)
                total += 1
                disagreements += ok != cnf_satisfiable(phi)
    elapsed = time.monotonic() - start
    print(f"formulas:        {total}")
    print(f"disagreements:   {disagreements}")
    print(f"max normalized k: {max_k}")
    print(f"seconds:         {elapsed:.2f}")


if __name__ == "__main__":
    main()
