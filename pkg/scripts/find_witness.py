"""Search for a sparse m = 3 connection whose j = 2 invariant W is nonzero.

Candidates are connections with one or two monomial Christoffel entries,
tried in order of total size; the first hit is written as a JSON fixture.
"""
import argparse
import json
from itertools import combinations, product

from projcalc.algebra import Poly, chart_variables
from projcalc.cartan import solve_normality
from projcalc.connection import Connection
from projcalc.invariants import invariant_t

M = 3
V = chart_variables(M)


def monomials(max_degree):
    for exps in product(range(max_degree + 1), repeat=M):
        if 0 < sum(exps) <= max_degree:
            yield exps


def candidates(max_degree):
    slots = [(i, j, k) for i, j, k in product(range(M), repeat=3) if j <= k]
    entries = [(s, e) for s in slots for e in monomials(max_degree)]
    entries.sort(key=lambda se: sum(se[1]))
    for n in (1, 2):
        for combo in combinations(entries, n):
            if len({s for s, _ in combo}) == n:
                yield combo


def build(combo):
    table = {s: Poly(V, {e: 1}) for s, e in combo}
    return Connection.from_function(M, lambda i, j, k: table.get((i, j, k), 0), V)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-degree", type=int, default=2)
    ap.add_argument("--out", default="witness_connection.json")
    args = ap.parse_args()
    for combo in candidates(args.max_degree):
        c = build(combo)
        t = invariant_t(solve_normality(c))
        if not t.is_zero():
            print("found", c.to_json())
            with open(args.out, "w") as fh:
                json.dump(c.to_json(), fh, indent=2, sort_keys=True)
            return
    print("no witness found")


if __name__ == "__main__":
    main()
