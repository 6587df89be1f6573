"""Regenerate the forgetful-map depth tables for a list of primes.

For each prime this prints the CSV table (depth, fresh ends y, cumulative
ends x, lambda, class number h) and a one-line summary: the largest depth
with lambda < 1, whether y = h held on every such row, and the first depth
at which the cumulative count saturates the supersingular census.
"""

import argparse
import sys

sys.path.insert(0, "src")

from osidh.algebra import create_field
from osidh.graphstats import forgetful_csv, forgetful_table, ss_count_formula
from osidh.modpoly import load_db


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", default="599,3947",
                    help="comma-separated primes (default: one 10-bit, one 12-bit)")
    ap.add_argument("--ell", type=int, default=2)
    ap.add_argument("--disc", type=int, default=-3)
    ap.add_argument("--max-depth", type=int, default=13)
    args = ap.parse_args()

    db = load_db()
    for p in (int(s) for s in args.primes.split(",")):
        field = create_field(p)
        rows = forgetful_table(db, field, args.ell, args.disc, args.max_depth)
        print(f"# p = {p}")
        print(forgetful_csv(rows))
        injective = [r for r in rows if r.lam < 1]
        law = all(r.y == r.h for r in injective)
        ss = ss_count_formula(p)
        sat = next((r.depth for r in rows if r.x == ss), None)
        print(f"# lambda < 1 through depth {injective[-1].depth}; "
              f"y = h on all such rows: {law}; "
              f"#SS({p}) = {ss} first reached at depth {sat}")
        print()


if __name__ == "__main__":
    main()
