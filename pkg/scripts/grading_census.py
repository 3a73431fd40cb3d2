#!/usr/bin/env python3
"""Census of the derivative grading of the numerator polynomials.

For each even order the numerator monomials of a^(n-3) * a_n carry two
integer gradings: the plain exponent sum and the derivative-weighted sum.
Both collapse to the same value per monomial, and only two values occur,
n and n-2.  This script tabulates how many monomials sit at each weight
and flags anything outside the pattern.
"""

import argparse
import sys
from collections import Counter

from rwheat.assembly import a_term
from rwheat.engine import ParametrixEngine
from rwheat.symbols import hopf_symbols
from rwheat.verification import q_grading_check


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-order", type=int, default=12)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    engine = ParametrixEngine(
        hopf_symbols(), max_order=args.max_order, jobs=args.jobs
    )
    failures = 0
    print(f"{'order':>5}  {'terms':>5}  weight census")
    for n in range(0, args.max_order + 1, 2):
        poly = a_term(engine, n)
        ok, offending = q_grading_check(poly)
        _, terms = poly.q_form()
        census = Counter(sum(jets) for jets in terms)
        cells = ", ".join(f"{w}: {c}" for w, c in sorted(census.items()))
        verdict = "" if ok else f"  FAIL {offending}"
        print(f"{n:>5}  {len(terms):>5}  {{{cells}}}{verdict}")
        failures += not ok
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
