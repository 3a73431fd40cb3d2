#!/usr/bin/env python3
"""Compute the expansion coefficients up to a chosen order and print them.

Runs one engine per chart, reuses levels across orders, prints each a_n in
plain text (or LaTeX with --latex) together with wall-clock timings.  Handy
for eyeballing the growth of the expressions; use the package CLI for
machine-readable artifacts.
"""

import argparse
import time

from rwheat.assembly import a_term
from rwheat.cache import resolve_cache_dir, LevelCache
from rwheat.cli import render_text
from rwheat.engine import ParametrixEngine
from rwheat.symbols import hopf_symbols, spherical_symbols


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-order", type=int, default=8)
    ap.add_argument("--coords", choices=("hopf", "spherical"), default="hopf")
    ap.add_argument("--latex", action="store_true")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--cache", default=None)
    args = ap.parse_args()

    table = hopf_symbols() if args.coords == "hopf" else spherical_symbols()
    cache_dir = resolve_cache_dir(args.cache)
    cache = LevelCache(cache_dir) if cache_dir else None
    engine = ParametrixEngine(
        table, max_order=args.max_order, jobs=args.jobs, cache=cache
    )
    t_all = time.perf_counter()
    for n in range(0, args.max_order + 1, 2):
        t0 = time.perf_counter()
        poly = a_term(engine, n)
        dt = time.perf_counter() - t0
        if args.latex:
            print(f"% a_{n}  ({dt:.2f}s, {len(poly.terms)} terms)")
            print(f"a_{{{n}}}(t) = {poly.latex()}")
        else:
            print(f"# {dt:6.2f}s  {len(poly.terms):4d} terms")
            print(render_text(poly))
        print()
    print(f"# total {time.perf_counter() - t_all:.2f}s ({args.coords} chart)")


if __name__ == "__main__":
    main()
