#!/usr/bin/env python3
"""Cross-check the production recursion against its two slow oracles.

Two independent routes to the same objects:

  1. slow_oracle_rn composes symbols literally from the defining recursion
     (no scatter schedule, no packing) and must agree with the engine's
     r-nodes key by key.  Feasible up to level 4 or so.

  2. The rescaled-node recursion computes e_{n,j,alpha} directly on the
     Hopf chart and must agree with (j-1)!^-1 a^|alpha'| sin^a3 cos^a4
     times the engine's r-node.  Terms may differ as dictionaries while
     agreeing as functions (sin^2+cos^2=1), so equality is tested modulo
     that relation.

Prints one line per level and exits nonzero on any mismatch.
"""

import argparse
import sys
import time

from rwheat.engine import ParametrixEngine, all_level_keys
from rwheat.epath import e_from_r, e_node_hopf
from rwheat.rawsym import slow_oracle_rn
from rwheat.symbols import hopf_symbols, spherical_symbols
from rwheat.symexpr import is_zero_mod_pythagoras


def check_slow_oracle(coords: str, max_n: int) -> int:
    table = hopf_symbols() if coords == "hopf" else spherical_symbols()
    engine = ParametrixEngine(table, max_order=max_n, restrict_top=False)
    failures = 0
    t0 = time.perf_counter()
    oracle = slow_oracle_rn(table, max_n)
    for n in range(max_n + 1):
        bad = 0
        keys = set(oracle[n]) | {
            (j, a) for j, a, _ in engine_nodes(engine, n)
        }
        for j, alpha in sorted(keys):
            want = oracle[n].get((j, alpha))
            got = engine.r_node(n, j, alpha)
            if want is None:
                ok = got.is_zero()
            else:
                ok = got == want or is_zero_mod_pythagoras(got - want)
            bad += not ok
        status = "ok" if not bad else f"FAIL ({bad} nodes)"
        print(f"slow oracle {coords} level {n}: {len(keys)} nodes {status}")
        failures += bad
    print(f"slow oracle {coords}: {time.perf_counter() - t0:.1f}s")
    return failures


def engine_nodes(engine, n):
    engine.ensure_level(n)
    return list(engine.iter_top(n))


def check_e_path(max_n: int) -> int:
    table = hopf_symbols()
    engine = ParametrixEngine(table, max_order=max_n, restrict_top=False)
    memo = {}
    failures = 0
    t0 = time.perf_counter()
    for n in range(max_n + 1):
        exact = fuzzy = bad = 0
        for j, alpha in all_level_keys(n):
            key = (n, j, alpha)
            via_r = e_from_r(engine, key)
            direct = e_node_hopf(key, memo)
            if via_r == direct:
                exact += 1
            elif is_zero_mod_pythagoras(via_r - direct):
                fuzzy += 1
            else:
                bad += 1
        status = "ok" if not bad else f"FAIL ({bad} nodes)"
        print(
            f"e-path level {n}: {exact} exact, {fuzzy} up to sin^2+cos^2, "
            f"{status}"
        )
        failures += bad
    print(f"e-path: {time.perf_counter() - t0:.1f}s")
    return failures


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--slow-max", type=int, default=4)
    ap.add_argument("--e-max", type=int, default=6)
    args = ap.parse_args()
    failures = 0
    for coords in ("hopf", "spherical"):
        failures += check_slow_oracle(coords, args.slow_max)
    failures += check_e_path(args.e_max)
    print("all recursion paths agree" if not failures else
          f"{failures} node mismatches")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
