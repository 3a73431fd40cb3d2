"""Command-line front end.

Three subcommands: ``compute`` writes one exact coefficient in text, JSON
or LaTeX form; ``verify`` runs a named check suite and exits nonzero if
anything fails; ``bench`` reports per-level node/term counts, wall time
and cache statistics.  The artifact streams (stdout or --out) carry only
the requested output; progress and statistics go to stderr so artifacts
stay byte-identical across runs.
"""

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import verification
from .assembly import (
    EtaDependenceError,
    JetRationalPoly,
    RationalityError,
    a_term,
)
from .cache import LevelCache, resolve_cache_dir
from .engine import ParametrixEngine
from .symbols import hopf_symbols, spherical_symbols

SUITES = ("reference", "round", "hn", "cross", "all")


@dataclass
class RunConfig:
    order: int = 0
    coords: str = "hopf"
    fmt: str = "text"
    cache_path: Path = None
    jobs: int = 1
    suite: str = "all"
    allow_odd: bool = False
    out: Path = None


def _suite_name(value: str) -> str:
    # "paper" is accepted as a spelling of the reference suite.
    name = {"paper": "reference"}.get(value, value)
    if name not in SUITES:
        raise argparse.ArgumentTypeError(
            f"invalid suite {value!r} (choose from {', '.join(SUITES)})"
        )
    return name


def _jet_factor(r: int, k: int) -> str:
    if r == 0:
        f = "a(t)"
    elif r == 1:
        f = "a'(t)"
    elif r == 2:
        f = "a''(t)"
    else:
        f = f"a^({r})(t)"
    return f if k == 1 else f + f"^{k}"


def render_text(poly: JetRationalPoly) -> str:
    if poly.is_zero():
        return f"a_{poly.order} = 0"
    parts = []
    for jets in sorted(poly.terms, key=JetRationalPoly.term_order):
        q = poly.terms[jets]
        num = q.numerator
        mono = "*".join(_jet_factor(r, k) for r, k in enumerate(jets) if k)
        if mono and abs(num) == 1:
            body = mono
        elif mono:
            body = f"{abs(num)}*{mono}"
        else:
            body = str(abs(num))
        if q.denominator != 1:
            body += f"/{q.denominator}"
        parts.append(("- " if num < 0 else "+ ") + body)
    joined = " ".join(parts)
    joined = joined[2:] if joined.startswith("+ ") else "-" + joined[2:]
    return f"a_{poly.order} = {joined}"


def render(poly: JetRationalPoly, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(poly.to_json(), indent=2, sort_keys=True) + "\n"
    if fmt == "latex":
        return f"a_{{{poly.order}}}(t) = " + poly.latex() + "\n"
    return render_text(poly) + "\n"


def _open_cache(cfg: RunConfig):
    directory = resolve_cache_dir(cfg.cache_path)
    return LevelCache(directory) if directory else None


def _engine_stats(engine: ParametrixEngine) -> str:
    store = engine.store
    nodes = sum(store.n_nodes(n) for n in store.levels)
    counts = [store.term_counts.get(n, 0) for n in store.levels]
    terms = sum(c for c in counts if c > 0)
    suffix = "+cached" if any(c < 0 for c in counts) else ""
    return f"{nodes} nodes, {terms}{suffix} terms"


def cmd_compute(cfg: RunConfig) -> int:
    cache = _open_cache(cfg)
    charts = ["hopf", "spherical"] if cfg.coords == "both" else [cfg.coords]
    polys = {}
    for coords in charts:
        table = hopf_symbols() if coords == "hopf" else spherical_symbols()
        t0 = time.perf_counter()
        engine = ParametrixEngine(
            table, max_order=cfg.order, jobs=cfg.jobs, cache=cache
        )
        polys[coords] = a_term(engine, cfg.order)
        print(
            f"[{coords}] order {cfg.order}: {_engine_stats(engine)}, "
            f"{time.perf_counter() - t0:.2f}s",
            file=sys.stderr,
        )
    if len(charts) == 2 and polys["hopf"] != polys["spherical"]:
        print(
            "invariant violated: cross-coordinate agreement "
            "(hopf and spherical charts disagree)",
            file=sys.stderr,
        )
        return 3
    artifact = render(polys[charts[0]], cfg.fmt)
    if cfg.out:
        Path(cfg.out).write_text(artifact)
        print(f"wrote {cfg.out}", file=sys.stderr)
    else:
        sys.stdout.write(artifact)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    cache = _open_cache(cfg)
    report = verification.run_suite(
        cfg.suite, order=cfg.order, cache=cache, jobs=cfg.jobs
    )
    if cfg.fmt == "json":
        text = json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
    else:
        text = report.table() + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


def cmd_bench(cfg: RunConfig) -> int:
    cache = _open_cache(cfg)
    coords = cfg.coords if cfg.coords != "both" else "hopf"
    table = hopf_symbols() if coords == "hopf" else spherical_symbols()
    engine = ParametrixEngine(
        table, max_order=cfg.order, jobs=cfg.jobs, cache=cache
    )
    t_start = time.perf_counter()
    print(f"{'level':>5}  {'nodes':>7}  {'terms':>9}  {'seconds':>8}")
    for n in range(cfg.order + 1):
        t0 = time.perf_counter()
        engine.ensure_level(n)
        dt = time.perf_counter() - t0
        count = engine.store.term_counts.get(n, 0)
        terms = str(count) if count >= 0 else "(cached)"
        print(f"{n:>5}  {engine.store.n_nodes(n):>7}  {terms:>9}  {dt:>8.2f}")
    t0 = time.perf_counter()
    poly = a_term(engine, cfg.order)
    print(f"assembly {time.perf_counter() - t0:.2f}s")
    print(f"total    {time.perf_counter() - t_start:.2f}s")
    if cache is not None:
        seen = cache.hits + cache.misses
        ratio = cache.hits / seen if seen else 0.0
        print(f"cache    {cache.hits} hits, {cache.misses} misses "
              f"(hit ratio {ratio:.2f})")
    digest = hashlib.sha256(
        json.dumps(poly.to_json(), sort_keys=True).encode()
    ).hexdigest()
    print(f"result   sha256 {digest}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rwheat",
        description="Exact expansion coefficients for a^2(t) Robertson-Walker "
        "Dirac Laplacians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_order_default=None):
        p.add_argument("--order", type=int, default=with_order_default,
                       help="coefficient index n of a_n")
        p.add_argument("--coords", choices=("hopf", "spherical", "both"),
                       default="hopf")
        p.add_argument("--format", dest="fmt",
                       choices=("text", "json", "latex"), default="text")
        p.add_argument("--cache", dest="cache_path", default=None,
                       help="level cache directory "
                       "(default: $RWHEAT_CACHE_DIR, unset = no cache)")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", default=None, help="write output to a file")

    p_compute = sub.add_parser("compute", help="compute one coefficient")
    common(p_compute, with_order_default=None)
    p_compute.add_argument("--allow-odd", action="store_true",
                           help="compute an odd order and assert it is zero")

    p_verify = sub.add_parser("verify", help="run a verification suite")
    common(p_verify)
    p_verify.add_argument("--suite", type=_suite_name, default="all",
                          help=f"one of {', '.join(SUITES)}")

    p_bench = sub.add_parser("bench", help="per-level timing and cache stats")
    common(p_bench, with_order_default=None)
    return parser


def _config(args, parser) -> RunConfig:
    cfg = RunConfig(
        order=args.order,
        coords=args.coords,
        fmt=args.fmt,
        cache_path=args.cache_path,
        jobs=args.jobs,
        suite=getattr(args, "suite", "all"),
        allow_odd=getattr(args, "allow_odd", False),
        out=args.out,
    )
    if args.command in ("compute", "bench"):
        if cfg.order is None:
            parser.error("--order is required")
        if cfg.order < 0:
            parser.error("order must be a non-negative integer")
        if cfg.order % 2 and not cfg.allow_odd:
            parser.error(
                "order must be even (odd coefficients vanish; "
                "see --allow-odd to verify zero)"
            )
    if cfg.jobs < 1:
        parser.error("--jobs must be at least 1")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _config(args, parser)
    handler = {
        "compute": cmd_compute,
        "verify": cmd_verify,
        "bench": cmd_bench,
    }[args.command]
    try:
        return handler(cfg)
    except (RationalityError, EtaDependenceError) as exc:
        print(
            f"invariant violated: {type(exc).__name__}: {exc}", file=sys.stderr
        )
        return 3


if __name__ == "__main__":
    sys.exit(main())
