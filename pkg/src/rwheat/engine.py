"""Parametrix recursion for (D^2 - lambda)^-1.

The resolvent parametrix is an asymptotic sum R ~ r_0 + r_1 + r_2 + ... whose
level-n piece is a finite combination

    r_n = sum_{j, alpha}  r_{n,j,alpha}(x) * r0^j * xi^alpha,
    r0 = (p2 - lambda)^-1,          2j - 2 - |alpha| = n,

with coefficients r_{n,j,alpha} in the Clifford-valued symbolic ring
(SymExpr).  Matching symbol orders in sigma((D^2 - lambda) R) = 1 determines
level n from levels n-1 and n-2:

    r_n = -r0 [ p1 r_{n-1} - 2i g^kk xi_k d_k r_{n-1}
                + p0 r_{n-2} - i b_k d_k r_{n-2} - g^kk d_k^2 r_{n-2} ]

(sum over k; d_k r acts on the full node, so each d_k r0 = -r0^2 d_k p2
raises j by one and adds xi_l^2 factors).  Subprincipal terms multiply the
lower level from the LEFT; with anticommuting gammas the side matters.

This module expands that rule into a scatter schedule: it walks source nodes
at levels n-1 / n-2 in ascending j and pushes each node's contributions into
target accumulation dicts.  A target slice (fixed j) can no longer receive
contributions once all sources below j have been processed, at which point
it is compressed and set aside, which keeps the order-12 run inside a few
GB.  Levels below the requested order are always computed in full (so a
cached level serves any later, higher-order run); the terminal level alone
is restricted to the all-even-alpha nodes, the only ones with a nonzero
Gaussian moment and hence the only ones assembly reads.

Node coefficients at level n lie in i^n * Q, so each node is stored as one
rational-coefficient SymExpr whose phase is n mod 2; this is asserted when a
slice is frozen.
"""

from __future__ import annotations

import pickle
import zlib

from .clifford import BLADE_SIGN
from .scalars import Rational
from .symexpr import BLADE_MASK_LOW, SymExpr
from .symbols import SymbolTable

ALPHA_ZERO = (0, 0, 0, 0)
_E = (
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (0, 0, 0, 1),
)


def node_valid(n: int, j: int, alpha) -> bool:
    """Index constraints for r_{n,j,alpha}: homogeneity 2j - 2 - |alpha| = n
    and n/2 + 1 <= j <= 2n + 1."""
    return (
        min(alpha) >= 0
        and 2 * j - 2 - sum(alpha) == n
        and 2 * j >= n + 2
        and j <= 2 * n + 1
    )


def _add4(a, d):
    return (a[0] + d[0], a[1] + d[1], a[2] + d[2], a[3] + d[3])


def top_level_keys(n: int):
    """(j, alpha) at level n with every alpha_k even: the only nodes with a
    nonzero Gaussian moment, hence the only ones assembly reads."""
    out = []
    for j in range((n + 2 + 1) // 2, 2 * n + 2):
        m = 2 * j - 2 - n
        if m < 0 or m % 2:
            continue
        h = m // 2
        for a1 in range(0, h + 1):
            for a2 in range(0, h - a1 + 1):
                for a3 in range(0, h - a1 - a2 + 1):
                    a4 = h - a1 - a2 - a3
                    out.append((j, (2 * a1, 2 * a2, 2 * a3, 2 * a4)))
    return out


def all_level_keys(n: int):
    out = []
    for j in range((n + 2 + 1) // 2, 2 * n + 2):
        m = 2 * j - 2 - n
        if m < 0:
            continue
        for a1 in range(0, m + 1):
            for a2 in range(0, m - a1 + 1):
                for a3 in range(0, m - a1 - a2 + 1):
                    a4 = m - a1 - a2 - a3
                    out.append((j, (a1, a2, a3, a4)))
    return out


# --- node freezing -----------------------------------------------------------

def freeze_terms(terms: dict) -> bytes:
    items = tuple(
        (k, int(q.numerator), int(q.denominator)) for k, q in terms.items()
    )
    return zlib.compress(pickle.dumps(items, 5), 1)


def thaw_terms(blob: bytes) -> dict:
    items = pickle.loads(zlib.decompress(blob))
    return {k: Rational(p, q) for k, p, q in items}


class LevelStore:
    """Frozen levels: level -> {j -> {alpha -> compressed terms}}.

    Also carries the MemoTable bookkeeping: the fingerprint of the symbol
    table the nodes were computed from, and the highest contiguous level
    present."""

    def __init__(self, symbol_hash: str = ""):
        self.levels: dict = {}
        self.term_counts: dict = {}
        self.symbol_hash = symbol_hash

    @property
    def level_complete(self) -> int:
        n = -1
        while n + 1 in self.levels:
            n += 1
        return n

    def put_node(self, n: int, j: int, alpha, terms: dict):
        self.levels.setdefault(n, {}).setdefault(j, {})[alpha] = freeze_terms(terms)
        self.term_counts[n] = self.term_counts.get(n, 0) + len(terms)

    def has_level(self, n: int) -> bool:
        return n in self.levels

    def drop_level(self, n: int):
        self.levels.pop(n, None)
        self.term_counts.pop(n, None)

    def slice_js(self, n: int):
        return sorted(self.levels.get(n, ()))

    def get_slice(self, n: int, j: int) -> dict:
        return {
            alpha: thaw_terms(blob)
            for alpha, blob in self.levels.get(n, {}).get(j, {}).items()
        }

    def node_terms(self, n: int, j: int, alpha):
        blob = self.levels.get(n, {}).get(j, {}).get(alpha)
        return None if blob is None else thaw_terms(blob)

    def iter_level(self, n: int):
        for j in self.slice_js(n):
            for alpha, blob in self.levels[n][j].items():
                yield j, alpha, thaw_terms(blob)

    def n_nodes(self, n: int) -> int:
        return sum(len(d) for d in self.levels.get(n, {}).values())


# --- the scatter itself ------------------------------------------------------

def _prep(expr: SymExpr):
    """Precompute per-term data for the fused multiply-accumulate:
    (key - blade - bias, blade, coeff, sign row)."""
    bias = expr.enc.bias_packed
    return tuple(
        (k - (k & BLADE_MASK_LOW) - bias, k & BLADE_MASK_LOW, q,
         BLADE_SIGN[k & BLADE_MASK_LOW])
        for k, q in expr.terms.items()
    )


def _mac(acc: dict, prep, items):
    """acc += small * X with blades of the small factor on the left."""
    get = acc.get
    for base, b1, q1, sign_row in prep:
        for k2, q2 in items:
            b2 = k2 & 15
            key = base + (k2 - b2) + (b1 ^ b2)
            q = q1 * q2 if sign_row[b2] > 0 else -q1 * q2
            q0 = get(key)
            if q0 is None:
                acc[key] = q
            else:
                qs = q0 + q
                if qs:
                    acc[key] = qs
                else:
                    del acc[key]


class _Plan:
    """Scatter actions for one source level at one j'.

    Each action is (deriv, dj, dalpha, prep): deriv is None for the node
    itself or (k, order) for a coordinate derivative of it; the contribution
    lands at (j' + dj, alpha' + dalpha) and equals prep * source, with all
    rational weights (including the j'-dependent ones and the global phase
    sign) folded into prep.
    """

    __slots__ = ("actions",)

    def __init__(self, actions):
        self.actions = actions


def _phase1(expr: SymExpr) -> SymExpr:
    if expr.phase != 1:
        raise AssertionError("level n-1 scatter factor must be imaginary")
    return expr


def _phase0(expr: SymExpr) -> SymExpr:
    if expr.phase != 0:
        raise AssertionError("level n-2 scatter factor must be real")
    return expr


def _build_plans(table: SymbolTable, n: int, jp: int):
    """Plans for sources r_{n-1,jp,*} and r_{n-2,jp,*} feeding level n."""
    enc = table.enc
    zero = SymExpr.zero(enc)
    e = _E

    def scaled(expr, q):
        return expr.scale(Rational(q))

    # --- level n-1 sources; every small factor is imaginary (phase 1).
    # product phase (1 ^ (n-1)) = n mod 2 as required; when n-1 is odd the
    # i*i = -1 sign is folded in here.
    s1 = -1 if (n - 1) % 2 else 1
    acts1 = []
    for k in range(1, 5):
        c = scaled(table.b[k - 1], -s1)
        if not c.is_zero():
            acts1.append((None, 1, e[k - 1], _prep(_phase1(c))))
    for k in table.depends_on:
        c = table.g_inv[k - 1].times_i().scale(Rational(2 * s1))
        acts1.append(((k, 1), 1, e[k - 1], _prep(_phase1(c))))
    for (k, l), dgkl in table.dg.items():
        c = (table.g_inv[k - 1] * dgkl).times_i().scale(Rational(-2 * jp * s1))
        d = _add4(e[k - 1], tuple(2 * x for x in e[l - 1]))
        acts1.append((None, 2, d, _prep(_phase1(c))))

    # --- level n-2 sources; small factors are all real, no extra sign.
    acts2 = []
    grouped = {}

    def add_to(key, expr):
        grouped[key] = grouped.get(key, zero) + expr

    add_to((None, 1, ALPHA_ZERO), -table.p0)
    for k in table.depends_on:
        acts2.append(
            ((k, 1), 1, ALPHA_ZERO, _prep(_phase0(table.b[k - 1].times_i())))
        )
        acts2.append(((k, 2), 1, ALPHA_ZERO, _prep(_phase0(table.g_inv[k - 1]))))
    for (k, l), dgkl in table.dg.items():
        d2 = tuple(2 * x for x in e[l - 1])
        add_to((None, 2, d2), (table.b[k - 1] * dgkl).times_i().scale(Rational(-jp)))
        acts2.append(
            ((k, 1), 2, d2,
             _prep((table.g_inv[k - 1] * dgkl).scale(Rational(-2 * jp))))
        )
    for (k, l), d2gkl in table.d2g.items():
        d2 = tuple(2 * x for x in e[l - 1])
        add_to((None, 2, d2), (table.g_inv[k - 1] * d2gkl).scale(Rational(-jp)))
    w3 = Rational(jp * (jp + 1))
    for (k, l), dgkl in table.dg.items():
        for (k2, l2), dgkl2 in table.dg.items():
            if k2 != k:
                continue
            d = tuple(2 * e[l - 1][m] + 2 * e[l2 - 1][m] for m in range(4))
            add_to((None, 3, d), (table.g_inv[k - 1] * dgkl * dgkl2).scale(w3))
    for (deriv, dj, dalpha), expr in grouped.items():
        if not expr.is_zero():
            acts2.append((deriv, dj, dalpha, _prep(_phase0(expr))))

    return _Plan(acts1), _Plan(acts2)


def _scatter_slice(table, plan, source_items, needed, active, jp):
    """Push every node of one source slice through one plan."""
    enc = table.enc
    actions = plan.actions
    for alpha, terms in source_items:
        derivs = {}

        def dsrc(spec):
            if spec is None:
                return terms
            got = derivs.get(spec)
            if got is not None:
                return got
            k, order = spec
            if order == 1:
                e = SymExpr(enc, 0, 0, terms)
            else:
                e = SymExpr(enc, 0, 0, dsrc((k, 1)))
            d = table.deriv(e, k).terms
            derivs[spec] = d
            return d

        for deriv, dj, dalpha, prep in actions:
            tkey = (
                jp + dj,
                (alpha[0] + dalpha[0], alpha[1] + dalpha[1],
                 alpha[2] + dalpha[2], alpha[3] + dalpha[3]),
            )
            if needed is not None and tkey not in needed:
                continue
            items = dsrc(deriv)
            if not items:
                continue
            acc = active.get(tkey)
            if acc is None:
                acc = active[tkey] = {}
            _mac(acc, prep, items.items())


class ParametrixEngine:
    """Drives the level-by-level ascent r_1, r_2, ..., r_max_order.

    Levels below max_order are computed in full, so their cache files are
    valid inputs for any later run regardless of its target order.  When
    restrict_top is set (the default) and max_order is even, the terminal
    level keeps only its all-even-alpha nodes: nothing is ever computed
    above it and assembly reads nothing else.  keep_all retains every
    computed level in the store; by default level n-2 is dropped once level
    n is finished (its cache file, if any, stays).
    """

    def __init__(self, table: SymbolTable, max_order: int, restrict_top: bool = True,
                 keep_all: bool = False, jobs: int = 1, cache=None, progress=None):
        self.table = table
        self.max_order = max_order
        self.keep_all = keep_all
        self.jobs = max(1, int(jobs))
        self.cache = cache
        self.progress = progress or (lambda msg: None)
        self.store = LevelStore(symbol_hash=table.fingerprint())
        if restrict_top and max_order >= 1 and max_order % 2 == 0:
            self.top_needed = frozenset(top_level_keys(max_order))
        else:
            self.top_needed = None
        self._seed_base()

    def _seed_base(self):
        base = {ALPHA_ZERO: {self.table.enc.one: Rational(1)}}
        self.store.levels[0] = {1: {a: freeze_terms(t) for a, t in base.items()}}
        self.store.term_counts[0] = 1

    def _cache_key(self, n: int) -> str:
        kind = "top" if (n == self.max_order and self.top_needed is not None) else "full"
        return f"level_{self.store.symbol_hash[:16]}_{n:02d}_{kind}"

    def ensure_level(self, n: int):
        if n > self.max_order:
            raise ValueError(
                f"level {n} beyond max_order {self.max_order}; the terminal "
                "level may be truncated, build a fresh engine instead"
            )
        if n < 0 or self.store.has_level(n):
            return
        if n == 0:
            # axiomatic r_0 node; restore it if run() dropped the level
            self._seed_base()
            return
        if self.cache is not None:
            got = self.cache.load(self._cache_key(n))
            if got is not None:
                self.store.levels[n] = got
                self.store.term_counts[n] = -1  # unknown, loaded frozen
                self.progress(f"level {n}: cache hit")
                return
        self.ensure_level(n - 1)
        if n >= 2:
            self.ensure_level(n - 2)
        self._compute_level(n)
        if self.cache is not None:
            self.cache.save(self._cache_key(n), self.store.levels[n])
        return self.store.n_nodes(n)

    def run(self, on_level=None):
        for n in range(1, self.max_order + 1):
            self.ensure_level(n)
            if on_level is not None:
                on_level(n)
            if not self.keep_all:
                self.store.drop_level(n - 2)

    def node(self, n: int, j: int, alpha) -> SymExpr:
        terms = self.store.node_terms(n, j, alpha)
        if terms is None:
            terms = {}
        return SymExpr(self.table.enc, n & 1 if terms else 0, 0, terms)

    def r_node(self, n: int, j: int, alpha) -> SymExpr:
        """Compute-on-demand accessor: the zero expression for any invalid
        or negative index, the stored node otherwise."""
        alpha = tuple(alpha)
        if n < 0 or not node_valid(n, j, alpha):
            return SymExpr.zero(self.table.enc)
        self.ensure_level(n)
        return self.node(n, j, alpha)

    def iter_top(self, n: int):
        """Yield (j, alpha, SymExpr) over the stored nodes of level n that
        assembly consumes (thawed one at a time)."""
        for j, alpha, terms in self.store.iter_level(n):
            yield j, alpha, SymExpr(self.table.enc, n & 1, 0, terms)

    def _compute_level(self, n: int):
        table = self.table
        needed = self.top_needed if n == self.max_order else None
        active: dict = {}
        src_js = set(self.store.slice_js(n - 1))
        if n >= 2:
            src_js |= set(self.store.slice_js(n - 2))
        for jp in sorted(src_js):
            plan1, plan2 = _build_plans(table, n, jp)
            if jp in self.store.levels.get(n - 1, {}):
                items = list(self.store.get_slice(n - 1, jp).items())
                self._scatter(plan1, items, needed, active, jp)
            if n >= 2 and jp in self.store.levels.get(n - 2, {}):
                items = list(self.store.get_slice(n - 2, jp).items())
                self._scatter(plan2, items, needed, active, jp)
            self._freeze_completed(n, active, jp + 1)
        for (j, alpha), terms in sorted(active.items()):
            if terms:
                self.store.put_node(n, j, alpha, terms)
        active.clear()
        self.progress(
            f"level {n}: {self.store.n_nodes(n)} nodes, "
            f"{self.store.term_counts.get(n, 0)} terms"
        )

    def _scatter(self, plan, items, needed, active, jp):
        if self.jobs > 1 and len(items) > 4 * self.jobs:
            self._scatter_parallel(plan, items, needed, active, jp)
        else:
            _scatter_slice(self.table, plan, items, needed, active, jp)

    def _scatter_parallel(self, plan, items, needed, active, jp):
        import multiprocessing as mp

        chunks = [items[i :: self.jobs] for i in range(self.jobs)]
        ctx = mp.get_context("fork")
        global _FORK_CTX
        _FORK_CTX = (self.table, plan, needed, jp)
        with ctx.Pool(self.jobs) as pool:
            for part in pool.map(_scatter_worker, chunks):
                for tkey, terms in part.items():
                    acc = active.get(tkey)
                    if acc is None:
                        active[tkey] = terms
                        continue
                    get = acc.get
                    for k, q in terms.items():
                        q0 = get(k)
                        if q0 is None:
                            acc[k] = q
                        else:
                            qs = q0 + q
                            if qs:
                                acc[k] = qs
                            else:
                                del acc[k]
        _FORK_CTX = None

    def _freeze_completed(self, n: int, active: dict, below: int):
        """Freeze target slices with j <= below; they can receive nothing
        more once every source with j' <= below - 1 has been scattered."""
        done = [key for key in active if key[0] <= below]
        for key in sorted(done):
            terms = active.pop(key)
            if terms:
                self.store.put_node(n, key[0], key[1], terms)


_FORK_CTX = None


def _scatter_worker(items):
    table, plan, needed, jp = _FORK_CTX
    active: dict = {}
    _scatter_slice(table, plan, items, needed, active, jp)
    return active
