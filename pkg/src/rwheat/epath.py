"""Hopf-chart recursion for the rescaled nodes e_{n,j,alpha}.

The engine computes the parametrix coefficients r_{n,j,alpha} generically
from a symbol table.  In the Hopf chart the rescaled quantities

    e_{n,j,alpha} = r_{n,j,alpha} * a^(a2+a3+a4) * sin(eta)^a3 * cos(eta)^a4
                    / (j-1)!

satisfy a recursion of their own in which every inverse-metric factor has
been absorbed into constant coefficients.  Hard-wiring the chart makes this
useless as an engine but valuable as an oracle: it shares no scatter code,
no symbol-table layout and no scheduling with the engine path, yet the two
must agree node for node (see e_from_r).

e_node_hopf memoizes on a caller-owned dict so tests can share or inspect
the computed set.
"""

from __future__ import annotations

import math

from .engine import node_valid
from .scalars import Rational, Scalar
from .symbols import G12, G13, G14, G23, G24, hopf_symbols
from .symexpr import SymExpr

_E1 = (1, 0, 0, 0)
_E2 = (0, 1, 0, 0)
_E3 = (0, 0, 1, 0)
_E4 = (0, 0, 0, 1)

_TABLE = None


def _table():
    global _TABLE
    if _TABLE is None:
        _TABLE = hopf_symbols()
    return _TABLE


def e_from_r(engine, key) -> SymExpr:
    """The engine's r node rescaled to the e convention (the ground truth
    that e_node_hopf must reproduce)."""
    n, j, alpha = key
    r = engine.r_node(n, j, alpha)
    if r.is_zero():
        return r
    return r.shift_monomial(
        0, (alpha[2], alpha[3]), (alpha[1] + alpha[2] + alpha[3],)
    ).scale(Rational(1, math.factorial(j - 1)))


def e_node_hopf(key, memo) -> SymExpr:
    """e_{n,j,alpha} by the chart-specialized recursion (Hopf only).

    key is (n, j, alpha); memo is a dict owned by the caller -- pass the
    same one across calls to share work.  Invalid or negative indices give
    the zero expression.
    """
    n, j, alpha = key
    alpha = tuple(alpha)
    t = _table()
    enc = t.enc
    if n == 0:
        if (j, alpha) == (1, (0, 0, 0, 0)):
            return SymExpr.one(enc)
        return SymExpr.zero(enc)
    if n < 0 or not node_valid(n, j, alpha):
        return SymExpr.zero(enc)
    kk = (n, j, alpha)
    got = memo.get(kk)
    if got is not None:
        return got

    def ex(triples):
        return SymExpr.from_terms(enc, triples)

    def src(dn, dj, d):
        lower = (n - dn, j - dj, tuple(x - y for x, y in zip(alpha, d)))
        return e_node_hopf(lower, memo)

    A = alpha[1] + alpha[2] + alpha[3]
    a3, a4 = alpha[2], alpha[3]
    total = SymExpr.zero(enc)

    # sources one level down; every coefficient carries a factor i/a
    s = src(1, 1, _E4)
    if not s.is_zero():
        total = total + ex([
            (G14, (0, 0), (-1, 1), Scalar(0, 1)),
            (G24, (1, -1), (-1,), Scalar(0, -1)),
        ]) * s
    s = src(1, 1, _E3)
    if not s.is_zero():
        total = total + ex([
            (G13, (0, 0), (-1, 1), Scalar(0, 1)),
            (G23, (-1, 1), (-1,), Scalar(0, 1)),
        ]) * s
    s = src(1, 1, _E2)
    if not s.is_zero():
        total = total + ex([
            (G12, (0, 0), (-1, 1), Scalar(0, 1)),
            (0, (-1, 1), (-1,), Scalar(0, 1 - 2 * a3)),
            (0, (1, -1), (-1,), Scalar(0, 2 * a4 - 1)),
        ]) * s
        total = total + ex([(0, (0, 0), (-1,), Scalar(0, 2))]) * t.deriv(s, 2)
    s = src(1, 1, _E1)
    if not s.is_zero():
        total = total + ex([(0, (0, 0), (-1, 1), Scalar(0, 3 - 2 * A))]) * s
        total = total + t.deriv(s, 1).scale(Scalar(0, 2))
    for d in ((1, 2, 0, 0), (1, 0, 2, 0), (1, 0, 0, 2)):
        s = src(1, 2, d)
        if not s.is_zero():
            total = total + ex([(0, (0, 0), (-1, 1), Scalar(0, 4))]) * s
    s = src(1, 2, (0, 1, 2, 0))
    if not s.is_zero():
        total = total + ex([(0, (-1, 1), (-1,), Scalar(0, 4))]) * s
    s = src(1, 2, (0, 1, 0, 2))
    if not s.is_zero():
        total = total + ex([(0, (1, -1), (-1,), Scalar(0, -4))]) * s

    # sources two levels down; every coefficient carries a factor 1/a^2
    s = src(2, 1, (0, 0, 0, 0))
    if not s.is_zero():
        st = t.deriv(s, 1)
        se = t.deriv(s, 2)
        total = total + t.deriv(st, 1)
        total = total + ex([(0, (0, 0), (-1, 1), Scalar(3 - 2 * A))]) * st
        total = total + ex([(0, (0, 0), (-2,), Scalar(1))]) * t.deriv(se, 2)
        total = total + ex([
            (G12, (0, 0), (-2, 1), Scalar(1)),
            (0, (-1, 1), (-2,), Scalar(1 - 2 * a3)),
            (0, (1, -1), (-2,), Scalar(2 * a4 - 1)),
        ]) * se
        total = total + ex([
            (G12, (-1, 1), (-2, 1), Scalar(Rational(1 - 2 * a3, 2))),
            (G12, (1, -1), (-2, 1), Scalar(Rational(2 * a4 - 1, 2))),
            (0, (0, 0), (-2, 2), Scalar(Rational(4 * A * A - 8 * A + 3, 4))),
            (0, (0, 0), (-1, 0, 1), Scalar(Rational(3 - 2 * A, 2))),
            (0, (-2, 0), (-2,), Scalar(Rational(4 * a3 * a3 - 1, 4))),
            (0, (0, -2), (-2,), Scalar(Rational(4 * a4 * a4 - 1, 4))),
            (0, (0, 0), (-2,), Scalar(-((a3 + a4 - 1) ** 2))),
        ]) * s

    dt4 = ex([(0, (0, 0), (-1, 1), Scalar(4))])
    s = src(2, 2, (0, 2, 0, 0))
    if not s.is_zero():
        total = total + dt4 * t.deriv(s, 1)
        total = total + ex([
            (0, (0, 0), (-1, 0, 1), Scalar(2)),
            (0, (0, 0), (-2, 2), Scalar(-4 * (A - 2))),
        ]) * s
    s = src(2, 2, (0, 0, 2, 0))
    if not s.is_zero():
        total = total + dt4 * t.deriv(s, 1)
        total = total + ex([(0, (-1, 1), (-2,), Scalar(4))]) * t.deriv(s, 2)
        total = total + ex([
            (G12, (-1, 1), (-2, 1), Scalar(2)),
            (0, (0, 0), (-1, 0, 1), Scalar(2)),
            (0, (0, 0), (-2, 2), Scalar(-4 * (A - 2))),
            (0, (-2, 2), (-2,), Scalar(4 - 4 * a3)),
            (0, (0, 0), (-2,), Scalar(4 * a4 - 4)),
        ]) * s
    s = src(2, 2, (0, 0, 0, 2))
    if not s.is_zero():
        total = total + dt4 * t.deriv(s, 1)
        total = total + ex([(0, (1, -1), (-2,), Scalar(-4))]) * t.deriv(s, 2)
        total = total + ex([
            (G12, (1, -1), (-2, 1), Scalar(-2)),
            (0, (0, 0), (-1, 0, 1), Scalar(2)),
            (0, (0, 0), (-2, 2), Scalar(-4 * (A - 2))),
            (0, (2, -2), (-2,), Scalar(4 - 4 * a4)),
            (0, (0, 0), (-2,), Scalar(4 * a3 - 4)),
        ]) * s

    for d, triples in (
        ((0, 4, 0, 0), (((0, 0), (-2, 2), 4),)),
        ((0, 2, 2, 0), (((0, 0), (-2, 2), 8),)),
        ((0, 2, 0, 2), (((0, 0), (-2, 2), 8),)),
        ((0, 0, 4, 0), (((-2, 2), (-2,), 4), ((0, 0), (-2, 2), 4))),
        ((0, 0, 0, 4), (((2, -2), (-2,), 4), ((0, 0), (-2, 2), 4))),
        ((0, 0, 2, 2), (((0, 0), (-2, 2), 8), ((0, 0), (-2,), -8))),
    ):
        s = src(2, 3, d)
        if not s.is_zero():
            total = total + ex(
                [(0, ang, jets, Scalar(c)) for ang, jets, c in triples]
            ) * s

    total = total.scale(Rational(1, j - 1))
    memo[kk] = total
    return total
