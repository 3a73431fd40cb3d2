"""First-principles oracle for the parametrix levels.

Computes r_n literally from the symbol-composition rule

    r_n = -r0 [ p1 r_{n-1} - 2i g^kk xi_k d_k r_{n-1}
                + p0 r_{n-2} - i b_k d_k r_{n-2} - g^kk d_k^2 r_{n-2} ]

operating on whole symbols represented as {(j, alpha): SymExpr} maps, with
generic helper operations (left-multiply, xi-multiply, r0-shift, coordinate
derivative).  No scatter schedule, no slice freezing, no packed-key tricks
beyond what SymExpr itself does; the only shared structural fact is
d_k r0 = -r0^2 * sum_l (d_k g^ll) xi_l^2, which is the definition of r0.

Deliberately slow and allocation-happy; intended for n <= 4, where the fast
engine is required to agree with it key by key.
"""

from __future__ import annotations

from .scalars import Rational
from .symbols import SymbolTable
from .symexpr import SymExpr

_E4 = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))


def _merge(acc: dict, key, expr: SymExpr):
    if expr.is_zero():
        return
    prev = acc.get(key)
    cur = expr if prev is None else prev + expr
    if cur.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = cur


def sym_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for key, expr in b.items():
        _merge(out, key, expr)
    return out


def sym_lmul(coeff: SymExpr, sym: dict) -> dict:
    """coeff * sym with the coefficient's blades on the left."""
    out: dict = {}
    for key, expr in sym.items():
        _merge(out, key, coeff * expr)
    return out


def sym_xi_mul(sym: dict, k: int) -> dict:
    e = _E4[k - 1]
    return {
        (j, (a[0] + e[0], a[1] + e[1], a[2] + e[2], a[3] + e[3])): expr
        for (j, a), expr in sym.items()
    }


def sym_r0_mul(sym: dict) -> dict:
    return {(j + 1, a): expr for (j, a), expr in sym.items()}


def sym_dx(table: SymbolTable, sym: dict, k: int) -> dict:
    """Coordinate derivative of a whole symbol: acts on the coefficient and,
    through d_k r0 = -r0^2 (d_k g^ll) xi_l^2, on the r0 powers."""
    out: dict = {}
    for (j, a), expr in sym.items():
        _merge(out, (j, a), table.deriv(expr, k))
        for (kk, l), dg in table.dg.items():
            if kk != k:
                continue
            a2 = list(a)
            a2[l - 1] += 2
            _merge(out, (j + 1, tuple(a2)), (expr * dg).scale(Rational(-j)))
    return out


def slow_oracle_rn(table: SymbolTable, n: int) -> dict:
    """All levels 0..n as {(j, alpha): SymExpr} maps, composed directly.

    Returns {level: symbol map}; callers usually read [n]."""
    enc = table.enc
    levels = {0: {(1, (0, 0, 0, 0)): SymExpr.one(enc)}}
    for m in range(1, n + 1):
        r1 = levels[m - 1]
        r2 = levels.get(m - 2, {})
        total: dict = {}
        # p1 r_{m-1}
        for k in range(1, 5):
            total = sym_add(total, sym_xi_mul(sym_lmul(table.b[k - 1], r1), k))
        # -2i g^kk xi_k d_k r_{m-1}
        for k in table.depends_on:
            c = table.g_inv[k - 1].times_i().scale(Rational(-2))
            total = sym_add(total, sym_xi_mul(sym_lmul(c, sym_dx(table, r1, k)), k))
        if r2:
            # p0 r_{m-2}
            total = sym_add(total, sym_lmul(table.p0, r2))
            # -i b_k d_k r_{m-2}
            for k in table.depends_on:
                c = table.b[k - 1].times_i().scale(Rational(-1))
                total = sym_add(total, sym_lmul(c, sym_dx(table, r2, k)))
            # -g^kk d_k^2 r_{m-2}
            for k in table.depends_on:
                c = table.g_inv[k - 1].scale(Rational(-1))
                d2 = sym_dx(table, sym_dx(table, r2, k), k)
                total = sym_add(total, sym_lmul(c, d2))
        # r_m = -r0 * total
        levels[m] = sym_r0_mul({key: -expr for key, expr in total.items()})
    return levels
