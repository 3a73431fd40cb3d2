"""Symbol data of the squared Dirac operator in the two coordinate systems.

For the metric dt^2 + a(t)^2 dsigma^2 on R x S^3 the operator D^2 has full
symbol p2 + p1 + p0 with

    p2 = sum_k g^kk xi_k^2,      p1 = sum_k b_k xi_k,

and everything the parametrix recursion consumes is collected here per
coordinate chart: the inverse-metric diagonal, the b_k, p0, their first and
second coordinate derivatives, the volume density, and the exact evaluation
data used by the angle-independence checks.

Coordinates are indexed 1..4 with x_1 = t always.  Hopf chart: (t, eta,
phi1, phi2) with the round 3-sphere written as deta^2 + sin^2(eta) dphi1^2 +
cos^2(eta) dphi2^2, eta in (0, pi/2).  Spherical chart: (t, chi, theta, phi)
with dchi^2 + sin^2(chi)(dtheta^2 + sin^2(theta) dphi^2).

The two tables are transcribed independently and share no structure beyond
the type; agreement of the assembled coefficients across charts is one of
the acceptance checks, so nothing here is allowed to "reuse" the other
chart's data.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .scalars import (
    COS_PI_3,
    COS_PI_4,
    Rational,
    Scalar,
    SIN_PI_3,
    SIN_PI_4,
)
from .symexpr import Encoding, SymExpr

G12 = 0b0011
G13 = 0b0101
G14 = 0b1001
G23 = 0b0110
G24 = 0b1010
G34 = 0b1100

DEFAULT_MAX_JET = 14


@dataclass(frozen=True)
class SymbolTable:
    name: str
    enc: Encoding
    g_inv: tuple            # 4 diagonal entries of g^{-1} as SymExpr
    b: tuple                # 4 coefficients of p1 = sum b_k xi_k
    p0: SymExpr
    density: tuple          # sqrt(det g) as (a-power, angle_exps)
    depends_on: tuple       # coordinate indices (1-based) with nonzero derivatives
    eval_points: tuple      # two exact angle points, each one (sin, cos) pair per angle
    dg: dict = field(default_factory=dict)    # (k, l) -> d_k g^{ll}, zeros omitted
    d2g: dict = field(default_factory=dict)   # (k, l) -> d_k^2 g^{ll}, zeros omitted

    def deriv(self, expr: SymExpr, k: int) -> SymExpr:
        """Partial derivative along coordinate x_k (1-based)."""
        if k == 1:
            return expr.d_dt()
        if k - 2 < self.enc.n_angles and k in self.depends_on:
            return expr.d_angle(k - 2)
        return SymExpr.zero(self.enc)

    def moment_shift(self, alpha) -> tuple:
        """Monomial carried by the xi-integral for multi-index ``alpha``
        after dividing out the volume density: (a-power, angle_exps).

        Per direction k the Gaussian moment contributes g_kk^((alpha_k+1)/2);
        the product over k, divided by sqrt(det g), is a pure monomial in a
        and the angles.  alpha must be even in every slot."""
        raise NotImplementedError  # overridden per chart below

    def fingerprint(self) -> str:
        payload = {
            "name": self.name,
            "enc": self.enc.fingerprint(),
            "g_inv": [g.to_json() for g in self.g_inv],
            "b": [bk.to_json() for bk in self.b],
            "p0": self.p0.to_json(),
            "density": [self.density[0], list(self.density[1])],
            "dependsOn": list(self.depends_on),
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


class HopfTable(SymbolTable):
    def moment_shift(self, alpha):
        a2, a3, a4 = alpha[1], alpha[2], alpha[3]
        return a2 + a3 + a4, (a3, a4)


class SphericalTable(SymbolTable):
    def moment_shift(self, alpha):
        a2, a3, a4 = alpha[1], alpha[2], alpha[3]
        return a2 + a3 + a4, (a3 + a4, 0, a4, 0)


def _metric_derivatives(table_cls, kwargs):
    """Fill in dg / d2g from g_inv and deriv, then freeze the table."""
    t = table_cls(**kwargs)
    dg, d2g = {}, {}
    for k in t.depends_on:
        for l in range(1, 5):
            d1 = t.deriv(t.g_inv[l - 1], k)
            if not d1.is_zero():
                dg[(k, l)] = d1
                d2 = t.deriv(d1, k)
                if not d2.is_zero():
                    d2g[(k, l)] = d2
    kwargs = dict(kwargs, dg=dg, d2g=d2g)
    return table_cls(**kwargs)


def hopf_symbols(max_jet: int = DEFAULT_MAX_JET) -> SymbolTable:
    """Symbol table in Hopf coordinates (t, eta, phi1, phi2).

    Angle monomials are Laurent in (sin eta, cos eta); cot and tan from the
    spin connection are expanded as c/s and s/c."""
    enc = Encoding("hopf", ("eta",), max_jet)

    def ex(terms):
        return SymExpr.from_terms(enc, terms)

    one = Scalar(1)
    g_inv = (
        ex([(0, (0, 0), (), one)]),
        ex([(0, (0, 0), (-2,), one)]),
        ex([(0, (-2, 0), (-2,), one)]),
        ex([(0, (0, -2), (-2,), one)]),
    )
    # p1 coefficients; a common factor -i/a^2 runs through b2..b4
    b1 = ex([(0, (0, 0), (-1, 1), Scalar(0, -3))])
    b2 = ex(
        [
            (G12, (0, 0), (-2, 1), Scalar(0, -1)),
            (0, (-1, 1), (-2,), Scalar(0, -1)),   # cot(eta)
            (0, (1, -1), (-2,), Scalar(0, 1)),    # -tan(eta)
        ]
    )
    b3 = ex(
        [
            (G13, (-1, 0), (-2, 1), Scalar(0, -1)),
            (G23, (-2, 1), (-2,), Scalar(0, -1)),
        ]
    )
    b4 = ex(
        [
            (G14, (0, -1), (-2, 1), Scalar(0, -1)),
            (G24, (1, -2), (-2,), Scalar(0, 1)),
        ]
    )
    q = Rational(1, 4)
    p0 = ex(
        [
            (0, (0, 0), (-1, 0, 1), Scalar(-6 * q)),
            (0, (0, 0), (-2, 2), Scalar(-3 * q)),
            (0, (-2, 0), (-2,), Scalar(q)),
            (0, (0, -2), (-2,), Scalar(q)),
            (0, (0, 0), (-2,), Scalar(4 * q)),
            (G12, (-1, 1), (-2, 1), Scalar(-2 * q)),
            (G12, (1, -1), (-2, 1), Scalar(2 * q)),
        ]
    )
    pt1 = ((SIN_PI_4, COS_PI_4),)
    pt2 = ((SIN_PI_3, COS_PI_3),)
    return _metric_derivatives(
        HopfTable,
        dict(
            name="hopf",
            enc=enc,
            g_inv=g_inv,
            b=(b1, b2, b3, b4),
            p0=p0,
            density=(3, (1, 1)),   # a^3 sin(eta) cos(eta)
            depends_on=(1, 2),
            eval_points=(pt1, pt2),
        ),
    )


def spherical_symbols(max_jet: int = DEFAULT_MAX_JET) -> SymbolTable:
    """Symbol table in spherical coordinates (t, chi, theta, phi).

    Angle monomial slots: (sin chi, cos chi, sin theta, cos theta)."""
    enc = Encoding("spherical", ("chi", "theta"), max_jet)

    def ex(terms):
        return SymExpr.from_terms(enc, terms)

    one = Scalar(1)
    g_inv = (
        ex([(0, (0, 0, 0, 0), (), one)]),
        ex([(0, (0, 0, 0, 0), (-2,), one)]),
        ex([(0, (-2, 0, 0, 0), (-2,), one)]),
        ex([(0, (-2, 0, -2, 0), (-2,), one)]),
    )
    b1 = ex([(0, (0, 0, 0, 0), (-1, 1), Scalar(0, -3))])
    b2 = ex(
        [
            (G12, (0, 0, 0, 0), (-2, 1), Scalar(0, -1)),
            (0, (-1, 1, 0, 0), (-2,), Scalar(0, -2)),   # 2 cot(chi)
        ]
    )
    b3 = ex(
        [
            (G13, (-1, 0, 0, 0), (-2, 1), Scalar(0, -1)),
            (0, (-2, 0, -1, 1), (-2,), Scalar(0, -1)),  # cot(theta) csc^2(chi)
            (G23, (-2, 1, 0, 0), (-2,), Scalar(0, -1)),
        ]
    )
    b4 = ex(
        [
            (G14, (-1, 0, -1, 0), (-2, 1), Scalar(0, -1)),
            (G34, (-2, 0, -2, 1), (-2,), Scalar(0, -1)),
            (G24, (-2, 1, -1, 0), (-2,), Scalar(0, -1)),
        ]
    )
    q = Rational(1, 8)
    p0 = ex(
        [
            (0, (0, 0, 0, 0), (-1, 0, 1), Scalar(-12 * q)),
            (0, (0, 0, 0, 0), (-2, 2), Scalar(-6 * q)),
            (0, (-2, 0, -2, 0), (-2,), Scalar(3 * q)),
            (0, (-2, 0, -2, 2), (-2,), Scalar(-q)),
            # the two imaginary cross terms cancel identically; kept to
            # mirror the raw operator square before simplification
            (0, (-2, 1, -1, 1), (-2,), Scalar(0, 4 * q) + Scalar(0, -4 * q)),
            (0, (-2, 2, 0, 0), (-2,), Scalar(-4 * q)),
            (0, (-2, 0, 0, 0), (-2,), Scalar(5 * q)),
            (0, (0, 0, 0, 0), (-2,), Scalar(4 * q)),
            (G13, (-1, 0, -1, 1), (-2, 1), Scalar(Rational(-1, 2))),
            (G12, (-1, 1, 0, 0), (-2, 1), Scalar(-1)),
            (G23, (-2, 1, -1, 1), (-2,), Scalar(Rational(-1, 2))),
        ]
    )
    pt1 = ((SIN_PI_4, COS_PI_4), (SIN_PI_3, COS_PI_3))
    pt2 = ((SIN_PI_3, COS_PI_3), (SIN_PI_4, COS_PI_4))
    return _metric_derivatives(
        SphericalTable,
        dict(
            name="spherical",
            enc=enc,
            g_inv=g_inv,
            b=(b1, b2, b3, b4),
            p0=p0,
            density=(3, (2, 0, 1, 0)),   # a^3 sin^2(chi) sin(theta)
            depends_on=(1, 2, 3),
            eval_points=(pt1, pt2),
        ),
    )
