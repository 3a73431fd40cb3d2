"""From a completed parametrix level to the exact coefficient a_n(t).

The xi-integral over each node reduces to a product of one-dimensional
Gaussian moments (zero unless every alpha_k is even), a Clifford trace
(only blade-free terms survive), and a monomial in a(t) and the angles
coming from rescaling xi by the diagonal metric.  Summing over the level
and dividing by the volume density leaves an expression that is still
written with angle factors; the angles only disappear on exact evaluation,
which is why the same sum is evaluated at two different exact points as a
consistency check.
"""

import math

from .scalars import S_ZERO, Scalar, gamma_half, rational
from .symexpr import EvalExpr, SymExpr


class RationalityError(AssertionError):
    """A coefficient came out imaginary, irrational, or pi-laden."""


class EtaDependenceError(AssertionError):
    """The two exact angle evaluations of the same level disagree."""


def moment(alpha) -> Scalar:
    """Product of one-dimensional Gaussian moments for xi^alpha.

    Zero when any exponent is odd; otherwise a rational multiple of pi^2
    (sqrt_pi_exp = 4), one factor Gamma(alpha_k/2 + 1/2) per direction.
    """
    q = rational(1)
    for ak in alpha:
        if ak & 1:
            return S_ZERO
        q *= gamma_half(ak >> 1)
    return Scalar(q, 0, 4)


def assemble_trace_en(engine, n: int, point_index: int = 0) -> EvalExpr:
    """Trace of the level-n kernel coefficient, exactly evaluated.

    Sums moment(alpha)/(j-1)! * tr(node) over the level, each node carrying
    the monomial prod_k g_kk^((alpha_k+1)/2); the volume density is divided
    out of the summed expression as a single Laurent shift (individual
    summands have angle poles, the sum does not need to be pole-free term
    by term, but stays exactly evaluable).  Returns the angle-free map
    jet-monomial -> coefficient at the requested exact point.
    """
    engine.ensure_level(n)
    table = engine.table
    enc = table.enc
    dens_a, dens_ang = table.density
    total: dict = {}
    fact = [math.factorial(j) for j in range(3 * n + 3)]
    for j, alpha, node in engine.iter_top(n):
        m = moment(alpha)
        if m.is_zero():
            continue
        scale = m.re * 4 / fact[j - 1]
        ms_a, ms_ang = table.moment_shift(alpha)
        delta = enc.shift(
            0,
            tuple(e + d for e, d in zip(ms_ang, dens_ang)),
            (ms_a + dens_a,),
        )
        for key, q in node.terms.items():
            if key & 15:
                continue  # traceless blade
            k2 = key + delta
            prev = total.get(k2)
            if prev is None:
                total[k2] = q * scale
            else:
                qs = prev + q * scale
                if qs == 0:
                    del total[k2]
                else:
                    total[k2] = qs
    undensity = enc.shift(0, tuple(-d for d in dens_ang), (-dens_a,))
    total = {k + undensity: q for k, q in total.items()}
    summed = SymExpr(enc, n & 1, 4, total)
    return summed.eval_angles(table.eval_points[point_index])


def eta_independence_check(engine, n: int):
    """Evaluate the assembled level at both exact points and compare.

    Returns (True, None) on agreement, else (False, first differing jet
    monomial).  Agreement is exact equality in the quartic extension.
    """
    e0 = assemble_trace_en(engine, n, 0)
    e1 = assemble_trace_en(engine, n, 1)
    if e0 == e1:
        return True, None
    for jets in sorted(set(e0.terms) | set(e1.terms)):
        if e0.terms.get(jets) != e1.terms.get(jets):
            return False, jets
    return False, None


# Denominator power the reference closed forms are stated with, per order
# (a_6 over a^2, a_8 over a^4, ...); low orders are plain monomial sums.
def reference_a_power(order: int) -> int:
    return max(order - 4, 0)


class JetRationalPoly:
    """a_n(t) as an exact Laurent polynomial in a(t) and its derivatives.

    ``terms`` maps a jet tuple (k_0, k_1, ..., trailing zeros trimmed) to a
    rational coefficient; k_0, the exponent of a(t) itself, may be negative.
    Presentation forms factor a(t)^-d out: q_form uses d = order - 3, the
    display form uses the smaller denominators of the printed expressions.
    Equality ignores the coordinate tag, so the same coefficient computed
    in both charts compares equal.
    """

    __slots__ = ("order", "coords", "terms")

    def __init__(self, order: int, coords: str, terms: dict):
        self.order = order
        self.coords = coords
        self.terms = {j: q for j, q in terms.items() if q != 0}

    def __eq__(self, other):
        if not isinstance(other, JetRationalPoly):
            return NotImplemented
        return self.order == other.order and self.terms == other.terms

    def __repr__(self):
        return (
            f"JetRationalPoly(order={self.order}, coords={self.coords!r}, "
            f"{len(self.terms)} terms)"
        )

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, jets) -> "rational":
        jets = tuple(jets)
        while jets and jets[-1] == 0:
            jets = jets[:-1]
        return self.terms.get(jets, rational(0))

    def q_form(self, a_power=None):
        """(d, terms) with the a(t)^-d denominator cleared: k_0 += d."""
        d = self.order - 3 if a_power is None else a_power
        out = {}
        for jets, q in self.terms.items():
            k0 = (jets[0] if jets else 0) + d
            shifted = (k0,) + jets[1:]
            while shifted and shifted[-1] == 0:
                shifted = shifted[:-1]
            out[shifted] = q
        return d, out

    def reduced_a_power(self) -> int:
        """Smallest d with every k_0 + d non-negative (0 for the zero poly)."""
        if not self.terms:
            return 0
        return -min((jets[0] if jets else 0) for jets in self.terms)

    @staticmethod
    def term_order(jets):
        k0 = jets[0] if jets else 0
        high = max((r for r in range(1, len(jets)) if jets[r]), default=0)
        return (-k0, high, tuple(jets))

    def to_json(self) -> dict:
        d, qterms = self.q_form(reference_a_power(self.order))
        dr, rterms = self.q_form(self.reduced_a_power())

        def dump(terms):
            return [
                {"coeff": str(terms[j]), "jets": list(j)}
                for j in sorted(terms, key=self.term_order)
            ]

        return {
            "order": self.order,
            "coords": self.coords,
            "aPower": d,
            "terms": dump(qterms),
            "reduced": {"aPower": dr, "terms": dump(rterms)},
        }

    @classmethod
    def from_json(cls, obj) -> "JetRationalPoly":
        d = obj["aPower"]
        terms = {}
        for t in obj["terms"]:
            jets = list(t["jets"])
            if not jets:
                jets = [0]
            jets[0] -= d
            tup = tuple(jets)
            while tup and tup[-1] == 0:
                tup = tup[:-1]
            terms[tup] = terms.get(tup, rational(0)) + rational(t["coeff"])
        return cls(obj["order"], obj.get("coords", "hopf"), terms)

    def latex(self) -> str:
        if not self.terms:
            return "0"
        d, qterms = self.q_form(self.reduced_a_power())
        denom = 1
        for q in qterms.values():
            denom = (denom * q.denominator) // math.gcd(denom, q.denominator)
        parts = []
        for jets in sorted(qterms, key=self.term_order):
            c = qterms[jets] * denom
            factors = []
            for r, k in enumerate(jets):
                if not k:
                    continue
                if r == 0:
                    f = "a(t)"
                elif r == 1:
                    f = "a'(t)"
                elif r == 2:
                    f = "a''(t)"
                else:
                    f = f"a^{{({r})}}(t)"
                factors.append(f if k == 1 else f + f"^{{{k}}}")
            mono = " ".join(factors) if factors else "1"
            num = int(c)
            if abs(num) == 1:
                body = mono
            else:
                body = f"{abs(num)} {mono}" if factors else str(abs(num))
            parts.append(("-" if num < 0 else "+") + " " + body)
        poly = " ".join(parts)
        poly = poly[2:] if poly.startswith("+ ") else poly[0] + poly[2:]
        if denom == 1 and d <= 0:
            pre = ""
        elif d <= 0:
            pre = f"\\frac{{1}}{{{denom}}}"
        elif denom == 1:
            pre = f"\\frac{{1}}{{a(t)^{{{d}}}}}"
        else:
            pre = f"\\frac{{1}}{{{denom} a(t)^{{{d}}}}}"
        if d < 0:
            poly_pre = "a(t)" if d == -1 else f"a(t)^{{{-d}}}"
            return f"{pre}{poly_pre} \\Big({poly}\\Big)" if pre else (
                f"{poly_pre} \\Big({poly}\\Big)"
            )
        return f"{pre}\\Big({poly}\\Big)" if pre else poly


def a_term(engine, n: int, check_eta: bool = True) -> JetRationalPoly:
    """The exact heat coefficient a_n(t) = tr(e_n) * a(t)^3 / (8 pi^2).

    Asserts rationality of every coefficient (no imaginary part, no residual
    pi or square-root content) and that odd orders assemble to exactly zero.
    ``check_eta`` additionally requires the two exact angle evaluations to
    agree before any coefficient is accepted.
    """
    ev = assemble_trace_en(engine, n, 0)
    if check_eta:
        ev2 = assemble_trace_en(engine, n, 1)
        if ev != ev2:
            raise EtaDependenceError(
                f"angle evaluations of level {n} disagree; kernel bug upstream"
            )
    if n & 1:
        if not ev.is_zero():
            raise RationalityError(f"odd level {n} assembled to a nonzero value")
        return JetRationalPoly(n, engine.table.name, {})
    terms = {}
    for jets, v in ev.terms.items():
        if not v.is_scalar():
            raise RationalityError(
                f"coefficient of jets {jets} has a surd part: {v!r}"
            )
        s = v.scalar_part()
        if s.im != 0 or s.sqrt_pi_exp != 4:
            raise RationalityError(
                f"coefficient of jets {jets} is not rational*pi^2: {s!r}"
            )
        k0 = (jets[0] if jets else 0) + 3
        shifted = (k0,) + jets[1:]
        while shifted and shifted[-1] == 0:
            shifted = shifted[:-1]
        terms[shifted] = s.re / 8
    return JetRationalPoly(n, engine.table.name, terms)
