"""Exact scalar arithmetic: rationals, Gaussian rationals with a sqrt(pi)
grade, and values in Q(i, sqrt2, sqrt3).

Everything downstream (Clifford coefficients, parametrix nodes, Gaussian
moments, the final heat coefficients) is built on these types.  No floats
appear anywhere on the result path; floats exist only in the numerical
cross-checks under tests/.

The sqrt(pi) bookkeeping is deliberately rigid: adding two scalars with
different sqrtPiExp raises instead of coercing, because in this computation
mixed pi-grades never occur legitimately.  Rationality of the final
coefficients is then a runtime fact (im == 0 and sqrtPiExp == 0), not an
assumption.
"""

from __future__ import annotations

import math

try:
    from gmpy2 import mpq as Rational  # GMP-backed exact rational
except ImportError:  # pragma: no cover - exercised only on gmpy2-less installs
    from fractions import Fraction as Rational

Q0 = Rational(0)
Q1 = Rational(1)


def rational(p, q=1):
    """Exact rational p/q. Accepts ints or "p/q" / "p" strings."""
    if isinstance(p, str):
        return Rational(p)
    return Rational(p, q)


def rational_str(q) -> str:
    """Serialize a rational as "p/q", or "p" when the denominator is 1."""
    return str(q)


def parse_rational(s: str):
    if not isinstance(s, str):
        raise TypeError(f"expected string rational, got {type(s).__name__}")
    return Rational(s)


def factorial(n: int) -> int:
    return math.factorial(n)


def gamma_half(k: int):
    """Gamma(k + 1/2) / sqrt(pi) = (2k)! / (4^k k!) as an exact rational.

    Only the rational part is returned; the caller accounts for the single
    sqrt(pi) factor (see Scalar.sqrt_pi_exp).  k must be >= 0.
    """
    if k < 0:
        raise ValueError(f"gamma_half needs k >= 0, got {k}")
    return Rational(factorial(2 * k), 4**k * factorial(k))


class Scalar:
    """Gaussian rational times an integer power of sqrt(pi).

    value = (re + im*i) * sqrt(pi)**sqrt_pi_exp

    Addition requires matching sqrt_pi_exp unless one side is zero; a
    mismatch is an internal error, never expected data.
    """

    __slots__ = ("re", "im", "sqrt_pi_exp")

    def __init__(self, re=0, im=0, sqrt_pi_exp: int = 0):
        self.re = Rational(re)
        self.im = Rational(im)
        self.sqrt_pi_exp = 0 if (self.re == 0 and self.im == 0) else int(sqrt_pi_exp)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_rational(self) -> bool:
        return self.im == 0 and self.sqrt_pi_exp == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented
        return (
            self.re == other.re
            and self.im == other.im
            and self.sqrt_pi_exp == other.sqrt_pi_exp
        )

    def __hash__(self):
        return hash((str(self.re), str(self.im), self.sqrt_pi_exp))

    def __add__(self, other: "Scalar") -> "Scalar":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.sqrt_pi_exp != other.sqrt_pi_exp:
            raise ValueError(
                f"sqrt(pi) grade mismatch in add: {self.sqrt_pi_exp} vs {other.sqrt_pi_exp}"
            )
        return Scalar(self.re + other.re, self.im + other.im, self.sqrt_pi_exp)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im, self.sqrt_pi_exp)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self + (-other)

    def __mul__(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            return Scalar(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
                self.sqrt_pi_exp + other.sqrt_pi_exp,
            )
        return Scalar(self.re * other, self.im * other, self.sqrt_pi_exp)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero Scalar")
        return Scalar(self.re / n, -self.im / n, -self.sqrt_pi_exp)

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im, self.sqrt_pi_exp)

    def __repr__(self):
        if self.is_zero():
            return "Scalar(0)"
        parts = []
        if self.re != 0:
            parts.append(str(self.re))
        if self.im != 0:
            parts.append(f"{self.im}*i")
        body = " + ".join(parts)
        if self.sqrt_pi_exp:
            body += f" * sqrtpi^{self.sqrt_pi_exp}"
        return f"Scalar({body})"

    def to_json(self):
        return {
            "re": rational_str(self.re),
            "im": rational_str(self.im),
            "sqrtPiExp": self.sqrt_pi_exp,
        }

    @classmethod
    def from_json(cls, obj) -> "Scalar":
        return cls(
            parse_rational(obj["re"]),
            parse_rational(obj["im"]),
            int(obj["sqrtPiExp"]),
        )

    def to_float(self) -> complex:
        return complex(float(self.re), float(self.im)) * math.pi ** (self.sqrt_pi_exp / 2.0)


S_ZERO = Scalar(0)
S_ONE = Scalar(1)
S_I = Scalar(0, 1)


def gamma_half_scalar(k: int) -> Scalar:
    """Gamma(k + 1/2) as a Scalar (rational times sqrt(pi))."""
    return Scalar(gamma_half(k), 0, 1)


# --- Q(i, sqrt2, sqrt3) -----------------------------------------------------

# Basis order: 1, sqrt2, sqrt3, sqrt6.  Multiplication of basis radicals:
# table[i][j] = (rational factor, basis index of the product).
_QUAD_MUL = (
    ((1, 0), (1, 1), (1, 2), (1, 3)),
    ((1, 1), (2, 0), (1, 3), (2, 2)),
    ((1, 2), (1, 3), (3, 0), (3, 1)),
    ((1, 3), (2, 2), (3, 1), (6, 0)),
)


class QuadExt:
    """Element of Q(i, sqrt2, sqrt3): c0 + c1*sqrt2 + c2*sqrt3 + c3*sqrt6,
    with Scalar components (so Gaussian rationals times a sqrt(pi) grade).

    Covers the single-radical values a + b*sqrt(d), d in {2, 3}, used at the
    Hopf evaluation angles, and the mixed products that appear at the
    spherical evaluation points.
    """

    __slots__ = ("c",)

    def __init__(self, c0=S_ZERO, c1=S_ZERO, c2=S_ZERO, c3=S_ZERO):
        self.c = (c0, c1, c2, c3)

    @classmethod
    def from_pair(cls, a: Scalar, b: Scalar, d: int) -> "QuadExt":
        """a + b*sqrt(d) for d in {2, 3}."""
        if d == 2:
            return cls(a, b, S_ZERO, S_ZERO)
        if d == 3:
            return cls(a, S_ZERO, b, S_ZERO)
        raise ValueError(f"only d in (2, 3) supported, got {d}")

    @classmethod
    def from_rational(cls, q) -> "QuadExt":
        return cls(Scalar(q), S_ZERO, S_ZERO, S_ZERO)

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.c)

    def is_scalar(self) -> bool:
        """True when no radical component survives."""
        return all(self.c[i].is_zero() for i in (1, 2, 3))

    def scalar_part(self) -> Scalar:
        if not self.is_scalar():
            raise ValueError(f"non-cancelling radical component in {self!r}")
        return self.c[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuadExt):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __add__(self, other: "QuadExt") -> "QuadExt":
        a, b = self.c, other.c
        return QuadExt(a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])

    def __neg__(self) -> "QuadExt":
        return QuadExt(*(-x for x in self.c))

    def __sub__(self, other: "QuadExt") -> "QuadExt":
        return self + (-other)

    def __mul__(self, other) -> "QuadExt":
        if isinstance(other, Scalar):
            return QuadExt(*(x * other for x in self.c))
        acc = [S_ZERO, S_ZERO, S_ZERO, S_ZERO]
        for i, xi in enumerate(self.c):
            if xi.is_zero():
                continue
            for j, yj in enumerate(other.c):
                if yj.is_zero():
                    continue
                f, k = _QUAD_MUL[i][j]
                acc[k] = acc[k] + xi * yj * f
        return QuadExt(*acc)

    __rmul__ = __mul__

    def conj_sqrt2(self) -> "QuadExt":
        c = self.c
        return QuadExt(c[0], -c[1], c[2], -c[3])

    def conj_sqrt3(self) -> "QuadExt":
        c = self.c
        return QuadExt(c[0], c[1], -c[2], -c[3])

    def inverse(self) -> "QuadExt":
        """Multiplicative inverse via the Galois conjugates over Q(i)."""
        s2 = self.conj_sqrt2()
        s3 = self.conj_sqrt3()
        s23 = s2.conj_sqrt3()
        prod = s2 * s3 * s23
        norm = (self * prod).scalar_part()  # rational-grade Scalar by symmetry
        return prod * norm.inverse()

    def __pow__(self, n: int) -> "QuadExt":
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadExt(S_ONE)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __repr__(self):
        names = ("", "*sqrt2", "*sqrt3", "*sqrt6")
        parts = [f"({x!r}){nm}" for x, nm in zip(self.c, names) if not x.is_zero()]
        return "QuadExt(" + (" + ".join(parts) if parts else "0") + ")"

    def to_float(self) -> complex:
        r = (1.0, math.sqrt(2.0), math.sqrt(3.0), math.sqrt(6.0))
        return sum(x.to_float() * f for x, f in zip(self.c, r))


QE_ZERO = QuadExt()
QE_ONE = QuadExt(S_ONE)

# Exact sin/cos values at the evaluation angles.
HALF = Rational(1, 2)
SIN_PI_4 = QuadExt.from_pair(S_ZERO, Scalar(HALF), 2)   # sqrt2/2
COS_PI_4 = SIN_PI_4
SIN_PI_3 = QuadExt.from_pair(S_ZERO, Scalar(HALF), 3)   # sqrt3/2
COS_PI_3 = QuadExt.from_rational(HALF)
