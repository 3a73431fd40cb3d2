"""Canonical symbolic expressions for the parametrix computation.

A SymExpr is a finite sum of terms

    (i)^phase * sqrt(pi)^pi_exp * q * gamma^B * ANGLE * JET

where q is a rational, gamma^B a basis blade, ANGLE a Laurent monomial in the
angular generators of the coordinate system (sin/cos of eta for Hopf; sin/cos
of chi and theta for spherical), and JET a monomial in a(t), a'(t), ...,
a^(K)(t) whose only negatively-powered slot is a(t) itself.

Two deliberate rigidities, both enforced at construction:

* every term of one expression shares a single sqrt(pi) exponent, and
* every term shares a single phase in {1, i} (coefficients are uniformly real
  or uniformly imaginary).

Both hold throughout the recursion (the level-n parametrix coefficients live
in i^n * Q), so a violation is an implementation bug and raises immediately.

tan, cot, sec, csc never appear as generators: tan = sin * cos^-1 and so on,
and cot(2 eta) expands to (cos^2 - sin^2) * (2 sin cos)^-1.  The Pythagorean
identity is deliberately NOT applied, which keeps the representation a free
Laurent ring with a unique normal form; angle-independence of assembled
traces is checked by exact evaluation, not by rewriting.

Internally a term's monomial is packed into one big int: blade mask in the
low 4 bits, then fixed-width biased exponent fields.  Multiplying monomials
is then a single integer addition (plus blade XOR), which is what makes the
order-12 computation affordable in pure Python.
"""

from __future__ import annotations

import math

from .clifford import BLADE_SIGN, blade_name
from .scalars import Q1, QuadExt, Rational, Scalar

FIELD_BITS = 12
FIELD_BIAS = 1 << (FIELD_BITS - 1)
FIELD_MASK = (1 << FIELD_BITS) - 1
BLADE_BITS = 4
BLADE_MASK_LOW = (1 << BLADE_BITS) - 1
# |exponent| <= FIELD_LIMIT keeps one add-then-rebias step carry-free
FIELD_LIMIT = 500


class Encoding:
    """Fixed monomial layout for one coordinate system.

    Field order above the blade nibble: angle exponents (sin0, cos0,
    sin1, cos1, ...), then jet exponents k_0..k_max_jet.
    """

    __slots__ = (
        "name",
        "angle_names",
        "n_angles",
        "max_jet",
        "n_fields",
        "bias_packed",
        "one",
        "_angle_off",
        "_jet_off",
    )

    def __init__(self, name: str, angle_names: tuple[str, ...], max_jet: int):
        self.name = name
        self.angle_names = angle_names
        self.n_angles = len(angle_names)
        self.max_jet = max_jet
        self.n_fields = 2 * self.n_angles + max_jet + 1
        self._angle_off = tuple(
            BLADE_BITS + FIELD_BITS * i for i in range(2 * self.n_angles)
        )
        self._jet_off = tuple(
            BLADE_BITS + FIELD_BITS * (2 * self.n_angles + r)
            for r in range(max_jet + 1)
        )
        bias = 0
        for i in range(self.n_fields):
            bias |= FIELD_BIAS << (BLADE_BITS + FIELD_BITS * i)
        self.bias_packed = bias
        self.one = bias  # all exponents zero, unit blade

    def encode(self, blade: int, angle_exps, jet_exps) -> int:
        """Pack a monomial.  angle_exps has one (sin, cos) exponent pair per
        angle variable, flattened; jet_exps is (k_0, k_1, ...), trailing
        zeros optional."""
        if not 0 <= blade < 16:
            raise ValueError(f"bad blade mask {blade}")
        if len(angle_exps) != 2 * self.n_angles:
            raise ValueError(
                f"expected {2 * self.n_angles} angle exponents, got {len(angle_exps)}"
            )
        if len(jet_exps) > self.max_jet + 1:
            raise ValueError(
                f"jet order {len(jet_exps) - 1} exceeds layout max {self.max_jet}"
            )
        key = self.bias_packed | blade
        for off, e in zip(self._angle_off, angle_exps):
            if abs(e) > FIELD_LIMIT:
                raise ValueError(f"angle exponent {e} out of packable range")
            key += e << off
        for r, (off, e) in enumerate(zip(self._jet_off, jet_exps)):
            if r > 0 and e < 0:
                raise ValueError(
                    f"negative exponent {e} on jet slot {r}; only a(t) may be inverted"
                )
            if abs(e) > FIELD_LIMIT:
                raise ValueError(f"jet exponent {e} out of packable range")
            key += e << off
        return key

    def decode(self, key: int) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
        """Unpack to (blade, angle_exps, jet_exps) with jet trailing zeros
        stripped."""
        blade = key & BLADE_MASK_LOW
        v = key >> BLADE_BITS
        fields = [
            ((v >> (FIELD_BITS * i)) & FIELD_MASK) - FIELD_BIAS
            for i in range(self.n_fields)
        ]
        angles = tuple(fields[: 2 * self.n_angles])
        jets = fields[2 * self.n_angles :]
        while jets and jets[-1] == 0:
            jets.pop()
        return blade, angles, tuple(jets)

    def jet_exponent(self, key: int, r: int) -> int:
        return ((key >> self._jet_off[r]) & FIELD_MASK) - FIELD_BIAS

    def angle_exponent(self, key: int, i: int) -> int:
        return ((key >> self._angle_off[i]) & FIELD_MASK) - FIELD_BIAS

    def shift(self, blade: int = 0, angle_exps=None, jet_exps=None) -> int:
        """Packed delta (bias-free) for monomial shifts; combine with a key
        by plain integer + (blade must be 0 or equal to the target's xor)."""
        delta = blade
        if angle_exps:
            for off, e in zip(self._angle_off, angle_exps):
                delta += e << off
        if jet_exps:
            for off, e in zip(self._jet_off, jet_exps):
                delta += e << off
        return delta

    def fingerprint(self) -> str:
        return f"{self.name}:{self.n_angles}:{self.max_jet}:{FIELD_BITS}"


def _sort_key(enc: Encoding, key: int):
    blade, angles, jets = enc.decode(key)
    return (blade, angles, len(jets), jets)


class SymExpr:
    __slots__ = ("enc", "phase", "pi_exp", "terms")

    def __init__(self, enc: Encoding, phase: int = 0, pi_exp: int = 0, terms=None):
        self.enc = enc
        self.terms = terms if terms is not None else {}
        if self.terms:
            self.phase = phase & 1
            self.pi_exp = pi_exp
        else:
            self.phase = 0
            self.pi_exp = 0

    # --- construction ------------------------------------------------------

    @classmethod
    def zero(cls, enc: Encoding) -> "SymExpr":
        return cls(enc)

    @classmethod
    def one(cls, enc: Encoding) -> "SymExpr":
        return cls(enc, 0, 0, {enc.one: Q1})

    @classmethod
    def from_terms(cls, enc: Encoding, triples, pi_exp: int = 0) -> "SymExpr":
        """Build from (blade, angle_exps, jet_exps, coeff) quadruples where
        coeff is a Scalar, rational, or int.  All Scalar coefficients must
        agree in sqrt(pi) exponent and in phase (purely real or purely
        imaginary); mixing raises."""
        phase = None
        pi = None
        terms: dict = {}
        for blade, angles, jets, coeff in triples:
            if isinstance(coeff, Scalar):
                if coeff.is_zero():
                    continue
                if coeff.re != 0 and coeff.im != 0:
                    raise ValueError(
                        "mixed real/imaginary coefficient not representable in one SymExpr"
                    )
                p = 0 if coeff.im == 0 else 1
                q = coeff.re if p == 0 else coeff.im
                if pi is None:
                    pi = coeff.sqrt_pi_exp
                elif pi != coeff.sqrt_pi_exp:
                    raise ValueError("sqrt(pi) grade mismatch across terms")
            else:
                q = Rational(coeff)
                if q == 0:
                    continue
                p = 0
            if phase is None:
                phase = p
            elif phase != p:
                raise ValueError("phase mismatch across terms (real vs imaginary)")
            key = enc.encode(blade, tuple(angles), tuple(jets))
            q0 = terms.get(key)
            q = q if q0 is None else q0 + q
            if q == 0:
                terms.pop(key, None)
            else:
                terms[key] = q
        if pi is None:
            pi = pi_exp
        return cls(enc, phase or 0, pi if terms else 0, terms)

    def copy(self) -> "SymExpr":
        return SymExpr(self.enc, self.phase, self.pi_exp, dict(self.terms))

    # --- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymExpr):
            return NotImplemented
        if self.enc is not other.enc and self.enc.fingerprint() != other.enc.fingerprint():
            return False
        if not self.terms and not other.terms:
            return True
        return (
            self.phase == other.phase
            and self.pi_exp == other.pi_exp
            and self.terms == other.terms
        )

    def __len__(self) -> int:
        return len(self.terms)

    # --- ring operations ----------------------------------------------------

    def __add__(self, other: "SymExpr") -> "SymExpr":
        if not other.terms:
            return self
        if not self.terms:
            return other
        if self.phase != other.phase:
            raise ValueError("phase mismatch in add (real + imaginary)")
        if self.pi_exp != other.pi_exp:
            raise ValueError(
                f"sqrt(pi) grade mismatch in add: {self.pi_exp} vs {other.pi_exp}"
            )
        out = dict(self.terms)
        get = out.get
        for k, q in other.terms.items():
            q0 = get(k)
            if q0 is None:
                out[k] = q
            else:
                qs = q0 + q
                if qs == 0:
                    del out[k]
                else:
                    out[k] = qs
        return SymExpr(self.enc, self.phase, self.pi_exp, out)

    def __neg__(self) -> "SymExpr":
        return SymExpr(
            self.enc, self.phase, self.pi_exp, {k: -q for k, q in self.terms.items()}
        )

    def __sub__(self, other: "SymExpr") -> "SymExpr":
        return self + (-other)

    def __mul__(self, other) -> "SymExpr":
        if not isinstance(other, SymExpr):
            return self.scale(other)
        if not self.terms or not other.terms:
            return SymExpr.zero(self.enc)
        # i^p1 * i^p2 = (-1)^(p1 & p2) * i^(p1 ^ p2)
        negate = self.phase & other.phase
        # Blades anticommute, so the loop order is fixed: self supplies the
        # left factor of every product and the BLADE_SIGN row is indexed by it.
        a, b = self.terms, other.terms
        bias4 = self.enc.bias_packed  # bias sits above the blade nibble
        out: dict = {}
        get = out.get
        for k1, q1 in a.items():
            b1 = k1 & BLADE_MASK_LOW
            base = k1 - b1 - bias4
            sign_row = BLADE_SIGN[b1]
            for k2, q2 in b.items():
                b2 = k2 & BLADE_MASK_LOW
                key = base + (k2 - b2) + (b1 ^ b2)
                q = q1 * q2
                if sign_row[b2] < 0:
                    q = -q
                q0 = get(key)
                if q0 is None:
                    out[key] = q
                else:
                    qs = q0 + q
                    if qs == 0:
                        del out[key]
                    else:
                        out[key] = qs
        if negate:
            for k in out:
                out[k] = -out[k]
        return SymExpr(
            self.enc, self.phase ^ other.phase, self.pi_exp + other.pi_exp, out
        )

    def scale(self, coeff) -> "SymExpr":
        """Multiply by a rational or a Scalar."""
        if isinstance(coeff, Scalar):
            if coeff.is_zero():
                return SymExpr.zero(self.enc)
            if coeff.re != 0 and coeff.im != 0:
                raise ValueError("cannot scale SymExpr by a mixed Gaussian scalar")
            if coeff.im == 0:
                q, dphase, negate = coeff.re, 0, False
            else:
                q, dphase, negate = coeff.im, 1, self.phase == 1
            out = {k: (-v * q if negate else v * q) for k, v in self.terms.items()}
            return SymExpr(
                self.enc,
                self.phase ^ dphase,
                self.pi_exp + coeff.sqrt_pi_exp,
                out,
            )
        q = Rational(coeff)
        if q == 0:
            return SymExpr.zero(self.enc)
        return SymExpr(
            self.enc, self.phase, self.pi_exp, {k: v * q for k, v in self.terms.items()}
        )

    def times_i(self) -> "SymExpr":
        if not self.terms:
            return self
        if self.phase == 0:
            return SymExpr(self.enc, 1, self.pi_exp, dict(self.terms))
        return SymExpr(
            self.enc, 0, self.pi_exp, {k: -q for k, q in self.terms.items()}
        )

    def shift_monomial(self, blade: int = 0, angle_exps=None, jet_exps=None) -> "SymExpr":
        """Multiply by a single monomial with coefficient 1 and unit blade
        (blade != 0 not supported here; the engine never needs it)."""
        if blade != 0:
            raise ValueError("shift_monomial only supports the unit blade")
        delta = self.enc.shift(0, angle_exps, jet_exps)
        return SymExpr(
            self.enc,
            self.phase,
            self.pi_exp,
            {k + delta: q for k, q in self.terms.items()},
        )

    # --- derivatives --------------------------------------------------------

    def d_dt(self) -> "SymExpr":
        """Exact t-derivative: jet chain rule
        d/dt a^(r)^k = k a^(r)^(k-1) a^(r+1) applied per slot."""
        enc = self.enc
        jet_off = enc._jet_off
        max_jet = enc.max_jet
        out: dict = {}
        get = out.get
        for key, q in self.terms.items():
            v = key >> BLADE_BITS
            base = FIELD_BITS * 2 * enc.n_angles
            for r in range(max_jet + 1):
                k_r = ((v >> (base + FIELD_BITS * r)) & FIELD_MASK) - FIELD_BIAS
                if k_r == 0:
                    continue
                if r == max_jet:
                    raise ValueError(
                        f"d_dt would exceed jet layout (a^({max_jet}) present)"
                    )
                nk = key - (1 << jet_off[r]) + (1 << jet_off[r + 1])
                nq = q * k_r
                q0 = get(nk)
                if q0 is None:
                    out[nk] = nq
                else:
                    qs = q0 + nq
                    if qs == 0:
                        del out[nk]
                    else:
                        out[nk] = qs
        return SymExpr(enc, self.phase, self.pi_exp, out)

    def d_angle(self, var: int) -> "SymExpr":
        """Exact derivative in angular variable ``var``:
        d(s^p c^q)/dv = p s^(p-1) c^(q+1) - q s^(p+1) c^(q-1)."""
        enc = self.enc
        if not 0 <= var < enc.n_angles:
            raise ValueError(f"bad angle variable {var} for {enc.name}")
        s_off = enc._angle_off[2 * var]
        c_off = enc._angle_off[2 * var + 1]
        s_bit = 1 << s_off
        c_bit = 1 << c_off
        out: dict = {}
        get = out.get

        def put(nk, nq):
            q0 = get(nk)
            if q0 is None:
                out[nk] = nq
            else:
                qs = q0 + nq
                if qs == 0:
                    del out[nk]
                else:
                    out[nk] = qs

        for key, q in self.terms.items():
            p = ((key >> s_off) & FIELD_MASK) - FIELD_BIAS
            if p:
                put(key - s_bit + c_bit, q * p)
            c = ((key >> c_off) & FIELD_MASK) - FIELD_BIAS
            if c:
                put(key + s_bit - c_bit, -q * c)
        return SymExpr(enc, self.phase, self.pi_exp, out)

    # --- views and serialization ---------------------------------------------

    def iter_terms(self):
        """Yield (blade, angle_exps, jet_exps, Scalar) in canonical order."""
        for key in sorted(self.terms, key=lambda k: _sort_key(self.enc, k)):
            blade, angles, jets = self.enc.decode(key)
            q = self.terms[key]
            sc = (
                Scalar(q, 0, self.pi_exp) if self.phase == 0 else Scalar(0, q, self.pi_exp)
            )
            yield blade, angles, jets, sc

    def to_json(self):
        return {
            "coords": self.enc.name,
            "sqrtPiExp": self.pi_exp,
            "terms": [
                {
                    "blade": blade_name(blade),
                    "angles": list(angles),
                    "jets": list(jets),
                    "re": str(sc.re),
                    "im": str(sc.im),
                }
                for blade, angles, jets, sc in self.iter_terms()
            ],
        }

    @classmethod
    def from_json(cls, enc: Encoding, obj) -> "SymExpr":
        pi = int(obj["sqrtPiExp"])
        triples = []
        for t in obj["terms"]:
            mask = 0
            if t["blade"] != "1":
                for ch in t["blade"][1:]:
                    mask |= 1 << (int(ch) - 1)
            triples.append(
                (
                    mask,
                    tuple(t["angles"]),
                    tuple(t["jets"]),
                    Scalar(Rational(t["re"]), Rational(t["im"]), pi),
                )
            )
        return cls.from_terms(enc, triples, pi_exp=pi)

    def latex(self) -> str:
        if not self.terms:
            return "0"
        angle_syms = self.enc.angle_names
        parts = []
        for blade, angles, jets, sc in self.iter_terms():
            q = sc.re if self.phase == 0 else sc.im
            num, den = q.numerator, q.denominator
            sgn = "-" if num < 0 else "+"
            num = abs(num)
            if den == 1:
                coeff = f"{num}"
            else:
                coeff = rf"\frac{{{num}}}{{{den}}}"
            factors = [] if coeff == "1" else [coeff]
            if self.phase:
                factors.append("i")
            if self.pi_exp:
                e = self.pi_exp
                factors.append(rf"\pi^{{{e}/2}}" if e % 2 else rf"\pi^{{{e // 2}}}")
            for r, k in enumerate(jets):
                if k == 0:
                    continue
                base = "a(t)" if r == 0 else (f"a'(t)" if r == 1 else f"a^{{({r})}}(t)")
                factors.append(base if k == 1 else f"{base}^{{{k}}}")
            for i, name in enumerate(angle_syms):
                for fn, e in (("\\sin", angles[2 * i]), ("\\cos", angles[2 * i + 1])):
                    if e == 0:
                        continue
                    s = f"{fn}(\\{name})" if e == 1 else f"{fn}^{{{e}}}(\\{name})"
                    factors.append(s)
            if blade:
                factors.append(
                    "\\gamma^{" + "".join(blade_name(blade)[1:]) + "}"
                )
            if not factors:
                factors = ["1"]
            parts.append(sgn + " " + " ".join(factors))
        body = " ".join(parts)
        return body[2:] if body.startswith("+ ") else body

    def __repr__(self):
        n = len(self.terms)
        if n == 0:
            return "SymExpr(0)"
        if n <= 6:
            return f"SymExpr({self.latex()})"
        return f"SymExpr({self.enc.name}, {n} terms, phase={self.phase}, pi={self.pi_exp})"

    # --- numerical evaluation (used by the finite-difference checks) ----------

    def eval_float(self, jet_values, angle_values) -> complex:
        """Floating-point value given jets (a, a', ...) and one (sin, cos)
        pair per angle variable."""
        total = 0.0
        for key in self.terms:
            blade, angles, jets = self.enc.decode(key)
            if blade != 0:
                raise ValueError("eval_float is defined for blade-free terms only")
            v = float(self.terms[key])
            for i in range(self.enc.n_angles):
                s, c = angle_values[i]
                v *= s ** angles[2 * i] * c ** angles[2 * i + 1]
            for r, k in enumerate(jets):
                v *= jet_values[r] ** k
            total += v
        total *= math.pi ** (self.pi_exp / 2.0)
        return complex(0.0, total) if self.phase else complex(total, 0.0)

    def eval_angles(self, point) -> "EvalExpr":
        """Substitute exact angle values and collect by jet monomial.

        ``point`` supplies one (sin, cos) pair of QuadExt values per angle
        variable.  The result, an EvalExpr, has no angle dependence; its
        coefficients live in the quartic extension so that exact values at
        pi/4 and pi/3 stay exact.  Only blade-free expressions are accepted
        (evaluation happens after the Clifford trace)."""
        enc = self.enc
        if len(point) != enc.n_angles:
            raise ValueError(f"expected {enc.n_angles} (sin, cos) pairs")
        out: dict = {}
        for key, q in self.terms.items():
            blade, angles, jets = enc.decode(key)
            if blade != 0:
                raise ValueError("eval_angles is defined for blade-free terms only")
            val = QuadExt(
                Scalar(q, 0, self.pi_exp)
                if self.phase == 0
                else Scalar(0, q, self.pi_exp)
            )
            for i, (s, c) in enumerate(point):
                es, ec = angles[2 * i], angles[2 * i + 1]
                if es:
                    val = val * s**es
                if ec:
                    val = val * c**ec
            prev = out.get(jets)
            val = val if prev is None else prev + val
            if val.is_zero():
                out.pop(jets, None)
            else:
                out[jets] = val
        return EvalExpr(out)


class EvalExpr:
    """Angle-free result of eval_angles: a map jet-monomial -> QuadExt.

    Supports just enough ring structure to state that eval_angles is a
    homomorphism and that two evaluations agree."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict):
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, EvalExpr):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: "EvalExpr") -> "EvalExpr":
        out = dict(self.terms)
        for jets, v in other.terms.items():
            prev = out.get(jets)
            v2 = v if prev is None else prev + v
            if v2.is_zero():
                out.pop(jets, None)
            else:
                out[jets] = v2
        return EvalExpr(out)

    def __sub__(self, other: "EvalExpr") -> "EvalExpr":
        return self + EvalExpr({j: -v for j, v in other.terms.items()})

    def __mul__(self, other: "EvalExpr") -> "EvalExpr":
        out: dict = {}
        for j1, v1 in self.terms.items():
            for j2, v2 in other.terms.items():
                n = max(len(j1), len(j2))
                jets = tuple(
                    (j1[r] if r < len(j1) else 0) + (j2[r] if r < len(j2) else 0)
                    for r in range(n)
                )
                while jets and jets[-1] == 0:
                    jets = jets[:-1]
                v = v1 * v2
                prev = out.get(jets)
                v = v if prev is None else prev + v
                if v.is_zero():
                    out.pop(jets, None)
                else:
                    out[jets] = v
        return EvalExpr(out)

    def __repr__(self):
        return f"EvalExpr({len(self.terms)} jet terms)"


def is_zero_mod_pythagoras(expr: SymExpr) -> bool:
    """Whether expr vanishes identically as a function of the angles.

    Laurent monomials in (sin u, cos u) are not linearly independent as
    functions: s^2 + c^2 - 1 = 0.  Two expressions built along different
    derivation routes can therefore spell the same function with different
    term dictionaries.  This reduces each (blade, jet) slice modulo the
    relation for every angle and reports whether everything cancels."""
    groups: dict = {}
    for key, q in expr.terms.items():
        blade, ang, jets = expr.enc.decode(key)
        groups.setdefault((blade, jets), {})[ang] = q
    return all(_angle_poly_zero(p) for p in groups.values())


def _angle_poly_zero(poly: dict) -> bool:
    width = len(next(iter(poly)))
    mins = [min(k[i] for k in poly) for i in range(width)]
    work = {
        tuple(k[i] - mins[i] for i in range(width)): q for k, q in poly.items()
    }
    for i in range(0, width, 2):
        out: dict = {}
        for k, q in work.items():
            m, r = divmod(k[i + 1], 2)
            # c^(2m) -> (1 - s^2)^m, leaving a bare c at most
            for t in range(m + 1):
                kk = list(k)
                kk[i] = k[i] + 2 * t
                kk[i + 1] = r
                kk = tuple(kk)
                qq = q * math.comb(m, t) * (-1) ** t
                q0 = out.get(kk)
                qs = qq if q0 is None else q0 + qq
                if qs == 0:
                    out.pop(kk, None)
                else:
                    out[kk] = qs
        work = out
        if not work:
            return True
    return not work
