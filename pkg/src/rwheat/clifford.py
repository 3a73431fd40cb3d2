"""Rank-4 Clifford algebra over signed subsets (blades).

A blade is a bitmask over the generators gamma^1..gamma^4 (bit i-1 set means
gamma^i is present), with the convention (gamma^i)^2 = -1 and
gamma^i gamma^j = -gamma^j gamma^i for i != j.  gamma^S means the product of
the generators of S in ascending order, so the 16 masks form a basis.

The normalized trace is 4 * (coefficient of the unit blade): every non-unit
basis blade is traceless.  verify_matrix_model() checks all of this against
the explicit 4x4 gamma matrices, entry by entry, for all 256 basis products.
"""

from __future__ import annotations

from .scalars import S_I, S_ONE, S_ZERO, Scalar

UNIT = 0
N_GENERATORS = 4
ALL_BLADES = tuple(range(16))


def blade_name(mask: int) -> str:
    if mask == 0:
        return "1"
    return "g" + "".join(str(i + 1) for i in range(N_GENERATORS) if mask >> i & 1)


def blade_from_indices(*indices: int) -> int:
    """Blade mask for gamma^{i1 i2 ...} with 1-based ascending indices."""
    mask = 0
    for i in indices:
        if not 1 <= i <= N_GENERATORS:
            raise ValueError(f"generator index out of range: {i}")
        bit = 1 << (i - 1)
        if mask & bit:
            raise ValueError(f"repeated generator index: {i}")
        mask |= bit
    return mask


def _blade_mul_raw(a: int, b: int) -> tuple[int, int]:
    """Multiply basis blades: gamma^a * gamma^b = sign * gamma^(a xor b)."""
    sign = 1
    for i in range(N_GENERATORS):
        bit = 1 << i
        if not b & bit:
            continue
        # move gamma^(i+1) left through the generators of a above it
        if bin(a >> (i + 1)).count("1") & 1:
            sign = -sign
        if a & bit:
            sign = -sign  # (gamma^i)^2 = -1
            a ^= bit
        else:
            a |= bit
    return sign, a


# Dense 16x16 tables; the engine's inner loop indexes these directly.
BLADE_SIGN = tuple(
    tuple(_blade_mul_raw(a, b)[0] for b in ALL_BLADES) for a in ALL_BLADES
)
BLADE_MASK = tuple(tuple(a ^ b for b in ALL_BLADES) for a in ALL_BLADES)


def blade_mul(a: int, b: int) -> tuple[int, int]:
    """(sign, mask) of the product of two basis blades."""
    return BLADE_SIGN[a][b], a ^ b


def blade_grade(mask: int) -> int:
    return bin(mask).count("1")


def _is_zero_coeff(c) -> bool:
    is_zero = getattr(c, "is_zero", None)
    if is_zero is not None:
        return is_zero()
    return c == 0


class CliffordElement:
    """Finite sum of blades with coefficients from any commutative ring that
    supports +, unary -, * and a zero test (Scalar or plain rationals)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict | None = None):
        self.coeffs = {}
        if coeffs:
            for mask, c in coeffs.items():
                if not _is_zero_coeff(c):
                    self.coeffs[mask] = c

    @classmethod
    def blade(cls, mask: int, coeff=S_ONE) -> "CliffordElement":
        return cls({mask: coeff})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliffordElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        out = dict(self.coeffs)
        for mask, c in other.coeffs.items():
            if mask in out:
                s = out[mask] + c
                if _is_zero_coeff(s):
                    del out[mask]
                else:
                    out[mask] = s
            else:
                out[mask] = c
        return CliffordElement(out)

    def __neg__(self) -> "CliffordElement":
        return CliffordElement({m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "CliffordElement") -> "CliffordElement":
        return self + (-other)

    def __mul__(self, other) -> "CliffordElement":
        if not isinstance(other, CliffordElement):
            return CliffordElement({m: c * other for m, c in self.coeffs.items()})
        acc: dict = {}
        for ma, ca in self.coeffs.items():
            sign_row = BLADE_SIGN[ma]
            for mb, cb in other.coeffs.items():
                m = ma ^ mb
                c = ca * cb
                if sign_row[mb] < 0:
                    c = -c
                if m in acc:
                    acc[m] = acc[m] + c
                else:
                    acc[m] = c
        return CliffordElement(acc)

    def __rmul__(self, other) -> "CliffordElement":
        # scalar * element; scalars commute with everything here
        return CliffordElement({m: c * other for m, c in self.coeffs.items()})

    def trace(self):
        """Normalized trace: 4 * unit-blade coefficient."""
        c = self.coeffs.get(UNIT)
        if c is None:
            return S_ZERO
        return c * 4

    def __repr__(self):
        if not self.coeffs:
            return "CliffordElement(0)"
        parts = [f"{blade_name(m)}: {c!r}" for m, c in sorted(self.coeffs.items())]
        return "CliffordElement({" + ", ".join(parts) + "})"


# --- Explicit 4x4 matrix model ----------------------------------------------

_I = S_I
_1 = S_ONE
_0 = S_ZERO
_M1 = Scalar(-1)
_MI = Scalar(0, -1)

GAMMA_MATRICES = (
    # gamma^1
    (
        (_0, _0, _I, _0),
        (_0, _0, _0, _I),
        (_I, _0, _0, _0),
        (_0, _I, _0, _0),
    ),
    # gamma^2
    (
        (_0, _0, _0, _1),
        (_0, _0, _1, _0),
        (_0, _M1, _0, _0),
        (_M1, _0, _0, _0),
    ),
    # gamma^3
    (
        (_0, _0, _0, _MI),
        (_0, _0, _I, _0),
        (_0, _I, _0, _0),
        (_MI, _0, _0, _0),
    ),
    # gamma^4
    (
        (_0, _0, _1, _0),
        (_0, _0, _0, _M1),
        (_M1, _0, _0, _0),
        (_0, _1, _0, _0),
    ),
)

_ID4 = tuple(
    tuple(_1 if r == c else _0 for c in range(4)) for r in range(4)
)


def mat_mul(a, b):
    return tuple(
        tuple(
            sum((a[r][k] * b[k][c] for k in range(4)), S_ZERO) for c in range(4)
        )
        for r in range(4)
    )


def mat_scale(a, s: Scalar):
    return tuple(tuple(x * s for x in row) for row in a)


def mat_trace(a) -> Scalar:
    return sum((a[k][k] for k in range(4)), S_ZERO)


def blade_matrix(mask: int):
    """Matrix of gamma^S, generators multiplied in ascending order."""
    m = _ID4
    for i in range(N_GENERATORS):
        if mask >> i & 1:
            m = mat_mul(m, GAMMA_MATRICES[i])
    return m


def _model_fail(reason: str) -> bool:
    verify_matrix_model.last_mismatch = reason
    return False


def verify_matrix_model() -> bool:
    """Check the abstract blade algebra against the explicit matrices.

    Covers: generator relations, all 256 basis products (sign and result
    blade), and the trace rule.  Returns False on the first mismatch and
    records its description in verify_matrix_model.last_mismatch (None
    after a clean pass).
    """
    mats = [blade_matrix(m) for m in ALL_BLADES]

    for i in range(N_GENERATORS):
        sq = mat_mul(GAMMA_MATRICES[i], GAMMA_MATRICES[i])
        if sq != mat_scale(_ID4, _M1):
            return _model_fail(f"(gamma^{i+1})^2 != -1 in the matrix model")
        for j in range(i + 1, N_GENERATORS):
            anti = mat_mul(GAMMA_MATRICES[i], GAMMA_MATRICES[j])
            anti2 = mat_mul(GAMMA_MATRICES[j], GAMMA_MATRICES[i])
            s = tuple(
                tuple(anti[r][c] + anti2[r][c] for c in range(4)) for r in range(4)
            )
            if any(not x.is_zero() for row in s for x in row):
                return _model_fail(
                    f"gamma^{i+1}, gamma^{j+1} do not anticommute"
                )

    for a in ALL_BLADES:
        for b in ALL_BLADES:
            sign, mask = blade_mul(a, b)
            expect = mats[mask] if sign > 0 else mat_scale(mats[mask], _M1)
            if mat_mul(mats[a], mats[b]) != expect:
                return _model_fail(
                    f"blade product mismatch: {blade_name(a)} * {blade_name(b)}"
                )

    for a in ALL_BLADES:
        t = mat_trace(mats[a])
        want = Scalar(4) if a == UNIT else S_ZERO
        if t != want:
            return _model_fail(f"trace mismatch for {blade_name(a)}: {t!r}")
    verify_matrix_model.last_mismatch = None
    return True
