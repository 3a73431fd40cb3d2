"""Packed symbolic expressions: encoding, ring laws, derivatives, evaluation."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rwheat.clifford import ALL_BLADES
from rwheat.scalars import COS_PI_4, SIN_PI_4, Scalar
from rwheat.symexpr import Encoding, SymExpr, is_zero_mod_pythagoras

ENC = Encoding("test", ("eta",), max_jet=6)

small_exps = st.integers(min_value=-3, max_value=3)
small_pos = st.integers(min_value=0, max_value=3)
small_coeffs = st.integers(min_value=-5, max_value=5)


@st.composite
def sym_exprs(draw, blades=(0,)):
    triples = []
    for _ in range(draw(st.integers(0, 4))):
        blade = draw(st.sampled_from(blades))
        angles = (draw(small_exps), draw(small_exps))
        jets = (draw(small_exps), draw(small_pos), draw(small_pos))
        triples.append((blade, angles, jets, draw(small_coeffs)))
    return SymExpr.from_terms(ENC, triples)


# --- encoding ----------------------------------------------------------------


@given(
    st.integers(0, 15),
    st.tuples(st.integers(-50, 50), st.integers(-50, 50)),
    st.integers(-50, 50),
    st.lists(st.integers(0, 50), max_size=6),
)
def test_encode_decode_roundtrip(blade, angles, k0, rest):
    jets = (k0, *rest)
    key = ENC.encode(blade, angles, jets)
    b, a, j = ENC.decode(key)
    assert b == blade
    assert a == angles
    want = list(jets)
    while want and want[-1] == 0:
        want.pop()
    assert j == tuple(want)


def test_encode_rejects_bad_monomials():
    with pytest.raises(ValueError):
        ENC.encode(16, (0, 0), ())
    with pytest.raises(ValueError):
        ENC.encode(0, (0,), ())  # wrong angle arity
    with pytest.raises(ValueError):
        ENC.encode(0, (0, 0), (0, -1))  # only a(t) may carry a negative power
    with pytest.raises(ValueError):
        ENC.encode(0, (0, 0), (501,))
    with pytest.raises(ValueError):
        ENC.encode(0, (0, 0), (0,) * 8)  # beyond the jet layout


# --- construction invariants ---------------------------------------------------


def test_from_terms_rejects_mixed_coefficients():
    with pytest.raises(ValueError):
        SymExpr.from_terms(ENC, [(0, (0, 0), (), Scalar(1, 1))])
    with pytest.raises(ValueError):
        SymExpr.from_terms(
            ENC,
            [(0, (0, 0), (), Scalar(1)), (0, (0, 0), (1,), Scalar(0, 1))],
        )
    with pytest.raises(ValueError):
        SymExpr.from_terms(
            ENC,
            [(0, (0, 0), (), Scalar(1, 0, 2)), (0, (0, 0), (1,), Scalar(1, 0, 0))],
        )


def test_from_terms_merges_and_cancels():
    x = SymExpr.from_terms(
        ENC,
        [
            (0, (1, 0), (2,), Fraction(1, 2)),
            (0, (1, 0), (2,), Fraction(1, 2)),
            (0, (0, 1), (), 3),
            (0, (0, 1), (), -3),
        ],
    )
    assert len(x) == 1
    assert x == SymExpr.from_terms(ENC, [(0, (1, 0), (2,), 1)])


def test_add_rejects_phase_and_grade_mismatch():
    real = SymExpr.from_terms(ENC, [(0, (0, 0), (1,), 1)])
    imag = real.times_i()
    with pytest.raises(ValueError):
        real + imag
    graded = SymExpr.from_terms(ENC, [(0, (0, 0), (1,), Scalar(1, 0, 2))])
    with pytest.raises(ValueError):
        real + graded


# --- ring laws -----------------------------------------------------------------


@given(
    sym_exprs(blades=ALL_BLADES),
    sym_exprs(blades=ALL_BLADES),
    sym_exprs(blades=ALL_BLADES),
)
@settings(max_examples=60, deadline=None)
def test_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)


def test_distinct_generators_anticommute():
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            gi = SymExpr.from_terms(ENC, [(1 << i, (0, 0), (), 1)])
            gj = SymExpr.from_terms(ENC, [(1 << j, (0, 0), (), 1)])
            assert gi * gj == -(gj * gi)


@given(sym_exprs())
@settings(max_examples=40, deadline=None)
def test_times_i_twice_negates(x):
    assert x.times_i().times_i() == -x


@given(sym_exprs(blades=ALL_BLADES))
@settings(max_examples=40, deadline=None)
def test_shift_monomial_is_monomial_multiplication(x):
    shifted = x.shift_monomial(angle_exps=(1, -2), jet_exps=(3, 1))
    mono = SymExpr.from_terms(ENC, [(0, (1, -2), (3, 1), 1)])
    assert shifted == x * mono
    back = shifted.shift_monomial(angle_exps=(-1, 2), jet_exps=(-3, -1))
    assert back == x


# --- derivatives -----------------------------------------------------------------


@given(sym_exprs(), sym_exprs())
@settings(max_examples=40, deadline=None)
def test_d_dt_product_rule(x, y):
    assert (x * y).d_dt() == x.d_dt() * y + x * y.d_dt()


@given(sym_exprs(), sym_exprs())
@settings(max_examples=40, deadline=None)
def test_d_angle_product_rule(x, y):
    assert (x * y).d_angle(0) == x.d_angle(0) * y + x * y.d_angle(0)


@given(sym_exprs())
@settings(max_examples=40, deadline=None)
def test_derivatives_commute(x):
    assert x.d_dt().d_angle(0) == x.d_angle(0).d_dt()


def test_d_dt_guards_jet_layout():
    top = SymExpr.from_terms(ENC, [(0, (0, 0), (0,) * 6 + (1,), 1)])
    with pytest.raises(ValueError):
        top.d_dt()


def _jets_of(t):
    # jets of a(t) = 2 + cos t
    return (
        2 + math.cos(t),
        -math.sin(t),
        -math.cos(t),
        math.sin(t),
        math.cos(t),
    )


SAMPLE = SymExpr.from_terms(
    ENC,
    [
        (0, (2, -1), (-2, 3, 1), Fraction(3, 7)),
        (0, (0, 1), (1, 0, 2), -2),
        (0, (-1, 2), (4,), Fraction(5, 3)),
    ],
)


def test_d_dt_matches_finite_difference():
    t, h = 1.3, 1e-5
    angle = [(math.sin(0.7), math.cos(0.7))]
    exact = SAMPLE.d_dt().eval_float(_jets_of(t), angle).real
    fd = (
        SAMPLE.eval_float(_jets_of(t + h), angle).real
        - SAMPLE.eval_float(_jets_of(t - h), angle).real
    ) / (2 * h)
    assert abs(exact - fd) <= 1e-6 * max(1.0, abs(exact))


def test_d_angle_matches_finite_difference():
    eta, h = 0.7, 1e-6
    jets = _jets_of(1.3)
    exact = SAMPLE.d_angle(0).eval_float(jets, [(math.sin(eta), math.cos(eta))]).real
    fd = (
        SAMPLE.eval_float(jets, [(math.sin(eta + h), math.cos(eta + h))]).real
        - SAMPLE.eval_float(jets, [(math.sin(eta - h), math.cos(eta - h))]).real
    ) / (2 * h)
    assert abs(exact - fd) <= 1e-6 * max(1.0, abs(exact))


# --- evaluation -------------------------------------------------------------------


def test_eval_float_rejects_blades():
    bladed = SymExpr.from_terms(ENC, [(3, (0, 0), (), 1)])
    with pytest.raises(ValueError):
        bladed.eval_float((1.0,), [(0.5, 0.5)])


@given(sym_exprs(), sym_exprs())
@settings(max_examples=40, deadline=None)
def test_eval_angles_is_a_ring_homomorphism(x, y):
    point = ((SIN_PI_4, COS_PI_4),)
    assert (x + y).eval_angles(point) == x.eval_angles(point) + y.eval_angles(point)
    assert (x * y).eval_angles(point) == x.eval_angles(point) * y.eval_angles(point)


# --- functional zero test -----------------------------------------------------------

CIRCLE = SymExpr.from_terms(
    ENC, [(0, (2, 0), (), 1), (0, (0, 2), (), 1), (0, (0, 0), (), -1)]
)


def test_pythagoras_reduction_basics():
    assert not CIRCLE.is_zero()  # free Laurent ring: no rewriting at construction
    assert is_zero_mod_pythagoras(CIRCLE)
    assert not is_zero_mod_pythagoras(SymExpr.one(ENC))
    mono = SymExpr.from_terms(ENC, [(0, (-3, 1), (-1, 2), Fraction(7, 2))])
    assert not is_zero_mod_pythagoras(mono)
    assert is_zero_mod_pythagoras(CIRCLE * mono)


@given(sym_exprs(blades=ALL_BLADES))
@settings(max_examples=40, deadline=None)
def test_pythagoras_multiples_vanish_functionally(x):
    assert is_zero_mod_pythagoras(CIRCLE * x)


# --- serialization -------------------------------------------------------------------


@given(sym_exprs(blades=ALL_BLADES))
@settings(max_examples=40, deadline=None)
def test_json_roundtrip(x):
    assert SymExpr.from_json(ENC, x.to_json()) == x


def test_json_roundtrip_imaginary_with_grade():
    x = SymExpr.from_terms(
        ENC, [(5, (1, -1), (-1, 2), Scalar(0, Fraction(3, 4), 2))]
    )
    assert SymExpr.from_json(ENC, x.to_json()) == x


def test_latex_smoke():
    assert SymExpr.zero(ENC).latex() == "0"
    assert SymExpr.one(ENC).latex() == "1"
    x = SymExpr.from_terms(ENC, [(0, (0, 0), (1, 1), Fraction(-1, 4))])
    assert x.latex() == r"- \frac{1}{4} a(t) a'(t)"
