"""Assembly of levels into coefficients, and the exactness guard rails."""

import dataclasses

import pytest

from rwheat.assembly import (
    EtaDependenceError,
    JetRationalPoly,
    a_term,
    eta_independence_check,
    moment,
    reference_a_power,
)
from rwheat.engine import ParametrixEngine
from rwheat.scalars import S_ZERO, Scalar, rational
from rwheat.symbols import G12
from rwheat.symexpr import SymExpr
from rwheat.verification import reference_poly


def test_moment_values():
    assert moment((1, 0, 0, 0)) == S_ZERO
    assert moment((0, 1, 2, 0)) == S_ZERO
    assert moment((0, 0, 0, 0)) == Scalar(1, 0, 4)  # pi^2
    assert moment((2, 0, 0, 0)) == Scalar(rational(1, 2), 0, 4)
    assert moment((2, 2, 0, 0)) == Scalar(rational(1, 4), 0, 4)
    assert moment((4, 0, 0, 0)) == Scalar(rational(3, 4), 0, 4)


@pytest.mark.parametrize("order", [0, 2, 4, 6])
def test_low_orders_match_stored_forms(hopf_engine, order):
    assert a_term(hopf_engine, order) == reference_poly(order)


@pytest.mark.parametrize("order", [0, 2, 4])
def test_charts_agree_at_low_orders(hopf_engine, spherical_engine, order):
    assert a_term(spherical_engine, order) == a_term(hopf_engine, order)


@pytest.mark.parametrize("order", [1, 3, 5])
def test_odd_orders_vanish(hopf_engine, order):
    assert a_term(hopf_engine, order).is_zero()


@pytest.mark.parametrize("n", range(0, 7))
def test_eta_independence(hopf_engine, n):
    assert eta_independence_check(hopf_engine, n) == (True, None)


def test_two_point_check_catches_injected_sign_fault(hopf_table):
    # flip the sign of the gamma^12 part of p0 and leave everything else
    p0 = hopf_table.p0
    flipped = SymExpr(
        p0.enc,
        p0.phase,
        p0.pi_exp,
        {k: (-q if (k & 15) == G12 else q) for k, q in p0.terms.items()},
    )
    faulty = dataclasses.replace(hopf_table, p0=flipped)
    eng = ParametrixEngine(faulty, max_order=4, restrict_top=False)
    # order 2 is blind to the fault (the flipped terms are traceless there)
    assert a_term(eng, 2) == reference_poly(2)
    # ... and so is a single evaluation at the sin = cos point, where the
    # cot - tan factors multiplying the fault vanish.  Only the second
    # point exposes it, which is exactly why a_term evaluates at two.
    assert a_term(eng, 4, check_eta=False) == reference_poly(4)
    with pytest.raises(EtaDependenceError):
        a_term(eng, 4)


def test_reference_a_power():
    assert [reference_a_power(n) for n in (0, 2, 4, 6, 8, 12)] == [0, 0, 0, 2, 4, 8]


def test_poly_accessors():
    p = JetRationalPoly(
        6, "hopf", {(-2, 1): rational(1, 3), (0, 0, 1): rational(2)}
    )
    assert p.reduced_a_power() == 2
    d, terms = p.q_form()  # default clears a^(order - 3)
    assert d == 3
    assert terms == {(1, 1): rational(1, 3), (3, 0, 1): rational(2)}
    _, terms2 = p.q_form(2)
    assert terms2 == {(0, 1): rational(1, 3), (2, 0, 1): rational(2)}
    assert p.coefficient((-2, 1, 0, 0)) == rational(1, 3)
    assert p.coefficient((5,)) == 0


def test_poly_equality_ignores_chart_tag():
    a = JetRationalPoly(2, "hopf", {(1, 2): rational(1, 4)})
    b = JetRationalPoly(2, "spherical", {(1, 2): rational(1, 4)})
    c = JetRationalPoly(4, "hopf", {(1, 2): rational(1, 4)})
    assert a == b
    assert a != c


def test_poly_json_roundtrip():
    p = JetRationalPoly(
        6,
        "hopf",
        {
            (): rational(3, 7),
            (-2, 0, 1, 1): rational(-1, 560),
            (2, 4): rational(5),
        },
    )
    assert JetRationalPoly.from_json(p.to_json()) == p


@pytest.mark.parametrize("order", [0, 2, 6, 12])
def test_stored_forms_json_roundtrip(order):
    p = reference_poly(order)
    assert JetRationalPoly.from_json(p.to_json()) == p


def test_latex_forms():
    assert (
        reference_poly(2).latex()
        == r"\frac{1}{4}a(t) \Big(a(t) a''(t) - 1 + a'(t)^{2}\Big)"
    )
    assert reference_poly(6).latex().startswith(r"\frac{1}{5040 a(t)^{2}}\Big(")
    assert JetRationalPoly(0, "hopf", {}).latex() == "0"
