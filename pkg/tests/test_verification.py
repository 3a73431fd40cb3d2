"""Closed-form cross-checks: stored data, h ladder, round reduction, reports."""

import hashlib
import math
from importlib import resources

import pytest

import rwheat.verification as verification
from rwheat.assembly import JetRationalPoly, RationalityError
from rwheat.scalars import rational
from rwheat.verification import (
    H_REFERENCE,
    Report,
    extract_highest,
    h_recursion,
    integrate_round,
    load_reference,
    q_grading_check,
    reference_poly,
    round_reduce,
    run_suite,
    suite_hn,
)

EVEN_ORDERS = (0, 2, 4, 6, 8, 10, 12)


def test_stored_data_checksum_and_shape():
    blob = (
        resources.files("rwheat") / "data" / "reference_coefficients.json"
    ).read_bytes()
    assert hashlib.sha256(blob).hexdigest() == verification._REFERENCE_SHA256
    data = load_reference()
    assert set(data["coefficients"]) == {str(n) for n in EVEN_ORDERS}
    for n in EVEN_ORDERS:
        poly = reference_poly(n)
        assert poly.order == n
        assert not poly.is_zero()


def test_checksum_guard_refuses_mismatched_data(monkeypatch):
    monkeypatch.setattr(verification, "_REFERENCE", None)
    monkeypatch.setattr(verification, "_REFERENCE_SHA256", "0" * 64)
    with pytest.raises(RuntimeError):
        load_reference()


def test_reference_poly_unknown_order():
    with pytest.raises(KeyError):
        reference_poly(14)


def test_h_recursion_full_ladder():
    hs = h_recursion(20)
    for n, want in H_REFERENCE.items():
        assert hs[n] == want, n
    for n in range(1, 21, 2):
        assert hs[n] == 0


def test_highest_derivative_coefficients_match_ladder():
    for n in EVEN_ORDERS[1:]:
        assert extract_highest(reference_poly(n)) == H_REFERENCE[n], n


def _eval_at_sine(poly, t):
    """Float value of the jet polynomial with a(t) = sin(t) substituted."""
    cycle = (math.sin(t), math.cos(t), -math.sin(t), -math.cos(t))
    total = 0.0
    for jets, q in poly.terms.items():
        v = float(q)
        for r, k in enumerate(jets):
            v *= cycle[r % 4] ** k
        total += v
    return total


def test_round_reduction_of_stored_forms():
    # every stored coefficient collapses to a rational multiple of sin^3;
    # the three pinned rationals have independent anchors, the others are
    # checked against direct numeric substitution
    pinned = {
        0: rational(1, 2),
        2: rational(-1, 2),
        12: rational(10331, 8648640),
    }
    for n in EVEN_ORDERS:
        poly = reference_poly(n)
        got = round_reduce(poly)
        assert set(got) == {3}, n
        if n in pinned:
            assert got[3] == pinned[n], n
        for t in (0.6, 1.9):
            want = float(got[3]) * math.sin(t) ** 3
            assert abs(_eval_at_sine(poly, t) - want) < 1e-12 * max(1, abs(want))


def test_integrate_round_values():
    assert integrate_round({3: rational(1)}) == (rational(4, 3), 0)
    assert integrate_round({0: rational(1)}) == (0, rational(1))  # pi
    assert integrate_round({2: rational(1)}) == (0, rational(1, 2))  # pi/2
    plain, pi_part = integrate_round(round_reduce(reference_poly(12)))
    assert (plain, pi_part) == (rational(10331, 6486480), 0)


def test_round_reduce_rejects_bad_polynomials():
    with pytest.raises(RationalityError):
        round_reduce(JetRationalPoly(2, "hopf", {(0, 1): rational(1)}))
    with pytest.raises(RationalityError):
        round_reduce(JetRationalPoly(2, "hopf", {(-4,): rational(1)}))


def test_q_grading_of_stored_forms():
    for n in EVEN_ORDERS:
        ok, bad = q_grading_check(reference_poly(n))
        assert ok, (n, bad)


def test_q_grading_flags_violations():
    ok, bad = q_grading_check(JetRationalPoly(4, "hopf", {(1, 1): rational(1)}))
    assert not ok
    assert bad == ((2, 1), 3, 1)


def test_suite_hn_passes():
    rep = suite_hn()
    assert rep.passed
    assert len(rep.checks) == 10


def test_report_table_format():
    rep = Report()
    rep.add("alpha", True, 1.234, "42 monomials")
    rep.add("beta", False, 0.001)
    lines = rep.table().splitlines()
    assert lines[0] == "PASS alpha (1.23s)  42 monomials"
    assert lines[1] == "FAIL beta (0.00s)"
    assert lines[2] == "1/2 checks passed"
    assert not rep.passed
    assert rep.to_json()["checks"][0]["name"] == "alpha"


def test_run_suite_rejects_unknown_name():
    with pytest.raises(ValueError):
        run_suite("frobnicate")
