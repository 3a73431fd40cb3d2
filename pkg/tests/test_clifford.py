"""Blade algebra: multiplication table, traces, and the matrix cross-check."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import rwheat.clifford as clifford
from rwheat.clifford import (
    ALL_BLADES,
    BLADE_SIGN,
    CliffordElement,
    UNIT,
    blade_from_indices,
    blade_grade,
    blade_mul,
    blade_name,
    verify_matrix_model,
)
from rwheat.scalars import S_ZERO, Scalar


def gamma(i):
    return CliffordElement.blade(1 << (i - 1))


def test_generator_squares():
    minus_one = CliffordElement.blade(UNIT, Scalar(-1))
    for i in range(1, 5):
        assert gamma(i) * gamma(i) == minus_one


def test_transposition_sign():
    g12 = CliffordElement.blade(blade_from_indices(1, 2))
    assert gamma(1) * gamma(2) == g12
    assert gamma(2) * gamma(1) == -g12


def test_anticommutator():
    # gamma^i gamma^j + gamma^j gamma^i = -2 delta_ij
    for i in range(1, 5):
        for j in range(1, 5):
            anti = gamma(i) * gamma(j) + gamma(j) * gamma(i)
            if i == j:
                assert anti == CliffordElement.blade(UNIT, Scalar(-2))
            else:
                assert anti.is_zero()


def test_blade_mul_associative_exhaustive():
    # all 16^3 basis triples
    for a in ALL_BLADES:
        for b in ALL_BLADES:
            sab, mab = blade_mul(a, b)
            for c in ALL_BLADES:
                sbc, mbc = blade_mul(b, c)
                s1, m1 = blade_mul(mab, c)
                s2, m2 = blade_mul(a, mbc)
                assert m1 == m2
                assert sab * s1 == sbc * s2


def test_blade_names():
    assert blade_name(UNIT) == "1"
    assert blade_name(blade_from_indices(1, 2)) == "g12"
    assert blade_name(blade_from_indices(1, 3, 4)) == "g134"


def test_blade_from_indices_rejects_bad_input():
    with pytest.raises(ValueError):
        blade_from_indices(0)
    with pytest.raises(ValueError):
        blade_from_indices(5)
    with pytest.raises(ValueError):
        blade_from_indices(2, 2)


def test_blade_grade():
    assert blade_grade(UNIT) == 0
    assert blade_grade(blade_from_indices(1, 3, 4)) == 3
    assert blade_grade(0b1111) == 4


def test_trace_values():
    assert CliffordElement.blade(UNIT).trace() == Scalar(4)
    assert CliffordElement.blade(blade_from_indices(1, 2)).trace() == S_ZERO
    x = CliffordElement({UNIT: Scalar(3), blade_from_indices(1, 3): Scalar(2)})
    assert x.trace() == Scalar(12)


def test_matrix_model_passes():
    assert verify_matrix_model() is True
    assert verify_matrix_model.last_mismatch is None


def test_matrix_model_catches_perturbed_sign_table(monkeypatch):
    rows = [list(row) for row in BLADE_SIGN]
    a = blade_from_indices(1)
    b = blade_from_indices(2)
    rows[a][b] = -rows[a][b]
    monkeypatch.setattr(clifford, "BLADE_SIGN", tuple(tuple(r) for r in rows))
    assert verify_matrix_model() is False
    assert "g1 * g2" in verify_matrix_model.last_mismatch
    monkeypatch.undo()
    assert verify_matrix_model() is True


small_scalars = st.builds(
    Scalar, st.integers(min_value=-5, max_value=5), st.integers(min_value=-5, max_value=5)
)
elements = st.dictionaries(st.sampled_from(ALL_BLADES), small_scalars, max_size=5).map(
    CliffordElement
)


@given(elements, elements, elements)
@settings(max_examples=60, deadline=None)
def test_element_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)


@given(elements, elements)
@settings(max_examples=60, deadline=None)
def test_trace_cyclicity(x, y):
    assert (x * y).trace() == (y * x).trace()
