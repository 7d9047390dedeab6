"""Test the hardy_core module"""

# pylint: disable=missing-docstring,invalid-name

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftlab import op_lab
from shiftlab.exceptions import InvalidArgumentError
from shiftlab.hardy_core import (
    GridFn,
    TrigPoly,
    TruncOp,
    UnitGrid,
    analytic_multiplication_matrix,
    block_toeplitz_matrix,
    coeffs_from_samples,
    hankel_matrix,
    outer_from_modulus,
    parseval_gap,
    rank_one,
    riesz_minus,
    riesz_plus,
    sarason_outer,
    shift_matrix,
    toeplitz_matrix,
)

small_complex = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def test_trig_poly_arithmetic():
    product = TrigPoly.chi(2) * TrigPoly.chi(-1)
    assert product.as_dict() == {1: 1.0}
    f = TrigPoly.from_dict({-1: 2.0, 0: 1.0, 3: 1j})
    assert f.conj().as_dict() == {1: 2.0, 0: 1.0, -3: -1j}
    assert (f - f).trimmed().as_dict() == {}
    assert (2 * f).coeff(3) == 2j
    assert f.coeff(7) == 0


def test_trig_poly_evaluate_matches_coefficients():
    f = TrigPoly.from_dict({-2: 0.5, 1: 1 - 1j})
    z = np.exp(0.3j)
    assert f.evaluate(z) == pytest.approx(0.5 * z ** -2 + (1 - 1j) * z)


@given(st.lists(small_complex, min_size=1, max_size=6), st.lists(small_complex, min_size=1, max_size=6))
@settings(max_examples=50, deadline=None)
def test_multiply_is_pointwise_product(first, second):
    f, g = TrigPoly(first, -2), TrigPoly(second, 1)
    points = UnitGrid(16).points
    np.testing.assert_allclose(f.multiply(g).evaluate(points), f.evaluate(points) * g.evaluate(points), atol=1e-10)


def test_riesz_projections_split_the_function():
    f = TrigPoly.from_dict({-3: 1.0, -1: 2.0, 0: 3.0, 2: 4.0})
    assert riesz_plus(f).as_dict() == {0: 3.0, 2: 4.0}
    assert riesz_minus(f).as_dict() == {-3: 1.0, -1: 2.0}
    assert (riesz_plus(f) + riesz_minus(f) - f).trimmed().as_dict() == {}


def test_coeffs_from_samples_is_exact_for_polynomials():
    f = TrigPoly.from_dict({-2: 1j, 0: 1.0, 5: -0.25})
    recovered = coeffs_from_samples(f.on_grid(UnitGrid(32)), -4, 6)
    np.testing.assert_allclose(recovered.coeff_range(-4, 6), f.coeff_range(-4, 6), atol=1e-14)


def test_coeffs_from_samples_rejects_wide_band():
    with pytest.raises(InvalidArgumentError):
        coeffs_from_samples(TrigPoly.constant(1.0).on_grid(UnitGrid(8)), -8, 8)


def test_unit_grid_requires_power_of_two():
    with pytest.raises(InvalidArgumentError):
        UnitGrid(12)


def test_toeplitz_of_chi_is_the_shift():
    T = toeplitz_matrix(TrigPoly.chi(1), 8)
    np.testing.assert_array_equal(T.matrix, shift_matrix(8))
    assert T.trust_band == 7


def test_toeplitz_of_conjugate_chi_is_the_backward_shift():
    T = toeplitz_matrix(TrigPoly.chi(-1), 8)
    np.testing.assert_array_equal(T.matrix, shift_matrix(8).T)
    assert T.trust_band == 8


def test_toeplitz_from_grid_matches_polynomial_symbol():
    f = TrigPoly.from_dict({-2: 0.5, 0: 1.0, 1: -0.3j})
    from_poly = toeplitz_matrix(f, 10)
    from_grid = toeplitz_matrix(f.on_grid(UnitGrid(64)), 10)
    np.testing.assert_allclose(from_grid.matrix, from_poly.matrix, atol=1e-14)
    assert from_grid.trust_band == from_poly.trust_band == 9


def test_semicommutator_equals_hankel_product():
    # T_{fg} − T_f T_g = H_{f̄}* H_g away from the truncation edge
    f = TrigPoly.from_dict({-1: 1.0, 1: 0.5})
    g = TrigPoly.from_dict({-2: 0.3, 0: 1.0, 1: -0.2})
    n, keep = 24, 12
    left = toeplitz_matrix(f * g, n).matrix - toeplitz_matrix(f, n).matrix @ toeplitz_matrix(g, n).matrix
    right = hankel_matrix(f.conj(), n).conj().T @ hankel_matrix(g, n)
    np.testing.assert_allclose(left[:keep, :keep], right[:keep, :keep], atol=1e-14)


def test_hankel_of_conjugate_chi():
    H = hankel_matrix(TrigPoly.chi(-1), 5)
    expected = np.zeros((5, 5))
    expected[0, 0] = 1.0
    np.testing.assert_array_equal(H, expected)


def test_block_toeplitz_layout_is_copy_major():
    one, zero, chi = TrigPoly.constant(1.0), TrigPoly.constant(0.0), TrigPoly.chi(1)
    T = block_toeplitz_matrix([[chi, zero], [one, chi]], 4)
    assert T.copies == 2 and T.matrix.shape == (8, 8)
    np.testing.assert_array_equal(T.matrix[4:, :4], np.eye(4))
    np.testing.assert_array_equal(T.matrix[:4, :4], shift_matrix(4))
    assert T.trust_band == 3


def test_analytic_multiplication_matches_toeplitz():
    coeffs = np.array([1.0, 2.0, -1j])
    np.testing.assert_array_equal(
        analytic_multiplication_matrix(coeffs, 6), toeplitz_matrix(TrigPoly.from_analytic(coeffs), 6).matrix
    )


def test_rank_one_convention():
    u, v = np.array([1.0, 2.0]), np.array([1j, 0.0])
    x = np.array([3.0, 4.0])
    np.testing.assert_allclose(rank_one(u, v) @ x, np.vdot(v, x) * u)


def test_outer_from_modulus_recovers_polynomial_outer():
    grid = UnitGrid(256)
    modulus = np.abs(1 + 0.5 * grid.points) ** 2
    outer = outer_from_modulus(GridFn(grid, modulus), length=6)
    np.testing.assert_allclose(outer.poly.analytic_coeffs(6), [1.0, 1.0, 0.25, 0, 0, 0], atol=1e-12)
    assert outer.clamped == 0
    assert outer.modulus_error < 1e-12


def test_outer_from_modulus_rejects_zero_modulus():
    grid = UnitGrid(16)
    with pytest.raises(InvalidArgumentError):
        outer_from_modulus(GridFn(grid, np.zeros(16)))


@pytest.mark.parametrize("g", [TrigPoly.constant(1.0), TrigPoly.chi(1), TrigPoly.constant(3.0)])
def test_sarason_outer_of_unimodular_multiples_is_one(g):
    np.testing.assert_allclose(sarason_outer(g, 8).analytic_coeffs(8), np.eye(8)[0], atol=1e-15)


def test_sarason_outer_inverts_the_cauchy_transform():
    g = TrigPoly.from_analytic([1.0, 0.5, -0.25j])
    outer = sarason_outer(g, 64)
    unit = g / g.norm()
    positive = riesz_plus(unit * unit.conj())
    z = 0.4 + 0.2j
    assert outer.evaluate(z) * positive.evaluate(z) == pytest.approx(1.0, abs=1e-12)


def test_sarason_outer_rejects_non_analytic():
    with pytest.raises(InvalidArgumentError):
        sarason_outer(TrigPoly.chi(-1), 4)


def test_parseval_gap_is_roundoff_for_resolved_polynomials():
    f = TrigPoly.from_dict({-3: 1.0, 0: 2j, 4: 0.5})
    assert parseval_gap(f, UnitGrid(64)) < 1e-14


def test_trunc_op_validates_shape_and_band():
    with pytest.raises(InvalidArgumentError):
        TruncOp(np.eye(3), 4, 3)
    with pytest.raises(InvalidArgumentError):
        TruncOp(np.eye(3), 3, 4)


def test_trunc_op_band_columns_per_copy():
    T = TruncOp(np.eye(6), 3, 2, copies=2)
    np.testing.assert_array_equal(T.band_columns(), [0, 1, 3, 4])
    assert T.banded().shape == (6, 4)


def test_trunc_op_json_keeps_matrix_and_metadata():
    T = toeplitz_matrix(TrigPoly.from_dict({-1: 1j, 1: 2.0}), 5).with_tag(label="sample")
    restored = TruncOp.from_json(T.to_json())
    np.testing.assert_array_equal(restored.matrix, T.matrix)
    assert restored.trust_band == T.trust_band
    assert restored.tag == {"op": "toeplitz", "label": "sample"}


symbols = st.tuples(st.lists(small_complex, min_size=1, max_size=7), st.integers(-4, 2))


@given(symbols)
@settings(max_examples=50, deadline=None)
def test_brown_halmos_identity(symbol):
    psi, n = TrigPoly(*symbol), 12
    T, S = toeplitz_matrix(psi, n).matrix, shift_matrix(n)
    np.testing.assert_allclose((S.conj().T @ T @ S)[: n - 1, : n - 1], T[: n - 1, : n - 1], atol=1e-12)


@given(symbols)
@settings(max_examples=50, deadline=None)
def test_commutator_with_the_shift_is_rank_one(symbol):
    # T_ψS − ST_ψ = 𝟏⊗P_+χ̄ψ̄
    psi, n = TrigPoly(*symbol), 12
    T, S = toeplitz_matrix(psi, n).matrix, shift_matrix(n)
    v = riesz_plus(TrigPoly.chi(-1) * psi.conj()).analytic_coeffs(n)
    np.testing.assert_allclose((T @ S - S @ T)[:, : n - 1], rank_one(np.eye(n)[0], v)[:, : n - 1], atol=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
@pytest.mark.parametrize("extra", [1, 4])
def test_hankel_of_conjugate_monomial_has_unit_norm(m, extra):
    H = hankel_matrix(TrigPoly.chi(-m), m + extra)
    assert np.linalg.norm(H, 2) == pytest.approx(1.0)


@given(
    st.lists(st.complex_numbers(min_magnitude=0.01, max_magnitude=2.0), min_size=1, max_size=10),
    st.integers(-8, 4),
)
@settings(max_examples=50, deadline=None)
def test_parseval_against_grid_quadrature(coeffs, lo):
    assert parseval_gap(TrigPoly(coeffs, lo), UnitGrid(64)) < 1e-12


def test_outer_from_modulus_reproduces_a_log_singular_modulus():
    grid = UnitGrid(1024)
    modulus = op_lab.example53_modulus(grid)
    outer = outer_from_modulus(GridFn(grid, modulus))
    values = np.abs(outer.poly.evaluate(grid.points))
    assert np.max(np.abs(values - modulus) / modulus) < 1e-6
    assert outer.modulus_error < 1e-6
    assert outer.clamped == 0
    assert outer.poly.coeff(0).real > 0
