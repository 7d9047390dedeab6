"""Test the op_lab module"""

# pylint: disable=missing-docstring,invalid-name

import numpy as np
import pytest

from shiftlab import op_lab
from shiftlab.diagnostics import expansivity_defect, intertwining_residual
from shiftlab.exceptions import InvalidArgumentError, NumericalFailure
from shiftlab.hardy_core import TrigPoly, TruncOp, UnitGrid, shift_matrix
from shiftlab.inner_fn import BlaschkeProduct, model_basis

F_LIST = [
    [TrigPoly.constant(0.2), TrigPoly.constant(0.1)],
    [TrigPoly.chi(1) * 0.1, TrigPoly.constant(0.1j)],
]


def test_shift_is_block_diagonal():
    S = op_lab.shift(4, copies=2)
    assert S.trust_band == 3
    np.testing.assert_array_equal(S.matrix[:4, :4], shift_matrix(4))
    np.testing.assert_array_equal(S.matrix[:4, 4:], 0)
    with pytest.raises(InvalidArgumentError):
        op_lab.shift(0)


def test_compressed_shift_of_monomial_is_nilpotent_shift():
    np.testing.assert_allclose(op_lab.compressed_shift(BlaschkeProduct.monomial(3)).matrix, shift_matrix(3))


def test_compressed_shift_spectrum_is_the_zero_set(mixed_blaschke):
    eigenvalues = np.linalg.eigvals(op_lab.compressed_shift(mixed_blaschke).matrix)
    np.testing.assert_allclose(np.sort_complex(eigenvalues), np.sort_complex([0j, 0.5, -0.3 + 0.4j]), atol=1e-10)


def test_clark_unitary_of_chi_squared(chi_squared):
    U = op_lab.clark_unitary(chi_squared).matrix
    np.testing.assert_allclose(U, [[0, 1], [1, 0]], atol=1e-12)
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(U).real), [-1, 1], atol=1e-12)


def test_clark_unitary_is_unitary(mixed_blaschke):
    U = op_lab.clark_unitary(mixed_blaschke)
    assert U.basis == "model"
    np.testing.assert_allclose(U.matrix.conj().T @ U.matrix, np.eye(3), atol=1e-12)


def test_clark_unitary_needs_theta_vanishing_at_origin():
    with pytest.raises(InvalidArgumentError):
        op_lab.clark_unitary(BlaschkeProduct.from_zeros([0.5]))


def test_inverse_adjoint_compressed_shift():
    B = BlaschkeProduct.from_zeros([0.5, -0.3 + 0.4j])
    inverse = op_lab.inv_adjoint_compressed_shift(B).matrix
    compressed = op_lab.compressed_shift(B).matrix
    np.testing.assert_allclose(compressed.conj().T @ inverse, np.eye(2), atol=1e-12)
    with pytest.raises(InvalidArgumentError):
        op_lab.inv_adjoint_compressed_shift(BlaschkeProduct.monomial(1))


def test_perturb_lemma32_is_expansive_with_rank_one_defect():
    g = TrigPoly.from_analytic([1.0, 0.5, 0.25j])
    T = op_lab.perturb_lemma32(g, 32)
    banded = T.banded()
    defect = banded.conj().T @ banded - np.eye(banded.shape[1])
    eigenvalues = np.linalg.eigvalsh(defect)
    assert eigenvalues[0] > -1e-12
    assert eigenvalues[-1] == pytest.approx(0.25 + 0.0625)
    assert np.sum(eigenvalues > 1e-12) == 1


def test_perturb_lemma32_requires_normalized_g():
    with pytest.raises(InvalidArgumentError):
        op_lab.perturb_lemma32(TrigPoly.from_analytic([2.0, 1.0]), 8)
    with pytest.raises(InvalidArgumentError):
        op_lab.perturb_lemma32(TrigPoly.from_dict({-1: 1.0, 0: 1.0}), 8)


@pytest.mark.parametrize("n", [32, 64, 128])
def test_lemma32_intertwiners(n):
    pieces = op_lab.lemma32_intertwiners(TrigPoly.from_analytic([1.0, 0.5]), n)
    S = op_lab.shift(n)
    assert intertwining_residual(pieces.Y, S, pieces.T, 1e-9).passed
    assert intertwining_residual(pieces.X, pieces.T, S, 1e-9).passed


def test_lemma32_intertwiners_reject_g_vanishing_on_the_circle():
    with pytest.raises(NumericalFailure):
        op_lab.lemma32_intertwiners(TrigPoly.from_analytic([1.0, 1.0]), 16, grid=UnitGrid(64))


def test_lemma36_determinant():
    psi = op_lab.lemma36_determinant(F_LIST)
    assert psi.coeff(0) == pytest.approx(1.0)
    # det [[1 − 0.2z, −0.1z²], [−0.1z, 1 − 0.1iz]]
    expected = TrigPoly.from_analytic([1.0, -0.2 - 0.1j, 0.02j, -0.01])
    np.testing.assert_allclose(psi.analytic_coeffs(4), expected.analytic_coeffs(4), atol=1e-15)


def test_lemma36_intertwiners():
    n = 64
    pieces = op_lab.lemma36_intertwiners(F_LIST, n)
    S = op_lab.shift(n, 2)
    assert pieces.T.copies == 2
    assert expansivity_defect(pieces.T, 1e-10).passed
    assert intertwining_residual(pieces.Y, S, pieces.T, 1e-9).passed
    assert intertwining_residual(pieces.X, pieces.T, S, 1e-9).passed
    rows = np.concatenate([np.arange(pieces.rows), n + np.arange(pieces.rows)])
    np.testing.assert_allclose((pieces.X.matrix @ pieces.Y.matrix)[rows], pieces.product.matrix[rows], atol=1e-9)


def test_lemma36_rejects_ragged_columns():
    with pytest.raises(InvalidArgumentError):
        op_lab.perturb_lemma36([[TrigPoly.constant(0.1)], [TrigPoly.constant(0.1), TrigPoly.constant(0.2)]], 8)


def test_example_plus_clark_compresses_to_clark_unitary():
    B = BlaschkeProduct.from_zeros([0j, 0.5])
    n = 128
    T = op_lab.example_plus_clark(B, n)
    basis = model_basis(B, n).matrix()
    np.testing.assert_allclose(basis.conj().T @ T.matrix @ basis, op_lab.clark_unitary(B).matrix, atol=1e-12)


def test_example_inverse_clark_restricts_to_inverse_adjoint():
    B = BlaschkeProduct.from_zeros([0.5, -0.3j])
    restriction = op_lab.model_restriction(op_lab.example_inverse_clark(B, 96), B)
    assert restriction.invariance_residual < 1e-9
    np.testing.assert_allclose(restriction.restricted, restriction.expected, atol=1e-9)


def test_lemma32_model_restriction():
    restriction = op_lab.lemma32_model_restriction(TrigPoly.from_analytic([1.0, -2.5, 1.0]), 96)
    assert restriction.theta.degree == 1
    assert restriction.invariance_residual < 1e-9
    np.testing.assert_allclose(restriction.restricted, restriction.expected, atol=1e-9)


def test_lemma32_model_restriction_needs_a_zero_in_the_disc():
    with pytest.raises(InvalidArgumentError):
        op_lab.lemma32_model_restriction(TrigPoly.from_analytic([1.0, 0.5]), 16)


def test_nakamura_closed_form_is_the_cauchy_dual():
    g = TrigPoly.from_analytic([1.0, 0.5])
    T, dual = op_lab.nakamura_pair(g / g.norm(), 32)
    np.testing.assert_allclose(dual.banded(), op_lab.cauchy_dual(T).matrix, atol=1e-10)


def test_nakamura_needs_unit_norm():
    with pytest.raises(InvalidArgumentError):
        op_lab.nakamura_pair(TrigPoly.from_analytic([1.0, 0.5]), 16)


def test_left_inverse_and_double_dual(mixed_blaschke):
    T = op_lab.example_plus_clark(mixed_blaschke, 48)
    left = op_lab.left_inverse(T)
    np.testing.assert_allclose(left.matrix @ T.banded(), np.eye(T.trust_band), atol=1e-10)
    twice = op_lab.cauchy_dual(op_lab.cauchy_dual(T))
    np.testing.assert_allclose(twice.matrix, T.banded(), atol=1e-10)


def test_cauchy_dual_of_singular_operator_fails():
    with pytest.raises(NumericalFailure) as excinfo:
        op_lab.cauchy_dual(TruncOp(np.zeros((4, 4)), 4, 4))
    assert excinfo.value.report["band"] == 4


def test_example53_g_has_unit_norm():
    g = op_lab.example53_g(UnitGrid(1024))
    assert g.norm() == pytest.approx(1.0)
    assert g.coeff(0).real > 0
    with pytest.raises(InvalidArgumentError):
        op_lab.example53_g(UnitGrid(256))


def test_example55_dual_is_a_left_inverse():
    T, dual = op_lab.example55_pair(TrigPoly.from_analytic([1.0, 0.5]), 2.0, 32)
    band = T.banded()
    np.testing.assert_allclose(dual.banded().conj().T @ band, np.eye(band.shape[1]), atol=1e-10)
    with pytest.raises(InvalidArgumentError):
        op_lab.example55_pair(TrigPoly.from_analytic([1.0, 0.5]), 0.2, 32)


THM69_CASES = [
    ([0j], [0j], 1.0, -1.0),
    ([0j, 0.4 + 0.2j], [0.3], 1.0, -1.0),
    ([0j, 0j], [0.5], 1.0, -1.0),
    ([0j, -0.5, 0.2j], [0.1 + 0.6j, -0.4], 0.5 + 0.2j, -1.3 + 0.4j),
    ([0j], [0.5, -0.5], 2.0, 0.5),
    ([0j, 0j], [-0.7j], 1j, 1.0),
    ([0j, 0.6], [0j, 0.3], 1.0, 1.0),
    ([0j, 0.3, -0.3], [0.8], 0.5, -2.0),
    ([0j], [0.2 + 0.2j, -0.5], 3.0, -0.2j),
    ([0j, 0.5j], [0.6 - 0.3j], -1.0, 0.7),
]


def thm69_residuals(theta, beta, a, b, n):
    frame = op_lab.thm69_frame(theta, beta, n)
    S = op_lab.thm69_shift(theta, beta, n, frame)
    T = op_lab.thm69_T(a, b, theta, beta, n, frame)
    X = op_lab.thm69_X(a, b, theta, beta, n, frame)
    Y = op_lab.thm69_Y(a, b, theta, beta, n, frame)
    return intertwining_residual(Y, S, T, 1e-9), intertwining_residual(X, T, S, 1e-9)


@pytest.mark.parametrize("theta_zeros, beta_zeros, a, b", THM69_CASES)
def test_thm69_intertwinings(theta_zeros, beta_zeros, a, b):
    theta, beta = BlaschkeProduct.from_zeros(theta_zeros), BlaschkeProduct.from_zeros(beta_zeros)
    ys_ty, xt_sx = [], []
    for n in (32, 64, 128):
        first, second = thm69_residuals(theta, beta, a, b, n)
        assert first.passed, (n, first.value)
        assert second.passed, (n, second.value)
        ys_ty.append(first.value)
        xt_sx.append(second.value)
    assert ys_ty[-1] <= ys_ty[0] + 1e-12
    assert xt_sx[-1] <= xt_sx[0] + 1e-12


def test_thm69_x_maps_the_tail_to_theta_minus_one_times_beta():
    theta, beta = BlaschkeProduct.from_zeros([0j, 0.4 + 0.2j]), BlaschkeProduct.from_zeros([0.3])
    n = 32
    frame = op_lab.thm69_frame(theta, beta, n)
    X = op_lab.thm69_X(1.0, -1.0, theta, beta, n, frame)
    coefficients = frame.vectors @ X.matrix[:, frame.d]
    expected = theta.times(beta).taylor(frame.length) - beta.taylor(frame.length)
    np.testing.assert_allclose(coefficients[:n], expected[:n], atol=1e-12)


def test_thm69_y_is_injective_for_chi_squared():
    theta, beta = BlaschkeProduct.monomial(2), BlaschkeProduct.from_zeros([0.5])
    n = 64
    Y = op_lab.thm69_Y(1.0, -1.0, theta, beta, n)
    # images of the leading half stay inside the truncation
    singular = np.linalg.svd(Y.matrix[:, : n // 2], compute_uv=False)
    assert singular[-1] > 1e-6


def test_thm69_expansivity_follows_the_criterion():
    theta, beta = BlaschkeProduct.monomial(1), BlaschkeProduct.monomial(1)
    assert expansivity_defect(op_lab.thm69_T(1.0, -1.0, theta, beta, 64), 1e-10).passed
    assert not expansivity_defect(op_lab.thm69_T(1.0, 1.0, theta, beta, 64), 1e-10).passed


def test_thm69_clark_block():
    theta = BlaschkeProduct.from_zeros([0j, 0.4 + 0.2j])
    beta = BlaschkeProduct.from_zeros([0.3])
    T = op_lab.thm69_T(1.0, -1.0, theta, beta, 48)
    np.testing.assert_allclose(T.matrix[1:3, 1:3], op_lab.clark_unitary(theta).matrix, atol=1e-9)


def test_thm69_requires_theta_vanishing_at_origin():
    with pytest.raises(InvalidArgumentError):
        op_lab.thm69_T(1.0, -1.0, BlaschkeProduct.from_zeros([0.5]), BlaschkeProduct.monomial(1), 16)
    with pytest.raises(InvalidArgumentError):
        op_lab.thm69_T(0.0, 0.0, BlaschkeProduct.monomial(1), BlaschkeProduct.monomial(1), 16)
