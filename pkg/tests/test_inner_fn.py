"""Test the inner_fn module"""

# pylint: disable=missing-docstring,invalid-name

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftlab.diagnostics import measure_distance
from shiftlab.exceptions import InvalidArgumentError, UnsupportedError
from shiftlab.hardy_core import UnitGrid
from shiftlab.inner_fn import (
    AtomicMeasure,
    BlaschkeProduct,
    adapted_frame,
    blaschke_eval,
    clark_inner_from_measure,
    clark_measure_from_blaschke,
    frostman_blaschke,
    frostman_bound,
    frostman_shift,
    model_basis,
    shifted_columns,
)


def test_blaschke_merges_zeros_and_keeps_origin_first():
    B = BlaschkeProduct(((0.5, 1), (0j, 1), (0.5, 2)))
    assert B.zeros == ((0j, 1), (0.5 + 0j, 3))
    assert B.degree == 4
    assert B.origin_multiplicity == 1


@pytest.mark.parametrize("zeros", [((1.0, 1),), ((0.2, 0),)])
def test_blaschke_rejects_bad_zeros(zeros):
    with pytest.raises(InvalidArgumentError):
        BlaschkeProduct(zeros)


def test_blaschke_is_unimodular_on_the_circle(mixed_blaschke):
    values = mixed_blaschke(UnitGrid(64).points)
    np.testing.assert_allclose(np.abs(values), 1.0, atol=1e-14)


def test_blaschke_vanishes_at_its_zeros(mixed_blaschke):
    for zero in mixed_blaschke.flat_zeros:
        assert abs(blaschke_eval(mixed_blaschke, zero)) < 1e-15


def test_blaschke_eval_rejects_points_outside_the_disc(mixed_blaschke):
    with pytest.raises(InvalidArgumentError):
        blaschke_eval(mixed_blaschke, 1.5)


def test_blaschke_taylor_matches_evaluation():
    B = BlaschkeProduct.from_zeros([0.5, -0.3 + 0.4j], phase=1j)
    z = 0.3 - 0.2j
    assert B.poly(B.decay_length()).evaluate(z) == pytest.approx(B(z), abs=1e-14)
    assert B.at_origin() == pytest.approx(B(0.0), abs=1e-15)


def test_blaschke_derivative_matches_finite_difference(mixed_blaschke):
    z, h = 0.2 + 0.1j, 1e-6
    numeric = (mixed_blaschke(z + h) - mixed_blaschke(z - h)) / (2 * h)
    assert mixed_blaschke.derivative(z) == pytest.approx(numeric, abs=1e-8)


def test_blaschke_json_keeps_zeros_and_phase():
    B = BlaschkeProduct.from_zeros([0j, 0.25 + 0.5j], phase=-1)
    assert BlaschkeProduct.from_json(B.to_json()) == B


def test_blaschke_from_polynomial_roots_keeps_inner_zeros():
    # (1 − 2z)(1 − z/2) has zeros 1/2 and 2
    B = BlaschkeProduct.from_polynomial_roots([1.0, -2.5, 1.0])
    assert B.degree == 1
    assert B.flat_zeros[0] == pytest.approx(0.5)


def test_frostman_shift_matches_blaschke_form(mixed_blaschke):
    a = 0.3 - 0.2j
    points = UnitGrid(128).points
    shifted = np.asarray(frostman_shift(mixed_blaschke, a)(points))
    as_blaschke = frostman_blaschke(mixed_blaschke, a)
    assert as_blaschke.degree == mixed_blaschke.degree
    np.testing.assert_allclose(as_blaschke(points), shifted, atol=1e-10)


def test_frostman_of_chi_is_a_single_zero():
    a = 0.4j
    B = frostman_blaschke(BlaschkeProduct.monomial(1), a)
    assert B.flat_zeros[0] == pytest.approx(a)
    assert B(0.1) == pytest.approx((0.1 - a) / (1 - np.conj(a) * 0.1))


@given(st.floats(0.01, 0.7), st.floats(0, 2 * np.pi))
@settings(max_examples=30, deadline=None)
def test_frostman_gap_respects_the_bound(modulus, angle):
    B = BlaschkeProduct.from_zeros([0j, 0.6, -0.2 + 0.5j])
    a = modulus * np.exp(1j * angle)
    points = UnitGrid(512).points
    gap = np.max(np.abs(np.asarray(B(points)) - np.asarray(frostman_shift(B, a)(points))))
    assert gap <= frostman_bound(a) + 1e-12


@pytest.mark.parametrize("a", [0.0, 1.0, 1.5j])
def test_frostman_rejects_parameters_outside_the_punctured_disc(a):
    with pytest.raises(InvalidArgumentError):
        frostman_shift(BlaschkeProduct.monomial(1), a)


def test_model_basis_is_orthonormal_and_orthogonal_to_theta_h2(mixed_blaschke):
    basis = model_basis(mixed_blaschke)
    length = basis.length
    Q = basis.matrix()
    assert basis.dim == 3
    np.testing.assert_allclose(Q.conj().T @ Q, np.eye(3), atol=1e-12)
    theta_h2 = shifted_columns(mixed_blaschke.taylor(length), list(range(6)), length)
    np.testing.assert_allclose(Q.conj().T @ theta_h2, 0.0, atol=1e-12)


def test_model_basis_of_monomial_is_monomials():
    np.testing.assert_allclose(model_basis(BlaschkeProduct.monomial(3), 5).matrix(), np.eye(5)[:, :3])


def test_model_basis_rejects_repeated_zeros_off_the_origin():
    with pytest.raises(UnsupportedError):
        model_basis(BlaschkeProduct(((0.5, 2),)))


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
def test_clark_measure_of_monomial_is_roots_of_unity(k):
    measure = clark_measure_from_blaschke(BlaschkeProduct.monomial(k))
    expected = AtomicMeasure(tuple((np.exp(2j * np.pi * j / k), 1 / k) for j in range(k)))
    points, weights = measure_distance(measure, expected)
    assert points < 1e-10
    assert weights < 1e-10


def test_clark_measure_of_chi_squared(chi_squared):
    measure = clark_measure_from_blaschke(chi_squared)
    np.testing.assert_allclose(measure.points, [1.0, -1.0], atol=1e-12)
    np.testing.assert_allclose(measure.weights, [0.5, 0.5], atol=1e-12)


def test_clark_measure_requires_theta_vanishing_at_origin():
    with pytest.raises(InvalidArgumentError):
        clark_measure_from_blaschke(BlaschkeProduct.from_zeros([0.5]))


def test_clark_measure_has_unit_mass(mixed_blaschke):
    assert clark_measure_from_blaschke(mixed_blaschke).total() == pytest.approx(1.0, abs=1e-12)


def test_clark_inner_round_trip():
    nu = AtomicMeasure.from_angles([0.1, 0.7, 1.3], [0.2, 0.5, 0.3])
    inner = clark_inner_from_measure(nu)
    assert inner.blaschke.degree == 3
    assert inner.blaschke.origin_multiplicity == 1
    z = 0.3 + 0.4j
    assert inner.blaschke(z) == pytest.approx(inner.evaluate(z), abs=1e-12)
    points, weights = measure_distance(nu, clark_measure_from_blaschke(inner.blaschke))
    assert max(points, weights) < 1e-8


def test_clark_inner_of_single_atom_is_rotated_chi():
    inner = clark_inner_from_measure(AtomicMeasure.from_angles([0.5], [1.0]))
    # 1/(1 − θ) = 1/(1 − z·(−i)), so θ(z) = −iz
    assert inner.blaschke(0.5) == pytest.approx(-0.5j, abs=1e-12)


def test_clark_inner_rejects_mass_other_than_one():
    with pytest.raises(InvalidArgumentError):
        clark_inner_from_measure(AtomicMeasure.from_angles([0.0, 1.0], [0.5, 0.6]))


def test_atomic_measure_validates_atoms():
    with pytest.raises(InvalidArgumentError):
        AtomicMeasure(((0.5, 1.0),))
    with pytest.raises(InvalidArgumentError):
        AtomicMeasure(((1.0, 0.0),))


def test_atomic_measure_json_uses_angles_in_units_of_pi():
    nu = AtomicMeasure.from_angles([0.5, 1.0], [0.25, 0.75])
    assert nu.to_dict()["atoms"][0] == pytest.approx([0.5, 0.25])
    restored = AtomicMeasure.from_json(nu.to_json())
    assert max(measure_distance(nu, restored)) < 1e-15


def test_adapted_frame_is_orthonormal(mixed_blaschke):
    beta = BlaschkeProduct.from_zeros([0.3 + 0.3j])
    frame = adapted_frame(mixed_blaschke, beta, 24)
    assert (frame.q, frame.p, frame.d) == (1, 3, 4)
    assert frame.gram_error < 1e-10
    assert frame.vectors.shape == (frame.length, 24)


def test_adapted_frame_needs_room_for_theta_beta_h2():
    with pytest.raises(InvalidArgumentError):
        adapted_frame(BlaschkeProduct.monomial(2), BlaschkeProduct.monomial(1), 3)
