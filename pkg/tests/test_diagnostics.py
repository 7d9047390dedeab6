"""Test the diagnostics module"""

# pylint: disable=missing-docstring,invalid-name

import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from shiftlab import op_lab
from shiftlab.diagnostics import (
    CSV_COLUMNS,
    SubspaceBasis,
    Verdict,
    clark_spectrum,
    clark_verdicts,
    contraction_verdict,
    defect_trace_profile,
    double_dual_verdict,
    dual_kernel_angle,
    expansivity_defect,
    intertwining_residual,
    lemma46_theta_experiment,
    lemma61_intersection_metrics,
    left_inverse_verdict,
    measure_distance,
    quasiaffinity_metrics,
    sarason_profile,
    similarity_condition,
    thm69_A_matrix,
    wandering_dim,
)
from shiftlab.exceptions import InvalidArgumentError, InvariantViolation, UnsupportedError
from shiftlab.hardy_core import TrigPoly, TruncOp
from shiftlab.inner_fn import AtomicMeasure, BlaschkeProduct, shifted_columns

finite = st.floats(-3, 3, allow_nan=False)


def test_verdict_directions():
    assert Verdict("small", 1e-12, 1e-9).passed
    assert not Verdict("small", 1e-6, 1e-9).passed
    assert Verdict("large", 2.0, 1.0, "ge").passed
    assert not Verdict("nan", math.nan, 1.0).passed
    with pytest.raises(InvalidArgumentError):
        Verdict("bad", 0.0, 1.0, "lt")


def test_verdict_serialization():
    verdict = Verdict("expansive", -1e-3, -1e-10, "ge", 63, [64], {"op": "shift"})
    data = verdict.to_dict()
    assert data["pass"] is False
    assert data["dims"] == [64]
    row = verdict.to_row()
    assert len(row) == len(CSV_COLUMNS)
    assert row[3] == "false"
    assert row[5] == 64
    assert json.loads(row[6]) == {"op": "shift"}


def test_subspace_basis_requires_orthonormal_columns():
    with pytest.raises(InvalidArgumentError):
        SubspaceBasis(np.array([[1.0, 1.0], [0.0, 1.0]]))
    basis = SubspaceBasis.from_span(np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))
    assert basis.dim == 2
    np.testing.assert_allclose(basis.projector(), np.diag([1.0, 1.0, 0.0]), atol=1e-12)


def test_expansivity_of_the_shift():
    verdict = expansivity_defect(op_lab.shift(16))
    assert verdict.passed
    assert verdict.value == pytest.approx(0.0, abs=1e-14)
    assert verdict.band == 15


def test_dual_laws_for_an_expansive_operator():
    g = TrigPoly.from_analytic([1.0, 0.5, -0.25])
    T = op_lab.perturb_lemma32(g, 64)
    assert left_inverse_verdict(T).passed
    assert double_dual_verdict(T).passed
    assert dual_kernel_angle(T).passed
    assert contraction_verdict(op_lab.cauchy_dual(T)).passed


def test_contraction_fails_for_expanding_scalar():
    T = TruncOp(2 * np.eye(4), 4, 4)
    assert not contraction_verdict(T).passed
    assert contraction_verdict(op_lab.cauchy_dual(T)).passed


def test_measure_distance():
    first = AtomicMeasure.from_angles([0.0, 1.0], [0.5, 0.5])
    second = AtomicMeasure.from_angles([1.0, 0.0], [0.4, 0.6])
    points, weights = measure_distance(first, second)
    assert points < 1e-15
    assert weights == pytest.approx(0.1)
    assert measure_distance(first, AtomicMeasure.from_angles([0.0], [1.0])) == (math.inf, math.inf)


def test_clark_spectrum_of_chi_squared(chi_squared):
    spectrum = clark_spectrum(chi_squared)
    assert max(measure_distance(spectrum, AtomicMeasure.from_angles([0.0, 1.0], [0.5, 0.5]))) < 1e-12


def test_clark_verdicts_pass(mixed_blaschke):
    verdicts = clark_verdicts(mixed_blaschke)
    assert [verdict.name for verdict in verdicts] == ["clark-unitary", "clark-eigenvalues", "clark-weights"]
    assert all(verdict.passed for verdict in verdicts)


@given(finite, finite, finite, finite)
@settings(max_examples=200, deadline=None)
def test_thm69_positivity_matches_criterion(a_re, a_im, b_re, b_im):
    a, b = complex(a_re, a_im), complex(b_re, b_im)
    margin = 2 * (np.conj(a) * b).real + 1
    # stay clear of the boundary where the smallest eigenvalue is zero
    assume(abs(margin) > 1e-6)
    beta = BlaschkeProduct.from_zeros([0.3 + 0.2j])
    matrix, verdict = thm69_A_matrix(a, b, beta)
    p = verdict.params["p"]
    assert np.linalg.det(matrix).real == pytest.approx(-(p ** 2) * margin, abs=1e-9)
    assert verdict.passed == verdict.params["criterion"]


def test_thm69_a_matrix_examples():
    _, good = thm69_A_matrix(1.0, -1.0, BlaschkeProduct.monomial(1))
    _, bad = thm69_A_matrix(1.0, 1.0, BlaschkeProduct.monomial(1))
    assert good.passed and good.params["criterion"]
    assert not bad.passed and not bad.params["criterion"]
    assert good.params["p"] == 1.0
    with pytest.raises(UnsupportedError):
        thm69_A_matrix(1.0, -1.0, BlaschkeProduct())


def test_defect_trace_profile_settles():
    g = TrigPoly.from_analytic([1.0, 0.5, 0.25j])
    profile = defect_trace_profile(lambda n: op_lab.perturb_lemma32(g, n), [16, 32, 64], 1e-8)
    np.testing.assert_allclose(profile.values, 0.3125, atol=1e-12)
    assert profile.verdict.passed
    with pytest.raises(InvalidArgumentError):
        defect_trace_profile(op_lab.shift, [])


def test_defect_trace_profile_of_two_copy_perturbation():
    f_list = [
        [TrigPoly.constant(0.2), TrigPoly.constant(0.1)],
        [TrigPoly.chi(1) * 0.1, TrigPoly.constant(0.1j)],
    ]
    profile = defect_trace_profile(lambda n: op_lab.perturb_lemma36(f_list, n), [16, 32, 64], 1e-8)
    assert min(profile.values) > 0
    assert max(profile.values) - min(profile.values) < 1e-8
    assert profile.verdict.passed


@pytest.mark.parametrize("b, expected", [(-1.0, 2.0), (1.0, 4.0)])
def test_defect_trace_profile_of_thm69(b, expected):
    theta, beta = BlaschkeProduct.monomial(1), BlaschkeProduct.monomial(1)
    profile = defect_trace_profile(lambda n: op_lab.thm69_T(1.0, b, theta, beta, n), [16, 32, 64], 1e-8)
    np.testing.assert_allclose(profile.values, expected, atol=1e-9)
    assert profile.verdict.passed


def test_sarason_profile_of_constant_is_one():
    profile = sarason_profile(TrigPoly.constant(1.0), [8, 16, 32])
    np.testing.assert_allclose(profile.values, 1.0, atol=1e-14)
    assert profile.verdict.passed


def test_intertwining_residual_shapes_and_band():
    S = op_lab.shift(8)
    identity = TruncOp(np.eye(8), 8, 8)
    verdict = intertwining_residual(identity, S, S)
    assert verdict.passed and verdict.band == 7
    with pytest.raises(InvalidArgumentError):
        intertwining_residual(identity, op_lab.shift(4), S)


def test_quasiaffinity_metrics_of_identity():
    metrics = quasiaffinity_metrics(TruncOp(np.eye(6), 6, 5))
    assert metrics.sigma_min_band == pytest.approx(1.0)
    assert metrics.range_defect < 1e-12
    assert metrics.band == 5


def test_similarity_condition():
    Y = TruncOp(np.diag([1.0, 2.0, 4.0]), 3, 3)
    assert similarity_condition(Y, SubspaceBasis.coordinates(3, [0, 2])) == pytest.approx(4.0)
    singular = TruncOp(np.diag([1.0, 0.0, 1.0]), 3, 3)
    assert similarity_condition(singular, SubspaceBasis.coordinates(3, [1])) == math.inf


def test_wandering_dim_of_shift_invariant_subspace():
    n = 16
    S = op_lab.shift(n)
    tail = SubspaceBasis.coordinates(n, range(3, n), "chi3-H2")
    assert wandering_dim(S, tail) == 1


def test_wandering_dim_drops_the_truncation_edge():
    n = 16
    S = op_lab.shift(n)
    # χ³H² cut off at χ⁹: S pushes χ⁹ out of the span
    window = SubspaceBasis.coordinates(n, range(3, 10), "chi3-H2-window")
    assert wandering_dim(S, window) == 1


def test_wandering_dim_for_plus_clark():
    B = BlaschkeProduct.from_zeros([0j, 0.5])
    n = 128
    T = op_lab.example_plus_clark(B, n)
    span = n - B.decay_length()
    columns = shifted_columns(B.taylor(n), list(range(span)), n)
    invariant = SubspaceBasis(columns, "theta-H2")
    moved = T.matrix @ columns[:, :-1]
    assert np.max(np.abs(moved - columns @ (columns.conj().T @ moved))) < 1e-12
    assert wandering_dim(T, invariant) == 1


def test_wandering_dim_counts_one_edge_per_copy():
    n = 8
    S = op_lab.shift(n, copies=2)
    windows = SubspaceBasis.coordinates(2 * n, [2, 3, n + 1, n + 2], "windows")
    assert wandering_dim(S, windows) == 2


def test_wandering_dim_rejects_non_invariant_subspace():
    n = 8
    S = op_lab.shift(n)
    with pytest.raises(InvariantViolation) as excinfo:
        wandering_dim(S, SubspaceBasis.coordinates(n, [0, 2], "gapped"))
    assert excinfo.value.residual == pytest.approx(1.0)


def test_wandering_dim_rejects_a_perturbation_leaving_the_subspace():
    n = 16
    matrix = op_lab.shift(n).matrix.copy()
    # T e_3 = e_4 + e_0
    matrix[0, 3] = 1.0
    T = TruncOp(matrix, n, n - 1)
    with pytest.raises(InvariantViolation):
        wandering_dim(T, SubspaceBasis.coordinates(n, range(3, 10)))


def test_lemma46_determinant_and_columns():
    theta = BlaschkeProduct.from_zeros([0j, 0.3 + 0.2j])
    n, copies = 64, 2
    identity = TruncOp(np.eye(copies * n), n, n, copies)
    report = lemma46_theta_experiment(theta, 0.05, 0.05, copies, identity)
    assert report.det_error < 1e-9
    assert len(report.measured) == copies
    assert all(verdict.passed for verdict in report.verdicts)


def test_lemma46_rejects_mismatched_copies():
    identity = TruncOp(np.eye(32), 16, 16, 2)
    with pytest.raises(InvalidArgumentError):
        lemma46_theta_experiment(BlaschkeProduct.monomial(1), 0.1, 0.1, 3, identity)


def test_lemma61_decomposition_and_density_flag():
    theta = BlaschkeProduct.from_zeros([0j, 0.5])
    beta = BlaschkeProduct.from_zeros([0.3 + 0.3j])
    report = lemma61_intersection_metrics(theta, beta)
    assert report.dims == {"K_theta_beta": 3, "K_theta": 2, "K_beta": 1}
    assert all(verdict.passed for verdict in report.verdicts)
    assert report.notes == ["density impossible at finite degree"]


def test_lemma61_without_theta_has_no_note():
    report = lemma61_intersection_metrics(BlaschkeProduct(), BlaschkeProduct.from_zeros([0.3]))
    assert report.notes == []
    assert all(verdict.passed for verdict in report.verdicts)
