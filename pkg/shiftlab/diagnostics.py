"""Diagnostics - quantitative verdicts on built operators.

Every check returns a `Verdict` that records the value, the threshold it was compared against, the trust band and
the dimensions used, so a report can be replayed and compared across runs.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.optimize

from shiftlab.exceptions import InvalidArgumentError, InvariantViolation, UnsupportedError
from shiftlab.fingerprint import to_jsonable
from shiftlab.hardy_core import TrigPoly, TruncOp, analytic_multiplication_matrix, sarason_outer, toeplitz_matrix
from shiftlab.inner_fn import (
    AtomicMeasure,
    BlaschkeProduct,
    clark_measure_from_blaschke,
    convolve_columns,
    frostman_blaschke,
    model_basis,
    shifted_columns,
)
from shiftlab.op_lab import cauchy_dual, clark_unitary, left_inverse

LOG = logging.getLogger(__name__)

CSV_COLUMNS = ("name", "value", "threshold", "pass", "band", "n", "params_json")
GRAM_TOL = 1e-10
UNBOUNDED_FLOOR = 1e-12


@dataclass
class Verdict:
    """Outcome of one numerical check.

    Args:
        name (str): check identifier, kebab-case
        value (float): measured quantity
        threshold (float): bound the value is compared against
        direction (str): "le" passes when value ≤ threshold, "ge" when value ≥ threshold
        band (int): trust band (columns per copy) the measurement used
        dims (list): truncation dimensions involved
        params (dict): JSON-serializable parameters of the check
        notes (list): free-form remarks
    """

    name: str
    value: float
    threshold: float
    direction: str = "le"
    band: int = 0
    dims: List[int] = field(default_factory=list)
    params: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        if self.direction not in ("le", "ge"):
            raise InvalidArgumentError(f"unknown comparison direction {self.direction!r}")
        self.value = float(self.value)
        self.threshold = float(self.threshold)
        if math.isnan(self.value):
            self.passed = False
        elif self.direction == "le":
            self.passed = self.value <= self.threshold
        else:
            self.passed = self.value >= self.threshold

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "threshold": self.threshold,
            "direction": self.direction,
            "pass": self.passed,
            "band": self.band,
            "dims": list(self.dims),
            "params": self.params,
            "notes": list(self.notes),
        }

    def to_row(self) -> List[Any]:
        """CSV row in CSV_COLUMNS order."""
        return verdict_row(self.to_dict())


def verdict_row(verdict: Dict[str, Any]) -> List[Any]:
    """CSV row of a serialized verdict, in CSV_COLUMNS order."""
    return [
        verdict["name"],
        repr(verdict["value"]),
        repr(verdict["threshold"]),
        str(verdict["pass"]).lower(),
        verdict["band"],
        verdict["dims"][0] if verdict["dims"] else "",
        json.dumps(verdict["params"], sort_keys=True, default=to_jsonable),
    ]


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal columns spanning a subspace of a truncated H² or H²_N.

    Raises:
        InvalidArgumentError: if the columns are not orthonormal to 1e-10
    """

    columns: np.ndarray
    tag: str = ""

    def __post_init__(self) -> None:
        columns = np.array(self.columns, dtype=complex)
        if columns.ndim != 2:
            raise InvalidArgumentError("basis columns must form a matrix")
        gram_error = float(np.max(np.abs(columns.conj().T @ columns - np.eye(columns.shape[1])), initial=0.0))
        if gram_error > GRAM_TOL:
            raise InvalidArgumentError(f"basis {self.tag!r} is not orthonormal (Gram error {gram_error:.3e})")
        columns.setflags(write=False)
        object.__setattr__(self, "columns", columns)

    @classmethod
    def from_span(cls, vectors: np.ndarray, tag: str = "", rcond: float = 1e-10) -> "SubspaceBasis":
        """Orthonormalize the column span of `vectors`."""
        return cls(scipy.linalg.orth(np.asarray(vectors, dtype=complex), rcond=rcond), tag)

    @classmethod
    def coordinates(cls, size: int, indices: Sequence[int], tag: str = "") -> "SubspaceBasis":
        """The span of the standard basis vectors e_i, i in indices."""
        return cls(np.eye(size, dtype=complex)[:, list(indices)], tag)

    @property
    def dim(self) -> int:
        return self.columns.shape[1]

    def projector(self) -> np.ndarray:
        return self.columns @ self.columns.conj().T


def _spectral_norm(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix, 2))


def _numeric_rank(matrix: np.ndarray, tol: float) -> int:
    if matrix.size == 0:
        return 0
    singular = scipy.linalg.svdvals(matrix)
    if singular[0] == 0:
        return 0
    return int(np.count_nonzero(singular > tol * singular[0]))


def expansivity_defect(T: TruncOp, tol: float = 1e-10) -> Verdict:
    """Smallest eigenvalue of T*T − I on the trust band; T is expansive iff it is ≥ 0."""
    banded = T.banded()
    defect = banded.conj().T @ banded - np.eye(banded.shape[1])
    value = float(scipy.linalg.eigvalsh(defect)[0]) if defect.size else 0.0
    return Verdict("expansive", value, -tol, "ge", T.trust_band, [T.dim], dict(T.tag))


def contraction_verdict(T: TruncOp, tol: float = 1e-8) -> Verdict:
    return Verdict("contraction", _spectral_norm(T.banded()), 1 + tol, "le", T.trust_band, [T.dim], dict(T.tag))


def left_inverse_verdict(T: TruncOp, tol: float = 1e-9) -> Verdict:
    """‖L_T·T − I‖ on the trust band."""
    banded = T.banded()
    product = left_inverse(T).matrix @ banded
    value = _spectral_norm(product - np.eye(product.shape[0]))
    return Verdict("left-inverse", value, tol, "le", T.trust_band, [T.dim], dict(T.tag))


def double_dual_verdict(T: TruncOp, tol: float = 1e-8) -> Verdict:
    """‖(T')' − T‖ on the trust band."""
    value = _spectral_norm(cauchy_dual(cauchy_dual(T)).matrix - T.banded())
    return Verdict("double-dual", value, tol, "le", T.trust_band, [T.dim], dict(T.tag))


def dual_kernel_angle(T: TruncOp, dual: Optional[TruncOp] = None, tol: float = 1e-8) -> Verdict:
    """Largest principal angle between ker T* and ker T'* on the band; both equal the orthocomplement of ran T."""
    dual = cauchy_dual(T) if dual is None else dual
    kernel = scipy.linalg.null_space(T.banded().conj().T)
    dual_kernel = scipy.linalg.null_space(dual.banded().conj().T)
    if kernel.shape[1] != dual_kernel.shape[1]:
        value = math.pi / 2
    elif kernel.shape[1] == 0:
        value = 0.0
    else:
        value = float(np.max(scipy.linalg.subspace_angles(kernel, dual_kernel)))
    return Verdict("dual-kernel", value, tol, "le", T.trust_band, [T.dim], dict(T.tag))


def measure_distance(first: AtomicMeasure, second: AtomicMeasure) -> Tuple[float, float]:
    """Largest atom displacement and largest weight difference under the optimal matching of atoms."""
    if len(first.atoms) != len(second.atoms):
        return math.inf, math.inf
    if not first.atoms:
        return 0.0, 0.0
    cost = np.abs(first.points[:, None] - second.points[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols])), float(np.max(np.abs(first.weights[rows] - second.weights[cols])))


def clark_spectrum(B: BlaschkeProduct) -> AtomicMeasure:
    """Eigenvalues of U(θ) weighted by |(e_j, 𝟏)|², the spectral measure of the cyclic vector 𝟏 ∈ K_θ."""
    # U(θ) is normal, so its complex Schur form is diagonal
    diagonal, vectors = scipy.linalg.schur(clark_unitary(B).matrix, output="complex")
    cyclic = model_basis(B).matrix()[0].conj()
    weights = np.abs(vectors.conj().T @ cyclic) ** 2
    return AtomicMeasure(tuple(zip(np.diag(diagonal), weights)))


def clark_verdicts(B: BlaschkeProduct, tol: float = 1e-9) -> List[Verdict]:
    """Unitarity of U(θ) and agreement of its spectral measure with the Clark measure of θ."""
    U = clark_unitary(B).matrix
    unitarity = _spectral_norm(U.conj().T @ U - np.eye(B.degree))
    point_error, weight_error = measure_distance(clark_spectrum(B), clark_measure_from_blaschke(B))
    params = {"theta": B.to_dict()}
    return [
        Verdict("clark-unitary", unitarity, tol, "le", B.degree, [B.degree], params),
        Verdict("clark-eigenvalues", point_error, tol, "le", B.degree, [B.degree], params),
        Verdict("clark-weights", weight_error, tol, "le", B.degree, [B.degree], params),
    ]


def thm69_A_matrix(a: complex, b: complex, beta: BlaschkeProduct, tol: float = 1e-12) -> Tuple[np.ndarray, Verdict]:
    """The 2×2 matrix of T*T − I on its range for the operator built by thm69_T.

    A = [[|a|², (āb+1)p], [(ab̄+1)p, |b|²p²]] with p = ‖P_+χ̄β‖ = (1 − |β(0)|²)^{1/2}. A ⪰ 0 exactly when
    2Re(āb) ≤ −1, since det A = −p²(1 + 2Re āb).

    Raises:
        UnsupportedError: if β is constant
    """
    if beta.degree == 0:
        raise UnsupportedError("β must be nonconstant")
    p = math.sqrt(max(1 - abs(beta.at_origin()) ** 2, 0.0))
    a, b = complex(a), complex(b)
    matrix = np.array(
        [
            [abs(a) ** 2, (np.conj(a) * b + 1) * p],
            [(a * np.conj(b) + 1) * p, abs(b) ** 2 * p ** 2],
        ],
        dtype=complex,
    )
    smallest = float(scipy.linalg.eigvalsh(matrix)[0])
    criterion = bool(2 * (np.conj(a) * b).real <= -1)
    verdict = Verdict(
        "thm69-A-positive",
        smallest,
        -tol,
        "ge",
        2,
        [2],
        {"a": [a.real, a.imag], "b": [b.real, b.imag], "p": p, "criterion": criterion},
    )
    if verdict.passed != criterion:
        verdict.notes.append("positivity disagrees with 2Re(āb) ≤ −1")
    return matrix, verdict


class ProfileReport(NamedTuple):
    """A sequence of measurements over increasing truncation dimensions."""

    dims: List[int]
    values: List[float]
    verdict: Verdict


def _profile(name: str, dims: Sequence[int], values: List[float], band: int, tol: float) -> ProfileReport:
    step = abs(values[-1] - values[-2]) if len(values) > 1 else 0.0
    verdict = Verdict(name, step, tol, "le", band, list(dims), {"values": values})
    return ProfileReport(list(dims), values, verdict)


def defect_trace_profile(builder: Callable[[int], TruncOp], dims: Sequence[int], tol: float = 1e-6) -> ProfileReport:
    """Trace norms of I − T*T on the trust band for T = builder(n), n in dims.

    Args:
        builder (Callable[[int], TruncOp]): deterministic builder of the truncation at dimension n
        dims (Sequence[int]): increasing dimensions
        tol (float): allowed change over the last two dimensions
    Returns:
        ProfileReport: the profile and its Cauchy verdict
    """
    if not dims:
        raise InvalidArgumentError("need at least one dimension")
    values = []
    band = 0
    for n in dims:
        T = builder(n)
        banded = T.banded()
        defect = np.eye(banded.shape[1]) - banded.conj().T @ banded
        values.append(float(np.sum(np.abs(scipy.linalg.eigvalsh(defect)))) if defect.size else 0.0)
        band = T.trust_band
    return _profile("defect-trace", dims, values, band, tol)


def sarason_profile(g: TrigPoly, dims: Sequence[int], tol: float = 1e-6) -> ProfileReport:
    """Norms of the truncations of T_{1−ω}T_ḡ; they stay bounded and settle for polynomial g."""
    if not dims:
        raise InvalidArgumentError("need at least one dimension")
    values = []
    for n in dims:
        outer = sarason_outer(g, n)
        product = analytic_multiplication_matrix(outer.analytic_coeffs(n), n) @ toeplitz_matrix(g.conj(), n).matrix
        values.append(_spectral_norm(product))
    return _profile("sarason-bounded", dims, values, dims[-1], tol)


def _common_columns(*ops: TruncOp) -> Tuple[int, np.ndarray]:
    band = min(op.trust_band for op in ops)
    first = ops[0]
    columns = np.concatenate(
        [copy * first.cols_per_copy + np.arange(band) for copy in range(first.copies)]
    ).astype(int)
    return band, columns


def intertwining_residual(
    X: TruncOp, A: TruncOp, B: TruncOp, tol: float = 1e-9, name: str = "intertwining"
) -> Verdict:
    """‖XA − BX‖ on the common trust band.

    Raises:
        InvalidArgumentError: if the matrix shapes are not compatible
    """
    x_rows, x_cols = X.matrix.shape
    if A.matrix.shape != (x_cols, x_cols) or B.matrix.shape != (x_rows, x_rows):
        raise InvalidArgumentError(
            f"cannot compose X {X.matrix.shape} with A {A.matrix.shape} and B {B.matrix.shape}"
        )
    band, columns = _common_columns(A, X, B)
    residual = (X.matrix @ A.matrix - B.matrix @ X.matrix)[:, columns]
    return Verdict(name, _spectral_norm(residual), tol, "le", band, [X.dim], {"X": X.tag, "A": A.tag, "B": B.tag})


class QuasiaffinityMetrics(NamedTuple):
    """Finite-section shadows of injectivity and dense range; never a pass/fail."""

    sigma_min_band: float
    range_defect: float
    band: int


def quasiaffinity_metrics(X: TruncOp, rank_tol: float = 1e-7) -> QuasiaffinityMetrics:
    banded = X.banded()
    singular = scipy.linalg.svdvals(banded)
    sigma_min = float(singular[-1]) if singular.size else 0.0
    rank = _numeric_rank(banded, rank_tol)
    left, _, _ = scipy.linalg.svd(banded, full_matrices=False)
    span = left[:, :rank]
    targets = np.eye(banded.shape[0], dtype=complex)[:, X.band_columns()]
    defect = targets - span @ (span.conj().T @ targets)
    return QuasiaffinityMetrics(sigma_min, float(np.max(np.linalg.norm(defect, axis=0), initial=0.0)), X.trust_band)


def similarity_condition(Y: TruncOp, M: SubspaceBasis) -> float:
    """‖Y|M‖·‖(Y|M)⁻¹‖ as the ratio of extreme singular values; inf when Y|M is numerically singular."""
    if M.columns.shape[0] != Y.matrix.shape[1]:
        raise InvalidArgumentError("subspace and operator dimensions differ")
    singular = scipy.linalg.svdvals(Y.matrix @ M.columns)
    if singular.size == 0:
        return 1.0
    if singular[-1] < UNBOUNDED_FLOOR:
        return math.inf
    return float(singular[0] / singular[-1])


def wandering_dim(T: TruncOp, M: SubspaceBasis, invariance_tol: float = 1e-8, rank_tol: float = 1e-7) -> int:
    """dim(M ⊖ TM) for a subspace M that T maps into itself on the trust band.

    M is the truncation of an invariant subspace, so T may carry up to one direction per copy past its last
    column. Those edge directions are dropped before the invariance test and the rank count.

    Raises:
        InvariantViolation: if T moves more than one direction per copy of M out of M by more than invariance_tol
    """
    basis = M.columns
    outside = np.ones(basis.shape[0], dtype=bool)
    outside[T.band_columns()] = False
    weight = _spectral_norm(basis[outside])
    if weight > invariance_tol:
        kernel = scipy.linalg.null_space(basis[outside], rcond=invariance_tol / weight)
    else:
        kernel = np.eye(basis.shape[1], dtype=complex)
    in_band = basis @ kernel
    if in_band.shape[1] == 0:
        return M.dim
    image = T.matrix @ in_band
    _, singular, right = scipy.linalg.svd(image - basis @ (basis.conj().T @ image))
    edge = int(np.count_nonzero(singular[: T.copies] > invariance_tol))
    residual = float(singular[edge]) if singular.size > edge else 0.0
    if residual > invariance_tol:
        raise InvariantViolation(f"subspace {M.tag!r} is not invariant", residual)
    kept = right[edge:].conj().T
    LOG.debug("wandering-edge", extra={"subspace": M.tag, "edge": edge, "kept": kept.shape[1]})
    return M.dim - _numeric_rank(image @ kept, rank_tol)


@dataclass
class Lemma46Report:
    """Outcome of the Θ-matrix experiment for one (θ, a, ε, N, Z)."""

    verdicts: List[Verdict]
    det_error: float
    measured: List[float]
    predicted: List[float]
    conditions: List[float]
    rank_deficiency: int
    band: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdicts": [verdict.to_dict() for verdict in self.verdicts],
            "det_error": self.det_error,
            "measured": self.measured,
            "predicted": self.predicted,
            "conditions": self.conditions,
            "rank_deficiency": self.rank_deficiency,
            "band": self.band,
        }


def _theta_entries(
    theta_part: np.ndarray, theta_a_part: np.ndarray, eps_part: np.ndarray, eps: float, copies: int
) -> np.ndarray:
    """Θ entry-wise, stacked along the first axis (grid samples or Taylor coefficients).

    eps_part is ε·𝟏 in the same representation: constant samples, or ε at coefficient 0.
    """
    root = math.sqrt(1 - eps ** 2)
    entries = np.zeros((len(theta_part), copies, copies), dtype=complex)
    entries[:, 0, 0] = root * theta_a_part
    entries[:, 0, 1:] = root * theta_part[:, None]
    entries[:, 1, 0] = eps_part
    for j in range(1, copies):
        entries[:, j, j] = eps_part
    return entries


def lemma46_theta_experiment(
    theta: BlaschkeProduct,
    a: complex,
    eps: float,
    N: int,
    Z: TruncOp,
    delta0: float = 1.0,
    grid_size: int = 512,
    slack: float = 0.02,
    det_tol: float = 1e-9,
) -> Lemma46Report:
    """Lower bounds of ‖Zh‖ on the column subspaces Θ_jH² of the outer matrix function Θ.

    Θ has first row (1−ε²)^{1/2}(θ_a, θ, …, θ), ε at (2, 1) and on the diagonal from (2, 2) on, zeros elsewhere,
    so det Θ = (1−ε²)^{1/2}ε^{N−1}(θ_a − θ).

    Args:
        theta (BlaschkeProduct): θ
        a (complex): Frostman parameter, 0 < |a| < 1
        eps (float): ε in [0, 1)
        N (int): size of Θ, at least 2
        Z (TruncOp): operator on H²_N with N copies
        delta0 (float): lower bound of ‖Z(θh ⊕ 0)‖/‖h‖
        grid_size (int): grid for the determinant check
        slack (float): relative slack allowed below the predicted bounds
        det_tol (float): tolerance of the determinant check
    Returns:
        Lemma46Report: verdicts and per-column measurements
    Raises:
        InvalidArgumentError: if the truncation leaves no room for Θ_jχ^k, or Z violates the δ₀ bound
    """
    if N < 2 or Z.copies != N or not 0 <= eps < 1:
        raise InvalidArgumentError("need N ≥ 2, Z acting on N copies and 0 ≤ ε < 1")
    n = Z.dim
    theta_a = frostman_blaschke(theta, a)
    margin = max(theta.decay_length(), theta_a.decay_length())
    band = n - margin
    if band < 1:
        raise InvalidArgumentError(f"dimension {n} leaves no band after {margin} decay coefficients")

    points = np.exp(2j * np.pi * np.arange(grid_size) / grid_size)
    theta_values = np.asarray(theta(points))
    theta_a_values = np.asarray(theta_a(points))
    determinants = np.linalg.det(
        _theta_entries(theta_values, theta_a_values, np.full(grid_size, float(eps)), eps, N)
    )
    expected = math.sqrt(1 - eps ** 2) * eps ** (N - 1) * (theta_a_values - theta_values)
    det_error = float(np.max(np.abs(determinants - expected)))

    eps_coeffs = np.zeros(n)
    eps_coeffs[0] = eps
    coefficients = _theta_entries(theta.taylor(n), theta_a.taylor(n), eps_coeffs, eps, N)

    z_norm = _spectral_norm(Z.matrix)
    copy_zero = np.zeros((N * n, band), dtype=complex)
    copy_zero[:n] = shifted_columns(theta.taylor(n), list(range(band)), n)
    baseline = float(scipy.linalg.svdvals(Z.matrix @ copy_zero)[-1])
    if baseline < delta0 * (1 - 1e-9):
        raise InvalidArgumentError(f"‖Z(θh ⊕ 0)‖ ≥ δ₀‖h‖ fails: measured {baseline}, δ₀ = {delta0}")

    root = math.sqrt(1 - eps ** 2)
    modulus = abs(a)
    measured, predicted, conditions, blocks = [], [], [], []
    for j in range(N):
        column = np.zeros((N * n, band), dtype=complex)
        for i in range(N):
            column[i * n : (i + 1) * n] = shifted_columns(coefficients[:, i, j], list(range(band)), n)
        blocks.append(column)
        measured.append(float(scipy.linalg.svdvals(Z.matrix @ column)[-1]))
        if j == 0:
            inner = delta0 * math.sqrt(max(1 - 2 * modulus - 3 * modulus ** 2, 0.0)) - 2 * modulus * z_norm
            predicted.append(root / (1 - modulus) * inner - z_norm * eps)
        else:
            predicted.append(root * delta0 - z_norm * eps)
        conditions.append(similarity_condition(Z, SubspaceBasis.from_span(column, f"column-{j + 1}")))

    stacked = np.hstack(blocks)
    rank_deficiency = stacked.shape[1] - _numeric_rank(stacked, 1e-7)
    params = {"a": [complex(a).real, complex(a).imag], "eps": eps, "N": N, "delta0": delta0}
    verdicts = [Verdict("lemma46-det", det_error, det_tol, "le", band, [n, grid_size], params)]
    for j, (value, bound) in enumerate(zip(measured, predicted)):
        verdicts.append(
            Verdict(f"lemma46-column-{j + 1}", value, (1 - slack) * bound, "ge", band, [n], {**params, "column": j + 1})
        )
    if rank_deficiency:
        verdicts[0].notes.append(f"column subspaces are linearly dependent (deficiency {rank_deficiency})")
    LOG.info("lemma46-finished", extra={"det_error": det_error, "rank_deficiency": rank_deficiency})
    return Lemma46Report(verdicts, det_error, measured, predicted, conditions, rank_deficiency, band)


@dataclass
class Lemma61Report:
    """Finite-degree metrics of K_{θβ} = θK_β ⊕ K_θ and (θ − 1)K_β ⊂ K_{θβ}."""

    dims: Dict[str, int]
    orthogonality: float
    decomposition_residual: float
    inclusion_residual: float
    min_angle: float
    notes: List[str]
    verdicts: List[Verdict]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dims": self.dims,
            "orthogonality": self.orthogonality,
            "decomposition_residual": self.decomposition_residual,
            "inclusion_residual": self.inclusion_residual,
            "min_angle": self.min_angle,
            "notes": self.notes,
            "verdicts": [verdict.to_dict() for verdict in self.verdicts],
        }


def _outside(basis: np.ndarray, vectors: np.ndarray) -> float:
    if vectors.shape[1] == 0:
        return 0.0
    return _spectral_norm(vectors - basis @ (basis.conj().T @ vectors))


def lemma61_intersection_metrics(theta: BlaschkeProduct, beta: BlaschkeProduct, tol: float = 1e-10) -> Lemma61Report:
    """Check the model-space decomposition and report the finite-section intersection angle.

    Raises:
        UnsupportedError: if θβ has repeated zeros away from the origin
    """
    product = theta.times(beta)
    length = max(theta.decay_length(), beta.decay_length(), product.decay_length()) + 16
    theta_coeffs = theta.taylor(length)
    theta_basis = model_basis(theta, length).matrix()
    beta_basis = model_basis(beta, length).matrix()
    product_basis = model_basis(product, length).matrix()
    if beta.degree:
        lifted = convolve_columns(beta_basis, theta_coeffs, length)
    else:
        lifted = np.zeros((length, 0), dtype=complex)
    moved = lifted - beta_basis

    dims = {"K_theta_beta": product.degree, "K_theta": theta.degree, "K_beta": beta.degree}
    orthogonality = float(np.max(np.abs(lifted.conj().T @ theta_basis), initial=0.0))
    decomposition = _outside(product_basis, np.hstack([lifted, theta_basis]))
    inclusion = _outside(product_basis, moved)

    band = length - beta.decay_length()
    beta_band = shifted_columns(beta.taylor(length), list(range(band)), length)
    span = scipy.linalg.orth(np.hstack([theta_basis, moved]))
    if span.shape[1]:
        min_angle = float(np.min(scipy.linalg.subspace_angles(span, beta_band)))
    else:
        min_angle = math.pi / 2

    notes = []
    if beta.degree < product.degree:
        notes.append("density impossible at finite degree")
    params = {"theta": theta.to_dict(), "beta": beta.to_dict()}
    dim_gap = abs(product.degree - theta.degree - beta.degree)
    verdicts = [
        Verdict("lemma61-dims", dim_gap, 0, "le", length, [length], params),
        Verdict("lemma61-orthogonal", orthogonality, tol, "le", length, [length], params),
        Verdict("lemma61-decomposition", decomposition, tol, "le", length, [length], params),
        Verdict("lemma61-inclusion", inclusion, tol, "le", length, [length], params),
    ]
    return Lemma61Report(dims, orthogonality, decomposition, inclusion, min_angle, notes, verdicts)
