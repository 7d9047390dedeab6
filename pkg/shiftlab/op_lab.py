"""Operator lab - builders for shifts, model-space operators and finite-rank perturbations of S.

Every builder returns a `TruncOp`. Monomial-basis builders trust every column but the last, which is where the
truncated shift drops χⁿ. The thm69 operators are written in the adapted frame K_β ⊕ βK_θ ⊕ θβH², where
the same holds. Model-space operators are exact square matrices in the Takenaka–Malmquist basis.
"""
import logging
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from shiftlab.exceptions import InvalidArgumentError, NumericalFailure
from shiftlab.hardy_core import (
    LOG_MODULUS_FLOOR,
    GridFn,
    TrigPoly,
    TruncOp,
    UnitGrid,
    analytic_multiplication_matrix,
    block_toeplitz_matrix,
    outer_from_modulus,
    rank_one,
    sarason_outer,
    shift_matrix,
    toeplitz_matrix,
)
from shiftlab.inner_fn import (
    AdaptedFrame,
    BlaschkeProduct,
    adapted_frame,
    convolve_columns,
    model_basis,
    shifted_columns,
)

LOG = logging.getLogger(__name__)

GRAM_FLOOR = 1e-10
ORIGIN_TOL = 1e-12


def _unit(length: int) -> np.ndarray:
    vector = np.zeros(length, dtype=complex)
    vector[0] = 1.0
    return vector


def _shift_down(coeffs: np.ndarray) -> np.ndarray:
    """Multiplication by χ on coefficient columns, truncated to the same length."""
    out = np.zeros_like(coeffs)
    out[1:] = coeffs[:-1]
    return out


def _complex_pair(value: complex) -> List[float]:
    return [float(np.real(value)), float(np.imag(value))]


def _grid_for(n: int, degree: int = 0) -> UnitGrid:
    size = 512
    while size < 4 * (n + degree):
        size *= 2
    return UnitGrid(size)


def _check_analytic(g: TrigPoly, name: str = "g") -> None:
    if not g.is_analytic(1e-14):
        raise InvalidArgumentError(f"{name} must be analytic")


def shift(n: int, copies: int = 1) -> TruncOp:
    """S_N truncated to n coefficients per copy: block-diagonal lower shifts."""
    if n < 1 or copies < 1:
        raise InvalidArgumentError("need n ≥ 1 and N ≥ 1")
    matrix = scipy.linalg.block_diag(*[shift_matrix(n)] * copies)
    return TruncOp(matrix, n, n - 1, copies, tag={"op": "shift", "n": n, "N": copies})


def _model_matrices(B: BlaschkeProduct) -> Tuple[np.ndarray, np.ndarray]:
    if B.degree < 1:
        raise InvalidArgumentError("K_B is trivial for a constant B")
    basis = model_basis(B).matrix()
    compressed = basis.conj().T @ _shift_down(basis)
    return basis, compressed


def _model_op(B: BlaschkeProduct, matrix: np.ndarray, op: str) -> TruncOp:
    return TruncOp(matrix, B.degree, B.degree, tag={"op": op, "theta": B.to_dict()}, basis="model")


def compressed_shift(B: BlaschkeProduct) -> TruncOp:
    """S(θ) = P_{K_θ}S|K_θ in the Takenaka–Malmquist basis of K_θ.

    Args:
        B (BlaschkeProduct): θ, zeros away from the origin simple
    Returns:
        TruncOp: the exact deg B × deg B matrix
    """
    _, compressed = _model_matrices(B)
    return _model_op(B, compressed, "compressed-shift")


def clark_unitary(B: BlaschkeProduct) -> TruncOp:
    """U(θ) = S(θ) + 𝟏⊗χ̄θ on K_θ, a unitary when θ(0) = 0.

    Raises:
        InvalidArgumentError: if B(0) ≠ 0
    """
    if not B.origin_multiplicity:
        raise InvalidArgumentError("the Clark unitary needs B(0) = 0")
    basis, compressed = _model_matrices(B)
    length = basis.shape[0]
    adjoint_shift_theta = B.taylor(length + 1)[1:]
    matrix = compressed + rank_one(basis.conj().T @ _unit(length), basis.conj().T @ adjoint_shift_theta)
    return _model_op(B, matrix, "clark-unitary")


def inv_adjoint_compressed_shift(B: BlaschkeProduct) -> TruncOp:
    """(S(θ)*)⁻¹ = S(θ) + (θ − 1/θ(0)̄)⊗P_+χ̄θ, for θ(0) ≠ 0.

    Raises:
        InvalidArgumentError: if B(0) = 0
    """
    origin = B.at_origin()
    if abs(origin) < ORIGIN_TOL:
        raise InvalidArgumentError("S(θ) is invertible only when B(0) ≠ 0")
    basis, compressed = _model_matrices(B)
    length = basis.shape[0]
    coeffs = B.taylor(length + 1)
    range_vector = coeffs[:length].copy()
    range_vector[0] -= 1 / np.conj(origin)
    matrix = compressed + rank_one(basis.conj().T @ range_vector, basis.conj().T @ coeffs[1:])
    return _model_op(B, matrix, "inv-adjoint-compressed-shift")


def perturb_lemma32(g: TrigPoly, n: int) -> TruncOp:
    """T = S − 𝟏⊗S*g for analytic g with g(0) = 1.

    Coefficients of g beyond index n only touch columns outside the truncation.
    """
    _check_analytic(g)
    if abs(g.coeff(0) - 1) > 1e-12:
        raise InvalidArgumentError(f"g(0) must equal 1, got {g.coeff(0)}")
    if n < 2:
        raise InvalidArgumentError("need n ≥ 2")
    adjoint_shift_g = g.analytic_coeffs(n + 1)[1:]
    matrix = shift_matrix(n) - rank_one(_unit(n), adjoint_shift_g)
    return TruncOp(matrix, n, n - 1, tag={"op": "perturb-lemma32", "n": n, "g_degree": g.numerical_degree()})


def _check_columns(f_list: Sequence[Sequence[TrigPoly]]) -> int:
    copies = len(f_list)
    if copies < 1 or any(len(column) != copies for column in f_list):
        raise InvalidArgumentError("need N columns f_k, each with N components")
    for column in f_list:
        for entry in column:
            _check_analytic(entry, "f")
    return copies


def perturb_lemma36(f_list: Sequence[Sequence[TrigPoly]], n: int) -> TruncOp:
    """T = S_N + Σ_k e_k⊗f_k on H²_N; f_list[k][j] is the j-th component of f_k."""
    copies = _check_columns(f_list)
    if n < 2:
        raise InvalidArgumentError("need n ≥ 2")
    matrix = np.array(shift(n, copies).matrix)
    for k, column in enumerate(f_list):
        for j, entry in enumerate(column):
            matrix[k * n, j * n : (j + 1) * n] += np.conj(entry.analytic_coeffs(n))
    degree = max(entry.numerical_degree() for column in f_list for entry in column)
    return TruncOp(matrix, n, n - 1, copies, tag={"op": "perturb-lemma36", "n": n, "N": copies, "f_degree": degree})


def _poly_det(matrix: List[List[TrigPoly]]) -> TrigPoly:
    if len(matrix) == 1:
        return matrix[0][0]
    total = TrigPoly.constant(0.0)
    for col, entry in enumerate(matrix[0]):
        minor = [row[:col] + row[col + 1 :] for row in matrix[1:]]
        term = entry * _poly_det(minor)
        total = total + term if col % 2 == 0 else total - term
    return total


def lemma36_determinant(f_list: Sequence[Sequence[TrigPoly]]) -> TrigPoly:
    """ψ = det(I − χF), F = [f_1, …, f_N] with f_k as columns; ψ(0) = 1."""
    copies = _check_columns(f_list)
    one = TrigPoly.constant(1.0)
    matrix = [
        [(one if row == col else TrigPoly.constant(0.0)) - f_list[col][row].shift(1) for col in range(copies)]
        for row in range(copies)
    ]
    return _poly_det(matrix).trimmed()


class Lemma36Intertwiners(NamedTuple):
    """Y = T_Ψ with YS_N = TY and X = T_{φI}T_{(I−χ̄F̄)ᵀ} with XT = S_NX.

    Args:
        T (TruncOp): the perturbation S_N + Σ e_k⊗f_k
        X (TruncOp): T → S_N intertwiner
        Y (TruncOp): S_N → T intertwiner
        phi (TrigPoly): product of the Sarason outer functions, truncated to n coefficients
        eta (TrigPoly): the bounded outer factor of Ψ
        psi (TrigPoly): det(I − χF)
        product (TruncOp): T_φT_η on each copy, the expected value of XY
        rows (int): leading rows per copy on which XY equals T_φT_η
    """

    T: TruncOp
    X: TruncOp
    Y: TruncOp
    phi: TrigPoly
    eta: TrigPoly
    psi: TrigPoly
    product: TruncOp
    rows: int


def lemma36_intertwiners(
    f_list: Sequence[Sequence[TrigPoly]], n: int, grid: Optional[UnitGrid] = None
) -> Lemma36Intertwiners:
    """Assemble the intertwiners S_N → T → S_N of a finite-rank perturbation on H²_N.

    Args:
        f_list (Sequence[Sequence[TrigPoly]]): f_list[k][j] is the j-th component of f_k
        n (int): coefficients per copy
        grid (Optional[UnitGrid]): sampling grid for Ψ, at least 4n points
    Returns:
        Lemma36Intertwiners: T, X, Y and the outer factors
    """
    copies = _check_columns(f_list)
    T = perturb_lemma36(f_list, n)
    degree = T.tag["f_degree"]
    grid = grid or _grid_for(n, degree)
    if grid.size < 4 * n:
        raise InvalidArgumentError(f"grid of size {grid.size} is too coarse for n={n}")
    points = grid.points

    samples = np.zeros((grid.size, copies, copies), dtype=complex)
    for k, column in enumerate(f_list):
        for j, entry in enumerate(column):
            samples[:, j, k] = entry.evaluate(points)
    symbol = np.eye(copies)[None, :, :] - points[:, None, None] * samples
    try:
        inverse = np.linalg.inv(symbol)
    except np.linalg.LinAlgError as err:
        raise NumericalFailure("det(I − χF) vanishes on the grid", {"grid": grid.size}) from err
    psi = lemma36_determinant(f_list)
    modulus = np.maximum(np.abs(np.asarray(psi.evaluate(points))), np.exp(LOG_MODULUS_FLOOR))
    eta = outer_from_modulus(GridFn(grid, modulus)).poly.truncated(0, grid.size // 2 - 1)
    eta_samples = np.asarray(eta.evaluate(points))
    psi_samples = eta_samples[:, None, None] * np.conj(inverse).transpose(0, 2, 1)
    Y = block_toeplitz_matrix(
        [[GridFn(grid, psi_samples[:, i, j]) for j in range(copies)] for i in range(copies)], n
    )

    one = TrigPoly.constant(1.0)
    zero = TrigPoly.constant(0.0)
    gamma = [
        [(one if j == k else zero) - f_list[j][k].conj().shift(-1) for k in range(copies)] for j in range(copies)
    ]
    phi = TrigPoly.constant(1.0)
    for row in gamma:
        for entry in row:
            analytic = entry.conj().trimmed()
            if analytic.norm() > 0:
                phi = phi.multiply(sarason_outer(analytic, n)).truncated(0, n - 1)
    phi_block = np.kron(np.eye(copies), analytic_multiplication_matrix(phi.analytic_coeffs(n), n))
    X = phi_block @ block_toeplitz_matrix(gamma, n).matrix
    product = np.kron(
        np.eye(copies),
        analytic_multiplication_matrix(phi.analytic_coeffs(n), n)
        @ analytic_multiplication_matrix(eta.analytic_coeffs(n), n),
    )
    band = T.trust_band
    return Lemma36Intertwiners(
        T=T,
        X=TruncOp(X, n, band, copies, tag={"op": "lemma36-X", "n": n, "N": copies}),
        Y=TruncOp(Y.matrix, n, band, copies, tag={"op": "lemma36-Y", "n": n, "N": copies, "grid": grid.size}),
        phi=phi,
        eta=eta,
        psi=psi,
        product=TruncOp(product, n, n, copies, tag={"op": "lemma36-product"}),
        rows=max(n - degree - 1, 0),
    )


def example_plus_clark(B: BlaschkeProduct, n: int) -> TruncOp:
    """T = S + 𝟏⊗χ̄θ for θ(0) = 0; θH² is T-invariant and the compression to K_θ is U(θ)."""
    if not B.origin_multiplicity:
        raise InvalidArgumentError("needs B(0) = 0")
    if n < 2:
        raise InvalidArgumentError("need n ≥ 2")
    matrix = shift_matrix(n) + rank_one(_unit(n), B.taylor(n + 1)[1:])
    return TruncOp(matrix, n, n - 1, tag={"op": "example-plus-clark", "n": n, "theta": B.to_dict()})


def example_inverse_clark(B: BlaschkeProduct, n: int) -> TruncOp:
    """T = S + 𝟏⊗χ̄(1 − θ/θ(0)) for θ(0) ≠ 0, which is S − 𝟏⊗S*(θ/θ(0))."""
    origin = B.at_origin()
    if abs(origin) < ORIGIN_TOL:
        raise InvalidArgumentError("needs B(0) ≠ 0")
    g = TrigPoly.from_analytic(B.taylor(n + 1) / origin)
    return perturb_lemma32(g, n).with_tag(op="example-inverse-clark", theta=B.to_dict())


class Lemma32Intertwiners(NamedTuple):
    """Y = T_{f/ḡ} with YS = TY and X = T_{1−ω}T_ḡ with XT = SX, T = S − 𝟏⊗S*g."""

    T: TruncOp
    X: TruncOp
    Y: TruncOp
    outer: TrigPoly


def lemma32_intertwiners(
    g: TrigPoly, n: int, f: Optional[TrigPoly] = None, grid: Optional[UnitGrid] = None
) -> Lemma32Intertwiners:
    """Intertwiners of T = S − 𝟏⊗S*g with S.

    Args:
        g (TrigPoly): analytic polynomial with g(0) = 1, nonvanishing on the circle
        n (int): truncation dimension
        f (Optional[TrigPoly]): analytic numerator of the symbol f/ḡ, defaults to g
        grid (Optional[UnitGrid]): sampling grid for f/ḡ
    Returns:
        Lemma32Intertwiners: T, X, Y and the Sarason outer function 1 − ω
    """
    T = perturb_lemma32(g, n)
    f = g if f is None else f
    _check_analytic(f, "f")
    grid = grid or _grid_for(n, max(g.numerical_degree(), f.numerical_degree()))
    g_samples = np.asarray(g.evaluate(grid.points))
    if np.min(np.abs(g_samples)) < 1e-12:
        raise NumericalFailure("g vanishes on the circle", {"min_modulus": float(np.min(np.abs(g_samples)))})
    symbol = GridFn(grid, np.asarray(f.evaluate(grid.points)) / np.conj(g_samples))
    Y = toeplitz_matrix(symbol, n)
    outer = sarason_outer(g, n)
    X = analytic_multiplication_matrix(outer.analytic_coeffs(n), n) @ toeplitz_matrix(g.conj(), n).matrix
    return Lemma32Intertwiners(
        T=T,
        X=TruncOp(X, n, T.trust_band, tag={"op": "lemma32-X", "n": n}),
        Y=TruncOp(Y.matrix, n, T.trust_band, tag={"op": "lemma32-Y", "n": n, "grid": grid.size}),
        outer=outer,
    )


class ModelRestriction(NamedTuple):
    """T restricted to K_θ in the model basis, against (S(θ)*)⁻¹."""

    theta: BlaschkeProduct
    T: TruncOp
    restricted: np.ndarray
    expected: np.ndarray
    invariance_residual: float


def model_restriction(T: TruncOp, theta: BlaschkeProduct) -> ModelRestriction:
    """Q*TQ and ‖(I − QQ*)TQ‖ for the model basis Q of K_θ cut to the trust band of a single-copy T."""
    if theta.decay_length() > T.trust_band:
        LOG.warning("model-basis-truncated", extra={"needed": theta.decay_length(), "band": T.trust_band})
    basis = np.zeros((T.dim, theta.degree), dtype=complex)
    basis[: T.trust_band] = model_basis(theta, T.trust_band).matrix()
    image = T.matrix @ basis
    restricted = basis.conj().T @ image
    residual = float(np.linalg.norm(image - basis @ restricted, 2))
    expected = inv_adjoint_compressed_shift(theta).matrix
    return ModelRestriction(theta, T, restricted, expected, residual)


def lemma32_model_restriction(g: TrigPoly, n: int) -> ModelRestriction:
    """Check that K_θ is T-invariant with T|K_θ = (S(θ)*)⁻¹ for T = S − 𝟏⊗S*g, θ the inner factor of polynomial g.

    Raises:
        InvalidArgumentError: if g has no zeros in the disc (K_θ = {0})
    """
    _check_analytic(g)
    theta = BlaschkeProduct.from_polynomial_roots(g.analytic_coeffs(g.hi + 1))
    if not theta.degree:
        raise InvalidArgumentError("g has no zeros in the disc, so K_θ is trivial")
    return model_restriction(perturb_lemma32(g, n), theta)


def nakamura_pair(g: TrigPoly, n: int) -> Tuple[TruncOp, TruncOp]:
    """T = S − 𝟏⊗S*(g/g(0)) and its closed-form Cauchy dual T' = S − g⊗S*g.

    Args:
        g (TrigPoly): analytic polynomial, ‖g‖ = 1, 0 < |g(0)| < 1, degree below n
        n (int): truncation dimension
    Returns:
        Tuple[TruncOp, TruncOp]: (T, T')
    """
    _check_analytic(g)
    origin = g.coeff(0)
    if abs(g.norm() - 1) > 1e-10 or not 0 < abs(origin) < 1:
        raise InvalidArgumentError("need ‖g‖ = 1 and 0 < |g(0)| < 1")
    if g.numerical_degree() >= n:
        raise InvalidArgumentError(f"g has degree ≥ n = {n}")
    coeffs = g.analytic_coeffs(n + 1)
    T = shift_matrix(n) - rank_one(_unit(n), coeffs[1:] / origin)
    dual = shift_matrix(n) - rank_one(coeffs[:n], coeffs[1:])
    tag = {"n": n, "g0": _complex_pair(origin)}
    return (
        TruncOp(T, n, n - 1, tag={"op": "nakamura-T", **tag}),
        TruncOp(dual, n, n - 1, tag={"op": "nakamura-dual", **tag}),
    )


def _check_thm69(a: complex, b: complex, theta: BlaschkeProduct) -> None:
    if not theta.origin_multiplicity:
        raise InvalidArgumentError("θ(0) must vanish")
    points = UnitGrid(256).points
    phi = a + b * (np.asarray(theta(points)) - 1)
    if np.max(np.abs(phi)) < 1e-14:
        raise InvalidArgumentError("φ = a + b(θ − 1) vanishes identically")


def thm69_frame(theta: BlaschkeProduct, beta: BlaschkeProduct, n: int) -> AdaptedFrame:
    """The adapted frame K_β ⊕ βK_θ ⊕ θβ{χ^k} in which the thm69 operators are assembled."""
    return adapted_frame(theta, beta, n)


def _frame_op(frame: AdaptedFrame, images: np.ndarray, op: str, **tag) -> TruncOp:
    matrix = frame.vectors.conj().T @ images
    tag = {"op": op, "n": frame.n, "theta": frame.theta.to_dict(), "beta": frame.beta.to_dict(), **tag}
    return TruncOp(matrix, frame.n, frame.n - 1, tag=tag, basis="adapted")


def thm69_shift(theta: BlaschkeProduct, beta: BlaschkeProduct, n: int, frame: Optional[AdaptedFrame] = None) -> TruncOp:
    """S written in the adapted frame."""
    frame = frame or thm69_frame(theta, beta, n)
    return _frame_op(frame, _shift_down(np.array(frame.vectors)), "thm69-S")


def thm69_T(
    a: complex,
    b: complex,
    theta: BlaschkeProduct,
    beta: BlaschkeProduct,
    n: int,
    frame: Optional[AdaptedFrame] = None,
) -> TruncOp:
    """T = S + (1 + (a−1)θ)β⊗βχ̄θ + bθβ⊗P_+χ̄β in the adapted frame, with u⊗v: x ↦ (x, v)u.

    Raises:
        InvalidArgumentError: if θ(0) ≠ 0 or φ = a + b(θ − 1) vanishes identically
    """
    _check_thm69(a, b, theta)
    frame = frame or thm69_frame(theta, beta, n)
    length = frame.length
    vectors = np.array(frame.vectors)
    beta_coeffs = beta.taylor(length + 1)
    product_coeffs = theta.times(beta).taylor(length + 1)
    first_range = beta_coeffs[:length] + (a - 1) * product_coeffs[:length]
    images = (
        _shift_down(vectors)
        + np.outer(first_range, product_coeffs[1:].conj() @ vectors)
        + np.outer(b * product_coeffs[:length], beta_coeffs[1:].conj() @ vectors)
    )
    return _frame_op(frame, images, "thm69-T", a=_complex_pair(a), b=_complex_pair(b))


def thm69_X(
    a: complex,
    b: complex,
    theta: BlaschkeProduct,
    beta: BlaschkeProduct,
    n: int,
    frame: Optional[AdaptedFrame] = None,
) -> TruncOp:
    """X(θβh + βf + g) = (θ−1)βh + aβf + φg for h ∈ H², f ∈ K_θ, g ∈ K_β; XT = SX."""
    _check_thm69(a, b, theta)
    frame = frame or thm69_frame(theta, beta, n)
    length, q, d = frame.length, frame.q, frame.d
    vectors = np.array(frame.vectors)
    theta_coeffs = theta.taylor(length)
    images = np.zeros_like(vectors)
    model_part = vectors[:, :q]
    if q:
        images[:, :q] = (a - b) * model_part + b * convolve_columns(model_part, theta_coeffs, length)
    images[:, q:d] = a * vectors[:, q:d]
    # tail columns already hold θβχ^k
    images[:, d:] = vectors[:, d:] - shifted_columns(beta.taylor(length), list(range(frame.n - d)), length)
    return _frame_op(frame, images, "thm69-X", a=_complex_pair(a), b=_complex_pair(b))


def thm69_Y(
    a: complex,
    b: complex,
    theta: BlaschkeProduct,
    beta: BlaschkeProduct,
    n: int,
    frame: Optional[AdaptedFrame] = None,
) -> TruncOp:
    """Y(βh + g) = θβφh + θP_{βH²}φg + (θ−1)g for h ∈ H², g ∈ K_β; YS = TY.

    P_{βH²} is applied as I − P_{K_β} with the exact K_β basis.
    """
    _check_thm69(a, b, theta)
    frame = frame or thm69_frame(theta, beta, n)
    length, q = frame.length, frame.q
    vectors = np.array(frame.vectors)
    theta_coeffs = theta.taylor(length)

    def times_phi(columns: np.ndarray) -> np.ndarray:
        return (a - b) * columns + b * convolve_columns(columns, theta_coeffs, length)

    images = np.zeros_like(vectors)
    model_part = vectors[:, :q]
    if q:
        phi_g = times_phi(model_part)
        projected = phi_g - model_part @ (model_part.conj().T @ phi_g)
        images[:, :q] = convolve_columns(projected, theta_coeffs, length) + convolve_columns(
            model_part, theta_coeffs, length
        ) - model_part
    images[:, q:] = convolve_columns(times_phi(vectors[:, q:]), theta_coeffs, length)
    return _frame_op(frame, images, "thm69-Y", a=_complex_pair(a), b=_complex_pair(b))


def _gram(T: TruncOp) -> Tuple[np.ndarray, Tuple[np.ndarray, bool]]:
    banded = T.banded()
    gram = banded.conj().T @ banded
    eigenvalues = scipy.linalg.eigvalsh(gram)
    if eigenvalues[0] <= GRAM_FLOOR:
        raise NumericalFailure(
            "T*T is singular on the trust band",
            {
                "min_eigenvalue": float(eigenvalues[0]),
                "condition": float(eigenvalues[-1] / eigenvalues[0]) if eigenvalues[0] > 0 else float("inf"),
                "band": T.trust_band,
            },
        )
    return banded, scipy.linalg.cho_factor(gram)


def left_inverse(T: TruncOp) -> TruncOp:
    """L_T = (T*T)⁻¹T* computed on the trust band.

    Raises:
        NumericalFailure: when T*T restricted to the band has an eigenvalue ≤ 1e-10
    """
    banded, factor = _gram(T)
    matrix = scipy.linalg.cho_solve(factor, banded.conj().T)
    tag = {**T.tag, "derived": "left-inverse"}
    return TruncOp(matrix, T.trust_band, T.trust_band, T.copies, tag=tag, basis=T.basis)


def cauchy_dual(T: TruncOp) -> TruncOp:
    """T' = T(T*T)⁻¹ = L_T*, computed on the trust band; every column of the result is trusted.

    Raises:
        NumericalFailure: when T*T restricted to the band has an eigenvalue ≤ 1e-10
    """
    banded, factor = _gram(T)
    matrix = scipy.linalg.cho_solve(factor, banded.conj().T).conj().T
    return TruncOp(matrix, T.dim, T.trust_band, T.copies, tag={**T.tag, "derived": "cauchy-dual"}, basis=T.basis)


def example53_modulus(grid: UnitGrid) -> np.ndarray:
    """|g₀(e^{iπt})| = 1/(|t|^{1/2} log(2/|t|)) on the grid, |t| clamped one grid step away from 0."""
    t = grid.angles / np.pi
    t = np.where(t > 1, t - 2, t)
    magnitude = np.maximum(np.abs(t), 2.0 / grid.size)
    return 1.0 / (np.sqrt(magnitude) * np.log(2.0 / magnitude))


def example53_g(grid: UnitGrid) -> TrigPoly:
    """The unit-norm outer function with the modulus of example53_modulus; 1/g is bounded, g ∉ H^p for p > 2."""
    if grid.size < 512:
        raise InvalidArgumentError("example53_g needs a grid of at least 512 points")
    outer = outer_from_modulus(GridFn(grid, example53_modulus(grid)))
    LOG.debug("example53-built", extra={"grid": grid.size, "modulus_error": outer.modulus_error})
    return outer.poly / outer.poly.norm()


def example55_pair(g: TrigPoly, a: float, n: int) -> Tuple[TruncOp, TruncOp]:
    """The similarity-conjugated pair T = XSX⁻¹, T' = X⁻¹(S − 𝟏⊗S*g)X with X = Y^{-1/2}.

    Y is the identity off E = span{𝟏, g} and [[a, ‖S*g‖], [‖S*g‖, 1]] on E in the basis {(g−1)/‖S*g‖, 𝟏}.

    Args:
        g (TrigPoly): analytic polynomial with g(0) = 1, S*g ≠ 0, degree at most n − 2
        a (float): a > ‖S*g‖²
        n (int): truncation dimension
    Returns:
        Tuple[TruncOp, TruncOp]: (T, T') with T'*T = I on the band
    """
    _check_analytic(g)
    if abs(g.coeff(0) - 1) > 1e-12:
        raise InvalidArgumentError("g(0) must equal 1")
    if g.numerical_degree() > n - 2:
        raise InvalidArgumentError(f"g must have degree at most n − 2 = {n - 2}")
    coeffs = g.analytic_coeffs(n)
    tail = float(np.linalg.norm(coeffs[1:]))
    if tail < 1e-14:
        raise InvalidArgumentError("S*g vanishes")
    if not a > tail ** 2:
        raise InvalidArgumentError(f"need a > ‖S*g‖² = {tail ** 2}")
    first = coeffs.copy()
    first[0] = 0.0
    frame = np.column_stack([first / tail, _unit(n)])
    weights, eigenvectors = scipy.linalg.eigh(np.array([[a, tail], [tail, 1.0]]))
    inverse_root = eigenvectors @ np.diag(weights ** -0.5) @ eigenvectors.T
    root = eigenvectors @ np.diag(weights ** 0.5) @ eigenvectors.T
    complement = np.eye(n) - frame @ frame.conj().T
    X = complement + frame @ inverse_root @ frame.conj().T
    X_inverse = complement + frame @ root @ frame.conj().T
    S = shift_matrix(n)
    T = X @ S @ X_inverse
    dual = X_inverse @ (S - rank_one(_unit(n), g.analytic_coeffs(n + 1)[1:])) @ X
    tag = {"n": n, "a": float(a)}
    return (
        TruncOp(T, n, n - 1, tag={"op": "example55-T", **tag}),
        TruncOp(dual, n, n - 1, tag={"op": "example55-dual", **tag}),
    )
