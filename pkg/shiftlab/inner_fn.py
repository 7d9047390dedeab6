"""Inner functions - finite Blaschke products, Frostman shifts, model spaces and Clark measures."""
import json
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.signal

from shiftlab.exceptions import InvalidArgumentError, NumericalFailure, UnsupportedError
from shiftlab.hardy_core import TrigPoly

LOG = logging.getLogger(__name__)

ORIGIN_TOL = 1e-10
POLISH_TOL = 1e-13
TAIL_TOL = 1e-18
MAX_COEFFICIENTS = 4096

Zero = Tuple[complex, int]
Evaluator = Callable[[Union[complex, np.ndarray]], Union[complex, np.ndarray]]


def _polymul_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    product = np.array([1.0 + 0j])
    for factor in factors:
        product = np.polynomial.polynomial.polymul(product, factor)
    return product


def _rational_taylor(numerator: np.ndarray, denominator: np.ndarray, length: int) -> np.ndarray:
    impulse = np.zeros(length, dtype=complex)
    impulse[0] = 1.0
    return scipy.signal.lfilter(numerator, denominator, impulse)


@dataclass(frozen=True)
class BlaschkeProduct:
    """A finite Blaschke product phase·Π b_λ^m with b_λ(z) = |λ|/λ·(λ−z)/(1−λ̄z) and b_0(z) = z.

    Args:
        zeros (tuple): pairs (λ, multiplicity) with |λ| < 1; zeros at the origin are kept first
        phase (complex): unimodular constant factor
    """

    zeros: Tuple[Zero, ...] = ()
    phase: complex = 1.0

    def __post_init__(self) -> None:
        merged: List[Zero] = []
        for value, multiplicity in self.zeros:
            value = complex(value)
            if abs(value) >= 1:
                raise InvalidArgumentError(f"zero {value} is not inside the disc")
            if int(multiplicity) < 1:
                raise InvalidArgumentError(f"multiplicity of {value} must be positive")
            if abs(value) < ORIGIN_TOL:
                value = 0j
            for index, (known, count) in enumerate(merged):
                if known == value:
                    merged[index] = (known, count + int(multiplicity))
                    break
            else:
                merged.append((value, int(multiplicity)))
        merged.sort(key=lambda item: item[0] != 0)
        if abs(abs(complex(self.phase)) - 1) > 1e-12:
            raise InvalidArgumentError("phase must be unimodular")
        object.__setattr__(self, "zeros", tuple(merged))
        object.__setattr__(self, "phase", complex(self.phase))

    @classmethod
    def from_zeros(cls, values: Sequence[complex], phase: complex = 1.0) -> "BlaschkeProduct":
        """Build from a flat list of zeros, repeated entries counting as multiplicity."""
        return cls(tuple((value, 1) for value in values), phase)

    @classmethod
    def from_polynomial_roots(cls, coeffs: Sequence[complex]) -> "BlaschkeProduct":
        """The inner factor of an analytic polynomial (ascending coefficients): its zeros inside the disc."""
        trimmed = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
        if trimmed.size < 2:
            return cls()
        roots = np.polynomial.polynomial.polyroots(trimmed)
        return cls.from_zeros([complex(root) for root in roots if abs(root) < 1])

    @classmethod
    def monomial(cls, power: int) -> "BlaschkeProduct":
        return cls(((0j, power),) if power else ())

    @property
    def degree(self) -> int:
        return sum(multiplicity for _, multiplicity in self.zeros)

    @property
    def origin_multiplicity(self) -> int:
        return sum(multiplicity for value, multiplicity in self.zeros if value == 0)

    @property
    def flat_zeros(self) -> List[complex]:
        return [value for value, multiplicity in self.zeros for _ in range(multiplicity)]

    @property
    def max_modulus(self) -> float:
        return max((abs(value) for value, _ in self.zeros), default=0.0)

    def numerator(self) -> np.ndarray:
        """Ascending coefficients of P with B = P/Q, the phase included."""
        factors = [
            np.array([0j, 1.0]) if value == 0 else abs(value) / value * np.array([value, -1.0])
            for value in self.flat_zeros
        ]
        return self.phase * _polymul_all(factors)

    def denominator(self) -> np.ndarray:
        """Ascending coefficients of Q = Π(1 − λ̄z)."""
        return _polymul_all([np.array([1.0, -np.conj(value)]) for value in self.flat_zeros if value != 0])

    def __call__(self, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
        points = np.asarray(z, dtype=complex)
        value = np.full(points.shape, self.phase, dtype=complex)
        for zero, multiplicity in self.zeros:
            if zero == 0:
                factor = points
            else:
                factor = abs(zero) / zero * (zero - points) / (1 - np.conj(zero) * points)
            value = value * factor ** multiplicity
        if value.ndim == 0:
            return complex(value)
        return value

    def derivative(self, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
        """B'(z) through the logarithmic derivative; z must avoid the zeros."""
        points = np.asarray(z, dtype=complex)
        log_derivative = np.zeros(points.shape, dtype=complex)
        for zero, multiplicity in self.zeros:
            if zero == 0:
                log_derivative = log_derivative + multiplicity / points
            else:
                log_derivative = log_derivative + multiplicity * (abs(zero) ** 2 - 1) / (
                    (zero - points) * (1 - np.conj(zero) * points)
                )
        value = np.asarray(self(points)) * log_derivative
        if value.ndim == 0:
            return complex(value)
        return value

    def at_origin(self) -> complex:
        if self.origin_multiplicity:
            return 0j
        return self.phase * math.prod(abs(value) ** multiplicity for value, multiplicity in self.zeros)

    def decay_length(self, tol: float = TAIL_TOL) -> int:
        """Number of Taylor coefficients after which the tail of any model-space vector is below tol."""
        radius = max((abs(value) for value, _ in self.zeros if value != 0), default=0.0)
        if radius == 0.0:
            return self.degree + 1
        length = int(math.ceil(math.log(tol) / math.log(radius))) + 2 * self.degree + 8
        if length > MAX_COEFFICIENTS:
            LOG.warning("taylor-length-capped", extra={"requested": length, "cap": MAX_COEFFICIENTS})
            length = MAX_COEFFICIENTS
        return length

    def taylor(self, length: int) -> np.ndarray:
        """The first `length` Taylor coefficients, exact up to roundoff."""
        return _rational_taylor(self.numerator(), self.denominator(), length)

    def poly(self, length: int) -> TrigPoly:
        return TrigPoly.from_analytic(self.taylor(length))

    def times(self, other: "BlaschkeProduct") -> "BlaschkeProduct":
        return BlaschkeProduct(self.zeros + other.zeros, self.phase * other.phase)

    def to_dict(self) -> dict:
        return {
            "zeros": [[value.real, value.imag, multiplicity] for value, multiplicity in self.zeros],
            "phase": [self.phase.real, self.phase.imag],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BlaschkeProduct":
        zeros = tuple((complex(re, im), int(multiplicity)) for re, im, multiplicity in data.get("zeros", []))
        phase = data.get("phase", [1.0, 0.0])
        return cls(zeros, complex(phase[0], phase[1]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BlaschkeProduct":
        return cls.from_dict(json.loads(text))


def blaschke_eval(B: BlaschkeProduct, z: complex) -> complex:
    """Evaluate B at a point of the closed disc."""
    if abs(z) > 1 + 1e-12:
        raise InvalidArgumentError(f"{z} lies outside the closed disc")
    return complex(B(z))


def _blaschke_from_rational(numerator: np.ndarray, evaluate: Evaluator, degree_hint: int) -> BlaschkeProduct:
    """Recover the Blaschke product whose zeros are the roots of `numerator`, fixing its phase from `evaluate`."""
    trimmed = np.trim_zeros(numerator, "b")
    roots = np.polynomial.polynomial.polyroots(trimmed) if trimmed.size > 1 else np.array([], dtype=complex)
    roots = np.where(np.abs(roots) < ORIGIN_TOL, 0j, roots)
    if np.any(np.abs(roots) >= 1):
        raise NumericalFailure("rational function has zeros outside the disc", {"roots": [str(r) for r in roots]})
    if roots.size != degree_hint:
        LOG.warning("blaschke-degree-mismatch", extra={"expected": degree_hint, "found": int(roots.size)})
    unphased = BlaschkeProduct.from_zeros(list(roots))
    probes = 0.5 * np.exp(2j * np.pi * (np.arange(7) + 0.5) / 7)
    reference = np.asarray(unphased(probes))
    best = int(np.argmax(np.abs(reference)))
    ratio = complex(np.asarray(evaluate(probes[best]))) / reference[best]
    return BlaschkeProduct(unphased.zeros, ratio / abs(ratio))


def frostman_shift(theta_eval: Evaluator, a: complex) -> Evaluator:
    """θ_a = (θ − a)/(1 − āθ) as a function handle.

    Args:
        theta_eval (callable): an inner function, unimodular on the circle
        a (complex): the shift parameter, 0 < |a| < 1
    Returns:
        callable: the pointwise Möbius transform of theta_eval
    Raises:
        InvalidArgumentError: unless 0 < |a| < 1
    """
    if not 0 < abs(a) < 1:
        raise InvalidArgumentError(f"Frostman parameter must satisfy 0 < |a| < 1, got {a}")

    def shifted(z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
        value = theta_eval(z)
        return (value - a) / (1 - np.conj(a) * value)

    return shifted


def frostman_blaschke(B: BlaschkeProduct, a: complex) -> BlaschkeProduct:
    """θ_a for a finite Blaschke product, again a finite Blaschke product of the same degree."""
    shifted = frostman_shift(B, a)
    numerator = np.polynomial.polynomial.polysub(B.numerator(), a * B.denominator())
    return _blaschke_from_rational(numerator, shifted, B.degree)


def frostman_bound(a: complex) -> float:
    """Upper bound 2|a|/(1 − |a|) for sup |θ − θ_a|."""
    return 2 * abs(a) / (1 - abs(a))


@dataclass(frozen=True, eq=False)
class ModelBasis:
    """Orthonormal Takenaka–Malmquist basis of K_θ = H² ⊖ θH².

    Basis vector k is √(1−|λ_k|²)/(1−λ̄_k z)·Π_{j<k} b_{λ_j}; zeros at the origin come first and give monomials.

    Args:
        theta (BlaschkeProduct): the inner function
        vectors (tuple): the basis as analytic TrigPoly truncations of `length` coefficients
        length (int): number of Taylor coefficients kept per vector
    """

    theta: BlaschkeProduct
    vectors: Tuple[TrigPoly, ...]
    length: int

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def matrix(self, length: Optional[int] = None) -> np.ndarray:
        """Coefficient matrix (length × dim), one basis vector per column."""
        return takenaka_malmquist(self.theta.flat_zeros, self.length if length is None else length)

    def coordinates(self, coeffs: np.ndarray) -> np.ndarray:
        """Inner products of coefficient vectors (rows = Taylor index) against the basis."""
        basis = self.matrix(coeffs.shape[0])
        return basis.conj().T @ coeffs


def takenaka_malmquist(zeros: Sequence[complex], length: int) -> np.ndarray:
    """Taylor coefficient matrix (length × len(zeros)) of the Takenaka–Malmquist system for the ordered zeros."""
    columns = []
    for index, zero in enumerate(zeros):
        previous = BlaschkeProduct.from_zeros(list(zeros[:index]))
        numerator = math.sqrt(1 - abs(zero) ** 2) * previous.numerator()
        denominator = np.polynomial.polynomial.polymul(previous.denominator(), np.array([1.0, -np.conj(zero)]))
        columns.append(_rational_taylor(numerator, denominator, length))
    if not columns:
        return np.zeros((length, 0), dtype=complex)
    return np.column_stack(columns)


def model_basis(B: BlaschkeProduct, length: Optional[int] = None) -> ModelBasis:
    """Exact orthonormal basis of K_B.

    Args:
        B (BlaschkeProduct): zeros away from the origin must be simple
        length (Optional[int]): Taylor coefficients per vector, defaults to B.decay_length()
    Returns:
        ModelBasis: degree(B) orthonormal vectors spanning K_B
    Raises:
        UnsupportedError: for repeated zeros away from the origin
    """
    repeated = [value for value, multiplicity in B.zeros if value != 0 and multiplicity > 1]
    if repeated:
        raise UnsupportedError(f"repeated zeros away from the origin are not supported: {repeated}")
    length = B.decay_length() if length is None else length
    matrix = takenaka_malmquist(B.flat_zeros, length)
    vectors = tuple(TrigPoly.from_analytic(matrix[:, k]) for k in range(matrix.shape[1]))
    return ModelBasis(B, vectors, length)


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many atoms on the circle with positive weights.

    Args:
        atoms (tuple): pairs (ζ, w), |ζ| = 1, w > 0
    """

    atoms: Tuple[Tuple[complex, float], ...]

    def __post_init__(self) -> None:
        atoms = []
        for point, weight in self.atoms:
            point = complex(point)
            if abs(abs(point) - 1) > 1e-9:
                raise InvalidArgumentError(f"atom {point} is not on the unit circle")
            if not weight > 0:
                raise InvalidArgumentError(f"atom weight {weight} is not positive")
            atoms.append((point / abs(point), float(weight)))
        object.__setattr__(self, "atoms", tuple(atoms))

    @classmethod
    def from_angles(cls, angles_over_pi: Sequence[float], weights: Sequence[float]) -> "AtomicMeasure":
        return cls(tuple((np.exp(1j * np.pi * angle), weight) for angle, weight in zip(angles_over_pi, weights)))

    @property
    def points(self) -> np.ndarray:
        return np.array([point for point, _ in self.atoms], dtype=complex)

    @property
    def weights(self) -> np.ndarray:
        return np.array([weight for _, weight in self.atoms])

    def total(self) -> float:
        return float(np.sum(self.weights))

    def to_dict(self) -> dict:
        return {"atoms": [[float(np.angle(point) / np.pi), weight] for point, weight in self.atoms]}

    @classmethod
    def from_dict(cls, data: dict) -> "AtomicMeasure":
        pairs = data.get("atoms", [])
        return cls.from_angles([angle for angle, _ in pairs], [weight for _, weight in pairs])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "AtomicMeasure":
        return cls.from_dict(json.loads(text))


def _angle_order(points: np.ndarray) -> np.ndarray:
    angles = np.mod(np.angle(points), 2 * np.pi)
    angles = np.where(angles > 2 * np.pi - 1e-12, 0.0, angles)
    return np.argsort(angles, kind="stable")


class ClarkInner(NamedTuple):
    """Inner function recovered from a Clark measure.

    Args:
        evaluate (callable): z ↦ 1 − 1/Σ w_j/(1 − zζ̄_j)
        blaschke (BlaschkeProduct): the same function as a finite Blaschke product
        poly (TrigPoly): its Taylor truncation
    """

    evaluate: Evaluator
    blaschke: BlaschkeProduct
    poly: TrigPoly


def clark_inner_from_measure(nu: AtomicMeasure, length: int = 1024) -> ClarkInner:
    """The inner θ with 1/(1 − θ(z)) = ∫ 1/(1 − zζ̄) dν(ζ).

    Args:
        nu (AtomicMeasure): distinct atoms with total mass 1
        length (int): Taylor coefficients in the returned truncation
    Returns:
        ClarkInner: θ as a function handle, a BlaschkeProduct and a TrigPoly
    Raises:
        InvalidArgumentError: if the total mass differs from 1 or atoms repeat
    """
    if abs(nu.total() - 1) > 1e-10:
        raise InvalidArgumentError(f"a Clark measure has total mass 1, got {nu.total()!r}")
    points, weights = nu.points, nu.weights
    if len(points) > 1 and np.min(np.abs(points[:, None] - points[None, :]) + np.eye(len(points))) < 1e-12:
        raise InvalidArgumentError("atoms must be distinct")

    def evaluate(z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
        values = np.asarray(z, dtype=complex)
        cauchy = np.sum(weights / (1 - values[..., None] * np.conj(points)), axis=-1)
        result = 1 - 1 / cauchy
        if result.ndim == 0:
            return complex(result)
        return result

    factors = [np.array([1.0, -np.conj(point)]) for point in points]
    denominator = _polymul_all(factors)
    numerator = np.zeros(len(points) + 1, dtype=complex)
    for index, weight in enumerate(weights):
        numerator[: len(points)] += weight * _polymul_all(factors[:index] + factors[index + 1 :])
    difference = numerator - denominator
    # θ(0) = 0: the constant term is Σw − 1
    difference[0] = 0.0
    blaschke = _blaschke_from_rational(difference, evaluate, len(points))
    LOG.debug("clark-inner-recovered", extra={"degree": blaschke.degree})
    return ClarkInner(evaluate, blaschke, blaschke.poly(length))


def clark_measure_from_blaschke(B: BlaschkeProduct) -> AtomicMeasure:
    """The Clark measure of B: atoms solve B(ζ) = 1, weights are the residues 1/(ζB'(ζ)) of 1/(1 − B).

    Args:
        B (BlaschkeProduct): with B(0) = 0
    Returns:
        AtomicMeasure: degree(B) atoms ordered by angle in [0, 2π)
    Raises:
        InvalidArgumentError: if B(0) ≠ 0
    """
    if not B.origin_multiplicity:
        raise InvalidArgumentError("the Clark measure is defined for B(0) = 0")
    difference = np.trim_zeros(np.polynomial.polynomial.polysub(B.numerator(), B.denominator()), "b")
    roots = np.polynomial.polynomial.polyroots(difference)
    points = roots / np.abs(roots)
    for _ in range(50):
        residual = np.asarray(B(points)) - 1
        if np.max(np.abs(residual)) < POLISH_TOL:
            break
        points = points - residual / np.asarray(B.derivative(points))
        points = points / np.abs(points)
    else:
        LOG.warning("clark-polish-not-converged", extra={"residual": float(np.max(np.abs(np.asarray(B(points)) - 1)))})
    residues = 1 / (points * np.asarray(B.derivative(points)))
    if np.max(np.abs(residues.imag)) > 1e-8 * np.max(np.abs(residues)):
        LOG.warning("clark-weights-not-real", extra={"imag": float(np.max(np.abs(residues.imag)))})
    order = _angle_order(points)
    return AtomicMeasure(tuple((points[k], float(residues[k].real)) for k in order))


@dataclass(frozen=True, eq=False)
class AdaptedFrame:
    """Orthonormal frame K_β ⊕ βK_θ ⊕ {θβχ^k} of H², truncated to n vectors.

    Args:
        theta (BlaschkeProduct): θ
        beta (BlaschkeProduct): β
        n (int): number of frame vectors kept
        length (int): Taylor coefficients per vector
        vectors (np.ndarray): length × n coefficient matrix, one frame vector per column
        gram_error (float): max |Q*Q − I|
    """

    theta: BlaschkeProduct
    beta: BlaschkeProduct
    n: int
    length: int
    vectors: np.ndarray
    gram_error: float

    @property
    def q(self) -> int:
        return self.beta.degree

    @property
    def p(self) -> int:
        return self.theta.degree

    @property
    def d(self) -> int:
        return self.p + self.q

    def coordinates(self, coeffs: np.ndarray) -> np.ndarray:
        """Frame coordinates of coefficient vectors (rows = Taylor index, padded or cut to the frame length)."""
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None]
        rows = min(coeffs.shape[0], self.length)
        return self.vectors[:rows].conj().T @ coeffs[:rows]


def convolve_columns(coeffs: np.ndarray, multiplier: np.ndarray, length: int) -> np.ndarray:
    """Taylor coefficients of multiplier·column for each column, truncated to length."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim == 1:
        return np.convolve(multiplier[:length], coeffs[:length])[:length]
    return np.column_stack(
        [np.convolve(multiplier[:length], coeffs[:length, k])[:length] for k in range(coeffs.shape[1])]
    )


def shifted_columns(coeffs: np.ndarray, powers: Sequence[int], length: int) -> np.ndarray:
    """Columns χ^k·coeffs for each k in powers."""
    out = np.zeros((length, len(powers)), dtype=complex)
    for column, power in enumerate(powers):
        out[power:, column] = coeffs[: max(length - power, 0)]
    return out


def adapted_frame(theta: BlaschkeProduct, beta: BlaschkeProduct, n: int) -> AdaptedFrame:
    """Build the frame in which θβH², βK_θ and K_β are coordinate subspaces.

    Args:
        theta (BlaschkeProduct): θ
        beta (BlaschkeProduct): β
        n (int): frame size, larger than deg θ + deg β
    Returns:
        AdaptedFrame: the orthonormal frame
    Raises:
        InvalidArgumentError: if n does not leave room for θβH²
    """
    d = theta.degree + beta.degree
    if n <= d:
        raise InvalidArgumentError(f"frame size {n} must exceed deg θβ = {d}")
    length = n + max(theta.decay_length(), beta.decay_length(), d + 1)
    beta_coeffs = beta.taylor(length)
    product_coeffs = theta.times(beta).taylor(length)
    blocks = [
        model_basis(beta, length).matrix(),
        convolve_columns(model_basis(theta, length).matrix(), beta_coeffs, length),
        shifted_columns(product_coeffs, list(range(n - d)), length),
    ]
    vectors = np.column_stack(blocks)
    gram_error = float(np.max(np.abs(vectors.conj().T @ vectors - np.eye(n))))
    if gram_error > 1e-10:
        LOG.warning("adapted-frame-not-orthonormal", extra={"gram_error": gram_error, "n": n})
    vectors.setflags(write=False)
    return AdaptedFrame(theta, beta, n, length, vectors, gram_error)
