"""Hardy core - Fourier-side functions on the circle and the basic operator matrices on H².

Functions are represented by their finite Fourier expansions (`TrigPoly`) or by samples on a grid of roots of unity
(`GridFn`). Operators are represented by `TruncOp`, a matrix truncation in the monomial basis {1, χ, χ², ...} of H²
(or of N copies of it) that knows how many of its leading columns agree with the infinite operator.
"""
import base64
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np
import scipy.linalg
import scipy.signal

from shiftlab.exceptions import InvalidArgumentError

LOG = logging.getLogger(__name__)

LOG_MODULUS_FLOOR = -40.0


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """A trigonometric polynomial Σ c_n ζⁿ, lo ≤ n ≤ hi.

    Args:
        coeffs (np.ndarray): coefficient of ζ^(lo + i) at position i
        lo (int): lowest index
    """

    coeffs: np.ndarray
    lo: int = 0

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        if coeffs.size == 0:
            coeffs = np.zeros(1, dtype=complex)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "lo", int(self.lo))

    @classmethod
    def from_dict(cls, mapping: Mapping[int, complex]) -> "TrigPoly":
        """Build a TrigPoly from an {index: coefficient} mapping."""
        if not mapping:
            return cls.constant(0.0)
        lo, hi = min(mapping), max(mapping)
        coeffs = np.zeros(hi - lo + 1, dtype=complex)
        for index, value in mapping.items():
            coeffs[index - lo] = value
        return cls(coeffs, lo)

    @classmethod
    def from_analytic(cls, coeffs: Iterable[complex]) -> "TrigPoly":
        """Build the analytic polynomial Σ_{n≥0} c_n χⁿ."""
        return cls(np.asarray(list(coeffs), dtype=complex), 0)

    @classmethod
    def constant(cls, value: complex) -> "TrigPoly":
        return cls(np.array([value], dtype=complex), 0)

    @classmethod
    def chi(cls, power: int = 1) -> "TrigPoly":
        """The monomial χ^power (power may be negative)."""
        return cls(np.array([1.0], dtype=complex), power)

    @property
    def hi(self) -> int:
        return self.lo + self.coeffs.size - 1

    def coeff(self, index: int) -> complex:
        if self.lo <= index <= self.hi:
            return complex(self.coeffs[index - self.lo])
        return 0j

    def coeff_range(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients for indices lo..hi (inclusive), zero outside the stored band."""
        out = np.zeros(max(hi - lo + 1, 0), dtype=complex)
        start, stop = max(lo, self.lo), min(hi, self.hi)
        if start <= stop:
            out[start - lo : stop - lo + 1] = self.coeffs[start - self.lo : stop - self.lo + 1]
        return out

    def analytic_coeffs(self, length: int) -> np.ndarray:
        """Coefficients of indices 0..length-1."""
        return self.coeff_range(0, length - 1)

    def as_dict(self, tol: float = 0.0) -> Dict[int, complex]:
        return {self.lo + i: complex(c) for i, c in enumerate(self.coeffs) if abs(c) > tol}

    def evaluate(self, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
        """Evaluate Σ c_n zⁿ; z must be nonzero when negative indices are present."""
        points = np.asarray(z, dtype=complex)
        values = np.polynomial.polynomial.polyval(points, self.coeffs) * points ** self.lo
        if np.ndim(values) == 0:
            return complex(values)
        return values

    def norm(self) -> float:
        """L² norm by Parseval."""
        return float(np.linalg.norm(self.coeffs))

    def is_analytic(self, tol: float = 0.0) -> bool:
        if self.lo >= 0:
            return True
        return bool(np.all(np.abs(self.coeffs[: min(-self.lo, self.coeffs.size)]) <= tol))

    def numerical_degree(self, tol: float = 1e-16) -> int:
        """Largest index whose coefficient exceeds tol relative to the largest coefficient."""
        scale = float(np.max(np.abs(self.coeffs)))
        if scale == 0.0:
            return self.lo
        significant = np.flatnonzero(np.abs(self.coeffs) > tol * scale)
        return self.lo + int(significant[-1])

    def trimmed(self, tol: float = 0.0) -> "TrigPoly":
        significant = np.flatnonzero(np.abs(self.coeffs) > tol)
        if significant.size == 0:
            return TrigPoly.constant(0.0)
        return TrigPoly(self.coeffs[significant[0] : significant[-1] + 1], self.lo + int(significant[0]))

    def truncated(self, lo: int, hi: int) -> "TrigPoly":
        return TrigPoly(self.coeff_range(lo, hi), lo)

    def conj(self) -> "TrigPoly":
        """The pointwise conjugate on the circle: index n goes to -n."""
        return TrigPoly(np.conj(self.coeffs[::-1]), -self.hi)

    def shift(self, power: int) -> "TrigPoly":
        """Multiplication by χ^power."""
        return TrigPoly(self.coeffs, self.lo + power)

    def multiply(self, other: "TrigPoly") -> "TrigPoly":
        return TrigPoly(np.convolve(self.coeffs, other.coeffs), self.lo + other.lo)

    def on_grid(self, grid: "UnitGrid") -> "GridFn":
        return GridFn(grid, np.asarray(self.evaluate(grid.points)))

    def __add__(self, other: Any) -> "TrigPoly":
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(other)
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return TrigPoly(self.coeff_range(lo, hi) + other.coeff_range(lo, hi), lo)

    __radd__ = __add__

    def __neg__(self) -> "TrigPoly":
        return TrigPoly(-self.coeffs, self.lo)

    def __sub__(self, other: Any) -> "TrigPoly":
        return self + (-other)

    def __rsub__(self, other: Any) -> "TrigPoly":
        return (-self) + other

    def __mul__(self, other: Any) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            return self.multiply(other)
        return TrigPoly(self.coeffs * complex(other), self.lo)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "TrigPoly":
        return TrigPoly(self.coeffs / complex(scalar), self.lo)

    def __repr__(self) -> str:
        return f"TrigPoly(lo={self.lo}, hi={self.hi}, coeffs={self.as_dict(1e-15)!r})"


@dataclass(frozen=True)
class UnitGrid:
    """The M-th roots of unity e^{2πik/M}, k=0..M-1; M must be a power of two."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 1 or self.size & (self.size - 1):
            raise InvalidArgumentError(f"grid size must be a power of two, got {self.size}")

    @property
    def points(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.size) / self.size)

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.size) / self.size


@dataclass(frozen=True, eq=False)
class GridFn:
    """Samples of a function on a UnitGrid; stands for general bounded symbols."""

    grid: UnitGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=complex).reshape(-1)
        if values.size != self.grid.size:
            raise InvalidArgumentError(f"expected {self.grid.size} samples, got {values.size}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, grid: UnitGrid, func: Callable[[np.ndarray], np.ndarray]) -> "GridFn":
        return cls(grid, func(grid.points))

    def conj(self) -> "GridFn":
        return GridFn(self.grid, np.conj(self.values))

    def __mul__(self, other: Any) -> "GridFn":
        if isinstance(other, GridFn):
            return GridFn(self.grid, self.values * other.values)
        return GridFn(self.grid, self.values * other)

    __rmul__ = __mul__

    def dft(self) -> np.ndarray:
        """Discrete Fourier coefficients, position n holding index n modulo M."""
        return np.fft.fft(self.values) / self.grid.size


Symbol = Union[TrigPoly, GridFn]


def coeffs_from_samples(f: GridFn, lo: int, hi: int) -> TrigPoly:
    """Discrete Fourier coefficients of grid samples for indices lo..hi.

    Args:
        f (GridFn): the samples
        lo (int): lowest index to return
        hi (int): highest index to return
    Returns:
        TrigPoly: exact up to roundoff when f is a trigonometric polynomial with band inside [lo, hi]
    Raises:
        InvalidArgumentError: if the band is wider than the grid
    """
    if hi < lo or hi - lo + 1 > f.grid.size:
        raise InvalidArgumentError(f"band [{lo}, {hi}] does not fit a grid of size {f.grid.size}")
    spectrum = f.dft()
    return TrigPoly(spectrum[np.arange(lo, hi + 1) % f.grid.size], lo)


def riesz_plus(f: TrigPoly) -> TrigPoly:
    """P_+: keep the indices n ≥ 0."""
    if f.hi < 0:
        return TrigPoly.constant(0.0)
    return f.truncated(max(f.lo, 0), f.hi)


def riesz_minus(f: TrigPoly) -> TrigPoly:
    """P_-: keep the indices n < 0."""
    if f.lo >= 0:
        return TrigPoly.constant(0.0)
    return f.truncated(f.lo, min(f.hi, -1))


def symbol_coefficients(symbol: Symbol, lo: int, hi: int) -> np.ndarray:
    """Fourier coefficients of a symbol for indices lo..hi.

    Grid symbols are read cyclically from their discrete spectrum, i.e. treated as band-limited by their grid.
    """
    if isinstance(symbol, TrigPoly):
        return symbol.coeff_range(lo, hi)
    if hi - lo + 1 > symbol.grid.size:
        raise InvalidArgumentError(f"index range [{lo}, {hi}] aliases on a grid of size {symbol.grid.size}")
    return symbol.dft()[np.arange(lo, hi + 1) % symbol.grid.size]


def analytic_bandwidth(symbol: Symbol, n: int, tol: float = 1e-14) -> int:
    """Largest positive index below n carrying a non-negligible coefficient (0 if none)."""
    positive = symbol_coefficients(symbol, 1, max(n - 1, 1))
    scale = max(float(np.max(np.abs(symbol_coefficients(symbol, -(n - 1), n - 1)))), 1.0)
    significant = np.flatnonzero(np.abs(positive) > tol * scale)
    return int(significant[-1]) + 1 if significant.size else 0


@dataclass(frozen=True, eq=False)
class TruncOp:
    """A matrix truncation of an operator on H² or H²_N.

    Rows and columns are ordered copy-major: index c·dim + k is χ^k in copy c. `trust_band` counts the leading
    columns of each copy on which the matrix agrees with the infinite operator.

    Args:
        matrix (np.ndarray): the (copies·dim) × (copies·cols) complex matrix
        dim (int): basis vectors per copy on the row side
        trust_band (int): exact leading columns per copy
        copies (int): the multiplicity N
        tag (dict): JSON-serializable construction descriptor
        basis (str): name of the orthonormal basis the matrix is written in
    """

    matrix: np.ndarray
    dim: int
    trust_band: int
    copies: int = 1
    tag: Dict[str, Any] = field(default_factory=dict)
    basis: str = "monomial"

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != self.dim * self.copies or matrix.shape[1] % self.copies:
            raise InvalidArgumentError(f"matrix shape {matrix.shape} incompatible with dim={self.dim}, N={self.copies}")
        if not 0 <= self.trust_band <= matrix.shape[1] // self.copies:
            raise InvalidArgumentError(f"trust band {self.trust_band} exceeds the column count")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def cols_per_copy(self) -> int:
        return self.matrix.shape[1] // self.copies

    def band_columns(self) -> np.ndarray:
        return np.concatenate(
            [copy * self.cols_per_copy + np.arange(self.trust_band) for copy in range(self.copies)]
        ).astype(int)

    def banded(self) -> np.ndarray:
        """The trusted columns of the matrix."""
        return self.matrix[:, self.band_columns()]

    def with_tag(self, **tag: Any) -> "TruncOp":
        return TruncOp(self.matrix, self.dim, self.trust_band, self.copies, {**self.tag, **tag}, self.basis)

    def to_json(self) -> str:
        """Serialize as a JSON header plus a base64 row-major complex128 payload."""
        payload = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        return json.dumps(
            {
                "tag": self.tag,
                "dim": self.dim,
                "copies": self.copies,
                "trust_band": self.trust_band,
                "basis": self.basis,
                "shape": list(payload.shape),
                "matrix": base64.b64encode(payload.tobytes()).decode("ascii"),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "TruncOp":
        header = json.loads(text)
        matrix = np.frombuffer(base64.b64decode(header["matrix"]), dtype=np.complex128).reshape(header["shape"])
        return cls(matrix.copy(), header["dim"], header["trust_band"], header["copies"], header["tag"], header["basis"])

    def __repr__(self) -> str:
        return (
            f"TruncOp(shape={self.matrix.shape}, copies={self.copies}, trust_band={self.trust_band}, "
            f"tag={self.tag!r})"
        )


def toeplitz_matrix(symbol: Symbol, n: int) -> TruncOp:
    """The n×n matrix [ψ̂(j−k)] of T_ψ h = P_+(ψh) on span{1, χ, …, χ^{n−1}}.

    Args:
        symbol (Union[TrigPoly, GridFn]): the symbol ψ
        n (int): truncation dimension
    Returns:
        TruncOp: column k is exact while k + (analytic bandwidth of ψ) < n
    """
    if n < 1:
        raise InvalidArgumentError("dimension must be positive")
    column = symbol_coefficients(symbol, 0, n - 1)
    row = symbol_coefficients(symbol, -(n - 1), 0)[::-1]
    band = max(0, min(n, n - analytic_bandwidth(symbol, n)))
    return TruncOp(scipy.linalg.toeplitz(column, row), n, band, tag={"op": "toeplitz"})


def block_toeplitz_matrix(symbols: Sequence[Sequence[Symbol]], n: int) -> TruncOp:
    """Block Toeplitz matrix of an N×N matrix symbol in the copy-major layout."""
    copies = len(symbols)
    blocks = [[toeplitz_matrix(entry, n) for entry in row] for row in symbols]
    band = min(block.trust_band for row in blocks for block in row)
    matrix = np.block([[block.matrix for block in row] for row in blocks])
    return TruncOp(matrix, n, band, copies, tag={"op": "block-toeplitz"})


def hankel_matrix(symbol: Symbol, n: int) -> np.ndarray:
    """Matrix of H_ψ h = P_−(ψh): entry (j−1, k) = ψ̂(−j−k), rows indexed by χ̄^j, j=1..n."""
    if n < 1:
        raise InvalidArgumentError("dimension must be positive")
    coefficients = symbol_coefficients(symbol, -(2 * n - 1), -1)[::-1]
    return scipy.linalg.hankel(coefficients[:n], coefficients[n - 1 : 2 * n - 1])


def analytic_multiplication_matrix(coeffs: np.ndarray, rows: int, cols: Optional[int] = None) -> np.ndarray:
    """Truncation of T_f for analytic f with Taylor coefficients `coeffs` (lower triangular Toeplitz)."""
    cols = rows if cols is None else cols
    column = np.zeros(rows, dtype=complex)
    column[: min(rows, len(coeffs))] = coeffs[:rows]
    first_row = np.zeros(cols, dtype=complex)
    first_row[0] = column[0]
    return scipy.linalg.toeplitz(column, first_row)


def rank_one(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Matrix of u⊗v: x ↦ (x, v)u."""
    return np.outer(u, np.conj(v))


def shift_matrix(n: int) -> np.ndarray:
    return np.eye(n, k=-1, dtype=complex)


class OuterFactor(NamedTuple):
    """Result of outer_from_modulus.

    Args:
        poly (TrigPoly): analytic coefficients of the outer function, positive at the origin
        clamped (int): number of samples whose log-modulus hit the floor
        modulus_error (float): max relative boundary-modulus error on the grid
    """

    poly: TrigPoly
    clamped: int
    modulus_error: float


def outer_from_modulus(w: GridFn, length: Optional[int] = None) -> OuterFactor:
    """Outer function with boundary modulus w.

    The log-modulus is completed to an analytic function through its discrete spectrum and exponentiated; the
    result reproduces |w| exactly on the grid and is normalized positive at the origin.

    Args:
        w (GridFn): strictly positive samples
        length (Optional[int]): number of Taylor coefficients to keep, defaults to the grid size
    Returns:
        OuterFactor: the outer polynomial with clamp and modulus-error metadata
    Raises:
        InvalidArgumentError: if a sample is not strictly positive
    """
    modulus = np.real(w.values)
    if np.any(~np.isfinite(modulus)) or np.any(modulus <= 0) or np.any(np.abs(np.imag(w.values)) > 0):
        raise InvalidArgumentError("modulus samples must be finite and strictly positive")
    size = w.grid.size
    log_modulus = np.log(modulus)
    clamped = int(np.count_nonzero(log_modulus < LOG_MODULUS_FLOOR))
    if clamped:
        LOG.warning("log-modulus-clamped", extra={"samples": clamped, "floor": LOG_MODULUS_FLOOR})
        log_modulus = np.maximum(log_modulus, LOG_MODULUS_FLOOR)

    spectrum = np.fft.fft(log_modulus) / size
    completion = np.zeros(size, dtype=complex)
    completion[0] = spectrum[0]
    completion[1 : size // 2] = 2 * spectrum[1 : size // 2]
    if size > 1:
        completion[size // 2] = spectrum[size // 2]
    samples = np.exp(np.fft.ifft(completion) * size)
    coeffs = np.fft.fft(samples) / size

    target = np.exp(log_modulus)
    modulus_error = float(np.max(np.abs(np.abs(samples) - target) / target))
    keep = size if length is None else length
    return OuterFactor(TrigPoly.from_analytic(coeffs[:keep]), clamped, modulus_error)


def sarason_outer(g: TrigPoly, length: int) -> TrigPoly:
    """The outer function 1 − ω where 1/(1 − ω(z)) = ∫ |g|²/(1 − zζ̄) dm and g is normalized to unit norm.

    Since 1/(1 − ω) = P_+|g|², which has positive real part on the disc, 1 − ω is its reciprocal.
    """
    if not g.is_analytic():
        raise InvalidArgumentError("g must be analytic")
    norm = g.norm()
    if norm == 0:
        raise InvalidArgumentError("g must be nonzero")
    unit = g / norm
    positive_part = riesz_plus(unit.multiply(unit.conj())).analytic_coeffs(unit.hi + 1)
    impulse = np.zeros(length, dtype=complex)
    impulse[0] = 1.0
    return TrigPoly.from_analytic(scipy.signal.lfilter([1.0], positive_part, impulse))


def parseval_gap(f: TrigPoly, grid: UnitGrid) -> float:
    """Relative difference between the grid-quadrature L² norm and the coefficient norm."""
    quadrature = float(np.sqrt(np.mean(np.abs(np.asarray(f.evaluate(grid.points))) ** 2)))
    coefficient = f.norm()
    return abs(quadrature - coefficient) / max(coefficient, 1e-300)
