"""Carleson module - boundary geometry of the disc and Blaschke sequences accumulating on small compacts.

The builder places, for every generation n, one point on the center ray of each arc covering the compact K_n, at
depth equal to the arc's half-length. Generation budgets come from a summable sequence δ_k, and the index M_n is
advanced until the remaining tail is smaller than the smallest depth of the generation. That bookkeeping is what
keeps the Carleson box sums bounded by 4.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np
import scipy.optimize

from shiftlab.exceptions import InvalidArgumentError, NumericalFailure

LOG = logging.getLogger(__name__)

ANGLE_TOL = 1e-15


def angular_distance(points: Union[complex, np.ndarray], center: complex) -> np.ndarray:
    """|t| with z/|z| = center·e^{it}, |t| ≤ π."""
    points = np.asarray(points, dtype=complex)
    return np.abs(np.angle(points * np.conj(center)))


@dataclass(frozen=True)
class Arc:
    """Closed arc Δ(ζ, t₀) = {ζe^{it} : |t| ≤ t₀}.

    Args:
        center (complex): ζ on the unit circle
        half_length (float): t₀ in (0, π]
    """

    center: complex
    half_length: float

    def __post_init__(self) -> None:
        if abs(abs(self.center) - 1) > 1e-12:
            raise InvalidArgumentError(f"arc center {self.center} is not on the unit circle")
        if not 0 < self.half_length <= math.pi:
            raise InvalidArgumentError(f"half length {self.half_length} outside (0, π]")
        object.__setattr__(self, "center", complex(self.center) / abs(self.center))

    @property
    def measure_times_pi(self) -> float:
        """π·m(Δ) for normalized Lebesgue measure m, which equals the half-length."""
        return self.half_length

    def contains(self, points: Union[complex, np.ndarray]) -> np.ndarray:
        return angular_distance(points, self.center) <= self.half_length + ANGLE_TOL


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Finite sequence of disc points, optionally tagged by generation.

    Args:
        points (np.ndarray): the points λ, |λ| < 1
        depths (np.ndarray): 1 − |λ| kept exactly when known
        generations (tuple): (n, k) tags, empty when untagged
    """

    points: np.ndarray
    depths: np.ndarray = field(default=None)  # type: ignore[assignment]
    generations: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=complex).reshape(-1)
        if points.size and np.max(np.abs(points)) >= 1:
            raise InvalidArgumentError("zero set points must lie inside the disc")
        depths = 1 - np.abs(points) if self.depths is None else np.array(self.depths, dtype=float).reshape(-1)
        if depths.size != points.size or (self.generations and len(self.generations) != points.size):
            raise InvalidArgumentError("zero set fields have inconsistent lengths")
        points.setflags(write=False)
        depths.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "depths", depths)

    def __len__(self) -> int:
        return int(self.points.size)

    def to_json(self) -> str:
        tags = self.generations or tuple((0, k) for k in range(len(self)))
        return json.dumps(
            [
                {"re": float(point.real), "im": float(point.imag), "generation": n, "arc_index": k}
                for point, (n, k) in zip(self.points, tags)
            ]
        )


class CompactOracle(Protocol):
    """A compact subset of the circle given by covers and samples."""

    name: str

    def cover(self, delta: float) -> List[Arc]:
        """Pairwise-disjoint closed arcs covering the compact with Σ π·m(Δ_k) < delta."""

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Points of the compact."""


class FinitePointSet:
    """A finite set of circle points."""

    def __init__(self, points: Sequence[complex], name: str = "points"):
        self.points = np.array(points, dtype=complex)
        if self.points.size == 0 or np.max(np.abs(np.abs(self.points) - 1)) > 1e-12:
            raise InvalidArgumentError("finite point sets need points on the unit circle")
        self.points = self.points / np.abs(self.points)
        self.name = name

    def _min_gap(self) -> float:
        if self.points.size < 2:
            return math.inf
        distances = np.abs(np.angle(self.points[:, None] * np.conj(self.points[None, :])))
        return float(np.min(distances + np.eye(self.points.size) * 10))

    def cover(self, delta: float) -> List[Arc]:
        half = min(delta / (2 * self.points.size), self._min_gap() / 3, math.pi)
        return [Arc(point, half) for point in self.points]

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        index = rng.choice(self.points.size, size=count, replace=count > self.points.size)
        return self.points[index]


def _cantor_starts(level: int, kept: float, start: float, length: float) -> np.ndarray:
    starts = np.array([start])
    size = length
    for _ in range(level):
        starts = np.concatenate([starts, starts + size * (1 - kept)])
        size *= kept
    return np.sort(starts)


class CantorSet:
    """Middle-α Cantor set on the arc of angles [start, start + length].

    Covers use the level-k construction intervals, so their count grows like 2^k; `max_level` bounds the work.

    Args:
        removed (float): the removed middle fraction α, 0 < α < 1
        start (float): first angle, radians
        length (float): angular length of the base arc, radians
        max_level (int): deepest construction level a cover may use
    """

    def __init__(self, removed: float = 1 / 3, start: float = 0.0, length: float = math.pi, max_level: int = 18):
        if not 0 < removed < 1 or not 0 < length < 2 * math.pi:
            raise InvalidArgumentError("Cantor parameters out of range")
        self.kept = (1 - removed) / 2
        self.start = start
        self.length = length
        self.max_level = max_level
        self.name = f"cantor(removed={removed:g})"

    def cover_measure(self, level: int) -> float:
        return 2 ** level * self.length * self.kept ** level / 2

    def cover(self, delta: float) -> List[Arc]:
        level = 0
        while self.cover_measure(level) >= delta:
            level += 1
            if level > self.max_level:
                raise NumericalFailure(
                    "cantor cover needs too many arcs", {"delta": delta, "max_level": self.max_level}
                )
        size = self.length * self.kept ** level
        starts = _cantor_starts(level, self.kept, self.start, self.length)
        return [Arc(np.exp(1j * (angle + size / 2)), size / 2) for angle in starts]

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        digits = rng.integers(0, 2, size=(count, 48))
        weights = self.length * (1 - self.kept) * self.kept ** np.arange(48)
        return np.exp(1j * (self.start + digits @ weights))


class CantorEndpoints(FinitePointSet):
    """Endpoints of the level-n construction intervals of a middle-α Cantor set (2^{n+1} points)."""

    def __init__(self, level: int, removed: float = 1 / 3, start: float = 0.0, length: float = math.pi):
        kept = (1 - removed) / 2
        starts = _cantor_starts(level, kept, start, length)
        angles = np.concatenate([starts, starts + length * kept ** level])
        super().__init__(np.exp(1j * np.sort(angles)), name=f"cantor-endpoints(level={level})")
        self.level = level


def cantor_chain(
    depth: int, removed: float = 1 / 3, start: float = 0.0, length: float = math.pi
) -> List[CantorEndpoints]:
    """Nested finite compacts K_1 ⊆ … ⊆ K_depth inside the Cantor set."""
    return [CantorEndpoints(level, removed, start, length) for level in range(1, depth + 1)]


@dataclass(frozen=True)
class GeometricBudget:
    """δ_k = scale·ratio^k for k ≥ 1, with closed-form tails."""

    scale: float = 1.0
    ratio: float = 0.25

    def __post_init__(self) -> None:
        if not (self.scale > 0 and 0 < self.ratio < 1):
            raise InvalidArgumentError("budget needs scale > 0 and 0 < ratio < 1")

    def delta(self, k: int) -> float:
        return self.scale * self.ratio ** k

    def tail(self, start: int) -> float:
        """Σ_{k ≥ start} δ_k."""
        return self.scale * self.ratio ** start / (1 - self.ratio)

    def total(self) -> float:
        return self.tail(1)


@dataclass(frozen=True)
class GenerationAudit:
    generation: int
    count: int
    eps_min: float
    eps_max: float
    next_index: int
    delta_budget: float
    cover_measure: float

    def to_dict(self) -> dict:
        return {
            "generation": self.generation,
            "N_n": self.count,
            "eps_min": self.eps_min,
            "eps_max": self.eps_max,
            "M_n": self.next_index,
            "delta_budget": self.delta_budget,
            "cover_measure": self.cover_measure,
        }


@dataclass(frozen=True, eq=False)
class LambdaBuild:
    """Result of build_lambda: the points, their arcs and the per-generation audit trail."""

    zeros: ZeroSet
    arcs: Tuple[Arc, ...]
    audit: Tuple[GenerationAudit, ...]
    budget: GeometricBudget

    def audit_json(self) -> str:
        return json.dumps([entry.to_dict() for entry in self.audit])


def _audit_cover(arcs: List[Arc], delta: float, generation: int) -> float:
    measure = math.fsum(arc.measure_times_pi for arc in arcs)
    if not arcs or measure >= delta:
        raise NumericalFailure(
            "cover violates its measure budget", {"generation": generation, "measure": measure, "delta": delta}
        )
    ordered = sorted(arcs, key=lambda arc: float(np.mod(np.angle(arc.center), 2 * math.pi)))
    for first, second in zip(ordered, ordered[1:] + ordered[:1]):
        if first is second:
            continue
        gap = float(angular_distance(second.center, first.center))
        if gap <= first.half_length + second.half_length:
            raise NumericalFailure("cover arcs overlap", {"generation": generation, "gap": gap})
    return measure


def build_lambda(
    compacts: Sequence[CompactOracle],
    budget: GeometricBudget,
    depth: int,
    nesting_samples: int = 16,
    seed: int = 0,
) -> LambdaBuild:
    """Generate the zero set generation by generation.

    Args:
        compacts (Sequence[CompactOracle]): K_1 ⊆ K_2 ⊆ …; the last oracle is reused past the end of the list
        budget (GeometricBudget): the summable sequence δ_k
        depth (int): number of generations D
        nesting_samples (int): points of K_{n−1} checked against the cover of K_n
        seed (int): seed of the nesting spot-check sampler
    Returns:
        LambdaBuild: points tagged (n, k), arcs and audit trail
    Raises:
        NumericalFailure: when a cover breaks its budget, overlaps, or misses points of the previous compact
    """
    if depth < 1 or not compacts:
        raise InvalidArgumentError("need at least one compact and one generation")
    rng = np.random.default_rng(seed)
    previous_index, previous_min = 1, math.inf
    points: List[complex] = []
    depths: List[float] = []
    tags: List[Tuple[int, int]] = []
    all_arcs: List[Arc] = []
    audit: List[GenerationAudit] = []

    for generation in range(1, depth + 1):
        compact = compacts[min(generation, len(compacts)) - 1]
        delta_budget = budget.delta(previous_index)
        arcs = list(compact.cover(delta_budget))
        measure = _audit_cover(arcs, delta_budget, generation)
        if generation > 1 and nesting_samples:
            earlier = compacts[min(generation - 1, len(compacts)) - 1].sample(nesting_samples, rng)
            covered = np.any(np.array([arc.contains(earlier) for arc in arcs]), axis=0)
            if not np.all(covered):
                raise NumericalFailure("compacts are not nested", {"generation": generation})

        eps = np.array([arc.half_length for arc in arcs])
        minimal = np.flatnonzero(eps <= eps.min() * (1 + 1e-12))
        # the minimal depth goes last; ties resolved toward the last index
        last = int(minimal[-1])
        arcs.append(arcs.pop(last))
        eps = np.array([arc.half_length for arc in arcs])
        if eps.max() >= previous_min:
            raise NumericalFailure(
                "generation depths are not below the previous generation",
                {"generation": generation, "eps_max": float(eps.max()), "previous_min": previous_min},
            )

        eps_min = float(eps[-1])
        next_index = previous_index + 1
        while budget.tail(next_index) >= eps_min:
            next_index += 1

        for k, arc in enumerate(arcs, start=1):
            points.append((1 - arc.half_length) * arc.center)
            depths.append(arc.half_length)
            tags.append((generation, k))
        all_arcs.extend(arcs)
        audit.append(
            GenerationAudit(generation, len(arcs), eps_min, float(eps.max()), next_index, delta_budget, measure)
        )
        LOG.debug("generation-built", extra={"generation": generation, "count": len(arcs), "M_n": next_index})
        previous_index, previous_min = next_index, eps_min

    zeros = ZeroSet(np.array(points), np.array(depths), tuple(tags))
    return LambdaBuild(zeros, tuple(all_arcs), tuple(audit), budget)


def generation_monotone(build: LambdaBuild) -> bool:
    """ε_{n,N_n} ≤ ε_{n,k} < ε_{n−1,N_{n−1}} on the whole trail."""
    tags = np.array(build.zeros.generations)
    for entry, previous in zip(build.audit, (None,) + build.audit[:-1]):
        eps = build.zeros.depths[tags[:, 0] == entry.generation]
        if eps[-1] != entry.eps_min or np.any(eps < entry.eps_min):
            return False
        if previous is not None and np.any(eps >= previous.eps_min):
            return False
    return True


def stolz_mask(vertex: complex, half_angle: float, z: Union[complex, np.ndarray]) -> np.ndarray:
    """Vectorized stolz_membership."""
    z = np.asarray(z, dtype=complex)
    offset = 1 - z * np.conj(vertex)
    inside = np.abs(np.angle(offset)) <= half_angle + ANGLE_TOL
    return inside | (np.abs(offset) == 0)


def stolz_membership(vertex: complex, half_angle: float, z: complex) -> bool:
    """True iff z lies in the closed sector of half-angle s at the vertex, symmetric about the radius."""
    return bool(stolz_mask(vertex, half_angle, z))


def t_of_s_r(s0: float, r0: float) -> float:
    """The small solution t of tan s₀ = r₀ sin t/(1 − r₀ cos t).

    Raises:
        NumericalFailure: when the sector's rays miss the circle |z| = r₀ (out of range)
    """
    if not 0 < r0 < 1 or not 0 < s0 < math.pi / 2:
        raise InvalidArgumentError("need 0 < r0 < 1 and 0 < s0 < π/2")
    slope = math.tan(s0)
    if slope > r0 / math.sqrt(1 - r0 * r0):
        raise NumericalFailure("out-of-range: the Stolz rays miss the circle", {"s0": s0, "r0": r0})
    peak = math.acos(r0)

    def equation(t: float) -> float:
        return r0 * math.sin(t) - slope * (1 - r0 * math.cos(t))

    if equation(peak) == 0:
        return peak
    return float(scipy.optimize.brentq(equation, 0.0, peak, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200))


def s_of_epsilon(eps: float) -> float:
    """s(ε) with tan s(ε) = (1−ε) sin ε/(1 − (1−ε) cos ε)."""
    if not 0 < eps < 1:
        raise InvalidArgumentError("need 0 < ε < 1")
    return math.atan2((1 - eps) * math.sin(eps), 1 - (1 - eps) * math.cos(eps))


def approach_distance_bound(eps: float) -> float:
    """sqrt(ε² + 2(1−ε)(1 − cos ε)), the bound on |ζ − (1−ε)ζ₀| for ζ ∈ Δ(ζ₀, ε)."""
    return math.sqrt(eps * eps + 2 * (1 - eps) * (1 - math.cos(eps)))


def blaschke_sum(zeros: ZeroSet) -> float:
    """Σ (1 − |λ|)."""
    return math.fsum(zeros.depths)


def canonical_probes(centers: int = 64, sizes: int = 16) -> List[Tuple[complex, float]]:
    """Equispaced centers times dyadic box sizes s = 2^{-j}, j = 1..sizes."""
    points = np.exp(2j * np.pi * np.arange(centers) / centers)
    return [(complex(point), 2.0 ** -j) for point in points for j in range(1, sizes + 1)]


def audit_probes(build: LambdaBuild, scales: Sequence[float] = (1.0, 2.0, 4.0)) -> List[Tuple[complex, float]]:
    """Probes centered on every generated arc at multiples of the arc's own depth."""
    return [
        (arc.center, factor * arc.half_length)
        for arc in build.arcs
        for factor in scales
        if factor * arc.half_length < 1
    ]


def carleson_box_sup(zeros: ZeroSet, probes: Sequence[Tuple[complex, float]]) -> float:
    """max over probes (ζ, s) of (1/s)·Σ_{λ ∈ Q(ζ,s)} (1 − |λ|)."""
    best = 0.0
    if not len(zeros):
        return best
    for center, size in probes:
        if not 0 < size < 1:
            raise InvalidArgumentError(f"probe size {size} outside (0, 1)")
        inside = (zeros.depths <= size) & (angular_distance(zeros.points, center) <= size + ANGLE_TOL)
        best = max(best, math.fsum(zeros.depths[inside]) / size)
    return best


def certificate_radii(build: LambdaBuild, from_generation: int = 1) -> List[float]:
    """Radii 1 − max_k ε_{n,k} for generations n ≥ from_generation, decreasing in depth."""
    return [1 - entry.eps_max for entry in build.audit if entry.generation >= from_generation]


def nontangential_accumulation(zeros: ZeroSet, zeta: complex, s: float, radii: Sequence[float]) -> bool:
    """True iff for every r in radii some λ ∈ Λ ∩ S(ζ, s) has 1 − |λ| ≤ 1 − r and |ζ − λ| ≤ 2(1 − r)."""
    if not len(zeros):
        return False
    in_sector = stolz_mask(zeta, s, zeros.points)
    distance = np.abs(zeta - zeros.points)
    for radius in radii:
        scale = 1 - radius
        if not np.any(in_sector & (zeros.depths <= scale) & (distance <= 2 * scale)):
            return False
    return True


def sample_points(compact: CompactOracle, count: int, seed: Optional[int] = None) -> np.ndarray:
    return compact.sample(count, np.random.default_rng(seed))
