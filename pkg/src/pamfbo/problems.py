"""Benchmark problems with fidelity hierarchies.

Each problem is a `MultifidelityProblem`: a box of design bounds, one
evaluator per fidelity level (lowest first), the cost ratio of every level
relative to the top one, and the coordinates the physics bias reads (psi).

- ``forrester``: the classic 1-D pair, analytic and cheap.
- ``cross_regime``: shape weights plus a Mach number; the low-fidelity models
  lose accuracy as the flow approaches transonic conditions, while the
  high-fidelity response has its optimum there.
- ``plate_identification``: inverse identification of a damaged plate from a
  strain field; the coarse low-fidelity field cannot tell a short cut under a
  large load from a long cut under a moderate one.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from scipy.optimize import minimize

from pamfbo.constants import DISCREPANCY_FLOOR
from pamfbo.errors import ConfigurationError, DimensionError, DomainError, EvaluatorError
from pamfbo.models import CrossRegimeSpec, ForresterSpec, KnownPoint, PlateIdentificationSpec, ProblemManifest, ProblemSpec
from pamfbo.sampling import SeedLike, latin_hypercube

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], float]
Normalization = Literal["reference", "reference_squared"]


@dataclass(frozen=True)
class MultifidelityProblem:
    """A design space with an ordered hierarchy of evaluators.

    Level ``l`` (1-based) is evaluated by ``evaluators[l - 1]`` at relative
    cost ``cost_ratios[l - 1]``; the last ratio is 1.
    """

    name: str
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    evaluators: tuple[Evaluator, ...] = field(repr=False)
    cost_ratios: tuple[float, ...]
    coordinate_names: tuple[str, ...]
    psi_indices: tuple[int, ...] = ()
    psi_description: str = "none"
    description: str = ""
    optimum: tuple[tuple[float, ...], float] | None = None
    ground_truth: tuple[float, ...] | None = None
    baseline: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        d = len(self.lower)
        if d == 0 or len(self.upper) != d or len(self.coordinate_names) != d:
            raise DimensionError(f"problem '{self.name}' has inconsistent bounds or coordinate names")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper, strict=True)):
            raise DomainError(f"problem '{self.name}' bounds must satisfy lower < upper")
        if len(self.evaluators) != len(self.cost_ratios) or not self.evaluators:
            raise ConfigurationError(f"problem '{self.name}' has {len(self.evaluators)} evaluators but {len(self.cost_ratios)} cost ratios")
        if self.cost_ratios[-1] != 1.0:
            raise ConfigurationError(f"the top-level cost ratio must be 1, got {self.cost_ratios[-1]}")
        if any(a >= b for a, b in zip(self.cost_ratios, self.cost_ratios[1:], strict=False)) or self.cost_ratios[0] <= 0:
            raise ConfigurationError(f"cost ratios must be positive and strictly increasing, got {list(self.cost_ratios)}")
        if any(not -d <= i < d for i in self.psi_indices):
            raise DimensionError(f"psi index outside the {d}-dimensional design vector: {list(self.psi_indices)}")

    @property
    def dimension(self) -> int:
        return len(self.lower)

    @property
    def levels(self) -> int:
        return len(self.evaluators)

    @property
    def bounds(self) -> np.ndarray:
        return np.column_stack([self.lower, self.upper])

    def contains(self, x: Sequence[float]) -> bool:
        point = np.asarray(x, dtype=float)
        return point.shape == (self.dimension,) and bool(np.all(point >= self.lower) and np.all(point <= self.upper))

    def evaluate(self, x: Sequence[float], level: int) -> float:
        """Objective value of ``x`` at fidelity ``level``.

        Raises:
            DomainError: ``level`` or ``x`` lies outside the problem.
            EvaluatorError: The evaluator raised or returned a non-finite value.
        """
        point = np.asarray(x, dtype=float).reshape(-1)
        if point.size != self.dimension:
            raise DimensionError(f"point has {point.size} coordinates, problem '{self.name}' has {self.dimension}")
        if not 1 <= level <= self.levels:
            raise DomainError(f"fidelity level {level} outside 1..{self.levels}")
        if not self.contains(point):
            raise DomainError(f"point {point.tolist()} outside the bounds of '{self.name}'")
        try:
            value = float(self.evaluators[level - 1](point))
        except Exception as e:
            raise EvaluatorError(f"{self.name} level {level} failed at {point.tolist()}: {e}", point.tolist(), level) from e
        if not math.isfinite(value):
            raise EvaluatorError(f"{self.name} level {level} returned {value} at {point.tolist()}", point.tolist(), level)
        return value

    def psi(self, x: Sequence[float]) -> np.ndarray:
        """Physics-relevant coordinates of ``x``."""
        point = np.asarray(x, dtype=float).reshape(-1)
        return point[list(self.psi_indices)]

    def top_level_only(self) -> "MultifidelityProblem":
        """The single-fidelity problem made of the top level alone."""
        return replace(self, evaluators=self.evaluators[-1:], cost_ratios=(1.0,))

    def with_cost_ratios(self, cost_ratios: Sequence[float]) -> "MultifidelityProblem":
        if len(cost_ratios) != self.levels:
            raise ConfigurationError(f"problem '{self.name}' has {self.levels} levels but {len(cost_ratios)} cost ratios were given")
        return replace(self, cost_ratios=tuple(float(c) for c in cost_ratios))

    def manifest(self) -> ProblemManifest:
        return ProblemManifest(
            name=self.name,
            description=self.description,
            dimension=self.dimension,
            levels=self.levels,
            coordinates=list(self.coordinate_names),
            bounds=[(lo, hi) for lo, hi in zip(self.lower, self.upper, strict=True)],
            cost_ratios=list(self.cost_ratios),
            psi=[self.coordinate_names[i] for i in self.psi_indices],
            psi_description=self.psi_description,
            optimum=None if self.optimum is None else KnownPoint(x=list(self.optimum[0]), value=self.optimum[1]),
            ground_truth=None if self.ground_truth is None else list(self.ground_truth),
            baseline=None if self.baseline is None else KnownPoint(x=list(self.baseline), value=self.evaluate(self.baseline, self.levels)),
        )


# Forrester

FORRESTER_OPTIMUM = ((0.757249,), -6.020740)


def forrester_high(x: np.ndarray) -> float:
    t = float(x[0])
    return (6.0 * t - 2.0) ** 2 * math.sin(12.0 * t - 4.0)


def forrester_low(x: np.ndarray) -> float:
    return 0.5 * forrester_high(x) + 10.0 * (float(x[0]) - 0.5) - 5.0


def forrester_pair(cost_ratios: Sequence[float] | None = None) -> MultifidelityProblem:
    return MultifidelityProblem(
        name="forrester",
        lower=(0.0,),
        upper=(1.0,),
        evaluators=(forrester_low, forrester_high),
        cost_ratios=tuple(cost_ratios) if cost_ratios is not None else (0.125, 1.0),
        coordinate_names=("x",),
        description="One-dimensional Forrester function with its linearly distorted low-fidelity companion.",
        optimum=FORRESTER_OPTIMUM,
    )


# Cross-regime aerodynamic surrogate

WEIGHT_BOUNDS = (-1.0, 1.0)
MACH_BOUNDS = (0.6, 0.99)
BASELINE_MACH = 0.65
# Discrepancy weight of each level, lowest first; the top level is exact.
DISCREPANCY_WEIGHTS = (1.0, 0.5, 0.0)


def _drag_well(mach: float) -> float:
    return math.exp(-(((mach - 0.88) / 0.04) ** 2))


def cross_regime_high(x: np.ndarray) -> float:
    weights, mach = x[:-1], float(x[-1])
    bowl = float(np.sum((weights - 0.25) ** 2))
    return bowl + 0.01 / (1.0 - mach) - 0.8 * _drag_well(mach)


def cross_regime_discrepancy(x: np.ndarray) -> float:
    """Low-fidelity model error, negligible at subsonic Mach and dominant
    near the transonic well."""
    s, mach = float(np.sum(x[:-1])), float(x[-1])
    tau = ((mach - MACH_BOUNDS[0]) / (MACH_BOUNDS[1] - MACH_BOUNDS[0])) ** 2
    return 0.8 * tau * _drag_well(mach) + 0.6 * tau * math.sin(4.0 * s + 6.0) + 0.02 * math.cos(3.0 * s)


@dataclass(frozen=True)
class _Distorted:
    weight: float

    def __call__(self, x: np.ndarray) -> float:
        return cross_regime_high(x) + self.weight * cross_regime_discrepancy(x)


def cross_regime_problem(n_weights: int = 1, cost_ratios: Sequence[float] | None = None) -> MultifidelityProblem:
    if n_weights < 1:
        raise DomainError(f"n_weights must be at least 1, got {n_weights}")
    names = ("w",) if n_weights == 1 else tuple(f"w{i}" for i in range(1, n_weights + 1))
    evaluators = tuple(cross_regime_high if w == 0.0 else _Distorted(w) for w in DISCREPANCY_WEIGHTS)
    return MultifidelityProblem(
        name="cross_regime",
        lower=(WEIGHT_BOUNDS[0],) * n_weights + (MACH_BOUNDS[0],),
        upper=(WEIGHT_BOUNDS[1],) * n_weights + (MACH_BOUNDS[1],),
        evaluators=evaluators,
        cost_ratios=tuple(cost_ratios) if cost_ratios is not None else (0.125, 0.2, 1.0),
        coordinate_names=(*names, "M"),
        psi_indices=(n_weights,),
        psi_description="Mach number M; low-fidelity accuracy degrades as M approaches 1",
        description="Drag-like objective over shape weights and Mach number with a transonic optimum and regime-dependent low-fidelity error.",
        baseline=(0.0,) * n_weights + (BASELINE_MACH,),
    )


# Damaged plate identification

PLATE_LOWER = (0.0, 0.0, 30e-6, 0.0)
PLATE_UPPER = (102.0, 456.0, 30.0, 20.0 * (1.0 - 1e-6))
PLATE_HF_GRID = (35, 77)
DEFAULT_Q_TRUE = (51.0, 228.0, 6.0, 12.0)
# Smallest Gaussian footprint the coarse model resolves along u and v [mm].
COARSE_FOOTPRINT = (12.0, 24.0)


def _plate_grids() -> tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
    u = np.linspace(PLATE_LOWER[0], PLATE_UPPER[0], PLATE_HF_GRID[0])
    v = np.linspace(PLATE_LOWER[1], PLATE_UPPER[1], PLATE_HF_GRID[1])
    fine = np.meshgrid(u, v, indexing="ij")
    coarse = (fine[0][::2, ::2], fine[1][::2, ::2])
    return fine, coarse


FINE_GRID, COARSE_GRID = _plate_grids()


def strain_field(q: Sequence[float], grid: tuple[np.ndarray, np.ndarray], *, coarse: bool = False) -> np.ndarray:
    """Monitored strain of a plate with a cut at ``(q1, q2)`` of length ``q3``
    under load ``q4``.

    The fine model resolves the concentration around the cut and the global
    load stiffening. The coarse model smears the concentration over at least
    `COARSE_FOOTPRINT` while keeping its integral, and misses the stiffening,
    so only ``A * sigma_u * sigma_v`` is observable at that level.
    """
    q1, q2, q3, q4 = (float(c) for c in q)
    u, v = grid
    base = 1.0 + 0.5 * v / PLATE_UPPER[1]
    amplitude = 0.05 * q4
    sigma_u, sigma_v = 3.0 + 0.5 * q3, 6.0 + 0.5 * q3
    if coarse:
        width_u, width_v = max(sigma_u, COARSE_FOOTPRINT[0]), max(sigma_v, COARSE_FOOTPRINT[1])
        bump = np.exp(-0.5 * ((u - q1) / width_u) ** 2 - 0.5 * ((v - q2) / width_v) ** 2)
        return base + amplitude * sigma_u * sigma_v / (width_u * width_v) * bump
    bump = np.exp(-0.5 * ((u - q1) / sigma_u) ** 2 - 0.5 * ((v - q2) / sigma_v) ** 2)
    return base * (1.0 + 0.02 * q4) + amplitude * bump


def discrepancy_rmse(reference: np.ndarray, monitored: np.ndarray, normalization: Normalization = "reference") -> float:
    """Normalized root-mean-square discrepancy between two strain fields.

    Each squared difference is divided by the reference value (or its square
    under ``reference_squared``).

    Raises:
        DimensionError: The fields have different shapes.
        DomainError: A reference entry is below `DISCREPANCY_FLOOR` in
            magnitude; the message lists the offending flat indices.
    """
    ref = np.asarray(reference, dtype=float).ravel()
    mon = np.asarray(monitored, dtype=float).ravel()
    if ref.shape != mon.shape:
        raise DimensionError(f"reference has {ref.size} entries, monitored field has {mon.size}")
    small = np.flatnonzero(np.abs(ref) < DISCREPANCY_FLOOR)
    if small.size:
        raise DomainError(f"reference strain is below {DISCREPANCY_FLOOR} at indices {small.tolist()}")
    weight = ref if normalization == "reference" else ref**2
    return float(np.sqrt(np.mean((ref - mon) ** 2 / weight)))


@dataclass(frozen=True, eq=False)
class _PlateObjective:
    reference: np.ndarray = field(repr=False)
    grid: tuple[np.ndarray, np.ndarray] = field(repr=False)
    coarse: bool
    normalization: Normalization

    def __call__(self, q: np.ndarray) -> float:
        return discrepancy_rmse(self.reference, strain_field(q, self.grid, coarse=self.coarse), self.normalization)


def plate_identification_problem(
    q_true: Sequence[float] = DEFAULT_Q_TRUE,
    normalization: Normalization = "reference",
    cost_ratios: Sequence[float] | None = None,
) -> MultifidelityProblem:
    """Both levels compare against the fine field measured at ``q_true``;
    the coarse level sees it on every other grid line."""
    truth = tuple(float(c) for c in q_true)
    if len(truth) != 4:
        raise DimensionError(f"q_true must have 4 entries, got {len(truth)}")
    if any(not lo <= t <= hi for t, lo, hi in zip(truth, PLATE_LOWER, PLATE_UPPER, strict=True)):
        raise DomainError(f"q_true {list(truth)} outside the plate bounds")
    measured = strain_field(truth, FINE_GRID)
    evaluators = (
        _PlateObjective(measured[::2, ::2], COARSE_GRID, coarse=True, normalization=normalization),
        _PlateObjective(measured, FINE_GRID, coarse=False, normalization=normalization),
    )
    return MultifidelityProblem(
        name="plate_identification",
        lower=PLATE_LOWER,
        upper=PLATE_UPPER,
        evaluators=evaluators,
        cost_ratios=tuple(cost_ratios) if cost_ratios is not None else (0.2, 1.0),
        coordinate_names=("q1", "q2", "q3", "q4"),
        psi_indices=(2, 3),
        psi_description="cut length q3 [mm] and load q4 [N]; the coarse model confounds them",
        description="Identify cut position, length and load of a damaged plate from its monitored strain field.",
        optimum=(truth, 0.0),
        ground_truth=truth,
    )


def sample_ground_truths(n: int, seed: SeedLike) -> np.ndarray:
    """``n`` plate damage states, stratified over the central 90% of each
    range; cut lengths are drawn on a squared scale so short cuts are common."""
    unit = latin_hypercube(n, 4, [(0.0, 1.0)] * 4, seed)
    t = 0.05 + 0.9 * unit
    lower, upper = np.asarray(PLATE_LOWER), np.asarray(PLATE_UPPER)
    q = lower + t * (upper - lower)
    q[:, 2] = PLATE_UPPER[2] * t[:, 2] ** 2
    return q


def brute_force_minimum(
    problem: MultifidelityProblem,
    level: int | None = None,
    resolution: int | None = None,
) -> tuple[np.ndarray, float]:
    """Dense grid search followed by a bounded simplex polish.

    Used to establish reference optima for problems without a closed form.
    ``resolution`` is the number of grid points per coordinate (default:
    about twenty thousand points in total).
    """
    level = problem.levels if level is None else level
    d = problem.dimension
    per_axis = resolution or max(3, int(round(20_000 ** (1.0 / d))))
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(problem.lower, problem.upper, strict=True)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    values = np.array([problem.evaluate(x, level) for x in grid])
    start = grid[int(np.argmin(values))]
    best = float(values.min())

    result = minimize(
        lambda x: problem.evaluate(np.clip(x, problem.lower, problem.upper), level),
        start,
        method="Nelder-Mead",
        bounds=list(zip(problem.lower, problem.upper, strict=True)),
        options={"xatol": 1e-10, "fatol": 1e-12, "maxfev": 2000 * d},
    )
    if result.fun < best:
        start, best = np.clip(result.x, problem.lower, problem.upper), float(result.fun)
    logger.debug(f"brute-force minimum of {problem.name} level {level}: {best} at {start.tolist()}")
    return start, best


PROBLEM_LEVELS = {"forrester": 2, "cross_regime": 3, "plate_identification": 2}


def problem_dimension(spec: ProblemSpec) -> int:
    match spec:
        case ForresterSpec():
            return 1
        case CrossRegimeSpec():
            return spec.n_weights + 1
        case PlateIdentificationSpec():
            return 4
    raise ConfigurationError(f"unknown problem {spec!r}")


def build_problem(spec: ProblemSpec, ground_truth: Sequence[float] | None = None) -> MultifidelityProblem:
    """Instantiate the problem a configuration names.

    ``ground_truth`` overrides the plate's configured ``q_true`` (studies
    sample one per replication when none is configured).
    """
    if spec.cost_ratios is not None and len(spec.cost_ratios) != PROBLEM_LEVELS[spec.name]:
        raise ConfigurationError(f"problem '{spec.name}' has {PROBLEM_LEVELS[spec.name]} levels but {len(spec.cost_ratios)} cost ratios were given")
    match spec:
        case ForresterSpec():
            return forrester_pair(spec.cost_ratios)
        case CrossRegimeSpec():
            return cross_regime_problem(spec.n_weights, spec.cost_ratios)
        case PlateIdentificationSpec():
            truth = ground_truth if ground_truth is not None else spec.q_true
            return plate_identification_problem(truth if truth is not None else DEFAULT_Q_TRUE, spec.normalization, spec.cost_ratios)
    raise ConfigurationError(f"unknown problem {spec!r}")


def problem_manifest(name: str, n_weights: int = 1) -> ProblemManifest:
    match name:
        case "forrester":
            return forrester_pair().manifest()
        case "cross_regime":
            return cross_regime_problem(n_weights).manifest()
        case "plate_identification":
            return plate_identification_problem().manifest()
    raise ConfigurationError(f"unknown problem '{name}', expected one of {sorted(PROBLEM_LEVELS)}")
