"""Physics-aware multifidelity acquisition.

The utility of querying ``x`` at level ``l`` is the product

    EI(x) * alpha1(x, l) * alpha2(x, l) * alpha3(l) * alpha4(psi(x), l)

where EI is the expected improvement of the top-level posterior over the best
high-fidelity observation, alpha1 the posterior correlation between level
``l`` and the top level (clamped at 0), alpha2 the share of the level-``l``
uncertainty that a query would remove given the observation noise, alpha3 the
cost ratio of the top level to level ``l``, and alpha4 a physics bias that is
1 below the top level. With the identity bias this is the plain
multifidelity expected improvement; at the top level with zero noise it is
exactly EI.
"""

import logging
import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from scipy.stats import norm

from pamfbo.errors import ConfigurationError, DomainError
from pamfbo.expressions import CompiledExpression, parse_expression
from pamfbo.mfgp import MfGpModel
from pamfbo.models import BiasSpec, CustomBiasSpec, DamageBiasSpec, IdentityBiasSpec, MachBiasSpec
from pamfbo.warnings import ProvisionalIncumbentWarning

logger = logging.getLogger(__name__)


def expected_improvement_batch(mean: np.ndarray, sd: np.ndarray, best: float) -> np.ndarray:
    """Expected improvement below ``best`` (minimization); 0 where ``sd`` is 0."""
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(sd)) and math.isfinite(best)):
        raise DomainError("expected improvement needs finite mean, standard deviation and incumbent")
    if np.any(sd < 0.0):
        raise DomainError("standard deviation must be non-negative")
    ei = np.zeros_like(mean)
    positive = sd > 0.0
    improvement = (best - mean[positive]) / sd[positive]
    ei[positive] = sd[positive] * (improvement * norm.cdf(improvement) + norm.pdf(improvement))
    return np.maximum(ei, 0.0)


def expected_improvement(mean: float, sd: float, best: float) -> float:
    return float(expected_improvement_batch(np.array([mean]), np.array([sd]), best)[0])


def alpha1(model: MfGpModel, x: Sequence[float], level: int) -> float:
    """Signed posterior correlation between ``level`` and the top level."""
    return model.posterior_correlation(x, level)


def alpha2_batch(posterior_sd: np.ndarray, noise_sd: float) -> np.ndarray:
    posterior_sd = np.asarray(posterior_sd, dtype=float)
    if np.any(posterior_sd < 0.0) or noise_sd < 0.0:
        raise DomainError("posterior and noise standard deviations must be non-negative")
    total = np.sqrt(posterior_sd**2 + noise_sd**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        reduction = 1.0 - noise_sd / total
    return np.where(total > 0.0, np.clip(reduction, 0.0, 1.0), 0.0)


def alpha2(posterior_sd: float, noise_sd: float) -> float:
    """Uncertainty reduction; 0 at a fully resolved noise-free point."""
    return float(alpha2_batch(np.array([posterior_sd]), noise_sd)[0])


def alpha3(cost_ratios: Sequence[float], level: int) -> float:
    if not 1 <= level <= len(cost_ratios):
        raise DomainError(f"fidelity level {level} outside 1..{len(cost_ratios)}")
    if cost_ratios[level - 1] <= 0.0:
        raise DomainError(f"cost ratio of level {level} must be positive, got {cost_ratios[level - 1]}")
    return cost_ratios[-1] / cost_ratios[level - 1]


def mach_bias(mach: float, level: int, levels: int, sonic_mach: float = 1.0) -> float:
    """Favor the top fidelity as the flow approaches the sonic condition."""
    if level < levels:
        return 1.0
    if mach >= sonic_mach:
        raise DomainError(f"Mach bias is singular at M >= {sonic_mach}, got M = {mach}")
    return sonic_mach / (sonic_mach - mach)


def damage_bias(q3: float, q4: float, level: int, levels: int, q3max: float = 30.0, q4max: float = 20.0) -> float:
    """Favor the top fidelity for short cuts and loads near the maximum."""
    if level < levels:
        return 1.0
    if q3 <= 0.0:
        raise DomainError(f"damage bias is singular at cut length q3 <= 0, got {q3}")
    if q4 >= q4max:
        raise DomainError(f"damage bias is singular at load q4 >= {q4max}, got {q4}")
    return 0.5 * q3max / q3 + 0.5 / (q4max - q4)


class PhysicsBias(Protocol):
    """Multiplicative utility factor evaluated on the rows of ``x``; exactly 1
    below the top level and positive elsewhere."""

    def __call__(self, x: np.ndarray, level: int, levels: int) -> np.ndarray: ...


class IdentityBias:
    def __call__(self, x: np.ndarray, level: int, levels: int) -> np.ndarray:
        return np.ones(np.atleast_2d(x).shape[0])

    def __repr__(self) -> str:
        return "IdentityBias()"


@dataclass(frozen=True)
class MachBias:
    sonic_mach: float = 1.0
    index: int = -1

    def __call__(self, x: np.ndarray, level: int, levels: int) -> np.ndarray:
        points = np.atleast_2d(x)
        if level < levels:
            return np.ones(points.shape[0])
        mach = points[:, self.index]
        if np.any(mach >= self.sonic_mach):
            raise DomainError(f"Mach bias is singular at M >= {self.sonic_mach}, got max M = {mach.max()}")
        return self.sonic_mach / (self.sonic_mach - mach)


@dataclass(frozen=True)
class DamageBias:
    q3max: float = 30.0
    q4max: float = 20.0
    q3_index: int = 2
    q4_index: int = 3

    def __call__(self, x: np.ndarray, level: int, levels: int) -> np.ndarray:
        points = np.atleast_2d(x)
        if level < levels:
            return np.ones(points.shape[0])
        q3, q4 = points[:, self.q3_index], points[:, self.q4_index]
        if np.any(q3 <= 0.0):
            raise DomainError(f"damage bias is singular at cut length q3 <= 0, got min q3 = {q3.min()}")
        if np.any(q4 >= self.q4max):
            raise DomainError(f"damage bias is singular at load q4 >= {self.q4max}, got max q4 = {q4.max()}")
        return 0.5 * self.q3max / q3 + 0.5 / (self.q4max - q4)


class ExpressionBias:
    """User-defined top-level bias over named coordinates, e.g. ``"1 / (1 - M)"``."""

    def __init__(self, expression: CompiledExpression, coordinate_names: Sequence[str]):
        unknown = expression.names - set(coordinate_names)
        if unknown:
            raise ConfigurationError(f"bias expression '{expression.source}' uses unknown coordinate(s) {sorted(unknown)}; available: {list(coordinate_names)}")
        self.expression = expression
        self.coordinate_names = tuple(coordinate_names)

    def __call__(self, x: np.ndarray, level: int, levels: int) -> np.ndarray:
        points = np.atleast_2d(x)
        if level < levels:
            return np.ones(points.shape[0])
        values = np.array([self.expression.evaluate(dict(zip(self.coordinate_names, row.tolist(), strict=True))) for row in points])
        if np.any(values <= 0.0):
            raise DomainError(f"bias expression '{self.expression.source}' must be positive, got {values.min()}")
        return values

    def __repr__(self) -> str:
        return f"ExpressionBias({self.expression.source!r})"


def build_bias(spec: BiasSpec, coordinate_names: Sequence[str]) -> PhysicsBias:
    d = len(coordinate_names)

    def check(index: int, what: str) -> None:
        if not -d <= index < d:
            raise ConfigurationError(f"{what} index {index} outside the {d}-dimensional design vector {list(coordinate_names)}")

    match spec:
        case IdentityBiasSpec():
            return IdentityBias()
        case MachBiasSpec():
            check(spec.index, "Mach")
            return MachBias(spec.sonic_mach, spec.index)
        case DamageBiasSpec():
            check(spec.q3_index, "q3")
            check(spec.q4_index, "q4")
            return DamageBias(spec.q3max, spec.q4max, spec.q3_index, spec.q4_index)
        case CustomBiasSpec():
            return ExpressionBias(parse_expression(spec.expression), coordinate_names)
    raise ConfigurationError(f"unknown bias {spec!r}")


@dataclass(frozen=True)
class AcquisitionContext:
    """Everything the utility needs besides the model: the incumbent, the
    cost ratios of all levels and the noise standard deviation."""

    best_hf_value: float
    cost_ratios: tuple[float, ...]
    noise_sd: float = 0.0
    provisional: bool = False

    def __post_init__(self) -> None:
        if not math.isfinite(self.best_hf_value):
            raise DomainError(f"incumbent value must be finite, got {self.best_hf_value}")
        if not self.cost_ratios or self.cost_ratios[-1] != 1.0 or any(not 0.0 < c <= 1.0 for c in self.cost_ratios):
            raise DomainError(f"cost ratios must lie in (0, 1] and end with 1, got {list(self.cost_ratios)}")
        if self.noise_sd < 0.0:
            raise DomainError(f"noise standard deviation must be non-negative, got {self.noise_sd}")


def build_context(model: MfGpModel, cost_ratios: Sequence[float], noise_variance: float = 0.0) -> AcquisitionContext:
    """Context for the current dataset of ``model``.

    Without any top-level observation the best value at the highest level
    present stands in, and the context is marked provisional.
    """
    data = model.data
    if len(cost_ratios) != model.n_levels:
        raise ConfigurationError(f"model has {model.n_levels} levels but {len(cost_ratios)} cost ratios were given")
    top = data.levels == model.n_levels
    provisional = not np.any(top)
    if provisional:
        highest = int(data.levels.max())
        best = float(data.y[data.levels == highest].min())
        message = f"no level-{model.n_levels} observation yet; using the best level-{highest} value {best} as incumbent"
        logger.warning(message)
        warnings.warn(message, ProvisionalIncumbentWarning, stacklevel=2)
    else:
        best = float(data.y[top].min())
    return AcquisitionContext(best, tuple(float(c) for c in cost_ratios), math.sqrt(noise_variance), provisional)


def u_pa_batch(model: MfGpModel, x: np.ndarray, level: int, context: AcquisitionContext, bias: PhysicsBias) -> np.ndarray:
    """Physics-aware utility at the rows of ``x`` (problem units) for one level."""
    top = model.n_levels
    points = np.atleast_2d(np.asarray(x, dtype=float))
    mean_top, var_top = model.predict_batch(points, top)
    ei = expected_improvement_batch(mean_top, np.sqrt(var_top), context.best_hf_value)
    if level == top:
        correlation, var_level = 1.0, var_top
    else:
        correlation = np.maximum(model.posterior_correlation_batch(points, level), 0.0)
        _, var_level = model.predict_batch(points, level)
    reduction = alpha2_batch(np.sqrt(var_level), context.noise_sd)
    return ei * correlation * reduction * alpha3(context.cost_ratios, level) * bias(points, level, top)


def u_pa(model: MfGpModel, x: Sequence[float], level: int, context: AcquisitionContext, bias: PhysicsBias) -> float:
    return float(u_pa_batch(model, np.asarray(x, dtype=float).reshape(1, -1), level, context, bias)[0])


class Acquisition(Protocol):
    """A utility over ``(x, level)`` pairs, maximized by the optimizer."""

    model: MfGpModel

    @property
    def levels(self) -> range: ...

    def batch(self, x: np.ndarray, level: int) -> np.ndarray: ...


class PhysicsAwareAcquisition:
    def __init__(self, model: MfGpModel, context: AcquisitionContext, bias: PhysicsBias | None = None):
        self.model = model
        self.context = context
        self.bias = bias or IdentityBias()

    @property
    def levels(self) -> range:
        return range(1, self.model.n_levels + 1)

    def batch(self, x: np.ndarray, level: int) -> np.ndarray:
        return u_pa_batch(self.model, x, level, self.context, self.bias)

    def __call__(self, x: Sequence[float], level: int) -> float:
        return u_pa(self.model, x, level, self.context, self.bias)


class ExpectedImprovementAcquisition:
    """Single-fidelity expected improvement at the top level."""

    def __init__(self, model: MfGpModel, best: float):
        self.model = model
        self.best = best

    @property
    def levels(self) -> range:
        return range(self.model.n_levels, self.model.n_levels + 1)

    def batch(self, x: np.ndarray, level: int) -> np.ndarray:
        if level != self.model.n_levels:
            raise DomainError(f"expected improvement is defined at the top level {self.model.n_levels} only, got {level}")
        mean, variance = self.model.predict_batch(x, level)
        return expected_improvement_batch(mean, np.sqrt(variance), self.best)

    def __call__(self, x: Sequence[float], level: int) -> float:
        return float(self.batch(np.asarray(x, dtype=float).reshape(1, -1), level)[0])
