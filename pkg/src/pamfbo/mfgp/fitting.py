"""Level-by-level maximum-likelihood estimation of the surrogate.

Level 1 is fitted alone on its own data with a zero mean. Each higher level
``l`` is fitted on the discrepancy ``y_l - rho * mu_{l-1}(x_l)``, where
``mu_{l-1}`` is the posterior mean of the model already fitted on levels
``1..l-1``; its constant trend is concentrated out by generalized least
squares. Each level's search is a bounded Nelder-Mead simplex from scrambled
Sobol seeds over ``(log roughness, log variance[, rho])``.
"""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from pamfbo.constants import LOG_ROUGHNESS_BOUNDS, LOG_VARIANCE_BOUNDS, SCALING_BOUNDS
from pamfbo.errors import InsufficientDataError
from pamfbo.mfgp.data import ObservationSet
from pamfbo.mfgp.likelihood import level_log_likelihood
from pamfbo.mfgp.model import MfGpModel, condition
from pamfbo.mfgp.report import FitReport, LevelFitReport
from pamfbo.models import FitConfig, LevelHyperparameters

logger = logging.getLogger(__name__)

Seed = int | Sequence[int]


@dataclass
class _SearchResult:
    params: np.ndarray
    log_likelihood: float
    seed_log_likelihood: float
    evaluations: int


class _LevelObjective:
    def __init__(self, z: np.ndarray, y: np.ndarray, lower_mean: np.ndarray | None, noise: float, level: int, config: FitConfig):
        self.z = z
        self.y = y
        self.lower_mean = lower_mean
        self.noise = noise
        self.level = level
        self.config = config
        self.d = z.shape[1]

    @property
    def bounds(self) -> list[tuple[float, float]]:
        box = [LOG_ROUGHNESS_BOUNDS] * self.d + [LOG_VARIANCE_BOUNDS]
        if self.lower_mean is not None:
            box.append(SCALING_BOUNDS)
        return box

    def evaluate(self, params: np.ndarray) -> tuple[float, float]:
        roughness = np.exp(params[: self.d])
        variance = float(np.exp(params[self.d]))
        target = self.y if self.lower_mean is None else self.y - params[self.d + 1] * self.lower_mean
        return level_log_likelihood(
            self.z,
            target,
            roughness,
            variance,
            self.noise,
            self.level,
            with_trend=self.lower_mean is not None,
            jitter_start=self.config.jitter_start,
            jitter_max=self.config.jitter_max,
        )

    def negative(self, params: np.ndarray) -> float:
        return -self.evaluate(params)[0]

    def to_hyperparameters(self, params: np.ndarray) -> LevelHyperparameters:
        roughness = np.exp(params[: self.d]).tolist()
        variance = float(np.exp(params[self.d]))
        if self.lower_mean is None:
            return LevelHyperparameters(roughness=roughness, process_variance=variance)
        _, trend = self.evaluate(params)
        return LevelHyperparameters(roughness=roughness, process_variance=variance, scaling=float(params[self.d + 1]), trend=trend)


def _sobol_starts(bounds: list[tuple[float, float]], n: int, seed: Seed) -> np.ndarray:
    engine = qmc.Sobol(d=len(bounds), scramble=True, seed=np.random.default_rng(seed))
    unit = engine.random_base2(max(0, math.ceil(math.log2(n))))[:n]
    lower, upper = zip(*bounds, strict=True)
    return qmc.scale(unit, lower, upper)


def _to_params(hyper: LevelHyperparameters, with_scaling: bool, bounds: list[tuple[float, float]]) -> np.ndarray:
    params = [*np.log(hyper.roughness), math.log(hyper.process_variance)]
    if with_scaling:
        params.append(hyper.scaling if hyper.scaling is not None else 1.0)
    lower, upper = zip(*bounds, strict=True)
    return np.clip(np.array(params), lower, upper)


def _search(objective: _LevelObjective, start: np.ndarray, max_evaluations: int) -> _SearchResult:
    seed_value = objective.evaluate(start)[0]
    result = minimize(
        objective.negative,
        start,
        method="Nelder-Mead",
        bounds=objective.bounds,
        options={"maxfev": max_evaluations, "xatol": 1e-6, "fatol": 1e-9},
    )
    params, value = np.asarray(result.x, dtype=float), float(-result.fun)
    if value < seed_value:
        params, value = start, seed_value
    return _SearchResult(params=params, log_likelihood=value, seed_log_likelihood=seed_value, evaluations=int(result.nfev))


def _fit_level(objective: _LevelObjective, starts: np.ndarray, config: FitConfig) -> tuple[np.ndarray, LevelFitReport]:
    max_evaluations = config.max_evaluations or 100 * starts.shape[1]
    if config.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=min(config.workers, len(starts))) as executor:
            results = list(executor.map(lambda s: _search(objective, s, max_evaluations), starts))
    else:
        results = [_search(objective, s, max_evaluations) for s in starts]

    # Highest likelihood wins; the lowest start index breaks ties.
    best = max(range(len(results)), key=lambda i: (results[i].log_likelihood, -i))
    report = LevelFitReport(
        level=objective.level,
        seed_log_likelihoods=[r.seed_log_likelihood for r in results],
        best_log_likelihood=results[best].log_likelihood,
        best_start=best,
        evaluations=sum(r.evaluations for r in results),
    )
    return results[best].params, report


def fit(
    data: ObservationSet,
    noise: float = 0.0,
    config: FitConfig | None = None,
    *,
    seed: Seed = 0,
    previous: Sequence[LevelHyperparameters] | None = None,
) -> MfGpModel:
    """Fit hyperparameters level by level and condition the joint model.

    ``previous`` hyperparameters (e.g. the last iteration's) are added as one
    extra start per level when ``config.warm_start`` is set. The returned
    model carries the per-level `FitReport` as ``fit_report``.
    """
    config = config or FitConfig()
    for level in range(1, data.n_levels + 1):
        if data.count(level) < 2:
            raise InsufficientDataError(f"level {level} has {data.count(level)} observation(s); the recursive fit needs at least 2")

    hyper: list[LevelHyperparameters] = []
    report = FitReport()
    sub_model: MfGpModel | None = None
    for level in range(1, data.n_levels + 1):
        z, y = data.at_level(level)
        lower_mean = None if sub_model is None else sub_model.predict_batch(data.unscale(z), level - 1)[0]
        objective = _LevelObjective(z, y, lower_mean, noise, level, config)

        seed_sequence = [*np.atleast_1d(seed).tolist(), level]
        starts = _sobol_starts(objective.bounds, config.n_starts, seed_sequence)
        if config.warm_start and previous is not None and len(previous) >= level:
            starts = np.vstack([starts, _to_params(previous[level - 1], level > 1, objective.bounds)])

        params, level_report = _fit_level(objective, starts, config)
        hyper.append(objective.to_hyperparameters(params))
        report.levels.append(level_report)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(f"level {level}: log-likelihood {level_report.best_log_likelihood:.6g} from start {level_report.best_start}, {hyper[-1]}")

        if level < data.n_levels:
            sub_model = condition(data.below(level), hyper, noise, jitter_start=config.jitter_start, jitter_max=config.jitter_max)

    model = condition(data, hyper, noise, jitter_start=config.jitter_start, jitter_max=config.jitter_max)
    model.fit_report = report
    return model
