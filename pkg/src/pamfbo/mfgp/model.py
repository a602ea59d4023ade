"""The conditioned multifidelity surrogate and its posterior queries."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from pamfbo.constants import DEGENERATE_VARIANCE
from pamfbo.errors import DimensionError, DomainError, ModelNotFittedError
from pamfbo.mfgp.data import ObservationSet
from pamfbo.mfgp.kernel import assemble_kernel_matrix, cross_covariance, propagation, prior_means, prior_variances
from pamfbo.mfgp.linalg import factorize, solve
from pamfbo.mfgp.report import FitReport
from pamfbo.models import LevelHyperparameters


@dataclass(frozen=True)
class PosteriorStats:
    mean: float
    variance: float

    @property
    def sd(self) -> float:
        return float(np.sqrt(self.variance))


class MfGpModel:
    """Autoregressive multifidelity Gaussian process conditioned on a dataset.

    Holds one `LevelHyperparameters` per level, the shared noise variance and
    the Cholesky factor of the joint regularized kernel matrix. Immutable after
    construction, so one instance may serve concurrent readers.
    """

    def __init__(
        self,
        data: ObservationSet,
        hyper: Sequence[LevelHyperparameters],
        noise_variance: float = 0.0,
        *,
        jitter_start: float = 1e-10,
        jitter_max: float = 1e-4,
    ):
        if noise_variance < 0.0:
            raise DomainError(f"noise variance must be non-negative, got {noise_variance}")
        if len(hyper) != data.n_levels:
            raise DimensionError(f"dataset has {data.n_levels} levels but {len(hyper)} hyperparameter sets were given")
        for level, h in enumerate(hyper, start=1):
            if len(h.roughness) != data.dimension:
                raise DimensionError(f"level {level} roughness has {len(h.roughness)} entries, expected {data.dimension}")
            if level > 1 and h.scaling is None:
                raise DomainError(f"level {level} is missing its scaling factor")

        self.data = data
        self.hyper = tuple(hyper)
        self.noise_variance = float(noise_variance)
        self.jitter_start = jitter_start
        self.jitter_max = jitter_max
        self.fit_report: FitReport | None = None

        self._propagation = propagation(self.hyper)
        self._means = prior_means(self.hyper)
        self._variances = prior_variances(self.hyper)
        self._z = data.scaled_x

        matrix = assemble_kernel_matrix(data, self.hyper, self.noise_variance)
        self._factor, self.jitter = factorize(matrix, level=data.n_levels, jitter_start=jitter_start, jitter_max=jitter_max)
        self._alpha = solve(self._factor, data.y - self._means[data.levels])

    @property
    def n_levels(self) -> int:
        return self.data.n_levels

    @property
    def dimension(self) -> int:
        return self.data.dimension

    def _check_level(self, level: int) -> None:
        if level < 1:
            raise DomainError(f"fidelity level must be at least 1, got {level}")
        if level > self.n_levels:
            raise ModelNotFittedError(f"model is fitted up to level {self.n_levels}, level {level} requested")

    def _scaled(self, x: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(x, dtype=float))
        if points.shape[1] != self.dimension:
            raise DimensionError(f"points have {points.shape[1]} coordinates, expected {self.dimension}")
        return self.data.scale(points)

    def _cross(self, z: np.ndarray, level: int) -> np.ndarray:
        return cross_covariance(z, np.full(z.shape[0], level), self._z, self.data.levels, self.hyper)

    def predict_batch(self, x: np.ndarray, level: int) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance at the rows of ``x`` (problem units).

        Round-off below 0 is clamped to 0.
        """
        self._check_level(level)
        z = self._scaled(x)
        k = self._cross(z, level)
        mean = self._means[level] + k @ self._alpha
        variance = self._variances[level] - np.einsum("ij,ji->i", k, solve(self._factor, k.T))
        return mean, np.maximum(variance, 0.0)

    def predict(self, x: Sequence[float], level: int) -> PosteriorStats:
        mean, variance = self.predict_batch(np.asarray(x, dtype=float).reshape(1, -1), level)
        return PosteriorStats(mean=float(mean[0]), variance=float(variance[0]))

    def posterior_covariance_batch(self, x: np.ndarray, level: int, other_level: int) -> np.ndarray:
        """Posterior covariance between ``(x, level)`` and ``(x, other_level)`` row-wise."""
        self._check_level(level)
        self._check_level(other_level)
        z = self._scaled(x)
        k_a = self._cross(z, level)
        k_b = self._cross(z, other_level)
        shared = sum(self._propagation[level, k] * self._propagation[other_level, k] * h.process_variance for k, h in enumerate(self.hyper, start=1))
        return shared - np.einsum("ij,ji->i", k_a, solve(self._factor, k_b.T))

    def posterior_correlation_batch(self, x: np.ndarray, level: int) -> np.ndarray:
        """Signed posterior correlation between level ``level`` and the top level.

        0 where either posterior variance is below `DEGENERATE_VARIANCE`;
        clamped to [-1, 1] elsewhere.
        """
        top = self.n_levels
        _, var_l = self.predict_batch(x, level)
        _, var_top = self.predict_batch(x, top)
        cov = self.posterior_covariance_batch(x, level, top)
        degenerate = (var_l < DEGENERATE_VARIANCE) | (var_top < DEGENERATE_VARIANCE)
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = cov / np.sqrt(var_l * var_top)
        if level == top:
            corr = np.ones_like(corr)
        return np.where(degenerate, 0.0, np.clip(corr, -1.0, 1.0))

    def posterior_correlation(self, x: Sequence[float], level: int) -> float:
        return float(self.posterior_correlation_batch(np.asarray(x, dtype=float).reshape(1, -1), level)[0])

    def with_data(self, data: ObservationSet) -> "MfGpModel":
        """Same hyperparameters conditioned on another dataset (no refit)."""
        return MfGpModel(data, self.hyper, self.noise_variance, jitter_start=self.jitter_start, jitter_max=self.jitter_max)


def condition(data: ObservationSet, hyper: Sequence[LevelHyperparameters], noise: float = 0.0, **jitter: float) -> MfGpModel:
    """Build a model from fixed hyperparameters, without likelihood search."""
    return MfGpModel(data, hyper, noise, **jitter)


def predict(model: MfGpModel, x: Sequence[float], level: int) -> PosteriorStats:
    return model.predict(x, level)


def posterior_correlation(model: MfGpModel, x: Sequence[float], level: int) -> float:
    return model.posterior_correlation(x, level)
