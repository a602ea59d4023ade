"""Gaussian log marginal likelihoods for the joint model and for one level of
the recursive fit."""

from collections.abc import Sequence

import numpy as np

from pamfbo.constants import WORST_LOG_LIKELIHOOD
from pamfbo.errors import FactorizationError
from pamfbo.mfgp.data import ObservationSet
from pamfbo.mfgp.kernel import assemble_kernel_matrix, gaussian_kernel_matrix, prior_means
from pamfbo.mfgp.linalg import Factor, factorize, log_determinant, solve
from pamfbo.models import LevelHyperparameters

_LOG_2PI = float(np.log(2.0 * np.pi))


def gaussian_log_likelihood(residual: np.ndarray, factor: Factor) -> float:
    """``-1/2 r' A^-1 r - 1/2 log|A| - n/2 log 2pi`` for a factorized ``A``."""
    quadratic = float(residual @ solve(factor, residual))
    return -0.5 * quadratic - 0.5 * log_determinant(factor) - 0.5 * residual.size * _LOG_2PI


def log_marginal_likelihood(
    data: ObservationSet,
    hyper: Sequence[LevelHyperparameters],
    noise: float,
    jitter_start: float = 1e-10,
    jitter_max: float = 1e-4,
) -> float:
    """Joint log marginal likelihood of every observation.

    Returns `WORST_LOG_LIKELIHOOD` when the kernel matrix cannot be factorized.
    """
    try:
        matrix = assemble_kernel_matrix(data, hyper, noise)
        factor, _ = factorize(matrix, level=data.n_levels, jitter_start=jitter_start, jitter_max=jitter_max)
    except FactorizationError:
        return WORST_LOG_LIKELIHOOD
    residual = data.y - prior_means(hyper)[data.levels]
    value = gaussian_log_likelihood(residual, factor)
    return value if np.isfinite(value) else WORST_LOG_LIKELIHOOD


def level_log_likelihood(
    z: np.ndarray,
    target: np.ndarray,
    roughness: np.ndarray,
    process_variance: float,
    noise: float,
    level: int,
    *,
    with_trend: bool,
    jitter_start: float = 1e-10,
    jitter_max: float = 1e-4,
) -> tuple[float, float]:
    """Log likelihood of one level's single-kernel model and its GLS trend.

    ``target`` is the level-1 data, or the discrepancy left after removing the
    scaled lower-level posterior mean. With ``with_trend`` a constant trend is
    concentrated out by generalized least squares; otherwise the mean is 0.
    Returns ``(log_likelihood, trend)``.
    """
    matrix = gaussian_kernel_matrix(z, z, roughness, process_variance)
    matrix[np.diag_indices_from(matrix)] += noise
    try:
        factor, _ = factorize(matrix, level=level, jitter_start=jitter_start, jitter_max=jitter_max)
    except FactorizationError:
        return WORST_LOG_LIKELIHOOD, 0.0

    trend = 0.0
    if with_trend:
        ones = np.ones(target.size)
        a_ones = solve(factor, ones)
        trend = float(a_ones @ target / (a_ones @ ones))
    value = gaussian_log_likelihood(target - trend, factor)
    if not np.isfinite(value):
        return WORST_LOG_LIKELIHOOD, trend
    return max(value, WORST_LOG_LIKELIHOOD), trend
