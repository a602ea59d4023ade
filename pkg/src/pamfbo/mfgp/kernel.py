"""Gaussian kernel and the autoregressive covariance closure.

Level ``l`` is modelled as ``f_l(x) = rho_l * f_{l-1}(x) + delta_l(x)`` with
independent Gaussian-process discrepancies ``delta_l`` (``delta_1 = f_1``).
The prior covariance between two fidelity-tagged points is therefore

    cov((x, l), (x', l')) = sum_{k <= min(l, l')} P(l, k) * P(l', k) * k_k(x, x')

where ``P(l, k)`` is the product of the scaling factors ``rho_{k+1} ... rho_l``
(``P(l, l) = 1``). The prior mean is 0 on level 1 and
``rho_l * m_{l-1} + beta_l`` above it, i.e. one constant per level.
"""

from collections.abc import Sequence

import numpy as np

from pamfbo.errors import DimensionError, FactorizationError
from pamfbo.models import LevelHyperparameters


def kernel(x: Sequence[float], x2: Sequence[float], hyper: LevelHyperparameters) -> float:
    """Gaussian correlation kernel ``s2 * exp(-sum_m w_m (x_m - x2_m)^2)``."""
    a = np.asarray(x, dtype=float).reshape(-1)
    b = np.asarray(x2, dtype=float).reshape(-1)
    roughness = np.asarray(hyper.roughness, dtype=float)
    if a.shape != b.shape or a.shape != roughness.shape:
        raise DimensionError(f"kernel arguments have {a.size} and {b.size} coordinates, roughness has {roughness.size}")
    return float(hyper.process_variance * np.exp(-np.sum(roughness * (a - b) ** 2)))


def gaussian_kernel_matrix(a: np.ndarray, b: np.ndarray, roughness: np.ndarray, process_variance: float) -> np.ndarray:
    """Pairwise Gaussian kernel between the rows of ``a`` (n, d) and ``b`` (m, d)."""
    diff = a[:, None, :] - b[None, :, :]
    return process_variance * np.exp(-np.einsum("ijk,k->ij", diff * diff, roughness))


def propagation(hyper: Sequence[LevelHyperparameters]) -> np.ndarray:
    """``P[l, k]`` for ``1 <= k <= l <= L``; zero elsewhere (row/column 0 unused)."""
    n_levels = len(hyper)
    table = np.zeros((n_levels + 1, n_levels + 1))
    for level in range(1, n_levels + 1):
        table[level, level] = 1.0
        for k in range(level - 1, 0, -1):
            rho = hyper[k].scaling
            table[level, k] = table[level, k + 1] * (1.0 if rho is None else rho)
    return table


def prior_means(hyper: Sequence[LevelHyperparameters]) -> np.ndarray:
    """Constant prior mean per level, indexed 1..L (entry 0 unused)."""
    means = np.zeros(len(hyper) + 1)
    for level in range(2, len(hyper) + 1):
        h = hyper[level - 1]
        means[level] = (h.scaling or 0.0) * means[level - 1] + (h.trend or 0.0)
    return means


def prior_variances(hyper: Sequence[LevelHyperparameters]) -> np.ndarray:
    """Prior variance at any point per level, indexed 1..L."""
    table = propagation(hyper)
    variances = np.array([h.process_variance for h in hyper])
    return np.concatenate([[0.0], (table[1:, 1:] ** 2) @ variances])


def cross_covariance(
    xa: np.ndarray,
    la: np.ndarray,
    xb: np.ndarray,
    lb: np.ndarray,
    hyper: Sequence[LevelHyperparameters],
) -> np.ndarray:
    """Prior covariance between fidelity-tagged point sets (scaled coordinates)."""
    table = propagation(hyper)
    la = np.asarray(la, dtype=int)
    lb = np.asarray(lb, dtype=int)
    out = np.zeros((xa.shape[0], xb.shape[0]))
    for k, h in enumerate(hyper, start=1):
        ca = table[la, k]
        cb = table[lb, k]
        if not np.any(ca) or not np.any(cb):
            continue
        out += np.outer(ca, cb) * gaussian_kernel_matrix(xa, xb, np.asarray(h.roughness, dtype=float), h.process_variance)
    return out


def assemble_kernel_matrix(data, hyper: Sequence[LevelHyperparameters], noise: float) -> np.ndarray:
    """Joint prior covariance of every observation in ``data`` plus ``noise * I``.

    Built from the closure above on scaled coordinates; symmetric by
    construction. Raises `FactorizationError` on non-finite entries.
    """
    if len(data) == 0:
        raise DimensionError("cannot assemble a kernel matrix for an empty dataset")
    if len(hyper) != data.n_levels:
        raise DimensionError(f"dataset has {data.n_levels} levels but {len(hyper)} hyperparameter sets were given")
    z = data.scaled_x
    matrix = cross_covariance(z, data.levels, z, data.levels, hyper)
    matrix = 0.5 * (matrix + matrix.T)
    matrix[np.diag_indices_from(matrix)] += noise
    if not np.all(np.isfinite(matrix)):
        raise FactorizationError("kernel matrix has non-finite entries", level=int(data.levels.max()))
    return matrix
