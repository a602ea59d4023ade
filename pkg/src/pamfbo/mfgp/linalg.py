import logging

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from pamfbo.constants import JITTER_GROWTH
from pamfbo.errors import FactorizationError

logger = logging.getLogger(__name__)

Factor = tuple[np.ndarray, bool]


def factorize(matrix: np.ndarray, level: int, jitter_start: float = 1e-10, jitter_max: float = 1e-4) -> tuple[Factor, float]:
    """Cholesky-factorize ``matrix`` with adaptive diagonal jitter.

    The plain matrix is tried first. On failure, jitter starting at
    ``jitter_start * trace/n`` is added and grown tenfold up to
    ``jitter_max * trace/n``. Returns the factor and the absolute jitter used.
    """
    n = matrix.shape[0]
    scale = float(np.trace(matrix)) / n if n else 1.0
    if not np.isfinite(scale) or scale <= 0.0:
        raise FactorizationError(f"kernel matrix on level {level} has non-positive trace {scale}", level=level)

    jitter = 0.0
    relative = jitter_start
    while True:
        try:
            regularized = matrix + jitter * np.eye(n) if jitter else matrix
            factor = cho_factor(regularized, lower=True, check_finite=False)
            if np.all(np.isfinite(factor[0])):
                if jitter:
                    logger.debug(f"level {level}: factorized with jitter {jitter:.3e}")
                return factor, jitter
        except LinAlgError:
            pass
        if relative > jitter_max * (1.0 + 1e-9):
            raise FactorizationError(f"kernel matrix on level {level} is singular even with jitter {jitter_max:.1e} * trace/n", level=level)
        jitter = relative * scale
        relative *= JITTER_GROWTH


def solve(factor: Factor, rhs: np.ndarray) -> np.ndarray:
    return cho_solve(factor, rhs, check_finite=False)


def log_determinant(factor: Factor) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(factor[0]))))
