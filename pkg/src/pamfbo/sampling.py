"""Space-filling designs: Latin hypercube initial samples and the
quasi-random candidate pools searched by the acquisition maximizer."""

from collections.abc import Sequence

import numpy as np
from scipy.stats import qmc

from pamfbo.errors import DimensionError, DomainError

SeedLike = int | Sequence[int] | np.random.SeedSequence | np.random.Generator


def _bounds(bounds: Sequence[Sequence[float]], d: int) -> tuple[np.ndarray, np.ndarray]:
    box = np.asarray(bounds, dtype=float)
    if box.shape != (d, 2):
        raise DimensionError(f"bounds must be {d} (lower, upper) pairs, got shape {box.shape}")
    return box[:, 0], box[:, 1]


def latin_hypercube(n: int, d: int, bounds: Sequence[Sequence[float]], seed: SeedLike) -> np.ndarray:
    """``n`` points in ``bounds`` whose every 1-D projection hits each of the
    ``n`` equal-width bins exactly once. Deterministic given ``seed``."""
    if n < 1:
        raise DomainError(f"a Latin hypercube needs at least one point, got {n}")
    lower, upper = _bounds(bounds, d)
    sample = qmc.LatinHypercube(d=d, seed=np.random.default_rng(seed)).random(n)
    return qmc.scale(sample, lower, upper)


def halton_pool(n: int, d: int, seed: SeedLike) -> np.ndarray:
    """Scrambled Halton points in the unit cube."""
    return qmc.Halton(d=d, scramble=True, seed=np.random.default_rng(seed)).random(n)
