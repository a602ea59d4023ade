"""The multifidelity dataset.

Observations are stored in problem units; the surrogate works on coordinates
mapped to the unit cube through the dataset's bounds.
"""

from collections.abc import Iterable, Sequence

import numpy as np

from pamfbo.errors import DimensionError, DomainError, DuplicateObservationError
from pamfbo.models import Observation


class ObservationSet:
    """Ordered, immutable collection of ``(x, level, y)`` triples.

    Adding an observation returns a new set; an exact ``(x, level)`` repeat is
    rejected with `DuplicateObservationError`.
    """

    def __init__(
        self,
        lower: Sequence[float],
        upper: Sequence[float],
        levels: int,
        x: np.ndarray | None = None,
        level: np.ndarray | None = None,
        y: np.ndarray | None = None,
    ):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if self.lower.ndim != 1 or self.lower.shape != self.upper.shape:
            raise DimensionError(f"bounds must be two vectors of equal length, got {self.lower.shape} and {self.upper.shape}")
        if not np.all(np.isfinite(self.lower)) or not np.all(np.isfinite(self.upper)) or np.any(self.lower >= self.upper):
            raise DomainError(f"bounds must be finite with lower < upper, got {self.lower.tolist()} and {self.upper.tolist()}")
        if levels < 1:
            raise DomainError(f"level count must be at least 1, got {levels}")
        self.n_levels = levels

        d = self.lower.size
        self._x = np.empty((0, d)) if x is None else np.array(x, dtype=float).reshape(-1, d)
        self._level = np.empty(0, dtype=int) if level is None else np.array(level, dtype=int).reshape(-1)
        self._y = np.empty(0) if y is None else np.array(y, dtype=float).reshape(-1)
        if not (self._x.shape[0] == self._level.size == self._y.size):
            raise DimensionError(f"x, level and y disagree in length: {self._x.shape[0]}, {self._level.size}, {self._y.size}")
        for arr in (self._x, self._level, self._y):
            arr.setflags(write=False)

    @classmethod
    def from_observations(cls, observations: Iterable[Observation], lower: Sequence[float], upper: Sequence[float], levels: int) -> "ObservationSet":
        data = cls(lower, upper, levels)
        for obs in observations:
            data = data.with_observation(obs.x, obs.level, obs.y)
        return data

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def x(self) -> np.ndarray:
        return self._x

    @property
    def levels(self) -> np.ndarray:
        return self._level

    @property
    def y(self) -> np.ndarray:
        return self._y

    def __len__(self) -> int:
        return self._y.size

    @property
    def observations(self) -> list[Observation]:
        return [Observation(x=xi.tolist(), level=int(li), y=float(yi)) for xi, li, yi in zip(self._x, self._level, self._y, strict=True)]

    def scale(self, x: np.ndarray) -> np.ndarray:
        """Map problem units to the unit cube."""
        return (np.asarray(x, dtype=float) - self.lower) / (self.upper - self.lower)

    def unscale(self, z: np.ndarray) -> np.ndarray:
        return self.lower + np.asarray(z, dtype=float) * (self.upper - self.lower)

    @property
    def scaled_x(self) -> np.ndarray:
        return self.scale(self._x)

    def count(self, level: int) -> int:
        return int(np.count_nonzero(self._level == level))

    def check_point(self, x: Sequence[float], level: int) -> np.ndarray:
        point = np.asarray(x, dtype=float).reshape(-1)
        if point.size != self.dimension:
            raise DimensionError(f"point has {point.size} coordinates, expected {self.dimension}")
        if not 1 <= level <= self.n_levels:
            raise DomainError(f"fidelity level {level} outside 1..{self.n_levels}")
        if not np.all(np.isfinite(point)) or np.any(point < self.lower) or np.any(point > self.upper):
            raise DomainError(f"point {point.tolist()} outside bounds {self.lower.tolist()}..{self.upper.tolist()}")
        return point

    def with_observation(self, x: Sequence[float], level: int, y: float) -> "ObservationSet":
        point = self.check_point(x, level)
        if not np.isfinite(y):
            raise DomainError(f"observed value at {point.tolist()} (level {level}) is not finite: {y}")
        same_level = self._level == level
        if np.any(np.all(self._x[same_level] == point, axis=1)):
            raise DuplicateObservationError(f"observation at {point.tolist()} on level {level} already exists")
        return ObservationSet(
            self.lower,
            self.upper,
            self.n_levels,
            np.vstack([self._x, point]),
            np.append(self._level, level),
            np.append(self._y, float(y)),
        )

    def at_level(self, level: int) -> tuple[np.ndarray, np.ndarray]:
        """Scaled locations and values observed at one level."""
        mask = self._level == level
        return self.scale(self._x[mask]), self._y[mask]

    def below(self, level: int) -> "ObservationSet":
        """The observations at levels ``1..level`` as a ``level``-level set."""
        mask = self._level <= level
        return ObservationSet(self.lower, self.upper, level, self._x[mask], self._level[mask], self._y[mask])

    def is_duplicate(self, x: Sequence[float], level: int, tolerance: float) -> bool:
        """Whether ``x`` lies within ``tolerance`` (scaled Euclidean distance)
        of an existing observation on the same level."""
        same_level = self._level == level
        if not np.any(same_level):
            return False
        distances = np.linalg.norm(self.scale(self._x[same_level]) - self.scale(x), axis=1)
        return bool(np.min(distances) <= tolerance)
