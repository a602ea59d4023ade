from collections.abc import Sequence


class PamfboError(Exception):
    """Base exception for all pamfbo errors."""


class ConfigurationError(PamfboError):
    """A run or study configuration is inconsistent with the problem it
    targets: wrong number of cost ratios or initial counts, a bias coordinate
    that does not exist, or a budget below the initial design cost."""


class DimensionError(PamfboError):
    """Vector lengths or array shapes disagree with the problem dimension."""


class DomainError(PamfboError):
    """A value lies outside the domain where an operation is defined: a point
    outside the problem bounds, a fidelity level out of range, or a physics
    bias evaluated at its singularity."""


class DuplicateObservationError(PamfboError):
    """An observation with the same location and fidelity level already
    exists. Noise-free duplicates make the kernel matrix singular."""


class InsufficientDataError(PamfboError):
    """A fidelity level participating in the recursive fit has fewer than two
    observations."""


class FactorizationError(PamfboError):
    """The regularized kernel matrix could not be Cholesky-factorized even at
    the maximum jitter. Carries the offending fidelity level."""

    def __init__(self, message: str, level: int):
        super().__init__(message)
        self.level = level


class ModelNotFittedError(PamfboError):
    """A prediction was requested at a fidelity level the model carries no
    hyperparameters for."""


class EvaluatorError(PamfboError):
    """An objective evaluator raised or returned a non-finite value.

    Carries the failing point (problem units) and the fidelity level.
    """

    def __init__(self, message: str, point: Sequence[float], level: int):
        super().__init__(message)
        self.point = list(point)
        self.level = level


class RunAbortedError(PamfboError):
    """An optimization run stopped before exhausting its budget. Carries the
    partial history the run produced."""

    def __init__(self, message: str, history: object):
        super().__init__(message)
        self.history = history
