from dataclasses import dataclass, field


@dataclass
class LevelFitReport:
    """Likelihood search outcome on one level: the value at every start
    point, the best value reached and the start it came from."""

    level: int
    seed_log_likelihoods: list[float]
    best_log_likelihood: float
    best_start: int
    evaluations: int


@dataclass
class FitReport:
    levels: list[LevelFitReport] = field(default_factory=list)
