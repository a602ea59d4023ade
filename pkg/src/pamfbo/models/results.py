"""Pydantic models for what pamfbo produces: observations, surrogate
hyperparameters, run histories and study summaries. These are the documents
written to disk, so every field is plain JSON."""

from typing import Literal

from pydantic import BaseModel, Field, PositiveFloat, PositiveInt

from pamfbo.constants import Algorithm
from pamfbo.models.types import Interval


class Observation(BaseModel):
    """One element of the multifidelity dataset: location (problem units),
    fidelity level (1 = lowest) and observed objective value."""

    x: list[float]
    level: PositiveInt
    y: float


class LevelHyperparameters(BaseModel):
    """Gaussian kernel and autoregressive parameters of one fidelity level.

    ``scaling`` (rho) and ``trend`` (beta) are absent for level 1.
    """

    roughness: list[PositiveFloat] = Field(min_length=1)
    process_variance: PositiveFloat
    scaling: float | None = None
    trend: float | None = None


class ModelDocument(BaseModel):
    """Serialized multifidelity surrogate."""

    dimension: PositiveInt
    levels: PositiveInt
    bounds: list[Interval]
    noise_variance: float
    jitter_start: float
    jitter_max: float
    hyperparameters: list[LevelHyperparameters]
    observations: list[Observation]


class HistoryRecord(BaseModel):
    """One evaluated query. Iteration 0 marks the initial design."""

    iteration: int
    x: list[float]
    level: PositiveInt
    y: float
    cost: float
    budget: float
    best_hf: float | None = None
    acquisition: float | None = None
    forced: bool = False


class RunHistory(BaseModel):
    algorithm: Algorithm
    problem: str
    seed: int
    dimension: PositiveInt
    levels: PositiveInt
    cost_ratios: list[float]
    records: list[HistoryRecord] = []
    incumbent: list[float] | None = None
    incumbent_value: float | None = None
    ground_truth: list[float] | None = None
    status: Literal["completed", "aborted"] = "completed"
    error: str | None = None


class RunMetrics(BaseModel):
    """Per-run summary: best-so-far trace against budget and per-level call
    counts, plus identification errors for inverse problems."""

    budgets: list[float]
    best_trace: list[float | None]
    call_counts: list[int]
    incumbent: list[float] | None = None
    incumbent_value: float | None = None
    relative_errors: list[float] | None = None
    max_relative_error: float | None = None


class PercentileBand(BaseModel):
    """Median and quartiles (linear interpolation between closest ranks)."""

    median: float | None
    q25: float | None
    q75: float | None
    runs: int


class CheckpointStats(PercentileBand):
    budget: float


class IdentificationStats(BaseModel):
    median_relative_errors: list[float]
    max_relative_error: PercentileBand
    minimum_discrepancy: PercentileBand


class FailedRun(BaseModel):
    replication: int
    seed: int
    error: str


class StudySummary(BaseModel):
    name: str
    problem: str
    algorithm: Algorithm
    bias: str
    replications: int
    seeds: list[int]
    level_labels: list[str]
    checkpoints: list[CheckpointStats]
    final: PercentileBand
    call_counts: list[float]
    budget_to_target: PercentileBand | None = None
    hf_region_fraction: float | None = None
    identification: IdentificationStats | None = None
    failed: list[FailedRun] = []


class KnownPoint(BaseModel):
    x: list[float]
    value: float


class ProblemManifest(BaseModel):
    """Self-description of a benchmark problem."""

    name: str
    description: str
    dimension: PositiveInt
    levels: PositiveInt
    coordinates: list[str]
    bounds: list[Interval]
    cost_ratios: list[float]
    psi: list[str]
    psi_description: str
    optimum: KnownPoint | None = None
    ground_truth: list[float] | None = None
    baseline: KnownPoint | None = None
