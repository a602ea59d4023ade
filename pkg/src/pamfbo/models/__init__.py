"""Pydantic models for pamfbo.

Configuration (what to run) lives in ``entities``; produced documents (what a
run writes) live in ``results``.

Key models:
- StudyConfig: Root model of a study file (a run configuration plus replications and outputs)
- RunConfig: Problem, algorithm, bias, initial design, budget and seed of one run
- RunHistory: Ordered record of queries with cumulative budget and best-so-far trace
- StudySummary: Percentile statistics across replications
"""

from pamfbo.models.entities import (
    BiasSpec,
    CrossRegimeSpec,
    CustomBiasSpec,
    DamageBiasSpec,
    FitConfig,
    ForresterSpec,
    IdentityBiasSpec,
    InitPlan,
    MachBiasSpec,
    PlateIdentificationSpec,
    ProblemSpec,
    RegionSpec,
    RunConfig,
    SearchConfig,
    StrictModel,
    StudyConfig,
    TargetSpec,
)
from pamfbo.models.results import (
    CheckpointStats,
    FailedRun,
    HistoryRecord,
    IdentificationStats,
    KnownPoint,
    LevelHyperparameters,
    ModelDocument,
    Observation,
    PercentileBand,
    ProblemManifest,
    RunHistory,
    RunMetrics,
    StudySummary,
)

__all__ = [
    "BiasSpec",
    "CheckpointStats",
    "CrossRegimeSpec",
    "CustomBiasSpec",
    "DamageBiasSpec",
    "FailedRun",
    "FitConfig",
    "ForresterSpec",
    "HistoryRecord",
    "IdentificationStats",
    "IdentityBiasSpec",
    "InitPlan",
    "KnownPoint",
    "LevelHyperparameters",
    "MachBiasSpec",
    "ModelDocument",
    "Observation",
    "PercentileBand",
    "PlateIdentificationSpec",
    "ProblemManifest",
    "ProblemSpec",
    "RegionSpec",
    "RunConfig",
    "RunHistory",
    "RunMetrics",
    "SearchConfig",
    "StrictModel",
    "StudyConfig",
    "StudySummary",
    "TargetSpec",
]
