"""Pydantic models for pamfbo run and study configurations.

A study file is one JSON object validated by `StudyConfig`. Problems and
physics biases are tagged unions keyed by ``name``: an unknown name fails with
a field-located ``union_tag_invalid`` error that lists the accepted names.
"""

from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, NonNegativeInt, PositiveFloat, PositiveInt

from pamfbo.constants import Algorithm
from pamfbo.models.types import BiasExpression, Checkpoints, CostRatios, InitCounts


class StrictModel(BaseModel):
    """Base for all configuration models: unknown keys are rejected, so a
    typo'd field name fails validation instead of silently falling back to a
    default."""

    model_config = ConfigDict(extra="forbid")


class FitConfig(StrictModel):
    """Maximum-likelihood settings for the multifidelity surrogate."""

    n_starts: PositiveInt = Field(default=4, description="Quasi-random multi-start seeds per fidelity level.")
    max_evaluations: PositiveInt | None = Field(default=None, description="Likelihood evaluations per local search (default: 100 per hyperparameter).")
    jitter_start: PositiveFloat = Field(default=1e-10, description="First diagonal jitter, relative to trace(K)/n.")
    jitter_max: PositiveFloat = Field(default=1e-4, description="Largest diagonal jitter, relative to trace(K)/n.")
    workers: PositiveInt = Field(default=1, description="Threads running multi-start searches concurrently.")
    warm_start: bool = Field(default=True, description="Seed each refit with the previous iteration's optimum.")


class SearchConfig(StrictModel):
    """Acquisition maximization settings."""

    candidates_per_dimension: PositiveInt = Field(default=512, description="Quasi-random pool size per input dimension.")
    refine_top: NonNegativeInt = Field(default=5, description="Best pool candidates refined by a local simplex search.")
    refine_evaluations: PositiveInt = Field(default=200, description="Acquisition evaluations per local refinement.")
    duplicate_tolerance: PositiveFloat = Field(default=1e-9, description="Scaled distance under which a candidate duplicates an observation.")
    max_forced_picks: PositiveInt = Field(default=3, description="Consecutive forced picks before one high-fidelity exploration query.")


class InitPlan(StrictModel):
    """Per-level Latin hypercube sample counts, lowest fidelity first."""

    counts: InitCounts
    seed: NonNegativeInt | None = Field(default=None, description="Design seed (default: the run seed).")


class IdentityBiasSpec(StrictModel):
    name: Literal["identity"] = "identity"


class MachBiasSpec(StrictModel):
    name: Literal["mach"]
    sonic_mach: PositiveFloat = 1.0
    index: int = Field(default=-1, description="Position of the Mach coordinate in the design vector.")


class DamageBiasSpec(StrictModel):
    name: Literal["damage"]
    q3max: PositiveFloat = 30.0
    q4max: PositiveFloat = 20.0
    q3_index: int = 2
    q4_index: int = 3


class CustomBiasSpec(StrictModel):
    name: Literal["custom"]
    expression: BiasExpression = Field(description="Arithmetic over coordinate names, applied at the top fidelity.")


BiasSpec = Annotated[IdentityBiasSpec | MachBiasSpec | DamageBiasSpec | CustomBiasSpec, Field(discriminator="name")]


class ForresterSpec(StrictModel):
    name: Literal["forrester"]
    cost_ratios: CostRatios | None = None


class CrossRegimeSpec(StrictModel):
    name: Literal["cross_regime"]
    n_weights: PositiveInt = Field(default=1, description="Shape weights preceding the Mach coordinate.")
    cost_ratios: CostRatios | None = None


class PlateIdentificationSpec(StrictModel):
    name: Literal["plate_identification"]
    q_true: list[float] | None = Field(default=None, min_length=4, max_length=4, description="Damage parameters to identify (default: sampled per replication).")
    normalization: Literal["reference", "reference_squared"] = "reference"
    cost_ratios: CostRatios | None = None


ProblemSpec = Annotated[ForresterSpec | CrossRegimeSpec | PlateIdentificationSpec, Field(discriminator="name")]


class TargetSpec(StrictModel):
    value: float
    tolerance: PositiveFloat = 1e-2


class RegionSpec(StrictModel):
    """High-fidelity queries whose coordinate ``index`` exceeds ``threshold``."""

    index: int
    threshold: float


class RunConfig(StrictModel):
    problem: ProblemSpec
    algorithm: Algorithm
    bias: BiasSpec = IdentityBiasSpec()
    init: InitPlan
    budget: PositiveFloat = Field(description="Maximum cumulative cost B_max.")
    seed: NonNegativeInt = 0
    noise_variance: NonNegativeFloat = 0.0
    fit: FitConfig = FitConfig()
    search: SearchConfig = SearchConfig()


class StudyConfig(RunConfig):
    name: str | None = None
    replications: PositiveInt = 1
    checkpoints: Checkpoints = Field(default_factory=list, description="Budgets at which best-so-far statistics are reported (default: the final budget).")
    output_dir: Path = Path("results")
    target: TargetSpec | None = None
    region: RegionSpec | None = None
    workers: PositiveInt = Field(default=1, description="Replications running concurrently.")
