"""Static validation for pamfbo study files.

This is the single source of truth for configuration validation, consumed by
``pamfbo validate`` and by ``pamfbo run`` before anything executes. It
performs structural validation via the Pydantic `StudyConfig` model plus
cross-field checks against the chosen problem that a JSON Schema cannot
express (level counts, coordinate indices, budget against the initial design).

Every finding is reported as a `Diagnostic` carrying a stable code
(``PAMFBOxxx``), a severity, a message and (where meaningful) a location.

Diagnostic codes
----------------
======== ======== ==========================================================
Code     Severity Meaning
======== ======== ==========================================================
000      error    Schema validation failed (Pydantic ``StudyConfig`` model)
001      error    File not found
002      error    Path is not a file
003      error    Invalid JSON syntax
004      error    Number of cost ratios differs from the problem's levels
005      error    Number of initial counts differs from the problem's levels
006      error    A fitted level has fewer than 2 initial points
007      warning  Initial design has fewer than d+1 points at its lowest level
008      error    Budget is below the initial design cost
009      error    Bias coordinate index outside the design vector
010      error    Custom bias expression uses an unknown coordinate name
011      warning  Non-identity bias is ignored by EGO and MFBO
012      info     PA-MFBO with the identity bias is plain MFBO
013      warning  Checkpoint beyond the budget
014      error    ``q_true`` outside the plate bounds
015      error    Region coordinate index outside the design vector
016      warning  EGO ignores the lower-level initial counts
017      warning  File extension is not ``.json``
======== ======== ==========================================================

``info`` diagnostics never affect validity and are exempt from ``--strict``.
"""

import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ValidationError

from pamfbo.constants import BUDGET_TOLERANCE, Algorithm
from pamfbo.expressions import parse_expression
from pamfbo.models import CustomBiasSpec, DamageBiasSpec, IdentityBiasSpec, MachBiasSpec, PlateIdentificationSpec, StudyConfig
from pamfbo.optimizer import initial_cost
from pamfbo.problems import PROBLEM_LEVELS, problem_manifest

Severity = Literal["error", "warning", "info"]


class DiagnosticCode:
    """Stable diagnostic codes (see module docstring for the full table)."""

    SCHEMA = "PAMFBO000"
    FILE_NOT_FOUND = "PAMFBO001"
    NOT_A_FILE = "PAMFBO002"
    INVALID_JSON = "PAMFBO003"
    COST_RATIO_COUNT = "PAMFBO004"
    INIT_COUNT_LENGTH = "PAMFBO005"
    TOO_FEW_POINTS = "PAMFBO006"
    SMALL_DESIGN = "PAMFBO007"
    BUDGET_BELOW_INIT = "PAMFBO008"
    BIAS_INDEX = "PAMFBO009"
    UNKNOWN_COORDINATE = "PAMFBO010"
    IGNORED_BIAS = "PAMFBO011"
    IDENTITY_PA_MFBO = "PAMFBO012"
    CHECKPOINT_BEYOND_BUDGET = "PAMFBO013"
    Q_TRUE_OUT_OF_BOUNDS = "PAMFBO014"
    REGION_INDEX = "PAMFBO015"
    IGNORED_COUNTS = "PAMFBO016"
    WRONG_EXTENSION = "PAMFBO017"


class Diagnostic(BaseModel):
    """A single validation finding."""

    code: str
    severity: Severity
    message: str
    location: str | None = None


def _diag(code: str, severity: Severity, message: str, location: str | None = None) -> Diagnostic:
    return Diagnostic(code=code, severity=severity, message=message, location=location)


class StudyInfo(BaseModel):
    """What a valid study file resolves to."""

    problem: str
    algorithm: Algorithm
    dimension: int
    levels: int
    coordinates: list[str]
    cost_ratios: list[float]
    initial_cost: float | None = None
    budget: float


class ValidateResult(BaseModel):
    """Result of study file validation."""

    valid: bool
    errors: list[str] = []
    warnings: list[str] = []
    diagnostics: list[Diagnostic] = []
    study_info: StudyInfo | None = None


def _result(diagnostics: list[Diagnostic], study_info: StudyInfo | None = None) -> ValidateResult:
    errors = [d.message for d in diagnostics if d.severity == "error"]
    warning_messages = [d.message for d in diagnostics if d.severity == "warning"]
    return ValidateResult(valid=not errors, errors=errors, warnings=warning_messages, diagnostics=diagnostics, study_info=study_info)


def load_config(path: Path) -> StudyConfig:
    """Parse and validate a study file (raises pydantic ``ValidationError``).

    A top-level ``$schema`` key is editor metadata and is dropped.
    """
    data = json.loads(path.read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data.pop("$schema", None)
    return StudyConfig.model_validate(data)


def _index_ok(index: int, d: int) -> bool:
    return -d <= index < d


def _bias_diagnostics(config: StudyConfig, coordinates: list[str]) -> list[Diagnostic]:
    diagnostics: list[Diagnostic] = []
    d = len(coordinates)
    bias = config.bias
    indices: list[tuple[str, int]] = []
    match bias:
        case MachBiasSpec():
            indices = [("index", bias.index)]
        case DamageBiasSpec():
            indices = [("q3_index", bias.q3_index), ("q4_index", bias.q4_index)]
        case CustomBiasSpec():
            unknown = sorted(parse_expression(bias.expression).names - set(coordinates))
            if unknown:
                diagnostics.append(
                    _diag(
                        DiagnosticCode.UNKNOWN_COORDINATE,
                        "error",
                        f"Bias expression uses unknown coordinate(s) {unknown}; problem '{config.problem.name}' has {coordinates}",
                        location="bias -> expression",
                    )
                )
    for field, index in indices:
        if not _index_ok(index, d):
            diagnostics.append(
                _diag(DiagnosticCode.BIAS_INDEX, "error", f"Bias {field} {index} is outside the {d}-dimensional design vector {coordinates}", location=f"bias -> {field}")
            )

    if config.algorithm is not Algorithm.PA_MFBO and not isinstance(bias, IdentityBiasSpec):
        diagnostics.append(
            _diag(DiagnosticCode.IGNORED_BIAS, "warning", f"Bias '{bias.name}' is ignored by {config.algorithm.value}; only PA-MFBO applies a physics bias", location="bias")
        )
    if config.algorithm is Algorithm.PA_MFBO and isinstance(bias, IdentityBiasSpec):
        diagnostics.append(_diag(DiagnosticCode.IDENTITY_PA_MFBO, "info", "PA-MFBO with the identity bias behaves exactly like MFBO", location="bias"))
    return diagnostics


def _design_diagnostics(config: StudyConfig, levels: int, d: int, cost_ratios: list[float]) -> tuple[list[Diagnostic], float | None]:
    diagnostics: list[Diagnostic] = []
    counts = config.init.counts
    if len(counts) != levels:
        diagnostics.append(
            _diag(DiagnosticCode.INIT_COUNT_LENGTH, "error", f"init.counts has {len(counts)} entries but problem '{config.problem.name}' has {levels} levels", location="init -> counts")
        )
        return diagnostics, None

    if config.algorithm is Algorithm.EGO:
        if any(counts[:-1]):
            diagnostics.append(
                _diag(DiagnosticCode.IGNORED_COUNTS, "warning", f"EGO evaluates the top level only; lower-level counts {counts[:-1]} are ignored", location="init -> counts")
            )
        counts, cost_ratios = counts[-1:], [1.0]

    first = len(config.init.counts) - len(counts) + 1
    for level, count in enumerate(counts, start=first):
        if count < 2:
            diagnostics.append(
                _diag(DiagnosticCode.TOO_FEW_POINTS, "error", f"Level {level} has {count} initial point(s); the surrogate needs at least 2 per level", location="init -> counts")
            )
    if counts[0] < d + 1:
        diagnostics.append(
            _diag(DiagnosticCode.SMALL_DESIGN, "warning", f"Lowest fitted level has {counts[0]} initial points, fewer than d+1 = {d + 1}", location="init -> counts")
        )

    cost = initial_cost(counts, cost_ratios)
    if config.budget < cost * (1.0 - BUDGET_TOLERANCE):
        diagnostics.append(_diag(DiagnosticCode.BUDGET_BELOW_INIT, "error", f"Budget {config.budget} is below the initial design cost {cost}", location="budget"))
    return diagnostics, cost


def check_config(config: StudyConfig) -> tuple[list[Diagnostic], StudyInfo]:
    """Cross-field checks of a schema-valid study configuration."""
    diagnostics: list[Diagnostic] = []
    spec = config.problem
    levels = PROBLEM_LEVELS[spec.name]
    manifest = problem_manifest(spec.name, getattr(spec, "n_weights", 1))
    d = manifest.dimension
    cost_ratios = manifest.cost_ratios

    if spec.cost_ratios is not None:
        if len(spec.cost_ratios) != levels:
            diagnostics.append(
                _diag(DiagnosticCode.COST_RATIO_COUNT, "error", f"problem.cost_ratios has {len(spec.cost_ratios)} entries but '{spec.name}' has {levels} levels", location="problem -> cost_ratios")
            )
        else:
            cost_ratios = list(spec.cost_ratios)

    if isinstance(spec, PlateIdentificationSpec) and spec.q_true is not None:
        outside = [manifest.coordinates[i] for i, (q, (lo, hi)) in enumerate(zip(spec.q_true, manifest.bounds, strict=True)) if not lo <= q <= hi]
        if outside:
            diagnostics.append(_diag(DiagnosticCode.Q_TRUE_OUT_OF_BOUNDS, "error", f"q_true is outside the plate bounds in {outside}", location="problem -> q_true"))

    design, cost = _design_diagnostics(config, levels, d, cost_ratios)
    diagnostics += design
    diagnostics += _bias_diagnostics(config, manifest.coordinates)

    for k, checkpoint in enumerate(config.checkpoints):
        if checkpoint > config.budget:
            diagnostics.append(
                _diag(DiagnosticCode.CHECKPOINT_BEYOND_BUDGET, "warning", f"Checkpoint {checkpoint} exceeds the budget {config.budget}", location=f"checkpoints -> {k}")
            )
    if config.region is not None and not _index_ok(config.region.index, d):
        diagnostics.append(_diag(DiagnosticCode.REGION_INDEX, "error", f"Region index {config.region.index} is outside the {d}-dimensional design vector", location="region -> index"))

    info = StudyInfo(
        problem=spec.name,
        algorithm=config.algorithm,
        dimension=d,
        levels=1 if config.algorithm is Algorithm.EGO else levels,
        coordinates=manifest.coordinates,
        cost_ratios=[1.0] if config.algorithm is Algorithm.EGO else cost_ratios,
        initial_cost=cost,
        budget=config.budget,
    )
    return diagnostics, info


def validate_config(path: Path) -> ValidateResult:
    """Validate a pamfbo study file without running it."""
    diagnostics: list[Diagnostic] = []

    if not path.exists():
        return _result([_diag(DiagnosticCode.FILE_NOT_FOUND, "error", f"File not found: {path}")])

    if not path.is_file():
        return _result([_diag(DiagnosticCode.NOT_A_FILE, "error", f"Path is not a file: {path}")])

    if path.suffix.lower() != ".json":
        diagnostics.append(
            _diag(
                DiagnosticCode.WRONG_EXTENSION,
                "warning",
                f"File has extension '{path.suffix}' but expected '.json'. Consider renaming to use .json extension.",
                location=str(path),
            )
        )

    try:
        config = load_config(path)
    except json.JSONDecodeError as e:
        diagnostics.append(_diag(DiagnosticCode.INVALID_JSON, "error", f"Invalid JSON syntax: {e}", location=f"line {e.lineno}, column {e.colno}"))
        return _result(diagnostics)
    except ValidationError as e:
        for err in e.errors():
            loc = " -> ".join(str(x) for x in err["loc"])
            diagnostics.append(_diag(DiagnosticCode.SCHEMA, "error", f"Schema validation failed: {loc}: {err['msg']}", location=loc))
        return _result(diagnostics)

    semantic_diagnostics, info = check_config(config)
    diagnostics.extend(semantic_diagnostics)
    return _result(diagnostics, info)
