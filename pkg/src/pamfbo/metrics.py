"""Per-run metrics computed from a `RunHistory`."""

from collections.abc import Sequence

from pamfbo.errors import DomainError
from pamfbo.models import RunHistory, RunMetrics

_LABELS = {1: ["HF"], 2: ["LF", "HF"], 3: ["LF", "MF", "HF"]}


def level_labels(levels: int) -> list[str]:
    """Column labels of per-level tables, lowest fidelity first."""
    return _LABELS.get(levels, [f"L{level}" for level in range(1, levels + 1)])


def call_counts(history: RunHistory) -> list[int]:
    """Evaluations per level (initial design included), lowest first."""
    counts = [0] * history.levels
    for record in history.records:
        counts[record.level - 1] += 1
    return counts


def best_at(history: RunHistory, budget: float) -> float | None:
    """Best top-level value once ``budget`` has been consumed, or None if no
    top-level point was evaluated by then."""
    best = None
    for record in history.records:
        if record.budget > budget * (1.0 + 1e-12):
            break
        best = record.best_hf
    return best


def relative_errors(truth: Sequence[float], inferred: Sequence[float]) -> list[float]:
    """Percentage error ``|t - i| / |t| * 100`` of each identified parameter."""
    if len(truth) != len(inferred):
        raise DomainError(f"ground truth has {len(truth)} entries, inferred point has {len(inferred)}")
    if any(t == 0.0 for t in truth):
        raise DomainError("relative error is undefined for a zero ground-truth entry")
    return [abs(t - i) / abs(t) * 100.0 for t, i in zip(truth, inferred, strict=True)]


def hf_region_fraction(history: RunHistory, index: int, threshold: float) -> float | None:
    """Share of the loop's top-level queries whose coordinate ``index``
    exceeds ``threshold``; None when the loop made no top-level query."""
    queries = [r for r in history.records if r.iteration > 0 and r.level == history.levels]
    if not queries:
        return None
    return sum(r.x[index] > threshold for r in queries) / len(queries)


def budget_to_target(history: RunHistory, value: float, tolerance: float) -> float | None:
    """First cumulative budget at which the best top-level value is within
    ``tolerance`` of ``value``."""
    for record in history.records:
        if record.best_hf is not None and record.best_hf - value <= tolerance:
            return record.budget
    return None


def ledger_violations(history: RunHistory) -> list[str]:
    """Inconsistencies between recorded costs, budgets and best-so-far values.

    Replays the cumulative budget by summing the charged cost ratios in record
    order and checks the best-so-far trace only moves down on top-level
    evaluations.
    """
    problems: list[str] = []
    budget = 0.0
    best: float | None = None
    for position, record in enumerate(history.records):
        if record.cost != history.cost_ratios[record.level - 1]:
            problems.append(f"record {position}: charged {record.cost} for level {record.level}, expected {history.cost_ratios[record.level - 1]}")
        budget += record.cost
        if record.budget != budget:
            problems.append(f"record {position}: cumulative budget {record.budget} differs from replayed {budget}")
        if record.level == history.levels and (best is None or record.y < best):
            best = record.y
        if record.best_hf != best:
            problems.append(f"record {position}: best-so-far {record.best_hf} differs from replayed {best}")
    return problems


def metrics(history: RunHistory) -> RunMetrics:
    if not history.records:
        raise DomainError("metrics need a non-empty history")
    result = RunMetrics(
        budgets=[r.budget for r in history.records],
        best_trace=[r.best_hf for r in history.records],
        call_counts=call_counts(history),
        incumbent=history.incumbent,
        incumbent_value=history.incumbent_value,
    )
    if history.ground_truth is not None and history.incumbent is not None:
        errors = relative_errors(history.ground_truth, history.incumbent)
        result.relative_errors = errors
        result.max_relative_error = max(errors)
    return result
