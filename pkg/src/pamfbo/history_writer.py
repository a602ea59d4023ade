"""Writers for run histories and study summaries.

A history is written as CSV, one row per evaluated query, with the header
``iteration,level,x_1..x_d,y,lambda,budget,best_hf``. Floats are written in
their shortest round-trip form so summaries can be recomputed from the files
exactly; an empty ``best_hf`` cell means no top-level point had been evaluated
yet.
"""

import csv
import json
from pathlib import Path
from typing import Any

from pamfbo.models import RunHistory, RunMetrics, StudySummary


def history_fieldnames(dimension: int) -> list[str]:
    return ["iteration", "level", *(f"x_{i}" for i in range(1, dimension + 1)), "y", "lambda", "budget", "best_hf"]


def _cell(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def history_rows(history: RunHistory) -> list[dict[str, str]]:
    rows = []
    for record in history.records:
        row = {"iteration": str(record.iteration), "level": str(record.level)}
        row.update({f"x_{i}": _cell(v) for i, v in enumerate(record.x, start=1)})
        row.update({"y": _cell(record.y), "lambda": _cell(record.cost), "budget": _cell(record.budget), "best_hf": _cell(record.best_hf)})
        rows.append(row)
    return rows


def write_history_csv(path: Path, history: RunHistory) -> Path:
    """Write the history of one run.

    Args:
        path: Target CSV file; parent directories are created.
        history: The run to write.

    Returns:
        The written path.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=history_fieldnames(history.dimension))
        writer.writeheader()
        writer.writerows(history_rows(history))
    return path


def read_history_csv(path: Path) -> list[dict[str, Any]]:
    """Rows of a history CSV with numeric cells parsed (``None`` for empty)."""
    with path.open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    parsed = []
    for row in rows:
        entry: dict[str, Any] = {"iteration": int(row.pop("iteration")), "level": int(row.pop("level"))}
        entry.update({key: None if value == "" else float(value) for key, value in row.items()})
        parsed.append(entry)
    return parsed


def write_run_document(path: Path, history: RunHistory, run_metrics: RunMetrics) -> Path:
    """Write run metadata (seed, status, incumbent, call counts, errors)
    next to the history CSV."""
    document = {
        "run": history.model_dump(mode="json", exclude={"records"}),
        "metrics": run_metrics.model_dump(mode="json", exclude={"budgets", "best_trace"}),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2), encoding="utf-8")
    return path


def write_summary(path: Path, summary: StudySummary) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(summary.model_dump_json(indent=2), encoding="utf-8")
    return path


def load_summary(path: Path) -> StudySummary:
    return StudySummary.model_validate_json(path.read_text(encoding="utf-8"))
