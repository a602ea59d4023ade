"""Comparison tables across study summaries.

The convergence table has one row per checkpoint budget and one column per
summary holding the median best value, optionally followed by the
percentage improvement over a baseline value. The call-count table has one
row per summary and one column per fidelity label (highest first).
"""

import csv
import io
from collections.abc import Sequence
from typing import Literal

from pamfbo.errors import DomainError
from pamfbo.models import StudySummary

Table = tuple[list[str], list[list[str]]]

_LABEL_ORDER = ["HF", "MF", "LF"]


def improvement(value: float, baseline: float) -> float:
    """Percentage reduction of ``value`` relative to ``baseline``."""
    if baseline == 0.0:
        raise DomainError("improvement is undefined for a zero baseline")
    return (baseline - value) / baseline * 100.0


def _column_name(summary: StudySummary) -> str:
    if summary.name:
        return summary.name
    return summary.algorithm.value if summary.bias == "identity" else f"{summary.algorithm.value} ({summary.bias})"


def _cell(value: float | None, baseline: float | None) -> str:
    if value is None:
        return ""
    if baseline is None:
        return f"{value:.6g}"
    return f"{value:.6g} ({improvement(value, baseline):.2f} %)"


def convergence_table(summaries: Sequence[StudySummary], baseline: float | None = None) -> Table:
    budgets = sorted({c.budget for s in summaries for c in s.checkpoints})
    header = ["budget", *(_column_name(s) for s in summaries)]
    rows = []
    for budget in budgets:
        row = [f"{budget:g}"]
        for summary in summaries:
            median = next((c.median for c in summary.checkpoints if c.budget == budget), None)
            row.append(_cell(median, baseline))
        rows.append(row)
    return header, rows


def call_count_table(summaries: Sequence[StudySummary]) -> Table:
    present = {label for s in summaries for label in s.level_labels}
    labels = [label for label in _LABEL_ORDER if label in present]
    labels += sorted(present - set(labels), reverse=True)
    header = ["algorithm", *labels]
    rows = []
    for summary in summaries:
        counts = dict(zip(summary.level_labels, summary.call_counts, strict=True))
        rows.append([_column_name(summary), *(f"{counts[label]:.1f}" if label in counts else "" for label in labels)])
    return header, rows


def format_text(table: Table) -> str:
    header, rows = table
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    lines = []
    for row in [header, *rows]:
        cells = [row[0].ljust(widths[0]), *(cell.rjust(w) for cell, w in zip(row[1:], widths[1:], strict=True))]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def format_csv(table: Table) -> str:
    header, rows = table
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue().rstrip("\n")


def format_comparison(summaries: Sequence[StudySummary], baseline: float | None = None, fmt: Literal["text", "csv"] = "text") -> str:
    """Both tables, separated by a blank line."""
    render = format_text if fmt == "text" else format_csv
    return f"{render(convergence_table(summaries, baseline))}\n\n{render(call_count_table(summaries))}"
