import pytest

from pamfbo.constants import Algorithm
from pamfbo.errors import DomainError
from pamfbo.models import CheckpointStats, PercentileBand, StudySummary
from pamfbo.report_formatter import (
    call_count_table,
    convergence_table,
    format_comparison,
    format_csv,
    format_text,
    improvement,
)


def _summary(name, algorithm, medians, labels, counts, bias="identity") -> StudySummary:
    checkpoints = [CheckpointStats(budget=b, median=m, q25=m, q75=m, runs=5) for b, m in medians.items()]
    return StudySummary(
        name=name,
        problem="plate_identification",
        algorithm=algorithm,
        bias=bias,
        replications=5,
        seeds=list(range(5)),
        level_labels=labels,
        checkpoints=checkpoints,
        final=PercentileBand(median=list(medians.values())[-1], q25=None, q75=None, runs=5),
        call_counts=counts,
    )


@pytest.fixture
def summaries() -> list[StudySummary]:
    return [
        _summary("EGO", Algorithm.EGO, {5.0: 0.05, 10.0: 0.017796}, ["HF"], [10.0]),
        _summary("MFBO", Algorithm.MFBO, {5.0: 0.04, 10.0: 0.015}, ["LF", "HF"], [22.4, 6.0]),
        _summary("", Algorithm.PA_MFBO, {10.0: 0.01347}, ["LF", "MF", "HF"], [20.0, 11.2, 3.5], bias="damage"),
    ]


class TestImprovement:
    def test_value(self):
        assert round(improvement(0.01347, 0.017796), 2) == 24.31

    def test_worse_than_baseline(self):
        assert improvement(3.0, 2.0) == pytest.approx(-50.0)

    def test_zero_baseline(self):
        with pytest.raises(DomainError, match="zero baseline"):
            improvement(1.0, 0.0)


class TestConvergenceTable:
    def test_header_and_budgets(self, summaries):
        header, rows = convergence_table(summaries)
        assert header == ["budget", "EGO", "MFBO", "PA-MFBO (damage)"]
        assert [r[0] for r in rows] == ["5", "10"]

    def test_cells(self, summaries):
        _, rows = convergence_table(summaries)
        assert rows[1] == ["10", "0.017796", "0.015", "0.01347"]

    def test_missing_checkpoint_is_empty(self, summaries):
        _, rows = convergence_table(summaries)
        assert rows[0][3] == ""

    def test_improvement_over_baseline(self, summaries):
        _, rows = convergence_table(summaries, baseline=0.017796)
        assert rows[1][1] == "0.017796 (0.00 %)"
        assert rows[1][3] == "0.01347 (24.31 %)"

    def test_single_summary(self, summaries):
        header, rows = convergence_table(summaries[:1])
        assert header == ["budget", "EGO"]
        assert all(len(r) == 2 for r in rows)


class TestCallCountTable:
    def test_highest_fidelity_first(self, summaries):
        header, _ = call_count_table(summaries)
        assert header == ["algorithm", "HF", "MF", "LF"]

    def test_cells(self, summaries):
        _, rows = call_count_table(summaries)
        assert rows == [
            ["EGO", "10.0", "", ""],
            ["MFBO", "6.0", "", "22.4"],
            ["PA-MFBO (damage)", "3.5", "11.2", "20.0"],
        ]

    def test_generic_labels_after_known_ones(self):
        summary = _summary("deep", Algorithm.MFBO, {1.0: 0.1}, ["L1", "L2", "L3", "L4"], [1.0, 2.0, 3.0, 4.0])
        header, _ = call_count_table([summary])
        assert header == ["algorithm", "L4", "L3", "L2", "L1"]


class TestFormatting:
    def test_text_alignment(self):
        text = format_text((["budget", "a"], [["5", "0.1"], ["10", "0.25"]]))
        assert text.splitlines() == ["budget     a", "5        0.1", "10      0.25"]

    def test_csv(self):
        assert format_csv((["budget", "EGO"], [["5", "0.05 (1.00 %)"]])) == 'budget,EGO\n5,0.05 (1.00 %)'

    def test_comparison_has_both_tables(self, summaries):
        text = format_comparison(summaries, fmt="text")
        convergence, counts = text.split("\n\n")
        assert convergence.startswith("budget")
        assert counts.startswith("algorithm")

    def test_comparison_csv(self, summaries):
        output = format_comparison(summaries, baseline=0.017796, fmt="csv")
        assert output.splitlines()[0] == "budget,EGO,MFBO,PA-MFBO (damage)"
        assert "algorithm,HF,MF,LF" in output.splitlines()
