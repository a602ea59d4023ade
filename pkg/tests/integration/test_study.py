import json

import pytest

import pamfbo.study
from pamfbo.errors import ConfigurationError
from pamfbo.history_writer import load_summary, read_history_csv
from pamfbo.metrics import ledger_violations
from pamfbo.study import percentile_band, resolve_output_dir, run_replication, run_study


def _best_at(rows, budget):
    best = None
    for row in rows:
        if row["budget"] > budget * (1.0 + 1e-12):
            break
        best = row["best_hf"]
    return best


class TestPercentileBand:
    def test_linear_interpolation(self):
        band = percentile_band([1.0, 2.0, 3.0, 4.0])
        assert (band.median, band.q25, band.q75, band.runs) == (2.5, 1.75, 3.25, 4)

    def test_single_value(self):
        band = percentile_band([0.5])
        assert (band.median, band.q25, band.q75) == (0.5, 0.5, 0.5)

    def test_empty(self):
        band = percentile_band([])
        assert band.median is None
        assert band.runs == 0


class TestOutputDir:
    def test_env_root(self, make_study, monkeypatch, tmp_path):
        monkeypatch.setenv("PAMFBO_OUTPUT_ROOT", str(tmp_path))
        assert resolve_output_dir(make_study(output_dir="forrester")) == tmp_path / "forrester"

    def test_absolute_wins(self, make_study, monkeypatch, tmp_path):
        monkeypatch.setenv("PAMFBO_OUTPUT_ROOT", "/elsewhere")
        assert resolve_output_dir(make_study(output_dir=str(tmp_path))) == tmp_path

    def test_default(self, make_study, monkeypatch):
        monkeypatch.delenv("PAMFBO_OUTPUT_ROOT", raising=False)
        assert str(resolve_output_dir(make_study())) == "results"


class TestRunStudy:
    def test_budget_equal_to_initial_cost(self, make_study, tmp_path):
        summary = run_study(make_study(budget=3.75, replications=2), tmp_path)
        assert [c.budget for c in summary.checkpoints] == [3.75]
        for r in range(2):
            document = json.loads((tmp_path / f"run_{r}.json").read_text())
            rows = read_history_csv(tmp_path / f"run_{r}.csv")
            assert len(rows) == 9
            assert document["run"]["incumbent_value"] == min(row["y"] for row in rows if row["level"] == 2)
        values = [json.loads((tmp_path / f"run_{r}.json").read_text())["run"]["incumbent_value"] for r in range(2)]
        assert summary.final.median == pytest.approx(sum(values) / 2)

    def test_summary_recomputed_from_csv(self, make_study, tmp_path):
        config = make_study(replications=3, checkpoints=[4.0, 4.5, 5.0], name="recompute")
        summary = run_study(config, tmp_path)
        assert load_summary(tmp_path / "summary.json") == summary
        runs = [read_history_csv(tmp_path / f"run_{r}.csv") for r in range(3)]
        for checkpoint in summary.checkpoints:
            expected = percentile_band([_best_at(rows, checkpoint.budget) for rows in runs])
            assert checkpoint.median == expected.median
            assert checkpoint.q25 == expected.q25
            assert checkpoint.q75 == expected.q75
        counts = [[sum(row["level"] == level for row in rows) for level in (1, 2)] for rows in runs]
        assert summary.call_counts == pytest.approx([sum(c[i] for c in counts) / 3 for i in range(2)])

    def test_checkpoint_grid_shared_across_algorithms(self, make_study, tmp_path):
        checkpoints = [4.0, 5.0]
        ego = run_study(make_study(algorithm="EGO", init={"counts": [0, 3]}, checkpoints=checkpoints), tmp_path / "ego")
        mfbo = run_study(make_study(checkpoints=checkpoints), tmp_path / "mfbo")
        assert [c.budget for c in ego.checkpoints] == [c.budget for c in mfbo.checkpoints]
        assert ego.level_labels == ["HF"]
        assert mfbo.level_labels == ["LF", "HF"]

    def test_replication_seeds(self, make_study, tmp_path):
        summary = run_study(make_study(seed=10, replications=3, budget=3.75), tmp_path)
        assert summary.seeds == [10, 11, 12]
        seeds = [json.loads((tmp_path / f"run_{r}.json").read_text())["run"]["seed"] for r in range(3)]
        assert seeds == [10, 11, 12]

    def test_failed_replication_is_listed(self, make_study, tmp_path, monkeypatch):
        original = pamfbo.study.run_replication

        def flaky(config, replication, ground_truth=None):
            if replication == 1:
                raise ConfigurationError("replication refused")
            return original(config, replication, ground_truth)

        monkeypatch.setattr(pamfbo.study, "run_replication", flaky)
        summary = run_study(make_study(replications=3, budget=3.75), tmp_path)
        assert [(f.replication, f.seed) for f in summary.failed] == [(1, 1)]
        assert "replication refused" in summary.failed[0].error
        assert summary.final.runs == 2
        assert not (tmp_path / "run_1.csv").exists()

    def test_bias_failure_keeps_partial_history(self, make_study, tmp_path):
        config = make_study(algorithm="PA-MFBO", bias={"name": "custom", "expression": "x - 0.5"}, replications=2)
        summary = run_study(config, tmp_path)
        assert [f.replication for f in summary.failed] == [0, 1]
        assert all("must be positive" in f.error for f in summary.failed)
        for r in range(2):
            rows = (tmp_path / f"run_{r}.csv").read_text().splitlines()
            assert len(rows) == 1 + 9
            assert json.loads((tmp_path / f"run_{r}.json").read_text())["run"]["status"] == "aborted"
        assert (tmp_path / "summary.json").exists()

    def test_threaded_replications_match_sequential(self, make_study, tmp_path):
        sequential = run_study(make_study(replications=3), tmp_path / "seq")
        threaded = run_study(make_study(replications=3, workers=3), tmp_path / "par")
        assert sequential == threaded

    def test_deterministic(self, make_study, tmp_path):
        config = make_study(algorithm="PA-MFBO", replications=2, checkpoints=[4.5, 5.0])
        run_study(config, tmp_path / "a")
        run_study(config, tmp_path / "b")
        assert (tmp_path / "a" / "summary.json").read_text() == (tmp_path / "b" / "summary.json").read_text()
        for r in range(2):
            assert (tmp_path / "a" / f"run_{r}.csv").read_text() == (tmp_path / "b" / f"run_{r}.csv").read_text()

    def test_target_and_region_statistics(self, make_study, tmp_path):
        config = make_study(replications=2, target={"value": 100.0, "tolerance": 1.0}, region={"index": 0, "threshold": 0.5})
        summary = run_study(config, tmp_path)
        # every HF value is below 100, so the target is met at the first HF point
        assert summary.budget_to_target.runs == 2
        assert summary.hf_region_fraction is None or 0.0 <= summary.hf_region_fraction <= 1.0

    def test_identification_with_sampled_ground_truths(self, make_study, tmp_path):
        config = make_study(problem={"name": "plate_identification"}, init={"counts": [8, 3]}, budget=4.6, replications=2)
        summary = run_study(config, tmp_path)
        truths = [json.loads((tmp_path / f"run_{r}.json").read_text())["run"]["ground_truth"] for r in range(2)]
        assert truths[0] != truths[1]
        assert summary.identification is not None
        assert len(summary.identification.median_relative_errors) == 4
        assert summary.identification.minimum_discrepancy.median >= 0.0


def test_ledger_holds_for_study_runs(make_study):
    history = run_replication(make_study(algorithm="PA-MFBO", budget=6.0), 0)
    assert ledger_violations(history) == []
