"""Benchmark studies from ``configs/``.

The shipped study files must validate cleanly; the slow tests run them and
check the qualitative orderings between EGO, MFBO and PA-MFBO.
"""

from pathlib import Path

import pytest

from pamfbo.history_writer import read_history_csv
from pamfbo.models import StudySummary
from pamfbo.study import run_study
from pamfbo.validation import DiagnosticCode, load_config, validate_config

CONFIGS = Path(__file__).parents[2] / "configs"


def _run(name: str, output_dir: Path) -> StudySummary:
    return run_study(load_config(CONFIGS / f"{name}.json"), output_dir / name)


def _ledger_is_consistent(directory: Path, replications: int) -> bool:
    for r in range(replications):
        rows = read_history_csv(directory / f"run_{r}.csv")
        budget = 0.0
        trace = []
        for row in rows:
            budget += row["lambda"]
            if row["budget"] != budget:
                return False
            if row["best_hf"] is not None:
                trace.append(row["best_hf"])
        if any(b > a for a, b in zip(trace, trace[1:], strict=False)):
            return False
    return True


def _median_budget(summary: StudySummary) -> float:
    """Runs that never reach the target count as needing more than the whole budget."""
    band = summary.budget_to_target
    return band.median if band.runs * 2 > summary.replications else float("inf")


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    result = validate_config(path)
    assert result.valid, result.errors
    assert result.warnings == []
    assert {d.code for d in result.diagnostics} <= {DiagnosticCode.IDENTITY_PA_MFBO}


@pytest.mark.slow
def test_multifidelity_reaches_forrester_optimum_sooner(tmp_path):
    ego = _run("forrester_ego", tmp_path)
    mfbo = _run("forrester_mfbo", tmp_path)
    pa = _run("forrester_pa_mfbo", tmp_path)
    assert not (ego.failed or mfbo.failed or pa.failed)
    assert _median_budget(mfbo) < _median_budget(ego)
    assert _median_budget(pa) < _median_budget(ego)
    assert mfbo.call_counts[-1] < ego.call_counts[-1]
    assert pa.call_counts[-1] < ego.call_counts[-1]
    for name in ("forrester_ego", "forrester_mfbo", "forrester_pa_mfbo"):
        assert _ledger_is_consistent(tmp_path / name, 10)


@pytest.mark.slow
def test_mach_bias_targets_transonic_high_fidelity_queries(tmp_path):
    mfbo = _run("cross_regime_mfbo", tmp_path)
    pa = _run("cross_regime_pa_mfbo", tmp_path)
    assert not (mfbo.failed or pa.failed)
    assert pa.checkpoints[-1].median <= mfbo.checkpoints[-1].median
    assert pa.hf_region_fraction > (mfbo.hf_region_fraction or 0.0)
    assert _ledger_is_consistent(tmp_path / "cross_regime_mfbo", 10)
    assert _ledger_is_consistent(tmp_path / "cross_regime_pa_mfbo", 10)


@pytest.mark.slow
def test_damage_bias_improves_identification(tmp_path):
    ego = _run("plate_ego", tmp_path)
    mfbo = _run("plate_mfbo", tmp_path)
    pa = _run("plate_pa_mfbo", tmp_path)
    assert not (ego.failed or mfbo.failed or pa.failed)
    errors = {s.algorithm.value: s.identification.max_relative_error.median for s in (ego, mfbo, pa)}
    assert errors["PA-MFBO"] < errors["MFBO"]
    assert errors["PA-MFBO"] < errors["EGO"]
    for summary in (ego, mfbo, pa):
        assert summary.identification.minimum_discrepancy.q25 >= 0.0
    for name in ("plate_ego", "plate_mfbo", "plate_pa_mfbo"):
        assert _ledger_is_consistent(tmp_path / name, 10)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["forrester_pa_mfbo", "cross_regime_pa_mfbo", "plate_pa_mfbo"])
def test_rerun_gives_identical_summary(name, tmp_path):
    _run(name, tmp_path / "first")
    _run(name, tmp_path / "second")
    first = (tmp_path / "first" / name / "summary.json").read_text()
    second = (tmp_path / "second" / name / "summary.json").read_text()
    assert first == second
