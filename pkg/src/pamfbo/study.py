"""Replicated studies: run one configuration under consecutive seeds and
summarize the runs with median and quartile statistics.

Replication ``r`` uses seed ``config.seed + r``. Outputs under the study
directory: ``run_<r>.csv`` (history), ``run_<r>.json`` (run metadata) and
``summary.json``. A replication that fails is logged and listed in the
summary; the completed ones are kept and summarized.
"""

import logging
import os
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from pamfbo.acquisition import build_bias
from pamfbo.constants import Algorithm, EnvVars
from pamfbo.errors import PamfboError, RunAbortedError
from pamfbo.history_writer import write_history_csv, write_run_document, write_summary
from pamfbo.metrics import best_at, budget_to_target, call_counts, hf_region_fraction, level_labels, metrics
from pamfbo.models import (
    CheckpointStats,
    FailedRun,
    IdentificationStats,
    PercentileBand,
    PlateIdentificationSpec,
    RunHistory,
    StudyConfig,
    StudySummary,
)
from pamfbo.optimizer import run
from pamfbo.problems import PROBLEM_LEVELS, build_problem, sample_ground_truths

logger = logging.getLogger(__name__)


def resolve_output_dir(config: StudyConfig) -> Path:
    """Relative output directories are resolved against ``PAMFBO_OUTPUT_ROOT``
    when set, else against the working directory."""
    if config.output_dir.is_absolute():
        return config.output_dir
    root = os.environ.get(EnvVars.OUTPUT_ROOT)
    return Path(root) / config.output_dir if root else config.output_dir


def percentile_band(values: Sequence[float]) -> PercentileBand:
    """Median and quartiles with linear interpolation between closest ranks."""
    if not values:
        return PercentileBand(median=None, q25=None, q75=None, runs=0)
    median, q25, q75 = np.percentile(np.asarray(values, dtype=float), [50.0, 25.0, 75.0], method="linear")
    return PercentileBand(median=float(median), q25=float(q25), q75=float(q75), runs=len(values))


def ground_truths(config: StudyConfig) -> list[list[float]] | None:
    """Per-replication identification targets: sampled when an inverse
    problem has no configured ``q_true``."""
    if isinstance(config.problem, PlateIdentificationSpec) and config.problem.q_true is None:
        return sample_ground_truths(config.replications, config.seed).tolist()
    return None


def run_replication(config: StudyConfig, replication: int, ground_truth: Sequence[float] | None = None) -> RunHistory:
    problem = build_problem(config.problem, ground_truth)
    bias = build_bias(config.bias, problem.coordinate_names) if config.algorithm is Algorithm.PA_MFBO else None
    return run(
        problem,
        config.algorithm,
        config.init,
        config.budget,
        config.seed + replication,
        bias=bias,
        noise_variance=config.noise_variance,
        fit_config=config.fit,
        search_config=config.search,
    )


def _replicate(config: StudyConfig, replication: int, ground_truth: Sequence[float] | None, output_dir: Path) -> RunHistory | FailedRun:
    seed = config.seed + replication
    try:
        history = run_replication(config, replication, ground_truth)
        write_history_csv(output_dir / f"run_{replication}.csv", history)
        write_run_document(output_dir / f"run_{replication}.json", history, metrics(history))
        if history.status == "aborted":
            raise RunAbortedError(history.error or "run aborted", history)
    except PamfboError as e:
        logger.error(f"replication {replication} (seed {seed}) failed: {e}")
        return FailedRun(replication=replication, seed=seed, error=str(e))
    logger.info(f"replication {replication} (seed {seed}): incumbent {history.incumbent_value} after {len(history.records)} queries")
    return history


def summarize(config: StudyConfig, histories: Sequence[RunHistory], failed: Sequence[FailedRun] = ()) -> StudySummary:
    """Statistics over completed runs; recomputable from their history CSVs."""
    levels = 1 if config.algorithm is Algorithm.EGO else PROBLEM_LEVELS[config.problem.name]
    checkpoints = config.checkpoints or [config.budget]
    summary = StudySummary(
        name=config.name or f"{config.problem.name}-{config.algorithm.value}",
        problem=config.problem.name,
        algorithm=config.algorithm,
        bias=config.bias.name if config.algorithm is Algorithm.PA_MFBO else "identity",
        replications=config.replications,
        seeds=[config.seed + r for r in range(config.replications)],
        level_labels=level_labels(levels),
        checkpoints=[
            CheckpointStats(budget=b, **percentile_band([v for h in histories if (v := best_at(h, b)) is not None]).model_dump())
            for b in checkpoints
        ],
        final=percentile_band([h.incumbent_value for h in histories if h.incumbent_value is not None]),
        call_counts=np.mean([call_counts(h) for h in histories], axis=0).tolist() if histories else [0.0] * levels,
        failed=list(failed),
    )
    if config.target is not None:
        reached = [b for h in histories if (b := budget_to_target(h, config.target.value, config.target.tolerance)) is not None]
        summary.budget_to_target = percentile_band(reached)
    if config.region is not None:
        fractions = [f for h in histories if (f := hf_region_fraction(h, config.region.index, config.region.threshold)) is not None]
        summary.hf_region_fraction = float(np.mean(fractions)) if fractions else None
    identified = [m for h in histories if (m := metrics(h)).relative_errors is not None]
    if identified:
        summary.identification = IdentificationStats(
            median_relative_errors=np.median([m.relative_errors for m in identified], axis=0).tolist(),
            max_relative_error=percentile_band([m.max_relative_error for m in identified]),
            minimum_discrepancy=percentile_band([m.incumbent_value for m in identified]),
        )
    return summary


def run_study(config: StudyConfig, output_dir: Path | None = None) -> StudySummary:
    """Run every replication, write per-run files and ``summary.json``."""
    output_dir = output_dir or resolve_output_dir(config)
    truths = ground_truths(config)
    jobs = [(r, None if truths is None else truths[r]) for r in range(config.replications)]
    logger.info(f"study {config.name or config.problem.name}: {config.replications} replication(s) of {config.algorithm.value} into {output_dir}")

    if config.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=min(config.workers, len(jobs))) as executor:
            results = list(executor.map(lambda job: _replicate(config, job[0], job[1], output_dir), jobs))
    else:
        results = [_replicate(config, r, truth, output_dir) for r, truth in jobs]

    histories = [r for r in results if isinstance(r, RunHistory)]
    failed = [r for r in results if isinstance(r, FailedRun)]
    summary = summarize(config, histories, failed)
    write_summary(output_dir / "summary.json", summary)
    return summary
