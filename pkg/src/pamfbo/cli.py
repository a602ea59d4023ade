import enum
import json
import logging
from pathlib import Path
from typing import Annotated

import typer
from pydantic import ValidationError

from pamfbo.constants import ExitCode
from pamfbo.errors import PamfboError
from pamfbo.history_writer import load_summary
from pamfbo.problems import problem_manifest
from pamfbo.report_formatter import format_comparison
from pamfbo.schema import build_schema
from pamfbo.study import resolve_output_dir, run_study
from pamfbo.validation import ValidateResult, load_config, validate_config

app = typer.Typer()


class OutputFormat(enum.StrEnum):
    text = "text"
    json = "json"


class TableFormat(enum.StrEnum):
    text = "text"
    csv = "csv"


class LogLevel(enum.StrEnum):
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"


class ProblemName(enum.StrEnum):
    forrester = "forrester"
    cross_regime = "cross_regime"
    plate_identification = "plate_identification"


@app.callback()
def main(
    log_level: Annotated[LogLevel, typer.Option("--log-level", help="Logging threshold for progress messages on stderr.")] = LogLevel.WARNING,
) -> None:
    """pamfbo command-line tools."""
    logging.basicConfig(level=log_level.value, format="%(levelname)s %(name)s: %(message)s", force=True)


def _print_diagnostics(result: ValidateResult, err: bool = False) -> None:
    for diagnostic in result.diagnostics:
        typer.echo(f"  {diagnostic.severity} [{diagnostic.code}]: {diagnostic.message}", err=err)


@app.command()
def run(
    config: Annotated[Path, typer.Argument(help="Study JSON file to run.")],
    output_dir: Annotated[Path | None, typer.Option("--output-dir", help="Directory for run CSVs and summary.json (default: the study's output_dir).")] = None,
) -> None:
    """Run a replicated study.

    The file is validated first; an invalid file exits with code 1 before
    anything runs. Exits with code 2 when a replication fails (completed
    replications are still written and summarized).
    """
    result = validate_config(config)
    if not result.valid:
        typer.echo(f"{config}: INVALID", err=True)
        _print_diagnostics(result, err=True)
        raise typer.Exit(ExitCode.CONFIG_ERROR)

    study = load_config(config)
    target = output_dir or resolve_output_dir(study)
    try:
        summary = run_study(study, target)
    except PamfboError as e:
        typer.echo(f"error: {e}", err=True)
        raise typer.Exit(ExitCode.RUNTIME_FAILURE) from e

    completed = summary.replications - len(summary.failed)
    typer.echo(f"{summary.name}: {completed}/{summary.replications} replication(s) completed, median best {summary.final.median}")
    typer.echo(f"summary written to {target / 'summary.json'}")
    for failure in summary.failed:
        typer.echo(f"  replication {failure.replication} (seed {failure.seed}) failed: {failure.error}", err=True)
    raise typer.Exit(ExitCode.RUNTIME_FAILURE if summary.failed else ExitCode.SUCCESS)


@app.command()
def compare(
    summaries: Annotated[list[Path], typer.Argument(help="summary.json files, one column each.")],
    baseline: Annotated[float | None, typer.Option("--baseline", help="Reference value; cells show the percentage improvement over it.")] = None,
    output_format: Annotated[TableFormat, typer.Option("--format", help="Output format: aligned text or CSV.")] = TableFormat.text,
) -> None:
    """Tabulate median best values per checkpoint and average call counts."""
    try:
        loaded = [load_summary(path) for path in summaries]
    except (OSError, ValidationError) as e:
        typer.echo(f"error: cannot load summary: {e}", err=True)
        raise typer.Exit(ExitCode.CONFIG_ERROR) from e
    try:
        typer.echo(format_comparison(loaded, baseline, output_format.value))
    except PamfboError as e:
        typer.echo(f"error: {e}", err=True)
        raise typer.Exit(ExitCode.CONFIG_ERROR) from e


@app.command()
def validate(
    paths: Annotated[list[Path], typer.Argument(help="Study JSON file(s) to validate.")],
    output_format: Annotated[OutputFormat, typer.Option("--format", help="Output format: human-readable text or machine-readable JSON.")] = OutputFormat.text,
    strict: Annotated[bool, typer.Option("--strict", help="Treat warnings as failures for the exit code.")] = False,
) -> None:
    """Validate pamfbo study file(s) without running them.

    Reports errors and warnings (each with a stable PAMFBOxxx diagnostic code)
    per file and exits non-zero if any file is invalid (or, with --strict, has
    any warnings).
    """
    results = [(path, validate_config(path)) for path in paths]

    def passed(result: ValidateResult) -> bool:
        return result.valid and not (strict and result.warnings)

    all_passed = all(passed(result) for _, result in results)

    if output_format is OutputFormat.json:
        payload = {
            "valid": all_passed,
            "strict": strict,
            "files": [{"path": str(path), "result": result.model_dump()} for path, result in results],
        }
        typer.echo(json.dumps(payload, indent=2, default=str))
    else:
        for path, result in results:
            if not result.valid:
                status = "INVALID"
            elif result.warnings:
                status = "FAILED (warnings)" if strict else "OK with warnings"
            else:
                status = "OK"
            typer.echo(f"{path}: {status}")
            _print_diagnostics(result)

    raise typer.Exit(ExitCode.SUCCESS if all_passed else ExitCode.CONFIG_ERROR)


@app.command()
def schema() -> None:
    """Emit the JSON Schema for study files (editor autocomplete/validation).

    Writes to stdout; redirect to a file (``pamfbo schema > study.schema.json``).
    """
    typer.echo(json.dumps(build_schema(), indent=2, default=str))


@app.command()
def manifest(
    name: Annotated[ProblemName, typer.Argument(help="Benchmark problem.")],
    n_weights: Annotated[int, typer.Option("--n-weights", min=1, help="Shape weights of the cross-regime problem.")] = 1,
) -> None:
    """Print a problem's manifest: dimension, levels, bounds, cost ratios, psi."""
    typer.echo(problem_manifest(name.value, n_weights).model_dump_json(indent=2))


if __name__ == "__main__":
    app()
