#!/usr/bin/env python3
"""Write the published schema files of the docs site.

Run with: uv run python scripts/generate_schema.py [--output-dir DIR]

Writes, under ``docs/schema`` by default:

- ``study.schema.json``: study files, for ``$schema`` editor validation;
- ``summary.schema.json``: the ``summary.json`` of a finished study;
- ``problems/<name>.json``: the manifest of each benchmark problem.
"""

import json
from pathlib import Path
from typing import Annotated, Any

import typer

from pamfbo.schema import build_schema, build_summary_schema, problem_manifests

DEFAULT_OUTPUT_DIR = Path(__file__).resolve().parents[1] / "docs" / "schema"

app = typer.Typer()


def _dump(path: Path, document: dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    return path


def write_schema_files(output_dir: Path) -> list[Path]:
    written = [
        _dump(output_dir / "study.schema.json", build_schema()),
        _dump(output_dir / "summary.schema.json", build_summary_schema()),
    ]
    for name, manifest in problem_manifests().items():
        written.append(_dump(output_dir / "problems" / f"{name}.json", manifest.model_dump(mode="json")))
    return written


@app.command()
def main(
    output_dir: Annotated[Path, typer.Option("--output-dir", "-o", help="Directory receiving the schema files.")] = DEFAULT_OUTPUT_DIR,
) -> None:
    for path in write_schema_files(output_dir):
        typer.echo(f"written: {path}")


if __name__ == "__main__":
    app()
