"""Unit tests for the published schema documents."""

import json

from typer.testing import CliRunner

from pamfbo.problems import PROBLEM_LEVELS
from pamfbo.schema import SCHEMA_DIALECT, SUMMARY_SCHEMA_ID, build_summary_schema, problem_manifests
from scripts.generate_schema import app, write_schema_files

runner = CliRunner()


def test_summary_schema_header():
    schema = build_summary_schema()
    assert schema["$schema"] == SCHEMA_DIALECT
    assert schema["$id"] == SUMMARY_SCHEMA_ID
    assert {"name", "problem", "algorithm"} <= set(schema["properties"])


def test_manifest_per_problem():
    manifests = problem_manifests()
    assert set(manifests) == set(PROBLEM_LEVELS)
    for name, manifest in manifests.items():
        assert manifest.name == name


def test_write_schema_files(tmp_path):
    written = write_schema_files(tmp_path)

    expected = {tmp_path / "study.schema.json", tmp_path / "summary.schema.json"}
    expected |= {tmp_path / "problems" / f"{name}.json" for name in PROBLEM_LEVELS}
    assert set(written) == expected
    assert json.loads((tmp_path / "summary.schema.json").read_text())["$id"] == SUMMARY_SCHEMA_ID
    forrester = json.loads((tmp_path / "problems" / "forrester.json").read_text())
    assert forrester["name"] == "forrester"


def test_script_output_dir_option(tmp_path):
    result = runner.invoke(app, ["--output-dir", str(tmp_path / "out")])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "out" / "study.schema.json").is_file()
    assert result.output.count("written:") == 2 + len(PROBLEM_LEVELS)
