"""JSON Schemas and reference documents for pamfbo files.

Shared by the ``pamfbo schema`` CLI command and ``scripts/generate_schema.py``.
Study files are described by the Pydantic `StudyConfig` model; problems and
biases appear as tagged unions keyed by ``name``. The ``summary.json`` written
by a study is described by `StudySummary`.
"""

from typing import Any

from pydantic import BaseModel

from pamfbo.models import ProblemManifest, StudyConfig, StudySummary
from pamfbo.problems import PROBLEM_LEVELS, problem_manifest

SCHEMA_DIALECT = "https://json-schema.org/draft/2020-12/schema"
SCHEMA_BASE = "https://aeresov.github.io/pamfbo/schema"
SCHEMA_ID = f"{SCHEMA_BASE}/study.schema.json"
SUMMARY_SCHEMA_ID = f"{SCHEMA_BASE}/summary.schema.json"


def _with_header(model: type[BaseModel], schema_id: str) -> dict[str, Any]:
    schema = model.model_json_schema()
    schema["$schema"] = SCHEMA_DIALECT
    schema["$id"] = schema_id
    return schema


def build_schema() -> dict[str, Any]:
    """Return the JSON Schema dict for the ``StudyConfig`` model."""
    schema = _with_header(StudyConfig, SCHEMA_ID)
    # The model forbids extra keys; "$schema" is editor metadata dropped by the loader.
    schema.setdefault("properties", {})["$schema"] = {
        "type": "string",
        "description": "URL of this schema, for editor as-you-type validation. Dropped during model validation.",
    }
    return schema


def build_summary_schema() -> dict[str, Any]:
    return _with_header(StudySummary, SUMMARY_SCHEMA_ID)


def problem_manifests() -> dict[str, ProblemManifest]:
    """Default-configured manifest of every benchmark problem, by name."""
    return {name: problem_manifest(name) for name in PROBLEM_LEVELS}
