"""Problem and bias selection are tagged unions: an unknown or missing tag is a
located ``union_tag_invalid`` ValidationError that names the accepted tags."""

import pytest
from pydantic import ValidationError

from pamfbo.models import RunConfig

BASE = {"problem": {"name": "forrester"}, "algorithm": "MFBO", "init": {"counts": [10, 3]}, "budget": 15}

CASES = [
    ("problem: unknown name", {**BASE, "problem": {"name": "branin"}}),
    ("problem: missing name", {**BASE, "problem": {"cost_ratios": [0.1, 1.0]}}),
    ("bias: unknown name", {**BASE, "bias": {"name": "reynolds"}}),
    ("bias: missing name", {**BASE, "bias": {"index": 1}}),
]


@pytest.mark.parametrize("label,data", CASES, ids=[c[0] for c in CASES])
def test_unknown_tag_raises_validation_error(label, data):
    with pytest.raises(ValidationError) as exc_info:
        RunConfig.model_validate(data)
    assert any(e["type"] in {"union_tag_invalid", "union_tag_not_found"} for e in exc_info.value.errors()), exc_info.value.errors()


def test_accepted_problem_names_are_listed():
    with pytest.raises(ValidationError) as exc_info:
        RunConfig.model_validate({**BASE, "problem": {"name": "branin"}})
    message = str(exc_info.value)
    assert "branin" in message
    assert "cross_regime" in message


def test_error_is_located_at_the_union_field():
    with pytest.raises(ValidationError) as exc_info:
        RunConfig.model_validate({**BASE, "bias": {"name": "reynolds"}})
    assert exc_info.value.errors()[0]["loc"][0] == "bias"
