import pytest

from pamfbo.models import StudyConfig

QUICK = {
    "fit": {"n_starts": 2, "max_evaluations": 120},
    "search": {"candidates_per_dimension": 48, "refine_top": 2, "refine_evaluations": 60},
}


@pytest.fixture
def make_study():
    """Build a `StudyConfig` with small surrogate and search settings."""

    def factory(**overrides) -> StudyConfig:
        data = {"problem": {"name": "forrester"}, "algorithm": "MFBO", "init": {"counts": [6, 3]}, "budget": 5.0, **QUICK}
        return StudyConfig.model_validate({**data, **overrides})

    return factory
