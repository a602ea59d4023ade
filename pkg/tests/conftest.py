import numpy as np
import pytest

from pamfbo.mfgp import ObservationSet, condition
from pamfbo.models import FitConfig, LevelHyperparameters, SearchConfig
from pamfbo.problems import forrester_high, forrester_low

LF_SITES = (0.0, 0.3, 0.6, 1.0)
HF_SITES = (0.2, 0.8)


@pytest.fixture
def toy_data() -> ObservationSet:
    """Four Forrester low-fidelity points and two high-fidelity points on [0, 1]."""
    data = ObservationSet([0.0], [1.0], 2)
    for x in LF_SITES:
        data = data.with_observation([x], 1, forrester_low(np.array([x])))
    for x in HF_SITES:
        data = data.with_observation([x], 2, forrester_high(np.array([x])))
    return data


@pytest.fixture
def toy_hyper() -> list[LevelHyperparameters]:
    return [
        LevelHyperparameters(roughness=[10.0], process_variance=50.0),
        LevelHyperparameters(roughness=[5.0], process_variance=4.0, scaling=2.0, trend=-1.0),
    ]


@pytest.fixture
def toy_model(toy_data, toy_hyper):
    return condition(toy_data, toy_hyper)


@pytest.fixture
def quick_fit() -> FitConfig:
    return FitConfig(n_starts=2, max_evaluations=150)


@pytest.fixture
def quick_search() -> SearchConfig:
    return SearchConfig(candidates_per_dimension=64, refine_top=2, refine_evaluations=60)
