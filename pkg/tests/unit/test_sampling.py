import numpy as np
import pytest

from pamfbo.errors import DimensionError, DomainError
from pamfbo.sampling import halton_pool, latin_hypercube


def _occupied_bins(sample: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> list[set[int]]:
    n = sample.shape[0]
    bins = np.floor((sample - lower) / (upper - lower) * n).astype(int)
    return [set(np.clip(bins[:, j], 0, n - 1).tolist()) for j in range(sample.shape[1])]


class TestLatinHypercube:
    def test_one_point_per_quartile(self):
        sample = latin_hypercube(4, 1, [(0.0, 1.0)], seed=0)
        assert sorted(np.floor(sample[:, 0] * 4).astype(int).tolist()) == [0, 1, 2, 3]

    def test_every_projection_fills_every_bin(self):
        bounds = [(-1.0, 1.0)] * 6 + [(0.6, 0.99)]
        sample = latin_hypercube(32, 7, bounds, seed=42)
        box = np.asarray(bounds)
        assert sample.shape == (32, 7)
        assert all(len(bins) == 32 for bins in _occupied_bins(sample, box[:, 0], box[:, 1]))

    def test_inside_bounds(self):
        bounds = [(0.0, 102.0), (0.0, 456.0), (3e-5, 30.0), (0.0, 20.0)]
        sample = latin_hypercube(15, 4, bounds, seed=1)
        box = np.asarray(bounds)
        assert np.all(sample >= box[:, 0])
        assert np.all(sample <= box[:, 1])

    def test_deterministic(self):
        first = latin_hypercube(10, 3, [(0.0, 1.0)] * 3, seed=[3, 1])
        second = latin_hypercube(10, 3, [(0.0, 1.0)] * 3, seed=[3, 1])
        np.testing.assert_array_equal(first, second)

    def test_seed_changes_design(self):
        first = latin_hypercube(10, 2, [(0.0, 1.0)] * 2, seed=1)
        second = latin_hypercube(10, 2, [(0.0, 1.0)] * 2, seed=2)
        assert not np.array_equal(first, second)

    def test_accepts_seed_sequence(self):
        stream = np.random.SeedSequence(9).spawn(2)[1]
        assert latin_hypercube(3, 1, [(0.0, 1.0)], seed=stream).shape == (3, 1)

    def test_zero_points(self):
        with pytest.raises(DomainError):
            latin_hypercube(0, 1, [(0.0, 1.0)], seed=0)

    def test_bounds_shape(self):
        with pytest.raises(DimensionError):
            latin_hypercube(4, 2, [(0.0, 1.0)], seed=0)


class TestHaltonPool:
    def test_shape_and_unit_cube(self):
        pool = halton_pool(128, 3, seed=0)
        assert pool.shape == (128, 3)
        assert np.all((pool >= 0.0) & (pool < 1.0))

    def test_deterministic(self):
        np.testing.assert_array_equal(halton_pool(16, 2, seed=[1, 2]), halton_pool(16, 2, seed=[1, 2]))
