import math

import numpy as np
import pytest
from scipy.stats import norm

from pamfbo.acquisition import (
    AcquisitionContext,
    DamageBias,
    ExpectedImprovementAcquisition,
    ExpressionBias,
    IdentityBias,
    MachBias,
    PhysicsAwareAcquisition,
    alpha1,
    alpha2,
    alpha3,
    build_bias,
    build_context,
    damage_bias,
    expected_improvement,
    mach_bias,
    u_pa,
    u_pa_batch,
)
from pamfbo.errors import ConfigurationError, DomainError
from pamfbo.expressions import parse_expression
from pamfbo.mfgp import ObservationSet, condition
from pamfbo.models import CustomBiasSpec, DamageBiasSpec, IdentityBiasSpec, MachBiasSpec
from pamfbo.warnings import ProvisionalIncumbentWarning
from tests import oracles

COST_RATIOS = (0.125, 1.0)


class _TopLevelBoost:
    """A bias of 3 at the top level and 1 below it."""

    def __call__(self, x, level, levels):
        return np.full(np.atleast_2d(x).shape[0], 3.0 if level == levels else 1.0)


@pytest.fixture
def context(toy_model):
    return build_context(toy_model, COST_RATIOS)


class TestExpectedImprovement:
    def test_no_uncertainty(self):
        assert expected_improvement(-3.0, 0.0, 1.0) == 0.0
        assert expected_improvement(3.0, 0.0, 1.0) == 0.0

    def test_at_incumbent(self):
        assert expected_improvement(2.0, 1.0, 2.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), abs=1e-9)
        assert expected_improvement(2.0, 1.0, 2.0) == pytest.approx(0.398942, abs=1e-6)

    def test_one_sd_below_incumbent(self):
        assert expected_improvement(1.0, 1.0, 2.0) == pytest.approx(norm.cdf(1.0) + norm.pdf(1.0), abs=1e-9)
        assert expected_improvement(1.0, 1.0, 2.0) == pytest.approx(1.083332, abs=1e-6)

    @pytest.mark.parametrize("mean", [-2.0, 0.0, 0.5, 3.0])
    def test_non_decreasing_in_sd(self, mean):
        sds = np.linspace(0.0, 5.0, 201)
        values = [expected_improvement(mean, sd, 0.5) for sd in sds]
        assert all(b >= a for a, b in zip(values, values[1:], strict=False))

    def test_non_negative_far_above(self):
        assert expected_improvement(100.0, 1.0, 0.0) >= 0.0

    def test_negative_sd(self):
        with pytest.raises(DomainError):
            expected_improvement(0.0, -1.0, 0.0)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            expected_improvement(float("nan"), 1.0, 0.0)


class TestAlphaFactors:
    def test_alpha2_noise_free(self):
        assert alpha2(0.3, 0.0) == 1.0

    def test_alpha2_resolved_point(self):
        assert alpha2(0.0, 0.5) == 0.0

    def test_alpha2_equal_sds(self):
        assert alpha2(1.0, 1.0) == pytest.approx(1.0 - 1.0 / math.sqrt(2.0), abs=1e-9)

    def test_alpha2_fully_resolved_noise_free(self):
        assert alpha2(0.0, 0.0) == 0.0

    def test_alpha2_negative(self):
        with pytest.raises(DomainError):
            alpha2(-1.0, 0.0)

    @pytest.mark.parametrize(
        ("ratios", "level", "expected"),
        [((0.125, 1.0), 2, 1.0), ((0.2, 1.0), 1, 5.0), ((0.125, 1.0), 1, 8.0), ((0.125, 0.2, 1.0), 2, 5.0)],
    )
    def test_alpha3(self, ratios, level, expected):
        assert alpha3(ratios, level) == pytest.approx(expected, abs=1e-9)

    def test_alpha3_level_out_of_range(self):
        with pytest.raises(DomainError):
            alpha3((0.125, 1.0), 3)

    def test_alpha1_is_signed_correlation(self, toy_model):
        assert alpha1(toy_model, [0.45], 1) == toy_model.posterior_correlation([0.45], 1)
        assert alpha1(toy_model, [0.45], 2) == 1.0


class TestMachBias:
    def test_below_top_level(self):
        assert mach_bias(0.95, 1, 3) == 1.0
        assert mach_bias(0.95, 2, 3) == 1.0

    @pytest.mark.parametrize(("mach", "expected"), [(0.5, 2.0), (0.99, 100.0)])
    def test_top_level(self, mach, expected):
        assert mach_bias(mach, 3, 3) == pytest.approx(expected, abs=1e-9)

    def test_singular(self):
        with pytest.raises(DomainError):
            mach_bias(1.0, 2, 2)

    def test_vectorized_matches_scalar(self):
        x = np.array([[0.1, 0.5], [-0.3, 0.99], [0.7, 0.6]])
        values = MachBias()(x, 3, 3)
        np.testing.assert_allclose(values, [mach_bias(m, 3, 3) for m in x[:, 1]], rtol=1e-15)
        np.testing.assert_array_equal(MachBias()(x, 2, 3), np.ones(3))

    def test_index(self):
        assert MachBias(index=0)(np.array([[0.5, 0.0]]), 2, 2)[0] == pytest.approx(2.0)


class TestDamageBias:
    def test_below_top_level(self):
        assert damage_bias(3.0, 19.0, 1, 2) == 1.0

    @pytest.mark.parametrize(("q3", "q4", "expected"), [(30.0, 0.0, 0.525), (3.0, 19.0, 5.5)])
    def test_top_level(self, q3, q4, expected):
        assert damage_bias(q3, q4, 2, 2) == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize(("q3", "q4"), [(0.0, 5.0), (5.0, 20.0)])
    def test_singular(self, q3, q4):
        with pytest.raises(DomainError):
            damage_bias(q3, q4, 2, 2)

    def test_vectorized(self):
        x = np.array([[50.0, 200.0, 30.0, 0.0], [50.0, 200.0, 3.0, 19.0]])
        np.testing.assert_allclose(DamageBias()(x, 2, 2), [0.525, 5.5], rtol=1e-12)


class TestExpressionBias:
    def test_matches_mach_bias(self):
        bias = ExpressionBias(parse_expression("1 / (1 - M)"), ("w", "M"))
        x = np.array([[0.0, 0.5], [0.2, 0.9]])
        np.testing.assert_allclose(bias(x, 3, 3), MachBias()(x, 3, 3), rtol=1e-12)
        np.testing.assert_array_equal(bias(x, 1, 3), np.ones(2))

    def test_unknown_coordinate(self):
        with pytest.raises(ConfigurationError, match="Mach"):
            ExpressionBias(parse_expression("1 / (1 - Mach)"), ("w", "M"))

    def test_must_be_positive(self):
        bias = ExpressionBias(parse_expression("M - 0.7"), ("w", "M"))
        with pytest.raises(DomainError):
            bias(np.array([[0.0, 0.65]]), 2, 2)


class TestBuildBias:
    def test_identity(self):
        assert isinstance(build_bias(IdentityBiasSpec(), ("x",)), IdentityBias)

    def test_mach(self):
        assert build_bias(MachBiasSpec(name="mach", sonic_mach=1.2), ("w", "M")) == MachBias(1.2, -1)

    def test_damage(self):
        assert build_bias(DamageBiasSpec(name="damage"), ("q1", "q2", "q3", "q4")) == DamageBias()

    def test_custom(self):
        assert isinstance(build_bias(CustomBiasSpec(name="custom", expression="2 * M"), ("w", "M")), ExpressionBias)

    def test_index_outside_design(self):
        with pytest.raises(ConfigurationError):
            build_bias(MachBiasSpec(name="mach", index=2), ("w", "M"))

    def test_damage_index_outside_design(self):
        with pytest.raises(ConfigurationError):
            build_bias(DamageBiasSpec(name="damage"), ("x",))


class TestContext:
    def test_incumbent_is_best_high_fidelity_value(self, toy_model, toy_data):
        context = build_context(toy_model, COST_RATIOS)
        assert context.best_hf_value == toy_data.y[toy_data.levels == 2].min()
        assert not context.provisional
        assert context.noise_sd == 0.0

    def test_noise_sd(self, toy_model):
        assert build_context(toy_model, COST_RATIOS, 0.04).noise_sd == pytest.approx(0.2)

    def test_provisional_without_top_level_data(self, toy_data, toy_hyper):
        low_only = ObservationSet([0.0], [1.0], 2)
        for x, y in zip(toy_data.x[toy_data.levels == 1], toy_data.y[toy_data.levels == 1], strict=True):
            low_only = low_only.with_observation(x, 1, y)
        model = condition(low_only, toy_hyper)
        with pytest.warns(ProvisionalIncumbentWarning):
            context = build_context(model, COST_RATIOS)
        assert context.provisional
        assert context.best_hf_value == low_only.y.min()

    def test_cost_ratio_count(self, toy_model):
        with pytest.raises(ConfigurationError):
            build_context(toy_model, (0.1, 0.5, 1.0))

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"best_hf_value": float("inf"), "cost_ratios": (0.5, 1.0)},
            {"best_hf_value": 0.0, "cost_ratios": (0.5, 0.9)},
            {"best_hf_value": 0.0, "cost_ratios": (0.0, 1.0)},
            {"best_hf_value": 0.0, "cost_ratios": (0.5, 1.0), "noise_sd": -0.1},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            AcquisitionContext(**kwargs)


class TestUtility:
    def test_top_level_noise_free_identity_is_expected_improvement(self, toy_model, context):
        for x in [0.05, 0.45, 0.7, 0.95]:
            stats = toy_model.predict([x], 2)
            assert u_pa(toy_model, [x], 2, context, IdentityBias()) == expected_improvement(stats.mean, stats.sd, context.best_hf_value)

    def test_vanishes_at_high_fidelity_training_point(self, toy_model, context):
        assert u_pa(toy_model, [0.2], 2, context, IdentityBias()) == pytest.approx(0.0, abs=1e-5)
        assert u_pa(toy_model, [0.8], 2, context, IdentityBias()) == pytest.approx(0.0, abs=1e-5)

    def test_term_wise_oracle_at_low_fidelity(self, toy_model, toy_data, toy_hyper, context):
        z, levels, y = toy_data.scaled_x, toy_data.levels, toy_data.y
        candidates = [0.1, 0.45, 0.7, 0.9]
        values = u_pa_batch(toy_model, np.array(candidates).reshape(-1, 1), 1, context, IdentityBias())
        for x, value in zip(candidates, values, strict=True):
            mean_top, var_top, _ = oracles.posterior(z, levels, y, toy_hyper, [x], 2)
            _, var_low, cov = oracles.posterior(z, levels, y, toy_hyper, [x], 1, other_level=2)
            sd = math.sqrt(var_top)
            improvement = (context.best_hf_value - mean_top) / sd
            ei = sd * (improvement * norm.cdf(improvement) + norm.pdf(improvement))
            correlation = max(0.0, cov / math.sqrt(var_low * var_top))
            expected = ei * correlation * 1.0 * (1.0 / 0.125) * 1.0
            assert value == pytest.approx(expected, rel=1e-7)

    def test_non_negative(self, toy_model, context):
        grid = np.linspace(0.0, 1.0, 101).reshape(-1, 1)
        for level in (1, 2):
            assert np.all(u_pa_batch(toy_model, grid, level, context, IdentityBias()) >= 0.0)

    def test_high_fidelity_bias_never_moves_choice_down(self, toy_model, context):
        grid = np.linspace(0.0, 1.0, 201).reshape(-1, 1)
        plain = np.vstack([u_pa_batch(toy_model, grid, level, context, IdentityBias()) for level in (1, 2)])
        boosted = np.vstack([u_pa_batch(toy_model, grid, level, context, _TopLevelBoost()) for level in (1, 2)])
        top_chosen = plain[1] > plain[0]
        assert np.all(boosted[1][top_chosen] > boosted[0][top_chosen])

    def test_bias_scales_top_level_only(self, toy_model, context):
        x = np.array([[0.45]])
        assert u_pa_batch(toy_model, x, 1, context, _TopLevelBoost())[0] == u_pa_batch(toy_model, x, 1, context, IdentityBias())[0]
        assert u_pa_batch(toy_model, x, 2, context, _TopLevelBoost())[0] == pytest.approx(3.0 * u_pa_batch(toy_model, x, 2, context, IdentityBias())[0])

    def test_noise_lowers_utility(self, toy_model):
        x = np.array([[0.45]])
        clean = u_pa_batch(toy_model, x, 1, build_context(toy_model, COST_RATIOS), IdentityBias())[0]
        noisy = u_pa_batch(toy_model, x, 1, build_context(toy_model, COST_RATIOS, 1.0), IdentityBias())[0]
        assert noisy < clean


class TestAcquisitionObjects:
    def test_physics_aware_levels(self, toy_model, context):
        acquisition = PhysicsAwareAcquisition(toy_model, context)
        assert list(acquisition.levels) == [1, 2]
        assert acquisition([0.45], 1) == u_pa(toy_model, [0.45], 1, context, IdentityBias())

    def test_expected_improvement_top_level_only(self, toy_model, context):
        acquisition = ExpectedImprovementAcquisition(toy_model, context.best_hf_value)
        assert list(acquisition.levels) == [2]
        stats = toy_model.predict([0.45], 2)
        assert acquisition([0.45], 2) == expected_improvement(stats.mean, stats.sd, context.best_hf_value)
        with pytest.raises(DomainError):
            acquisition.batch(np.array([[0.45]]), 1)
