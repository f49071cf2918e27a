"""Tests for the loss functions: closed values, dual-form agreement,
ensemble conventions, vectorized scoring, and error paths."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from asymscore.errors import (
    MissingCapability,
    MomentRequired,
    NegativeSupportPowerWeight,
    ParameterError,
)
from asymscore.families import AffineDistribution, make_family
from asymscore.forecasts import Ensemble
from asymscore.scoring import (
    LossSpec,
    WeightFunction,
    crps_both_forms,
    crps_vector,
    energy_score,
    score,
    score_vector,
    twcrps_score,
)

STD_NORMAL = make_family("normal", [0.0, 1.0])
UNIT_EXP = make_family("exponential", [1.0])


class TestClosedValues:
    def test_log_normal_at_zero(self):
        # -log pdf(0) for a standard normal is log(sqrt(2 pi)).
        assert score(LossSpec.log(), STD_NORMAL, 0.0) == pytest.approx(
            0.9189385332046727, abs=1e-12
        )

    def test_quadratic_normal_at_zero(self):
        # -2 f(0) + ||f||^2 with ||f||^2 = 1/(2 sqrt(pi)).
        expected = -2.0 / math.sqrt(2 * math.pi) + 1.0 / (2 * math.sqrt(math.pi))
        assert score(LossSpec.quadratic(), STD_NORMAL, 0.0) == pytest.approx(
            expected, abs=1e-10
        )

    def test_spherical_normal_at_zero(self):
        expected = -(1.0 / math.sqrt(2 * math.pi)) / math.sqrt(
            1.0 / (2 * math.sqrt(math.pi))
        )
        assert score(LossSpec.spherical(), STD_NORMAL, 0.0) == pytest.approx(
            expected, abs=1e-10
        )

    def test_ds_normal_at_mean(self):
        # log var + (y - mean)^2 / var = 0 at y = 0 for unit variance.
        assert score(LossSpec.ds(), STD_NORMAL, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_crps_normal_closed_form(self):
        y = 0.7
        expected = (
            y * (2 * norm.cdf(y) - 1) + 2 * norm.pdf(y) - 1 / math.sqrt(math.pi)
        )
        assert score(LossSpec.crps(), STD_NORMAL, y) == pytest.approx(
            expected, abs=1e-10
        )

    def test_crps_exponential_closed_form(self):
        # scale s: for y >= 0, crps = y + s/2 - 2 s (1 - exp(-y/s)).
        s, y = 1.5, 2.0
        F = make_family("exponential", [s])
        expected = y + s / 2 - 2 * s * (1 - math.exp(-y / s))
        assert score(LossSpec.crps(), F, y) == pytest.approx(expected, abs=1e-9)


class TestCrpsForms:
    @pytest.mark.parametrize("y", [-1.3, 0.0, 0.7, 2.5])
    def test_integral_vs_expectation_form_normal(self, y):
        a, b = crps_both_forms(STD_NORMAL, y)
        assert a == pytest.approx(b, abs=1e-7)

    @pytest.mark.parametrize("y", [0.1, 1.0, 3.0])
    def test_integral_vs_expectation_form_gamma(self, y):
        F = make_family("gamma", [2.0, 1.5])
        a, b = crps_both_forms(F, y)
        assert a == pytest.approx(b, abs=1e-7)


class TestEnsemble:
    def test_two_member_crps(self):
        E = Ensemble(np.array([0.0, 1.0]))
        # E|X - y| - 0.5 E|X - X'| with the all-pairs (n^2) convention:
        # 0.5*(0.5 + 0.5) - 0.5 * (0 + 1 + 1 + 0)/4 = 0.5 - 0.25 = 0.25.
        assert score(LossSpec.crps(), E, 0.5) == pytest.approx(0.25, abs=1e-12)

    def test_energy_score_beta_one_matches_crps(self):
        rng = np.random.default_rng(7)
        E = Ensemble(rng.normal(size=40))
        assert energy_score(E, 0.3, beta=1.0) == pytest.approx(
            score(LossSpec.crps(), E, 0.3), abs=1e-12
        )

    def test_density_losses_need_densities(self):
        E = Ensemble(np.array([0.0, 1.0, 2.0, 3.0]))
        for spec in (LossSpec.log(), LossSpec.quadratic(), LossSpec.spherical()):
            with pytest.raises(MissingCapability):
                score(spec, E, 0.5)

    def test_large_ensemble_tracks_distribution(self):
        rng = np.random.default_rng(11)
        E = Ensemble(rng.normal(size=4000))
        exact = score(LossSpec.crps(), STD_NORMAL, 0.7)
        assert score(LossSpec.crps(), E, 0.7) == pytest.approx(exact, abs=0.02)


class TestWeightedCrps:
    def test_unit_weight_reduces_to_crps(self):
        for y in (0.2, 0.7, 2.0):
            assert twcrps_score(UNIT_EXP, y, WeightFunction.power(0.0)) == (
                pytest.approx(UNIT_EXP.crps(y), abs=1e-8)
            )

    def test_unit_weight_reduces_on_real_line(self):
        spec = LossSpec.twcrps(WeightFunction.power(0.0))
        assert score(spec, STD_NORMAL, 0.7) == pytest.approx(
            STD_NORMAL.crps(0.7), abs=1e-8
        )

    def test_power_weight_negative_support_rejected(self):
        with pytest.raises(NegativeSupportPowerWeight):
            twcrps_score(STD_NORMAL, 0.0, WeightFunction.power(0.5))

    def test_integer_power_ok_on_real_line(self):
        v = twcrps_score(STD_NORMAL, 0.0, WeightFunction.power(2.0))
        assert np.isfinite(v)

    def test_tabulated_weight_matches_power(self):
        alpha = 1.0
        w = WeightFunction.tabulated(
            lambda x: np.asarray(x) ** alpha,
            lambda x: np.asarray(x) ** (alpha + 1) / (alpha + 1),
        )
        a = twcrps_score(UNIT_EXP, 0.9, w)
        b = twcrps_score(UNIT_EXP, 0.9, WeightFunction.power(alpha))
        assert a == pytest.approx(b, rel=1e-6, abs=1e-8)

    def test_tabulated_inconsistent_antiderivative_rejected(self):
        with pytest.raises(ParameterError):
            # antiderivative of x is x^2/2, not x
            WeightFunction.tabulated(lambda x: np.asarray(x),
                                     lambda x: np.asarray(x))


class TestVectorized:
    @pytest.mark.parametrize(
        "spec",
        [
            LossSpec.log(),
            LossSpec.quadratic(),
            LossSpec.spherical(),
            LossSpec.ds(),
            LossSpec.crps(),
        ],
    )
    def test_matches_scalar_path(self, spec):
        F = make_family("normal", [0.3, 1.7])
        ys = np.array([-2.0, -0.5, 0.3, 1.1, 4.0])
        vec = score_vector(spec, F, ys)
        for y, v in zip(ys, vec):
            assert v == pytest.approx(score(spec, F, float(y)), abs=1e-8)

    def test_crps_vector_quadrature_fallback(self):
        F = make_family("gamma", [2.0, 1.0])
        ys = np.array([0.2, 1.0, 3.5])
        vec = crps_vector(F, ys)
        for y, v in zip(ys, vec):
            # fallback uses a fixed quantile rule; looser tolerance
            assert v == pytest.approx(F.crps(float(y)), abs=5e-4)

    def test_crps_vector_exponential_closed(self):
        F = make_family("exponential", [2.0])
        ys = np.array([-1.0, 0.0, 0.5, 3.0])
        vec = crps_vector(F, ys)
        for y, v in zip(ys, vec):
            assert v == pytest.approx(F.crps(float(y)), abs=1e-10)


class TestHomogeneity:
    @given(
        c=st.floats(min_value=0.2, max_value=5.0),
        y=st.floats(min_value=-3.0, max_value=3.0),
    )
    @settings(max_examples=25, deadline=None)
    def test_crps_positive_homogeneity(self, c, y):
        # crps(cX, cy) = c * crps(X, y) for c > 0.
        F = STD_NORMAL
        Fc = AffineDistribution(F, 0.0, c)
        assert score(LossSpec.crps(), Fc, c * y) == pytest.approx(
            c * score(LossSpec.crps(), F, y), rel=1e-8, abs=1e-10
        )

    @given(c=st.floats(min_value=0.2, max_value=5.0))
    @settings(max_examples=25, deadline=None)
    def test_log_loss_shift_under_scaling(self, c):
        # log loss gains exactly log c under rescaling at matched points.
        F = STD_NORMAL
        Fc = AffineDistribution(F, 0.0, c)
        y = 0.4
        assert score(LossSpec.log(), Fc, c * y) == pytest.approx(
            score(LossSpec.log(), F, y) + math.log(c), abs=1e-10
        )


class TestErrors:
    def test_ds_needs_moments(self):
        C = make_family("cauchy", [0.0, 1.0])
        with pytest.raises(MomentRequired):
            score(LossSpec.ds(), C, 0.0)

    def test_energy_beta_range(self):
        with pytest.raises(ParameterError):
            LossSpec.energy(2.0)
        with pytest.raises(ParameterError):
            LossSpec.energy(0.0)

    def test_labels_are_distinct(self):
        specs = [
            LossSpec.log(),
            LossSpec.quadratic(),
            LossSpec.spherical(),
            LossSpec.ds(),
            LossSpec.crps(),
            LossSpec.energy(1.5),
            LossSpec.twcrps(WeightFunction.power(1.0)),
        ]
        labels = [s.label() for s in specs]
        assert len(set(labels)) == len(labels)
