"""Acceptance gate: fourteen numbered criteria, each reported as a single
pass/fail line on the live terminal (bypassing capture)."""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy.stats import norm

from asymscore.asymmetry import (
    EXPFAM_SWEEP,
    OVER,
    SCALE_DIRECTION,
    SYMMETRIC,
    UNDER,
    lambert_w,
    location_verdict,
    loss_diff_root,
    power_crps_trichotomy,
    scaling_exponent,
    sweep_expfam,
    sweep_location,
    sweep_scale,
)
from asymscore.divergence import (
    divergence,
    expected_loss,
    expected_loss_mc,
    expected_loss_quad,
    kl,
)
from asymscore.errors import Atom, Crossing
from asymscore.families import (
    AffineDistribution,
    expfam_descriptor,
    location_family,
    make_family,
    scale_family,
)
from asymscore.forecasts import (
    QuantileForecast,
    quantile_to_distribution,
    validate_quantiles,
)
from asymscore.harness import dispersion_flip, heatmap
from asymscore.hedging import (
    ShiftLaw,
    expfam_shifted_loss,
    hedge_expfam_optimum,
    optimal_scale,
)
from asymscore.scoring import LossSpec, WeightFunction, crps_vector, score_vector


@pytest.fixture
def report(capsys):
    @contextmanager
    def _report(num, desc):
        try:
            yield
        except BaseException:
            with capsys.disabled():
                print(f"criterion {num:2d} FAIL: {desc}")
            raise
        with capsys.disabled():
            print(f"criterion {num:2d} PASS: {desc}")

    return _report


def test_criterion_01_scale_asymmetry_sweep(report):
    with report(1, "scale-family asymmetry sweep (90 verdicts) and exact 1/6"):
        t0 = time.time()
        rows = sweep_scale()
        assert time.time() - t0 < 60.0
        assert len(rows) == 90
        for row in rows:
            assert row.verdict.comparison == SCALE_DIRECTION[row.loss.split("(")[0]]
        d = divergence(
            LossSpec.crps(),
            make_family("exponential", [2.0]),
            make_family("exponential", [1.0]),
        )
        assert abs(float(d) - 1.0 / 6.0) < 1e-8


def test_criterion_02_expfam_sweep_and_bregman(report):
    with report(2, "natural-parameter sweep (66 verdicts) and Bregman = KL"):
        rows = sweep_expfam()
        assert len(rows) == 66
        expected = {kind: direction for kind, _fixed, direction in EXPFAM_SWEEP}
        for row in rows:
            assert row.verdict.comparison == expected[row.family]
        fixtures = [
            expfam_descriptor("exponential-scale"),
            expfam_descriptor("gamma-scale", k=3.0),
            expfam_descriptor("pareto-shape", m=1.0),
            expfam_descriptor("poisson-rate"),
        ]
        pairs = [(0.7, 1.4), (2.0, 0.9), (1.0, 3.0)]
        for desc in fixtures:
            for e1, e2 in pairs:
                if desc.kind == "poisson-rate":
                    e1, e2 = math.log(e1), math.log(e2)
                exact = desc.bregman(e1, e2)
                quad = float(kl(desc.member(e2), desc.member(e1)))
                assert abs(exact - quad) < 1e-7


def test_criterion_03_location_symmetry(report):
    with report(3, "location symmetry for all losses; skewed-base log loss breaks"):
        rows = sweep_location()
        assert len(rows) == 36
        for row in rows:
            v = row.verdict
            assert v.comparison == SYMMETRIC
            if v.lhs == v.rhs:  # includes the doubly-infinite KL case
                continue
            scale = max(abs(v.lhs), abs(v.rhs), 1.0)
            assert abs(v.lhs - v.rhs) <= 1e-6 * scale
        skew = location_family("asymmetric-laplace", p=0.2)
        v = location_verdict(LossSpec.log(), skew, 1.0)
        assert v.comparison != SYMMETRIC
        assert v.margin > 1e-3
        assert v.flag == "asymmetric_base_for_log_loss"


def test_criterion_04_rescalability_exponents(report):
    with report(4, "scaling exponents {1, beta, -1, 0, alpha+1} recovered"):
        cases = [
            (LossSpec.crps(), 1.0),
            (LossSpec.energy(1.5), 1.5),
            (LossSpec.quadratic(), -1.0),
            (LossSpec.log(), 0.0),
            (LossSpec.ds(), 0.0),
            (LossSpec.twcrps(WeightFunction.power(1.0)), 2.0),
        ]
        for spec, gamma in cases:
            assert abs(scaling_exponent(spec).exponent - gamma) < 1e-3


def test_criterion_05_spherical_scale_identities(report):
    with report(5, "spherical scale identities on 20 random (sigma, tau) pairs"):
        fam = scale_family("normal")
        spec = LossSpec.spherical()
        rng = np.random.default_rng(2024)
        for _ in range(20):
            s, t = rng.uniform(0.5, 3.0, 2)
            d_st = float(divergence(spec, fam.member(s), fam.member(t)))
            d_ratio = float(divergence(spec, fam.member(s / t), fam.member(1.0)))
            assert abs(d_st - t ** -0.5 * d_ratio) < 1e-7
            d_ts = float(divergence(spec, fam.member(t), fam.member(s)))
            assert abs(d_st - math.sqrt(s / t) * d_ts) < 1e-7


def test_criterion_06_heatmap_reproduction(report):
    with report(6, "41x41 heatmaps: argmin at truth, asymmetric off-truth cells"):
        t0 = time.time()
        rng = np.random.default_rng(20240901)
        G = make_family("normal", [0.0, 1.0])
        ys = G.sample(10_000, rng)
        pairs = [(G, y) for y in ys]
        mu_axis = np.linspace(-2, 2, 41)
        sigma_axis = np.geomspace(0.25, 4.0, 41)  # hits 0.5, 1, 2 exactly
        i0 = 20  # mu = 0
        j_half, j_one, j_two = 10, 20, 30
        assert sigma_axis[j_one] == pytest.approx(1.0, abs=1e-12)
        results = {}
        for spec in (LossSpec.log(), LossSpec.crps()):
            g = heatmap(spec, pairs, mu_axis, sigma_axis)
            assert abs(g.argmin_mu) <= mu_axis[1] - mu_axis[0] + 1e-12
            assert (
                abs(math.log(g.argmin_sigma))
                <= math.log(sigma_axis[1] / sigma_axis[0]) + 1e-12
            )
            results[spec.tag] = g.cells
        # CRPS punishes overdispersion harder; log loss underdispersion
        assert results["crps"][i0, j_two] > results["crps"][i0, j_half]
        assert results["log"][i0, j_two] < results["log"][i0, j_half]
        assert time.time() - t0 < 300.0


def test_criterion_07_hedging(report):
    with report(7, "hedging optima: inflate CRPS, deflate quadratic, eta*=0.8"):
        fam = scale_family("exponential")
        shift = ShiftLaw.two_point(2.0)
        solver_tol = 1e-6
        r_crps = optimal_scale(LossSpec.crps(), fam, shift)
        assert r_crps.optimum > 1.0
        assert r_crps.baseline_loss - r_crps.hedged_loss > 10 * solver_tol
        r_quad = optimal_scale(LossSpec.quadratic(), fam, shift)
        assert r_quad.optimum < 1.0
        assert r_quad.baseline_loss - r_quad.hedged_loss > 10 * solver_tol
        d = expfam_descriptor("exponential-scale")
        r = hedge_expfam_optimum(d, shift)
        assert abs(r.optimum - 0.8) < 1e-9
        rng = np.random.default_rng(7)
        for eta in rng.uniform(0.2, 5.0, 20):
            excess = expfam_shifted_loss(d, shift, float(eta)) - r.hedged_loss
            assert abs(excess - d.bregman(float(eta), r.optimum)) < 1e-7


def test_criterion_08_lambert_roots(report):
    with report(8, "both loss-difference roots exact for 100 random pairs"):
        d = expfam_descriptor("exponential-scale")
        rng = np.random.default_rng(8)
        for _ in range(100):
            eta = float(rng.uniform(0.2, 5.0))
            eta2 = float(rng.uniform(0.2, 5.0))
            roots = loss_diff_root(d, eta, eta2)
            ref = d.logA(eta2) - eta2 * d.dA(eta)
            arg = -(eta2 / eta) * math.exp(-eta2 / eta)
            for root in roots:
                assert abs((d.logA(root) - root * d.dA(eta)) - ref) < 1e-9
                w = -root / eta
                assert abs(w * math.exp(w) - arg) < 1e-12


def test_criterion_09_trichotomies(report):
    with report(9, "nine power-weight trichotomy fixtures"):
        sf = scale_family("exponential")
        lf = location_family("exponential")
        fixtures = [
            ("scale", -1.0, 2.0, SYMMETRIC),
            ("scale", 0.0, 2.0, OVER),
            ("scale", 0.5, 2.0, OVER),
            ("scale", -2.0, 2.0, UNDER),
            ("location", 0.0, 1.0, SYMMETRIC),
            ("location", 1.0, 0.0, SYMMETRIC),
            ("location", 1.0, 1.0, OVER),
            ("location", 2.0, 0.5, OVER),
            ("location", 1.0, -1.0, UNDER),
        ]
        assert len(fixtures) == 9
        for mode, alpha, param, expected in fixtures:
            fam = sf if mode == "scale" else lf
            assert power_crps_trichotomy(alpha, mode, fam, param).comparison == (
                expected
            )


def test_criterion_10_quantile_pipeline(report):
    with report(10, "23-level quantile reconstruction scores near exact CRPS"):
        levels = np.arange(1, 24) / 24.0
        q = QuantileForecast(levels, norm.ppf(levels))
        recon = quantile_to_distribution(q)
        G = make_family("normal", [0.0, 1.0])
        rng = np.random.default_rng(10)
        ys = G.sample(10_000, rng)
        approx = float(np.mean(score_vector(LossSpec.crps(), recon, ys)))
        exact = float(np.mean(crps_vector(G, ys)))
        assert abs(approx - exact) < 0.01
        with pytest.raises(Crossing):
            validate_quantiles(
                QuantileForecast(levels, norm.ppf(levels)[::-1])
            )
        atom_vals = norm.ppf(levels).copy()
        atom_vals[11] = atom_vals[10]
        with pytest.raises(Atom):
            validate_quantiles(QuantileForecast(levels, atom_vals))


def test_criterion_11_dispersion_flip_replicates(report):
    with report(11, "dispersion flip improves in >= 95% of 200 replicates"):
        rng = np.random.default_rng(11)
        n_rep, n = 200, 250
        over_ok = under_ok = 0
        for _ in range(n_rep):
            G1 = rng.normal(0, 1, n)
            over = dispersion_flip(rng.normal(0, 2, n), G1, "cramer")
            if over.a > 1 and over.d_flipped < over.d_original:
                over_ok += 1
            G2 = rng.normal(0, 1, n)
            under = dispersion_flip(rng.normal(0, 0.5, n), G2, "kl")
            if under.a < 1 and under.d_flipped < under.d_original:
                under_ok += 1
        assert over_ok >= 0.95 * n_rep
        assert under_ok >= 0.95 * n_rep


def test_criterion_12_aggregation_confounding(report):
    with report(12, "aggregation sign pattern: zero / positive / negative"):
        F = make_family("normal", [0.2, 1.0])
        G = make_family("normal", [0.0, 1.0])
        H = make_family("normal", [1.0, 1.0])
        s = 3.0

        def total_diff(spec):
            Fs, Gs, Hs = (AffineDistribution(X, 0.0, s) for X in (F, G, H))
            near = float(expected_loss(spec, F, G)) + float(
                expected_loss(spec, Hs, Gs)
            )
            far = float(expected_loss(spec, H, G)) + float(
                expected_loss(spec, Fs, Gs)
            )
            return near - far

        for spec in (LossSpec.log(), LossSpec.ds()):
            assert abs(total_diff(spec)) < 1e-8
        for spec in (LossSpec.crps(), LossSpec.energy(1.5)):
            assert total_diff(spec) > 1e-6
        assert total_diff(LossSpec.quadratic()) < -1e-6


def test_criterion_13_oracle_consistency(report):
    with report(13, "closed, quadrature, and Monte Carlo losses agree"):
        specs = [
            LossSpec.log(),
            LossSpec.quadratic(),
            LossSpec.spherical(),
            LossSpec.ds(),
            LossSpec.crps(),
        ]
        rng = np.random.default_rng(13)
        for spec in specs:
            for _ in range(20):
                F = make_family(
                    "normal",
                    [float(rng.uniform(-1, 1)), float(rng.uniform(0.5, 2.0))],
                )
                G = make_family(
                    "normal",
                    [float(rng.uniform(-1, 1)), float(rng.uniform(0.5, 2.0))],
                )
                closed = float(expected_loss(spec, F, G))
                quad = float(expected_loss_quad(spec, F, G))
                assert abs(closed - quad) < 1e-6
                mean, se = expected_loss_mc(spec, F, G, 20_000, rng)
                assert abs(mean - closed) < 3.0 * se + 1e-9


def test_criterion_14_cauchy_kl_symmetry(report):
    with report(14, "Cauchy KL scale symmetry for sigma in {2, 5}"):
        G = make_family("cauchy", [0.0, 1.0])
        for sigma in (2.0, 5.0):
            Gs = make_family("cauchy", [0.0, sigma])
            Gi = make_family("cauchy", [0.0, 1.0 / sigma])
            assert abs(float(kl(Gs, G)) - float(kl(Gi, G))) < 1e-6
