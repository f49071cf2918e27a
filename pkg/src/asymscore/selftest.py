"""Curated end-to-end invariant suite, runnable via `asymscore selftest`.

Each check exercises a documented invariant with synthetic fixtures and
prints one PASS/FAIL line; run() returns the number of failures.
"""

from __future__ import annotations

import math

import numpy as np

from .asymmetry import (
    lambert_w,
    location_verdict,
    loss_diff_root,
    power_crps_trichotomy,
    scale_verdict,
    scaling_exponent,
)
from .divergence import divergence, expected_loss, kl
from .families import expfam_descriptor, location_family, make_family, scale_family
from .forecasts import Ensemble, QuantileForecast, quantile_to_distribution
from .harness import (
    ScoredRecord,
    asymmetric_laplace_grid,
    dispersion_flip,
    heatmap,
    standardize_targets,
    standardized_ranking,
)
from .hedging import ShiftLaw, hedge_expfam_optimum, hedge_scale_direction, optimal_scale
from .scoring import LossSpec, WeightFunction, crps_both_forms, score, twcrps_score
from .specfun import digamma, trigamma

_EULER_GAMMA = 0.5772156649015328606


def _check_specfun():
    assert abs(trigamma(1.0) - math.pi**2 / 6.0) < 1e-12
    assert abs(digamma(1.0) + _EULER_GAMMA) < 1e-12
    assert abs(trigamma(0.5) - math.pi**2 / 2.0) < 1e-11


def _check_crps_forms():
    F = make_family("normal", [0.3, 1.4])
    a, b = crps_both_forms(F, 0.9)
    assert abs(a - b) < 1e-9, (a, b)


def _check_ensemble_crps():
    E = Ensemble(np.array([[-1.0], [1.0]]), np.array([0.5, 0.5]))
    assert abs(score(LossSpec.crps(), E, 0.0) - 0.5) < 1e-12


def _check_twcrps_reduces():
    F = make_family("exponential", [1.0])
    w = WeightFunction.power(0.0)
    assert abs(twcrps_score(F, 0.7, w) - score(LossSpec.crps(), F, 0.7)) < 1e-9


def _check_exponential_divergences():
    G = make_family("exponential", [1.0])
    F = make_family("exponential", [2.0])
    assert abs(float(divergence(LossSpec.crps(), F, G)) - 1.0 / 6.0) < 1e-9
    assert abs(float(divergence(LossSpec.quadratic(), F, G)) - 1.0 / 12.0) < 1e-9


def _check_cauchy_kl_symmetry():
    C = make_family("cauchy", [0.0, 1.0])
    for s in (2.0, 5.0):
        a = kl(C, make_family("cauchy", [0.0, s]))
        b = kl(C, make_family("cauchy", [0.0, 1.0 / s]))
        closed = math.log((s + 1.0) ** 2 / (4.0 * s))
        assert abs(a - b) < 1e-6 and abs(a - closed) < 1e-6


def _check_scale_directions():
    fam = scale_family("exponential")
    assert scale_verdict(LossSpec.crps(), fam, 2.0).comparison == "over_penalized"
    assert scale_verdict(LossSpec.quadratic(), fam, 2.0).comparison == "under_penalized"
    assert scale_verdict(LossSpec.spherical(), scale_family("normal"), 3.0).comparison == "symmetric"
    assert scale_verdict(LossSpec.ds(), fam, 2.0).comparison == "under_penalized"


def _check_location_symmetry():
    fam = location_family("normal")
    for spec in (LossSpec.crps(), LossSpec.log(), LossSpec.ds()):
        assert location_verdict(spec, fam, 2.0).comparison == "symmetric"
    v = location_verdict(LossSpec.log(), location_family("asymmetric-laplace", p=0.2), 1.0)
    assert v.comparison != "symmetric" and v.flag == "asymmetric_base_for_log_loss"


def _check_scaling_exponents():
    assert scaling_exponent(LossSpec.crps()).exponent == 1.0
    assert scaling_exponent(LossSpec.quadratic()).exponent == -1.0
    assert scaling_exponent(LossSpec.log()).exponent == 0.0
    assert scaling_exponent(LossSpec.energy(1.5)).exponent == 1.5
    assert scaling_exponent(LossSpec.twcrps(WeightFunction.power(-1.0))).exponent == 0.0


def _check_trichotomy():
    fam = scale_family("exponential")
    assert power_crps_trichotomy(-1.0, "scale", fam, 2.0).comparison == "symmetric"
    assert power_crps_trichotomy(0.5, "scale", fam, 2.0).comparison == "over_penalized"
    assert power_crps_trichotomy(-2.0, "scale", fam, 2.0).comparison == "under_penalized"
    lf = location_family("exponential")
    assert power_crps_trichotomy(0.0, "location", lf, 1.0).comparison == "symmetric"
    assert power_crps_trichotomy(1.0, "location", lf, 1.0).comparison == "over_penalized"


def _check_lambert():
    rng = np.random.default_rng(11)
    xs = np.concatenate([
        rng.uniform(-1.0 / math.e + 1e-9, 0.0, 500),
        rng.uniform(0.0, 50.0, 500),
    ])
    for x in xs:
        w = lambert_w("principal", float(x))
        assert abs(w * math.exp(w) - x) < 1e-12
    for x in rng.uniform(-1.0 / math.e + 1e-9, -1e-6, 500):
        w = lambert_w("minus_one", float(x))
        assert abs(w * math.exp(w) - x) < 1e-12


def _check_loss_diff_root():
    desc = expfam_descriptor("exponential-scale")
    for eta, eta2 in [(1.0, 2.0), (1.0, 0.5), (2.0, 3.0)]:
        r1, r2 = loss_diff_root(desc, eta, eta2)

        def g(t):
            return desc.bregman(t, eta) - desc.bregman(eta2, eta)

        assert abs(g(r1)) < 1e-9 and abs(g(r2)) < 1e-9


def _check_hedging():
    fam = scale_family("exponential")
    assert hedge_scale_direction(LossSpec.crps(), fam) == "inflate"
    assert hedge_scale_direction(LossSpec.quadratic(), fam) == "deflate"
    sh = ShiftLaw.two_point(2.0)
    r = optimal_scale(LossSpec.crps(), fam, sh)
    assert r.direction == "inflate" and r.hedged_loss <= r.baseline_loss + 1e-9
    d = expfam_descriptor("exponential-scale")
    h = hedge_expfam_optimum(d, sh)
    assert abs(h.optimum - 0.8) < 1e-9
    hp = hedge_expfam_optimum(expfam_descriptor("poisson-rate"),
                              ShiftLaw.two_point(1.0, center=0.0))
    assert abs(hp.optimum - math.log(math.cosh(1.0))) < 1e-12


def _check_log_loss_reversal():
    # KL swaps its asymmetry under scale inversion in an exponential family
    G = make_family("exponential", [1.0])
    for a in (2.0, 3.0):
        d1 = kl(G, make_family("exponential", [a]))
        d2 = kl(make_family("exponential", [1.0 / a]), G)
        assert abs(d1 - d2) < 1e-7


def _check_quantile_pipeline():
    levels = np.linspace(0.05, 0.95, 19)
    base = make_family("normal", [0.0, 1.0])
    q = QuantileForecast(levels, np.asarray(base.ppf(levels), dtype=float))
    d = quantile_to_distribution(q)
    assert abs(d.total_mass() - 1.0) < 1e-9
    ps = np.linspace(0.06, 0.94, 23)
    assert np.max(np.abs(np.asarray(d.cdf(d.ppf(ps))) - ps)) < 1e-9


def _check_standardize():
    rng = np.random.default_rng(3)
    y = np.arange(200.0) * 0.5 + rng.standard_normal(200)
    s = standardize_targets(y, 21)
    assert 0.7 < float(np.var(s.values)) < 1.3
    assert np.max(np.abs(s.inverse(s.values) - y)) < 1e-12


def _check_ranking():
    recs = [
        ScoredRecord("a", "l", "d", "h", "crps", 1.0, 1.0),
        ScoredRecord("b", "l", "d", "h", "crps", 2.0, 2.0),
        ScoredRecord("c", "l", "d", "h", "crps", 3.0, 0.5),
    ]
    t = standardized_ranking(recs, "loss")
    ranks = sorted(t.rows.values())
    assert np.allclose(ranks, [1 / 3, 2 / 3, 1.0])
    n = 3
    assert abs(sum(t.rows.values()) / n - (n + 1) / (2 * n)) < 1e-12


def _check_heatmap():
    rng = np.random.default_rng(5)
    F = make_family("normal", [0.0, 1.0])
    pairs = [(F, y) for y in rng.standard_normal(4000)]
    g = heatmap(LossSpec.crps(), pairs, np.linspace(-1, 1, 11), np.linspace(0.5, 2, 11))
    assert abs(g.argmin_mu) <= 0.2 + 1e-12 and abs(g.argmin_sigma - 1.0) <= 0.15 + 1e-12


def _check_dispersion():
    rng = np.random.default_rng(9)
    G = rng.normal(0, 1, 300)
    over = dispersion_flip(rng.normal(0, 2, 300), G, "cramer")
    assert over.a > 1 and over.d_flipped < over.d_original
    under = dispersion_flip(rng.normal(0, 0.5, 300), G, "kl")
    assert under.a < 1 and under.d_flipped < under.d_original


def _check_al_grid():
    grids = asymmetric_laplace_grid(0.5, [LossSpec.spherical()], [0.0], [0.5, 1.0, 2.0])
    cells = grids["spherical"].cells
    assert abs(cells[0, 0] - cells[0, 2]) < 1e-6


def _check_propriety():
    # expected loss is minimized by the target itself (strict propriety)
    G = make_family("normal", [0.0, 1.0])
    F = make_family("normal", [0.3, 1.2])
    for spec in (LossSpec.log(), LossSpec.crps(), LossSpec.quadratic(),
                 LossSpec.spherical(), LossSpec.ds()):
        assert expected_loss(spec, F, G) > expected_loss(spec, G, G)


CHECKS = [
    ("trigamma/digamma closed values", _check_specfun),
    ("crps integral and expectation forms agree", _check_crps_forms),
    ("two-member ensemble crps", _check_ensemble_crps),
    ("unit-weight twcrps reduces to crps", _check_twcrps_reduces),
    ("exponential-pair divergence closed forms", _check_exponential_divergences),
    ("cauchy KL scale symmetry", _check_cauchy_kl_symmetry),
    ("scale-family asymmetry directions", _check_scale_directions),
    ("location-family symmetry and skew flag", _check_location_symmetry),
    ("divergence scaling exponents", _check_scaling_exponents),
    ("power-weight trichotomies", _check_trichotomy),
    ("lambert W residuals", _check_lambert),
    ("log-loss difference roots", _check_loss_diff_root),
    ("hedging directions and exact optima", _check_hedging),
    ("KL asymmetry reversal under scale inversion", _check_log_loss_reversal),
    ("quantile-to-density round trip", _check_quantile_pipeline),
    ("rolling standardization round trip", _check_standardize),
    ("standardized ranking arithmetic", _check_ranking),
    ("heatmap argmin recovery", _check_heatmap),
    ("dispersion flip directions", _check_dispersion),
    ("asymmetric-Laplace spherical symmetry", _check_al_grid),
    ("strict propriety floor", _check_propriety),
]


def run(out=print) -> int:
    failures = 0
    for name, fn in CHECKS:
        try:
            fn()
        except Exception as exc:  # report and continue
            failures += 1
            out(f"FAIL {name}: {exc!r}")
        else:
            out(f"PASS {name}")
    out(f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed")
    return failures
