"""Directional asymmetry of proper losses on scale, location, and
exponential families.

Each verdict reports whether overestimating a parameter is penalized more
than underestimating it by the same multiplicative (scale, natural
parameter) or additive (location) amount.  Verdicts are computed from the
induced divergences, never looked up from the known results, so they serve
as numerical verification of those results.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .divergence import divergence, weighted_cramer
from .errors import (
    NegativeSupportPowerWeight,
    NotLogAffinePartition,
    NotRescalable,
    ParameterError,
)
from .families import (
    AffineDistribution,
    ExpFamDescriptor,
    LocationFamily,
    ScaleFamily,
    expfam_descriptor,
    location_family,
    make_family,
    scale_family,
)
from .scoring import LossSpec, WeightFunction

OVER = "over_penalized"
UNDER = "under_penalized"
SYMMETRIC = "symmetric"

_REL_TOL = 1e-6


@dataclass(frozen=True)
class AsymmetryVerdict:
    """Comparison of the over- and under-estimation expected losses.

    lhs is the loss of the overestimated member (sigma, mu, theta*eta),
    rhs that of its mirror (1/sigma, -mu, eta/theta)."""

    comparison: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    probe_class: str | None = None
    flag: str | None = None


def _verdict(lhs: float, rhs: float, probe_class=None, flag=None) -> AsymmetryVerdict:
    if lhs == rhs:  # covers the doubly-infinite case (disjoint supports)
        return AsymmetryVerdict(SYMMETRIC, lhs, rhs, 0.0, 0.0, probe_class, flag)
    tol = _REL_TOL * max(abs(lhs), abs(rhs), 1e-12)
    margin = abs(lhs - rhs)
    if margin <= tol:
        comparison = SYMMETRIC
    elif lhs > rhs:
        comparison = OVER
    else:
        comparison = UNDER
    return AsymmetryVerdict(comparison, lhs, rhs, margin, tol, probe_class, flag)


@dataclass(frozen=True)
class ScalingFunction:
    """Power scaling h(sigma) = sigma^exponent of a rescalable divergence."""

    exponent: float

    def __call__(self, sigma: float) -> float:
        return float(sigma) ** self.exponent


def scaling_exponent(spec: LossSpec) -> ScalingFunction:
    """Exponent gamma with d(F_c, G_c) = c^gamma d(F, G), verified on a fixture.

    crps: 1, energy: beta, quadratic: -1, log and ds: 0, power-weighted
    twcrps: alpha + 1.  Spherical and non-power twcrps are not rescalable."""
    tag = spec.tag
    if tag == "spherical":
        raise NotRescalable("spherical loss does not induce a rescalable divergence")
    if tag == "twcrps":
        if spec.weight is None or spec.weight.alpha is None:
            raise NotRescalable("only power-weighted twcrps is rescalable")
        gamma = spec.weight.alpha + 1.0
    else:
        gamma = {"crps": 1.0, "energy": spec.beta, "quadratic": -1.0,
                 "log": 0.0, "ds": 0.0}[tag]
    # re-verify on a same-shape fixture: positive support for power weights
    if tag == "twcrps":
        F, G = make_family("exponential", [1.3]), make_family("exponential", [1.0])
    else:
        F, G = make_family("normal", [0.2, 1.3]), make_family("normal", [0.0, 1.0])
    cs = np.array([0.5, 1.0, 2.0, 4.0])
    ds = np.array(
        [
            float(divergence(spec, AffineDistribution(F, 0.0, c),
                             AffineDistribution(G, 0.0, c)))
            for c in cs
        ]
    )
    slope = np.polyfit(np.log(cs), np.log(ds), 1)[0]
    if abs(slope - gamma) > 1e-3:
        raise NotRescalable(
            f"{tag}: fitted scaling exponent {slope:.6f} disagrees with {gamma}"
        )
    return ScalingFunction(gamma)


def scale_verdict(spec: LossSpec, fam: ScaleFamily, sigma: float) -> AsymmetryVerdict:
    """Compare the loss of the sigma-inflated member against the 1/sigma one."""
    if sigma <= 1.0:
        raise ParameterError("sigma must exceed 1")
    G = fam.member(1.0)
    lhs = float(divergence(spec, fam.member(sigma), G))
    rhs = float(divergence(spec, fam.member(1.0 / sigma), G))
    return _verdict(lhs, rhs)


def _base_is_symmetric(base) -> bool:
    c = float(base.ppf(0.5))
    ts = np.linspace(0.1, 3.0, 16) * max(base.sd(), 1e-6)
    left = np.asarray(base.pdf(c - ts), dtype=float)
    right = np.asarray(base.pdf(c + ts), dtype=float)
    scale = np.maximum(np.maximum(left, right), 1e-12)
    return bool(np.all(np.abs(left - right) / scale < 1e-6))


def location_verdict(spec: LossSpec, fam: LocationFamily, mu: float) -> AsymmetryVerdict:
    """Compare the loss of the +mu-shifted member against the -mu one."""
    G = fam.member(0.0)
    lhs = float(divergence(spec, fam.member(mu), G))
    rhs = float(divergence(spec, fam.member(-mu), G))
    flag = None
    if spec.tag == "log" and not _base_is_symmetric(fam.base):
        flag = "asymmetric_base_for_log_loss"
    return _verdict(lhs, rhs, flag=flag)


def _classify(vals: np.ndarray) -> str:
    diffs = np.diff(vals)
    if np.all(np.abs(diffs) < 1e-10):
        return "constant"
    pos = int(np.sum(diffs > 0))
    neg = int(np.sum(diffs < 0))
    return "increasing" if pos > neg else "decreasing"


def probe_monotonicity(desc: ExpFamDescriptor, eta: float, theta: float) -> str:
    """Grid-probed monotonicity class of u^3 A''(u) (positive-line families)
    or A''(u) - A''(-u) (real-line families)."""
    if desc.omega[0] == 0.0:
        lo = min(eta / theta, 0.5)
        hi = max(eta * theta, 2.0)
        us = np.geomspace(lo, hi, 64)
        vals = np.array([u**3 * desc.d2A(u) for u in us])
    else:
        hi = max(abs(eta) + theta, 1.0)
        us = np.linspace(hi / 64.0, hi, 64)
        vals = np.array([desc.d2A(u) - desc.d2A(-u) for u in us])
    return _classify(vals)


def expfam_verdict(desc: ExpFamDescriptor, eta: float, theta: float) -> AsymmetryVerdict:
    """Log-loss asymmetry in the natural parameter, via exact Bregman
    differences; multiplicative perturbation on (0, inf), additive on R."""
    if desc.omega[0] == 0.0:
        if theta <= 1.0:
            raise ParameterError("theta must exceed 1 for positive-line families")
        lhs = desc.bregman(theta * eta, eta)
        rhs = desc.bregman(eta / theta, eta)
    else:
        if theta <= 0.0:
            raise ParameterError("theta must be positive for real-line families")
        lhs = desc.bregman(eta + theta, eta)
        rhs = desc.bregman(eta - theta, eta)
    return _verdict(lhs, rhs, probe_class=probe_monotonicity(desc, eta, theta))


def family_parameter_verdict(kind: str, theta: float, base_param: float = 1.0,
                             **fixed) -> AsymmetryVerdict:
    """Asymmetry of log loss in the conventional family parameter (scale,
    shape, or rate): compare members at theta*s and s/theta against s."""
    desc = expfam_descriptor(kind, **fixed)
    if theta <= 1.0:
        raise ParameterError("theta must exceed 1")
    e0 = desc.to_natural(base_param)
    lhs = desc.bregman(desc.to_natural(theta * base_param), e0)
    rhs = desc.bregman(desc.to_natural(base_param / theta), e0)
    return _verdict(lhs, rhs, probe_class=probe_monotonicity(desc, e0, theta))


# ---------------------------------------------------------------------------
# Lambert W and the root structure of log-loss differences

_INV_E = -1.0 / math.e


def lambert_w(branch: str, x: float) -> float:
    """Real Lambert W: solves W e^W = x by Halley iteration.

    branch 'principal' needs x >= -1/e; branch 'minus_one' needs
    x in [-1/e, 0)."""
    x = float(x)
    if branch not in ("principal", "minus_one"):
        raise ParameterError(f"unknown branch {branch!r}")
    if x < _INV_E - 1e-15:
        raise ParameterError(f"x={x} below -1/e")
    if abs(x - _INV_E) < 1e-300 or x <= _INV_E:
        return -1.0
    if branch == "minus_one":
        if x >= 0.0:
            raise ParameterError("minus_one branch needs x < 0")
        if x > -1e-300:
            return -math.inf
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        if p < 0.3:
            w = -1.0 - p - p * p / 3.0
        else:
            lx = math.log(-x)
            w = lx - math.log(-lx)
    else:
        if x == 0.0:
            return 0.0
        p2 = 2.0 * (math.e * x + 1.0)
        if p2 < 0.09:
            p = math.sqrt(p2)
            w = -1.0 + p - p * p / 3.0
        elif x < math.e:
            w = math.log1p(x) if x > 0 else x * math.exp(-x)
        else:
            lx = math.log(x)
            w = lx - math.log(lx)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        step = f / denom
        w -= step
        if abs(step) <= 1e-16 * (1.0 + abs(w)):
            break
    return w


def loss_diff_root(desc: ExpFamDescriptor, eta: float, eta2: float):
    """Both roots eta1 of l(p_eta1, p_eta) = l(p_eta2, p_eta) when the
    log-partition is affine in log eta: the trivial root eta2 and
    -eta * W_b(-(eta2/eta) exp(-eta2/eta)) on the opposite branch."""
    if eta <= 0 or eta2 <= 0:
        raise ParameterError("eta and eta2 must be positive")
    us = np.geomspace(0.25, 4.0, 8) * eta
    vals = np.array([u * u * desc.d2A(u) for u in us])
    if np.max(np.abs(vals - vals[0])) > 1e-9 * max(abs(vals[0]), 1e-12):
        raise NotLogAffinePartition(
            f"{desc.kind}: eta^2 A''(eta) is not constant; A is not affine in log eta"
        )
    v = eta2 / eta
    arg = -v * math.exp(-v)
    if v == 1.0:
        return eta2, eta2
    branch = "minus_one" if v < 1.0 else "principal"
    nontrivial = -eta * lambert_w(branch, arg)
    return eta2, nontrivial


# ---------------------------------------------------------------------------
# power-weighted CRPS trichotomies

def power_crps_trichotomy(alpha: float, mode: str, fam, param: float) -> AsymmetryVerdict:
    """Scale or location asymmetry of CRPS weighted by w(y) = y^alpha."""
    weight = WeightFunction.power(alpha)
    if mode == "scale":
        if not isinstance(fam, ScaleFamily):
            raise ParameterError("mode=scale needs a ScaleFamily")
        if fam.base.support[0] < 0:
            raise NegativeSupportPowerWeight("power weights need positive support")
        G = fam.member(1.0)
        lhs = weighted_cramer(fam.member(param), G, weight)
        rhs = weighted_cramer(fam.member(1.0 / param), G, weight)
        return _verdict(lhs, rhs)
    if mode == "location":
        if not isinstance(fam, LocationFamily):
            raise ParameterError("mode=location needs a LocationFamily")
        lo = fam.base.support[0] - abs(param)
        if lo < 0 and (alpha < 0 or alpha != int(alpha)):
            raise NegativeSupportPowerWeight(
                f"alpha={alpha} invalid on shifted support starting at {lo}"
            )
        G = fam.member(0.0)
        lhs = weighted_cramer(fam.member(param), G, weight)
        rhs = weighted_cramer(fam.member(-param), G, weight)
        return _verdict(lhs, rhs)
    raise ParameterError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# direction sweeps and the verdict table

@dataclass(frozen=True)
class VerdictRow:
    loss: str
    family: str
    mode: str
    param: float
    verdict: AsymmetryVerdict


SCALE_SWEEP_LOSSES = (
    LossSpec.crps(),
    LossSpec.energy(1.5),
    LossSpec.quadratic(),
    LossSpec.ds(),
    LossSpec.spherical(),
)
SCALE_SWEEP_FAMILIES = ("normal", "exponential", "laplace", "gamma", "weibull", "uniform")
SCALE_SWEEP_SIGMAS = (1.5, 2.0, 5.0)

# expected direction per loss tag in a scale family
SCALE_DIRECTION = {
    "crps": OVER,
    "energy": OVER,
    "quadratic": UNDER,
    "ds": UNDER,
    "spherical": SYMMETRIC,
}


def sweep_scale(losses=SCALE_SWEEP_LOSSES, families=SCALE_SWEEP_FAMILIES,
                sigmas=SCALE_SWEEP_SIGMAS):
    rows = []
    for kind in families:
        fam = scale_family(kind)
        for spec in losses:
            for s in sigmas:
                rows.append(
                    VerdictRow(spec.label(), kind, "scale", s,
                               scale_verdict(spec, fam, s))
                )
    return rows


LOCATION_SWEEP_LOSSES = (
    LossSpec.crps(),
    LossSpec.quadratic(),
    LossSpec.spherical(),
    LossSpec.energy(1.5),
    LossSpec.ds(),
    LossSpec.log(),
)
LOCATION_SWEEP_FAMILIES = ("normal", "laplace", "uniform")
LOCATION_SWEEP_MUS = (0.5, 2.0)


def sweep_location(losses=LOCATION_SWEEP_LOSSES, families=LOCATION_SWEEP_FAMILIES,
                   mus=LOCATION_SWEEP_MUS):
    rows = []
    for kind in families:
        fam = location_family(kind)
        for spec in losses:
            for mu in mus:
                rows.append(
                    VerdictRow(spec.label(), kind, "location", mu,
                               location_verdict(spec, fam, mu))
                )
    return rows


# the natural-parameter catalog with the direction each family's verdict
# must take in the *family* parameter (scale/shape/rate)
EXPFAM_SWEEP = (
    ("exponential-scale", {}, UNDER),
    ("gamma-scale", {"k": 3.0}, UNDER),
    ("weibull-scale", {"k": 2.0}, UNDER),
    ("laplace-scale", {}, UNDER),
    ("normal-scale", {}, UNDER),
    ("lognormal-logscale", {"mu": 0.0}, UNDER),
    ("inverse-gamma-scale", {"k": 2.0}, OVER),
    ("pareto-shape", {"m": 1.0}, OVER),
    ("inverse-gaussian-shape", {"mu": 1.0}, OVER),
    ("beta-shape", {"beta": 2.0}, OVER),
    ("poisson-rate", {}, OVER),
)


def sweep_expfam(entries=EXPFAM_SWEEP, base_params=(0.5, 1.0, 2.0),
                 thetas=(1.5, 3.0)):
    """Log-loss verdicts in the conventional family parameter for the
    whole catalog."""
    rows = []
    for kind, fixed, _expected in entries:
        for s in base_params:
            for th in thetas:
                v = family_parameter_verdict(kind, th, base_param=s, **fixed)
                rows.append(VerdictRow("log", kind, "expfam", th, v))
    return rows


def write_verdict_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["loss", "family", "mode", "param", "lhs", "rhs", "verdict", "margin"])
        for r in rows:
            v = r.verdict
            w.writerow(
                [r.loss, r.family, r.mode, f"{r.param:g}",
                 f"{v.lhs:.12g}", f"{v.rhs:.12g}", v.comparison, f"{v.margin:.12g}"]
            )
