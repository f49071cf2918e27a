"""Hedging forecasts against random test-time parameter shifts.

When the target's scale (or natural parameter) at test time is drawn
log-symmetrically around its training value, the loss-minimizing constant
forecast is generally not the training member.  This module computes the
shifted expected loss, classifies whether a loss calls for inflating or
deflating a scale forecast, searches for the optimal scale numerically,
and computes the exact exponential-family optimum via the mean-value
identity eta* = (A')^{-1}(E A'(eta_test)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .divergence import expected_loss
from .errors import (
    ExpectationOutsideRange,
    MinimizerAtBoundary,
    NotAShift,
    NotSymmetricRescalable,
    ParameterError,
)
from .families import ExpFamDescriptor, ScaleFamily
from .scoring import LossSpec

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ShiftLaw:
    """Random test-time parameter, log-symmetric about ``center``.

    two_point: mass 1/2 on {center*a, center/a}; log_uniform: uniform in
    log over [center/a, center*a]; log_normal: log-sd ``s`` about
    log(center).  Real-line natural parameters use the additive analogue:
    {center+a, center-a}, uniform on [center-a, center+a], normal sd s.
    """

    form: str
    a: float | None = None
    s: float | None = None
    center: float = 1.0

    def __post_init__(self):
        if self.form not in ("two_point", "log_uniform", "log_normal"):
            raise ParameterError(f"unknown shift form {self.form!r}")
        if self.form in ("two_point", "log_uniform"):
            if self.a is None or self.a <= 0:
                raise NotAShift("shift half-width a must be positive")
        elif self.s is None or self.s <= 0:
            raise NotAShift("log_normal shift needs s > 0")

    @staticmethod
    def two_point(a: float, center: float = 1.0) -> "ShiftLaw":
        return ShiftLaw("two_point", a=a, center=center)

    @staticmethod
    def log_uniform(a: float, center: float = 1.0) -> "ShiftLaw":
        return ShiftLaw("log_uniform", a=a, center=center)

    @staticmethod
    def log_normal(s: float, center: float = 1.0) -> "ShiftLaw":
        return ShiftLaw("log_normal", s=s, center=center)

    def nodes(self, additive: bool = False):
        """(parameter values, weights) of the shift law; 64-node quadrature
        for the continuous forms."""
        c = self.center
        if self.form == "two_point":
            if not additive and self.a <= 1.0:
                raise NotAShift("two_point shift with a <= 1 is almost surely constant")
            vals = np.array([c + self.a, c - self.a]) if additive else \
                np.array([c * self.a, c / self.a])
            return vals, np.array([0.5, 0.5])
        if self.form == "log_uniform":
            if not additive and self.a <= 1.0:
                raise NotAShift("log_uniform shift with a <= 1 is degenerate")
            u, w = np.polynomial.legendre.leggauss(64)
            if additive:
                return c + self.a * u, w / 2.0
            return c * self.a ** u, w / 2.0
        t, w = np.polynomial.hermite.hermgauss(64)
        w = w / math.sqrt(math.pi)
        if additive:
            return c + math.sqrt(2.0) * self.s * t, w
        return c * np.exp(math.sqrt(2.0) * self.s * t), w


@dataclass(frozen=True)
class HedgeResult:
    direction: str  # inflate | deflate | none
    optimum: float
    baseline_loss: float
    hedged_loss: float
    at_boundary: bool = False


def shifted_expected_loss(spec: LossSpec, fam: ScaleFamily, shift: ShiftLaw,
                          sigma: float) -> float:
    """E over sigma_test of the expected loss of G_sigma against G_{sigma_test}."""
    if sigma <= 0:
        raise ParameterError("sigma must be positive")
    vals, w = shift.nodes()
    F = fam.member(sigma)
    return float(sum(wi * expected_loss(spec, F, fam.member(v))
                     for v, wi in zip(vals, w)))


_RESCALABLE_EXP = {"crps": 1.0, "quadratic": -1.0}


def _scaling_power(spec: LossSpec) -> float:
    if spec.tag in _RESCALABLE_EXP:
        return _RESCALABLE_EXP[spec.tag]
    if spec.tag == "energy":
        return spec.beta
    if spec.tag == "twcrps" and spec.weight is not None and spec.weight.alpha is not None:
        return spec.weight.alpha + 1.0
    raise NotSymmetricRescalable(
        f"{spec.tag} does not induce a symmetric rescalable divergence"
    )


def hedge_scale_direction(spec: LossSpec, fam: ScaleFamily,
                          return_evidence: bool = False):
    """'inflate' or 'deflate' from the grid monotonicity of (h-1)/f, where
    h(sigma)=sigma^gamma is the divergence scaling and f(sigma)=d(G_sigma,G)."""
    from .divergence import divergence

    gamma = _scaling_power(spec)
    sig = np.geomspace(1.05, 8.0, 48)
    G = fam.member(1.0)
    f = np.array([float(divergence(spec, fam.member(s), G)) for s in sig])
    g = (sig**gamma - 1.0) / f
    diffs = np.diff(g)
    if np.all(diffs > 0):
        direction = "deflate"
    elif np.all(diffs < 0):
        direction = "inflate"
    else:
        direction = "indeterminate"
    if return_evidence:
        return direction, (sig, g)
    return direction


def optimal_scale(spec: LossSpec, fam: ScaleFamily, shift: ShiftLaw) -> HedgeResult:
    """Golden-section minimum of the shifted expected loss over sigma."""
    _scaling_power(spec)  # reject non-rescalable specs up front
    c = shift.center

    def obj(t):
        return shifted_expected_loss(spec, fam, shift, c * math.exp(t))

    lo, hi = -math.log(16.0), math.log(16.0)
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = obj(x1), obj(x2)
    while b - a > 1e-6:
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = obj(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = obj(x2)
    t_star = 0.5 * (a + b)
    sigma_star = c * math.exp(t_star)
    at_boundary = min(t_star - lo, hi - t_star) < 1e-3
    baseline = shifted_expected_loss(spec, fam, shift, c)
    hedged = shifted_expected_loss(spec, fam, shift, sigma_star)
    if at_boundary:
        raise MinimizerAtBoundary(
            f"sigma*={sigma_star:g} at the edge of [{c / 16:g}, {16 * c:g}]"
        )
    if abs(t_star) <= 1e-5:
        direction = "none"
    else:
        direction = "inflate" if sigma_star > c else "deflate"
    return HedgeResult(direction, sigma_star, baseline, hedged)


def expfam_shifted_loss(desc: ExpFamDescriptor, shift: ShiftLaw, eta: float) -> float:
    """Expected log loss of member(eta) under the shifted target, up to the
    forecast-independent entropy term: sum of A(eta) - eta * A'(eta_test)."""
    additive = desc.omega[0] != 0.0
    vals, w = shift.nodes(additive=additive)
    for v in vals:
        desc.check_eta(float(v))
    return float(desc.logA(eta) - eta * sum(wi * desc.dA(float(v))
                                            for v, wi in zip(vals, w)))


def hedge_expfam_optimum(desc: ExpFamDescriptor, shift: ShiftLaw) -> HedgeResult:
    """Exact hedge optimum eta* = (A')^{-1}(E A'(eta_test))."""
    additive = desc.omega[0] != 0.0
    vals, w = shift.nodes(additive=additive)
    for v in vals:
        desc.check_eta(float(v))
    target = float(sum(wi * desc.dA(float(v)) for v, wi in zip(vals, w)))
    if not math.isfinite(target):
        raise ExpectationOutsideRange("E A'(eta_test) is not finite")
    eta_star = _invert_dA(desc, target)
    c = shift.center
    baseline = expfam_shifted_loss(desc, shift, c)
    hedged = expfam_shifted_loss(desc, shift, eta_star)
    p_star, p_c = desc.from_natural(eta_star), desc.from_natural(c)
    if math.isclose(p_star, p_c, rel_tol=1e-9, abs_tol=1e-12):
        direction = "none"
    else:
        direction = "inflate" if p_star > p_c else "deflate"
    return HedgeResult(direction, eta_star, baseline, hedged)


def _invert_dA(desc: ExpFamDescriptor, target: float) -> float:
    """Solve A'(eta) = target on omega; A' is strictly increasing."""
    lo, hi = desc.omega
    # grow a bracket inward from the omega endpoints
    if lo == 0.0:
        a, b = 1e-8, 1e8
        while desc.dA(a) > target:
            a /= 16.0
            if a < 1e-300:
                raise ExpectationOutsideRange("target below the range of A'")
        while desc.dA(b) < target:
            b *= 16.0
            if b > 1e300:
                raise ExpectationOutsideRange("target above the range of A'")
    else:
        a, b = -1.0, 1.0
        while desc.dA(a) > target:
            a *= 2.0
            if a < -1e12:
                raise ExpectationOutsideRange("target below the range of A'")
        while desc.dA(b) < target:
            b *= 2.0
            if b > 1e12:
                raise ExpectationOutsideRange("target above the range of A'")
    return float(optimize.brentq(lambda e: desc.dA(e) - target, a, b,
                                 xtol=1e-14, rtol=1e-15))


def write_hedge_csv(rows, path):
    """rows: iterable of (loss, family, shift_label, HedgeResult)."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["loss", "family", "shift", "sigma_star", "baseline",
                    "hedged", "direction"])
        for loss, family, shift_label, res in rows:
            w.writerow([loss, family, shift_label, f"{res.optimum:.12g}",
                        f"{res.baseline_loss:.12g}", f"{res.hedged_loss:.12g}",
                        res.direction])
