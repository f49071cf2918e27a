"""Pointwise loss evaluation for the seven probabilistic-forecast losses.

score() dispatches on a LossSpec tag: log, quadratic, spherical, crps,
twcrps (threshold-weighted), energy, ds.  Closed forms are used where the
catalog has them; otherwise the definitional integrals are evaluated by
adaptive quadrature.  Ensembles use the expectation forms throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .errors import (
    MissingCapability,
    MomentRequired,
    NegativeSupportPowerWeight,
    NonIntegrableWeight,
    ParameterError,
)
from .families import AffineDistribution, Distribution, ParametricDistribution
from .forecasts import Ensemble
from .quadrature import gauss_legendre_01, integrate

TAGS = ("log", "quadratic", "spherical", "crps", "twcrps", "energy", "ds")

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class WeightFunction:
    """Nonnegative threshold weight w with antiderivative v (v' = w)."""

    w: Callable
    v: Callable
    alpha: float | None = None  # set for power weights w(y) = y^alpha

    @staticmethod
    def power(alpha: float) -> "WeightFunction":
        if alpha == -1.0:
            return WeightFunction(
                w=lambda x: np.asarray(x, dtype=float) ** -1.0,
                v=lambda x: np.log(np.asarray(x, dtype=float)),
                alpha=-1.0,
            )
        return WeightFunction(
            w=lambda x, a=alpha: np.asarray(x, dtype=float) ** a,
            v=lambda x, a=alpha: np.asarray(x, dtype=float) ** (a + 1.0) / (a + 1.0),
            alpha=float(alpha),
        )

    @staticmethod
    def tabulated(w, v, probe_lo=0.5, probe_hi=8.0) -> "WeightFunction":
        """User-supplied weight; v' = w is checked at 16 probe points."""
        xs = np.linspace(probe_lo, probe_hi, 16)
        h = 1e-5 * (probe_hi - probe_lo)
        fd = (np.asarray(v(xs + h)) - np.asarray(v(xs - h))) / (2.0 * h)
        wx = np.asarray(w(xs), dtype=float)
        denom = np.maximum(np.abs(wx), 1e-12)
        if np.max(np.abs(fd - wx) / denom) > 1e-4:
            raise ParameterError("v is not an antiderivative of w at probe points")
        return WeightFunction(w=w, v=v)


@dataclass(frozen=True)
class LossSpec:
    """Tagged loss choice with loss-specific parameters."""

    tag: str
    weight: WeightFunction | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ParameterError(f"unknown loss tag {self.tag!r}")
        if self.tag == "energy":
            if self.beta is None or not 0.0 < self.beta < 2.0:
                raise ParameterError("energy loss needs beta in (0,2)")
        if self.tag == "twcrps" and self.weight is None:
            raise ParameterError("twcrps needs a weight function")

    @staticmethod
    def log():
        return LossSpec("log")

    @staticmethod
    def quadratic():
        return LossSpec("quadratic")

    @staticmethod
    def spherical():
        return LossSpec("spherical")

    @staticmethod
    def crps():
        return LossSpec("crps")

    @staticmethod
    def ds():
        return LossSpec("ds")

    @staticmethod
    def energy(beta: float):
        return LossSpec("energy", beta=beta)

    @staticmethod
    def twcrps(weight: WeightFunction):
        return LossSpec("twcrps", weight=weight)

    def label(self) -> str:
        if self.tag == "energy":
            return f"energy({self.beta:g})"
        if self.tag == "twcrps" and self.weight is not None and self.weight.alpha is not None:
            return f"twcrps(a={self.weight.alpha:g})"
        return self.tag


def _require_density(F, tag):
    if isinstance(F, Ensemble):
        raise MissingCapability(f"{tag} loss needs a density; ensembles have none")


def _require_moments(F, tag):
    try:
        mu, var = F.mean(), F.var()
    except MomentRequired:
        raise
    if not (math.isfinite(mu) and math.isfinite(var)):
        raise MomentRequired(f"{tag} loss needs finite mean and variance")
    return mu, var


def score(spec: LossSpec, F, y) -> float:
    """Loss of forecast F at outcome y.  Returns +inf for log loss at zero
    density rather than raising."""
    tag = spec.tag
    if isinstance(F, Ensemble):
        return _score_ensemble(spec, F, y)
    y = float(y)
    if tag == "log":
        lp = float(F.logpdf(y))
        return math.inf if not math.isfinite(lp) and lp < 0 else -lp
    if tag == "quadratic":
        return -2.0 * float(F.pdf(y)) + F.l2norm2()
    if tag == "spherical":
        return -float(F.pdf(y)) / math.sqrt(F.l2norm2())
    if tag == "crps":
        if not F.has_first_moment:
            raise MomentRequired("CRPS needs a finite first moment")
        return F.crps(y)
    if tag == "twcrps":
        return twcrps_score(F, y, spec.weight)
    if tag == "energy":
        if not F.has_first_moment:
            raise MomentRequired("energy loss needs a finite beta-moment")
        return _energy_dist_score(F, y, spec.beta)
    if tag == "ds":
        mu, var = _require_moments(F, "ds")
        return math.log(var) + (y - mu) ** 2 / var
    raise ParameterError(tag)


def _score_ensemble(spec: LossSpec, E: Ensemble, y) -> float:
    tag = spec.tag
    if tag in ("log", "quadratic", "spherical"):
        raise MissingCapability(f"{tag} loss needs a density; ensembles have none")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if tag == "crps":
        return energy_score(E, y, 1.0)
    if tag == "energy":
        return energy_score(E, y, spec.beta)
    if tag == "ds":
        if E.dim != 1:
            raise MissingCapability("ds loss is univariate")
        mu = float(E.mean()[0])
        var = E.var()
        return math.log(var) + (float(y[0]) - mu) ** 2 / var
    if tag == "twcrps":
        if E.dim != 1:
            raise MissingCapability("twcrps is univariate")
        v = spec.weight.v
        vm = np.asarray(v(E.members[:, 0]), dtype=float)
        vy = float(np.asarray(v(float(y[0]))))
        tE = Ensemble(vm, E.weights)
        return energy_score(tE, np.array([vy]), 1.0)
    raise ParameterError(tag)


def energy_score(E: Ensemble, y, beta: float) -> float:
    """Energy loss of an ensemble: all ordered pairs including i=j (divisor n^2)."""
    if not 0.0 < beta < 2.0:
        raise ParameterError("beta must lie in (0,2)")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.ndim == 1 and y.size == E.dim:
        y = y.reshape(1, -1)
    if y.shape[-1] != E.dim:
        raise ParameterError(f"outcome dimension {y.shape[-1]} != ensemble dim {E.dim}")
    m, w = E.members, E.weights
    d_y = np.linalg.norm(m - y, axis=1) ** beta
    term1 = float(w @ d_y)
    d_xx = np.linalg.norm(m[:, None, :] - m[None, :, :], axis=2) ** beta
    term2 = float(w @ d_xx @ w)
    return term1 - 0.5 * term2


def _energy_dist_score(F: Distribution, y: float, beta: float) -> float:
    """Energy loss for a univariate distribution via the expectation form."""
    if beta == 1.0:
        return F.crps(y)
    u, w = gauss_legendre_01()
    x = np.asarray(F.ppf(u), dtype=float)
    term1 = float(w @ np.abs(x - y) ** beta)
    term2 = float(w @ (np.abs(x[:, None] - x[None, :]) ** beta) @ w)
    return term1 - 0.5 * term2


def twcrps_score(F: Distribution, y: float, weight: WeightFunction) -> float:
    """Threshold-weighted CRPS by quadrature on w(x) (F(x) - 1{y<=x})^2."""
    lo, hi = F.support
    a = weight.alpha
    if a is not None and (a < 0 or a != int(a)) and lo < 0:
        raise NegativeSupportPowerWeight(
            f"power weight alpha={a} needs nonnegative support, got lo={lo}"
        )
    w = weight.w

    def below(x):
        return float(w(x)) * float(F.cdf(x)) ** 2

    def above(x):
        return float(w(x)) * (1.0 - float(F.cdf(x))) ** 2

    val = 0.0
    if y > lo:
        val += integrate(below, lo, min(y, hi), points=[0.0], tol=1e-10)
    if y < hi:
        val += integrate(above, max(y, lo), hi, points=[0.0], tol=1e-10)
    if y < lo:
        val += integrate(lambda x: float(w(x)), y, lo, points=[0.0], tol=1e-10)
    elif y > hi:
        val += integrate(lambda x: float(w(x)), hi, y, points=[0.0], tol=1e-10)
    if not math.isfinite(val):
        raise NonIntegrableWeight("weighted CRPS integral diverges")
    return val


def crps_both_forms(F: Distribution, y: float):
    """(integral form, expectation form) of the CRPS; both by independent routes."""
    if not F.has_first_moment:
        raise MomentRequired("CRPS needs a finite first moment")
    integral = F.crps(y) if not isinstance(F, ParametricDistribution) else _crps_integral(F, y)
    e_xy = F.abs_moment(y)
    e_xx = F.mean_abs_diff()
    expectation = e_xy - 0.5 * e_xx
    return integral, expectation


def _crps_integral(F, y):
    # definitional integral, bypassing any closed form the family may carry
    return Distribution.crps(F, y)


# ---------------------------------------------------------------------------
# vectorized scoring over many outcomes (harness hot path)

def score_vector(spec: LossSpec, F, ys: np.ndarray) -> np.ndarray:
    """score(spec, F, y) for an array of outcomes, vectorized where possible."""
    ys = np.asarray(ys, dtype=float)
    tag = spec.tag
    if isinstance(F, Ensemble):
        return np.array([score(spec, F, y) for y in ys])
    if tag == "log":
        with np.errstate(divide="ignore"):
            out = -np.asarray(F.logpdf(ys), dtype=float)
        return np.where(np.isnan(out), math.inf, out)
    if tag == "quadratic":
        return -2.0 * np.asarray(F.pdf(ys), dtype=float) + F.l2norm2()
    if tag == "spherical":
        return -np.asarray(F.pdf(ys), dtype=float) / math.sqrt(F.l2norm2())
    if tag == "ds":
        mu, var = _require_moments(F, "ds")
        return math.log(var) + (ys - mu) ** 2 / var
    if tag == "crps":
        return crps_vector(F, ys)
    return np.array([score(spec, F, y) for y in ys])


def crps_vector(F, ys: np.ndarray) -> np.ndarray:
    """Vectorized CRPS: closed form for normal/exponential (and affine images),
    probability-space Gauss-Legendre for everything else."""
    ys = np.asarray(ys, dtype=float)
    if isinstance(F, AffineDistribution):
        return F.scale * crps_vector(F.base, (ys - F.loc) / F.scale)
    if getattr(F, "kind", "") == "normal":
        mu, sd = F.params
        z = (ys - mu) / sd
        return sd * (
            z * (2.0 * stats.norm.cdf(z) - 1.0)
            + 2.0 * stats.norm.pdf(z)
            - 1.0 / _SQRT_PI
        )
    if getattr(F, "kind", "") == "exponential":
        (sc,) = F.params
        out = -ys + sc / 2.0
        pos = ys >= 0
        out[pos] = ys[pos] + sc / 2.0 - 2.0 * sc * (1.0 - np.exp(-ys[pos] / sc))
        return out
    if not F.has_first_moment:
        raise MomentRequired("CRPS needs a finite first moment")
    u, w = gauss_legendre_01()
    x = np.asarray(F.ppf(u), dtype=float)
    e_xx = float(w @ np.abs(x[:, None] - x[None, :]) @ w)
    out = np.empty(ys.shape, dtype=float)
    chunk = max(1, int(2e6 / max(x.size, 1)))
    for i in range(0, ys.size, chunk):
        sl = slice(i, i + chunk)
        out[sl] = np.abs(x[:, None] - ys[sl][None, :]).T @ w
    return out - 0.5 * e_xx
