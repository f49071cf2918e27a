"""Expected losses and the divergences each loss induces.

For each loss tag, expected_loss(spec, F, G) = E_{y~G} score(spec, F, y) is
computed by a semi-closed route (one quadrature or less), and
divergence(spec, F, G) = expected_loss(F, G) - expected_loss(G, G) is the
induced divergence: KL for log, L2 for quadratic, Cramér for CRPS, weighted
Cramér for twcrps, energy distance for energy, and the mean/variance
divergence for ds.  Monte Carlo and definitional-quadrature routes are kept
as independent cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MomentRequired, ParameterError
from .families import Distribution
from .quadrature import gauss_legendre_01, integrate, pair_expectation
from .scoring import LossSpec, score, score_vector


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    method: str
    error_estimate: float | None = None

    def __float__(self):
        return self.value


def _points(F: Distribution, G: Distribution):
    pts = [p for d in (F, G) for p in d.support if math.isfinite(p)]
    return sorted(set(pts)) or None


def cross_l2(F: Distribution, G: Distribution) -> float:
    """Integral of f*g over the overlap of the supports."""
    lo = max(F.support[0], G.support[0])
    hi = min(F.support[1], G.support[1])
    if lo >= hi:
        return 0.0
    return integrate(
        lambda x: float(F.pdf(x)) * float(G.pdf(x)), lo, hi, points=_points(F, G)
    )


def kl(F: Distribution, G: Distribution) -> float:
    """KL(F || G) = int f log(f/g)."""
    lo, hi = F.support

    def fn(x):
        lf = float(F.logpdf(x))
        if not math.isfinite(lf) or lf < -640.0:
            return 0.0  # mass below ~1e-278 cannot move the integral
        lg = float(G.logpdf(x))
        if not math.isfinite(lg):
            return math.inf
        return math.exp(lf) * (lf - lg)

    if F.discrete:
        ks = F._lattice()
        fx = np.asarray(F.pdf(ks), dtype=float)
        gx = np.asarray(G.pdf(ks), dtype=float)
        m = fx > 0
        if np.any(gx[m] <= 0):
            return math.inf
        return float(np.sum(fx[m] * np.log(fx[m] / gx[m])))
    return integrate(fn, lo, hi, points=_points(F, G))


def cramer(F: Distribution, G: Distribution) -> float:
    """Cramér divergence: int (F - G)^2 dx."""
    lo = min(F.support[0], G.support[0])
    hi = max(F.support[1], G.support[1])
    return integrate(
        lambda x: (float(F.cdf(x)) - float(G.cdf(x))) ** 2, lo, hi, points=_points(F, G)
    )


def weighted_cramer(F: Distribution, G: Distribution, weight) -> float:
    """Threshold-weighted Cramér divergence: int w(x) (F - G)^2 dx."""
    lo = min(F.support[0], G.support[0])
    hi = max(F.support[1], G.support[1])
    val = integrate(
        lambda x: float(weight.w(x)) * (float(F.cdf(x)) - float(G.cdf(x))) ** 2,
        lo,
        hi,
        points=_points(F, G),
    )
    return val


def pair_abs_moment(F: Distribution, G: Distribution, beta: float = 1.0) -> float:
    """E |X - Y|^beta for independent X ~ F, Y ~ G, by the quantile pair rule."""
    return pair_expectation(
        F.ppf, G.ppf, lambda a, b: np.abs(a - b) ** beta, n=256
    )


def energy_distance(F: Distribution, G: Distribution, beta: float) -> float:
    """E|X-Y|^b - (E|X-X'|^b + E|Y-Y'|^b)/2, X~F, Y~G."""
    if not 0.0 < beta < 2.0:
        raise ParameterError("beta must lie in (0,2)")
    exy = pair_abs_moment(F, G, beta)
    exx = pair_abs_moment(F, F, beta)
    eyy = pair_abs_moment(G, G, beta)
    return exy - 0.5 * (exx + eyy)


def ds_divergence(F: Distribution, G: Distribution) -> float:
    mf, vf = F.mean(), F.var()
    mg, vg = G.mean(), G.var()
    return math.log(vf / vg) + (vg - vf + (mg - mf) ** 2) / vf


def expected_loss(spec: LossSpec, F: Distribution, G: Distribution) -> float:
    """E_{y~G} score(spec, F, y), by the cheapest exact route per tag."""
    tag = spec.tag
    if tag == "log":
        lo, hi = G.support
        if G.discrete:
            ks = G._lattice()
            gx = np.asarray(G.pdf(ks), dtype=float)
            lp = np.asarray(F.logpdf(ks), dtype=float)
            m = gx > 0
            if np.any(~np.isfinite(lp[m])):
                return math.inf
            return float(-np.sum(gx[m] * lp[m]))

        def fn(x):
            lg = float(G.logpdf(x))
            if not math.isfinite(lg) or lg < -640.0:
                return 0.0  # mass below ~1e-278 cannot move the integral
            lf = float(F.logpdf(x))
            if not math.isfinite(lf):
                return math.inf
            return -math.exp(lg) * lf

        return integrate(fn, lo, hi, points=_points(F, G))
    if tag == "quadratic":
        return -2.0 * cross_l2(F, G) + F.l2norm2()
    if tag == "spherical":
        return -cross_l2(F, G) / math.sqrt(F.l2norm2())
    if tag == "crps":
        return cramer(F, G) + 0.5 * G.mean_abs_diff()
    if tag == "twcrps":
        lo, hi = G.support
        w = spec.weight.w
        base = integrate(
            lambda x: float(w(x)) * float(G.cdf(x)) * (1.0 - float(G.cdf(x))),
            lo,
            hi,
            points=_points(F, G),
        )
        return weighted_cramer(F, G, spec.weight) + base
    if tag == "energy":
        exy = pair_abs_moment(F, G, spec.beta)
        exx = pair_abs_moment(F, F, spec.beta)
        return exy - 0.5 * exx
    if tag == "ds":
        mf, vf = F.mean(), F.var()
        mg, vg = G.mean(), G.var()
        if not all(map(math.isfinite, (mf, vf, mg, vg))):
            raise MomentRequired("ds expected loss needs finite moments")
        return math.log(vf) + (vg + (mg - mf) ** 2) / vf
    raise ParameterError(tag)


def divergence(spec: LossSpec, F: Distribution, G: Distribution) -> DivergenceValue:
    """Induced divergence d(F, G) = E_G[loss(F)] - E_G[loss(G)]."""
    tag = spec.tag
    if tag == "log":
        return DivergenceValue(kl(G, F), "kl")
    if tag == "quadratic":
        v = F.l2norm2() + G.l2norm2() - 2.0 * cross_l2(F, G)
        return DivergenceValue(v, "l2")
    if tag == "spherical":
        v = math.sqrt(G.l2norm2()) - cross_l2(F, G) / math.sqrt(F.l2norm2())
        return DivergenceValue(v, "spherical")
    if tag == "crps":
        return DivergenceValue(cramer(F, G), "cramer")
    if tag == "twcrps":
        return DivergenceValue(weighted_cramer(F, G, spec.weight), "weighted-cramer")
    if tag == "energy":
        return DivergenceValue(energy_distance(F, G, spec.beta), "energy")
    if tag == "ds":
        return DivergenceValue(ds_divergence(F, G), "ds")
    raise ParameterError(tag)


# ---------------------------------------------------------------------------
# independent oracle routes, used to cross-check the semi-closed formulas

def expected_loss_quad(spec: LossSpec, F: Distribution, G: Distribution) -> float:
    """Definitional route: quadrature of score(spec, F, y) against dG(y)."""
    if G.discrete:
        ks = G._lattice()
        gx = np.asarray(G.pdf(ks), dtype=float)
        return float(sum(g * score(spec, F, float(k)) for k, g in zip(ks, gx) if g > 0))
    lo, hi = G.support
    return integrate(
        lambda y: float(G.pdf(y)) * score(spec, F, y),
        lo,
        hi,
        points=_points(F, G),
        tol=1e-9,
    )


def expected_loss_mc(spec: LossSpec, F: Distribution, G: Distribution, n: int, rng):
    """Monte Carlo route; returns (estimate, standard error)."""
    ys = G.sample(n, rng)
    vals = score_vector(spec, F, np.asarray(ys, dtype=float))
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / math.sqrt(n))
