"""Parametric distribution catalog, scale/location families, and
exponential-family descriptors with exact log-partition derivatives.

Distributions are immutable value objects exposing density/CDF/quantile/
moments/sampling over a stated support.  Heavy numerical lifting (CDF
inversion, special functions inside densities) is delegated to scipy; the
exponential-family log-partition functions and their derivatives are written
in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

from . import specfun
from .errors import MomentRequired, ParameterError, UnknownFamily
from .quadrature import integrate

_SQRT_PI = math.sqrt(math.pi)


class Distribution:
    """Immutable univariate probability law.

    ``pdf`` means the probability mass function when ``discrete`` is True.
    Subclasses must implement pdf/cdf/ppf/mean/var/sample; the scoring hooks
    (crps, l2norm2, abs_moment, mean_abs_diff) have generic quadrature
    defaults that subclasses may override with closed forms.
    """

    kind: str = "abstract"
    params: tuple = ()
    support: tuple = (-math.inf, math.inf)
    discrete: bool = False
    has_first_moment: bool = True

    def pdf(self, x):
        raise NotImplementedError

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def cdf(self, x):
        raise NotImplementedError

    def ppf(self, q):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def var(self) -> float:
        raise NotImplementedError

    def sd(self) -> float:
        return math.sqrt(self.var())

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.asarray(self.ppf(rng.uniform(size=n)), dtype=float)

    # -- scoring hooks -------------------------------------------------

    def crps(self, y: float) -> float:
        """CRPS at outcome y, by quadrature on the squared-CDF integrand."""
        if not self.has_first_moment:
            raise MomentRequired(f"CRPS undefined for {self.kind}")
        if self.discrete:
            return self._crps_discrete(y)
        lo, hi = self.support
        left = integrate(lambda x: self.cdf(x) ** 2, lo, min(y, hi)) if y > lo else 0.0
        right = (
            integrate(lambda x: (1.0 - self.cdf(x)) ** 2, max(y, lo), hi)
            if y < hi
            else 0.0
        )
        extra = 0.0
        if y < lo:
            extra = lo - y
        elif y > hi:
            extra = y - hi
        return left + right + extra

    def _crps_discrete(self, y: float) -> float:
        # integer lattice: the CDF is a right-continuous step function, so
        # the integral is a unit-width sum of squared steps
        ks = self._lattice()
        F = self.cdf(ks)
        ind = (y <= ks).astype(float)
        total = float(np.sum((F - ind) ** 2))
        if y < ks[0]:
            total += ks[0] - y
        return total

    def _lattice(self) -> np.ndarray:
        hi = int(self.ppf(1.0 - 1e-13)) + 10
        return np.arange(0, hi + 1)

    def l2norm2(self) -> float:
        """Integral of the squared density (sum of squared pmf if discrete)."""
        if self.discrete:
            p = self.pdf(self._lattice())
            return float(np.sum(p * p))
        lo, hi = self.support
        return integrate(lambda x: self.pdf(x) ** 2, lo, hi)

    def abs_moment(self, y: float) -> float:
        """E |X - y| via the CDF identity (finite-first-moment laws only)."""
        if not self.has_first_moment:
            raise MomentRequired(f"E|X-y| undefined for {self.kind}")
        if self.discrete:
            ks = self._lattice()
            return float(np.sum(self.pdf(ks) * np.abs(ks - y)))
        lo, hi = self.support
        left = integrate(self.cdf, lo, max(y, lo)) if y > lo else 0.0
        right = integrate(lambda x: 1.0 - self.cdf(x), min(y, hi), hi) if y < hi else 0.0
        extra = lo - y if y < lo else 0.0
        return left + right + extra

    def mean_abs_diff(self) -> float:
        """E |X - X'| for independent copies, via 2 * integral F(1-F)."""
        if not self.has_first_moment:
            raise MomentRequired(f"E|X-X'| undefined for {self.kind}")
        if self.discrete:
            ks = self._lattice()
            F = self.cdf(ks)
            return float(2.0 * np.sum(F * (1.0 - F)))
        lo, hi = self.support
        return 2.0 * integrate(lambda x: self.cdf(x) * (1.0 - self.cdf(x)), lo, hi)

    def __repr__(self):
        ps = ",".join(f"{p:g}" for p in self.params)
        return f"{self.kind}({ps})"


class ParametricDistribution(Distribution):
    """Catalog member backed by a frozen scipy law."""

    def __init__(self, kind, params, rv, support, discrete=False, has_first_moment=True):
        self.kind = kind
        self.params = tuple(float(p) for p in params)
        self._rv = rv
        self.support = support
        self.discrete = discrete
        self.has_first_moment = has_first_moment

    def pdf(self, x):
        return self._rv.pmf(x) if self.discrete else self._rv.pdf(x)

    def logpdf(self, x):
        return self._rv.logpmf(x) if self.discrete else self._rv.logpdf(x)

    def cdf(self, x):
        return self._rv.cdf(x)

    def ppf(self, q):
        return self._rv.ppf(q)

    def mean(self) -> float:
        if not self.has_first_moment:
            raise MomentRequired(f"{self.kind} has no first moment")
        return float(self._rv.mean())

    def var(self) -> float:
        if not self.has_first_moment:
            raise MomentRequired(f"{self.kind} has no variance")
        return float(self._rv.var())

    def sample(self, n, rng):
        return np.asarray(self._rv.rvs(size=n, random_state=rng), dtype=float)

    # closed forms where the catalog has them
    def crps(self, y: float) -> float:
        if self.kind == "normal":
            mu, sd = self.params
            z = (y - mu) / sd
            return sd * (
                z * (2.0 * stats.norm.cdf(z) - 1.0)
                + 2.0 * stats.norm.pdf(z)
                - 1.0 / _SQRT_PI
            )
        if self.kind == "exponential":
            (sc,) = self.params
            if y < 0:
                return -y + sc / 2.0
            return y + sc / 2.0 - 2.0 * sc * (1.0 - math.exp(-y / sc))
        return super().crps(y)

    def l2norm2(self) -> float:
        if self.kind == "normal":
            return 1.0 / (2.0 * self.params[1] * _SQRT_PI)
        if self.kind == "exponential":
            return 1.0 / (2.0 * self.params[0])
        if self.kind == "laplace":
            return 1.0 / (4.0 * self.params[1])
        if self.kind == "uniform":
            a, b = self.params
            return 1.0 / (b - a)
        return super().l2norm2()


class AsymmetricLaplace(Distribution):
    """Asymmetric Laplace law with location mu, scale sigma, skew p in (0,1).

    Density p(1-p)/sigma * exp(-(x-mu)/sigma * (p - 1{x<=mu})); reduces to the
    standard (symmetric) Laplace at p = 1/2, right-skewed for p < 1/2.
    """

    def __init__(self, mu: float, sigma: float, p: float):
        if sigma <= 0:
            raise ParameterError(f"sigma must be positive, got {sigma}")
        if not 0.0 < p < 1.0:
            raise ParameterError(f"skew p must lie in (0,1), got {p}")
        self.kind = "asymmetric-laplace"
        self.params = (float(mu), float(sigma), float(p))
        self.mu, self.sigma, self.p = self.params
        self.support = (-math.inf, math.inf)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.mu) / self.sigma
        p = self.p
        rate = np.where(z > 0, -p * z, (1.0 - p) * z)
        return p * (1.0 - p) / self.sigma * np.exp(rate)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.mu) / self.sigma
        p = self.p
        rate = np.where(z > 0, -p * z, (1.0 - p) * z)
        return math.log(p * (1.0 - p) / self.sigma) + rate

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.mu) / self.sigma
        p = self.p
        lower = p * np.exp(np.minimum((1.0 - p) * z, 0.0))
        upper = 1.0 - (1.0 - p) * np.exp(np.minimum(-p * z, 0.0))
        return np.where(z <= 0, lower, upper)

    def ppf(self, q):
        q = np.asarray(q, dtype=float)
        p = self.p
        lo = self.mu + self.sigma / (1.0 - p) * np.log(np.maximum(q, 1e-300) / p)
        hi = self.mu - self.sigma / p * np.log(np.maximum(1.0 - q, 1e-300) / (1.0 - p))
        return np.where(q <= p, lo, hi)

    def mean(self) -> float:
        p = self.p
        return self.mu + self.sigma * (1.0 - 2.0 * p) / (p * (1.0 - p))

    def var(self) -> float:
        p = self.p
        return self.sigma**2 * (1.0 - 2.0 * p + 2.0 * p * p) / (p * p * (1.0 - p) ** 2)

    def l2norm2(self) -> float:
        p = self.p
        return p * (1.0 - p) / (2.0 * self.sigma)


class AffineDistribution(Distribution):
    """Law of loc + scale * X for a base distribution X and scale > 0."""

    def __init__(self, base: Distribution, loc: float, scale: float):
        if scale <= 0:
            raise ParameterError(f"scale must be positive, got {scale}")
        if base.discrete and (loc != 0.0 or scale != 1.0):
            raise ParameterError("affine transforms of lattice laws unsupported")
        if isinstance(base, AffineDistribution):
            loc = loc + scale * base.loc
            scale = scale * base.scale
            base = base.base
        self.base, self.loc, self.scale = base, float(loc), float(scale)
        self.kind = f"affine[{base.kind}]"
        self.params = base.params + (self.loc, self.scale)
        lo, hi = base.support
        self.support = (self.loc + self.scale * lo, self.loc + self.scale * hi)
        self.has_first_moment = base.has_first_moment

    def _z(self, x):
        return (np.asarray(x, dtype=float) - self.loc) / self.scale

    def pdf(self, x):
        return self.base.pdf(self._z(x)) / self.scale

    def logpdf(self, x):
        return self.base.logpdf(self._z(x)) - math.log(self.scale)

    def cdf(self, x):
        return self.base.cdf(self._z(x))

    def ppf(self, q):
        return self.loc + self.scale * np.asarray(self.base.ppf(q), dtype=float)

    def mean(self) -> float:
        return self.loc + self.scale * self.base.mean()

    def var(self) -> float:
        return self.scale**2 * self.base.var()

    def sample(self, n, rng):
        return self.loc + self.scale * self.base.sample(n, rng)

    def crps(self, y: float) -> float:
        # positive homogeneity plus translation invariance of the CRPS
        return self.scale * self.base.crps((y - self.loc) / self.scale)

    def l2norm2(self) -> float:
        return self.base.l2norm2() / self.scale

    def abs_moment(self, y: float) -> float:
        return self.scale * self.base.abs_moment((y - self.loc) / self.scale)

    def mean_abs_diff(self) -> float:
        return self.scale * self.base.mean_abs_diff()


@dataclass(frozen=True)
class ScaleFamily:
    """Scale family {G_sigma : sigma > 0} generated by a sigma=1 base."""

    base: Distribution

    def member(self, sigma: float) -> Distribution:
        if sigma <= 0:
            raise ParameterError(f"sigma must be positive, got {sigma}")
        if sigma == 1.0:
            return self.base
        return AffineDistribution(self.base, 0.0, sigma)


@dataclass(frozen=True)
class LocationFamily:
    """Location family {G_mu : mu in R} generated by a mu=0 base."""

    base: Distribution

    def member(self, mu: float) -> Distribution:
        if mu == 0.0:
            return self.base
        return AffineDistribution(self.base, mu, 1.0)


class MixtureDistribution(Distribution):
    """Finite mixture of continuous laws with the given weights."""

    def __init__(self, components, weights):
        ws = np.asarray(weights, dtype=float)
        if len(components) != ws.size or ws.size == 0:
            raise ParameterError("components and weights must match and be nonempty")
        if np.any(ws < 0) or not math.isclose(float(ws.sum()), 1.0, rel_tol=1e-12):
            raise ParameterError("weights must be nonnegative and sum to one")
        if any(c.discrete for c in components):
            raise ParameterError("mixtures of lattice laws unsupported")
        self.components = tuple(components)
        self.weights = ws
        self.kind = "mixture[" + ",".join(c.kind for c in components) + "]"
        self.params = tuple(ws)
        self.support = (
            min(c.support[0] for c in components),
            max(c.support[1] for c in components),
        )
        self.has_first_moment = all(c.has_first_moment for c in components)

    def pdf(self, x):
        return sum(w * np.asarray(c.pdf(x), dtype=float)
                   for w, c in zip(self.weights, self.components))

    def cdf(self, x):
        return sum(w * np.asarray(c.cdf(x), dtype=float)
                   for w, c in zip(self.weights, self.components))

    def ppf(self, q):
        q = np.atleast_1d(np.asarray(q, dtype=float))
        lo = np.full(q.shape, min(float(c.ppf(1e-14)) for c in self.components))
        hi = np.full(q.shape, max(float(c.ppf(1.0 - 1e-14)) for c in self.components))
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = np.asarray(self.cdf(mid), dtype=float) < q
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return out if out.size > 1 else float(out[0])

    def mean(self) -> float:
        if not self.has_first_moment:
            raise MomentRequired(f"{self.kind} has no first moment")
        return float(sum(w * c.mean() for w, c in zip(self.weights, self.components)))

    def var(self) -> float:
        m = self.mean()
        second = sum(w * (c.var() + c.mean() ** 2)
                     for w, c in zip(self.weights, self.components))
        return float(second - m * m)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        idx = rng.choice(len(self.components), size=n, p=self.weights)
        out = np.empty(n, dtype=float)
        for i, c in enumerate(self.components):
            m = idx == i
            if np.any(m):
                out[m] = c.sample(int(m.sum()), rng)
        return out


def make_family(kind: str, params) -> Distribution:
    """Build a catalog distribution by family tag.

    Parameter conventions (positional):
      normal(mu, sigma); exponential(sigma); laplace(mu, sigma);
      weibull(sigma, k); gamma(sigma, k); generalized-gamma(sigma, gamma, k);
      log-normal(mu, sigma); inverse-gamma(sigma, k); pareto(m, k);
      inverse-gaussian(mu, k); beta(k, beta); poisson(lam);
      cauchy(mu, sigma); asymmetric-laplace(mu, sigma, p); uniform(a, b).
    """
    params = [float(p) for p in params]
    inf = math.inf

    def pos(name, v):
        if v <= 0:
            raise ParameterError(f"{kind}: {name} must be positive, got {v}")
        return v

    if kind == "normal":
        mu, sd = params
        pos("sigma", sd)
        return ParametricDistribution(kind, params, stats.norm(mu, sd), (-inf, inf))
    if kind == "exponential":
        (sc,) = params
        pos("sigma", sc)
        return ParametricDistribution(kind, params, stats.expon(scale=sc), (0.0, inf))
    if kind == "laplace":
        mu, sc = params
        pos("sigma", sc)
        return ParametricDistribution(kind, params, stats.laplace(mu, sc), (-inf, inf))
    if kind == "weibull":
        sc, k = params
        pos("sigma", sc), pos("k", k)
        return ParametricDistribution(
            kind, params, stats.weibull_min(k, scale=sc), (0.0, inf)
        )
    if kind == "gamma":
        sc, k = params
        pos("sigma", sc), pos("k", k)
        return ParametricDistribution(kind, params, stats.gamma(k, scale=sc), (0.0, inf))
    if kind == "generalized-gamma":
        sc, gam, k = params
        pos("sigma", sc), pos("gamma", gam), pos("k", k)
        rv = stats.gengamma(a=k / gam, c=gam, scale=sc)
        return ParametricDistribution(kind, params, rv, (0.0, inf))
    if kind == "log-normal":
        mu, sd = params
        pos("sigma", sd)
        rv = stats.lognorm(s=sd, scale=math.exp(mu))
        return ParametricDistribution(kind, params, rv, (0.0, inf))
    if kind == "inverse-gamma":
        sc, k = params
        pos("sigma", sc), pos("k", k)
        rv = stats.invgamma(k, scale=sc)
        return ParametricDistribution(
            kind, params, rv, (0.0, inf), has_first_moment=k > 1
        )
    if kind == "pareto":
        m, k = params
        pos("m", m), pos("k", k)
        rv = stats.pareto(k, scale=m)
        return ParametricDistribution(
            kind, params, rv, (m, inf), has_first_moment=k > 1
        )
    if kind == "inverse-gaussian":
        mu, k = params
        pos("mu", mu), pos("k", k)
        rv = stats.invgauss(mu / k, scale=k)
        return ParametricDistribution(kind, params, rv, (0.0, inf))
    if kind == "beta":
        k, b = params
        pos("k", k), pos("beta", b)
        return ParametricDistribution(kind, params, stats.beta(k, b), (0.0, 1.0))
    if kind == "poisson":
        (lam,) = params
        pos("lambda", lam)
        return ParametricDistribution(
            kind, params, stats.poisson(lam), (0.0, inf), discrete=True
        )
    if kind == "cauchy":
        mu, sc = params
        pos("sigma", sc)
        return ParametricDistribution(
            kind, params, stats.cauchy(mu, sc), (-inf, inf), has_first_moment=False
        )
    if kind == "asymmetric-laplace":
        mu, sc, p = params
        return AsymmetricLaplace(mu, sc, p)
    if kind == "uniform":
        a, b = params
        if b <= a:
            raise ParameterError(f"uniform: need a < b, got ({a}, {b})")
        return ParametricDistribution(kind, params, stats.uniform(a, b - a), (a, b))
    raise UnknownFamily(f"unknown family kind {kind!r}")


@dataclass(frozen=True)
class ExpFamDescriptor:
    """Minimal single-parameter exponential family p_eta = h(x) e^{eta T(x) - A(eta)}.

    ``omega`` is the open natural-parameter interval, ``logA``/``dA``/``d2A``
    are the log-partition function and its derivatives in closed form, and
    ``to_natural``/``from_natural`` map the conventional family parameter
    (scale, shape, or rate) to and from eta.
    """

    kind: str
    omega: tuple
    T: Callable
    logA: Callable
    dA: Callable
    d2A: Callable
    to_natural: Callable
    from_natural: Callable
    member: Callable
    fixed: dict = field(default_factory=dict)

    def check_eta(self, eta: float) -> float:
        lo, hi = self.omega
        if not lo < eta < hi:
            raise ParameterError(f"{self.kind}: eta={eta} outside omega={self.omega}")
        return float(eta)

    def bregman(self, eta1: float, eta2: float) -> float:
        """Bregman divergence d_A(eta1, eta2) = KL of member(eta2) from member(eta1)."""
        self.check_eta(eta1), self.check_eta(eta2)
        return self.logA(eta1) - self.logA(eta2) - self.dA(eta2) * (eta1 - eta2)


def expfam_descriptor(kind: str, **fixed) -> ExpFamDescriptor:
    """Catalog of natural-parameter descriptors.

    Kinds: generalized-gamma-scale(gam, k), gamma-scale(k), exponential-scale,
    weibull-scale(k), laplace-scale, normal-scale, lognormal-logscale(mu),
    inverse-gamma-scale(k), pareto-shape(m), inverse-gaussian-shape(mu),
    beta-shape(beta), generalized-gamma-shape(sigma, gam), gamma-shape(sigma),
    poisson-rate.
    """
    inf = math.inf
    pos = (0.0, inf)

    def loglike_scale(a, member, to_nat, from_nat, T):
        # A(eta) = -a log eta: the whole "scale-type" block of the catalog
        return ExpFamDescriptor(
            kind=kind,
            omega=pos,
            T=T,
            logA=lambda e: -a * math.log(e),
            dA=lambda e: -a / e,
            d2A=lambda e: a / (e * e),
            to_natural=to_nat,
            from_natural=from_nat,
            member=member,
            fixed=dict(fixed),
        )

    if kind == "generalized-gamma-scale":
        gam, k = float(fixed["gam"]), float(fixed["k"])
        return loglike_scale(
            k / gam,
            lambda e: make_family("generalized-gamma", [e ** (-1.0 / gam), gam, k]),
            lambda s: s ** (-gam),
            lambda e: e ** (-1.0 / gam),
            lambda x: -np.asarray(x, dtype=float) ** gam,
        )
    if kind == "gamma-scale":
        k = float(fixed["k"])
        return loglike_scale(
            k,
            lambda e: make_family("gamma", [1.0 / e, k]),
            lambda s: 1.0 / s,
            lambda e: 1.0 / e,
            lambda x: -np.asarray(x, dtype=float),
        )
    if kind == "exponential-scale":
        return loglike_scale(
            1.0,
            lambda e: make_family("exponential", [1.0 / e]),
            lambda s: 1.0 / s,
            lambda e: 1.0 / e,
            lambda x: -np.asarray(x, dtype=float),
        )
    if kind == "weibull-scale":
        k = float(fixed["k"])
        return loglike_scale(
            1.0,
            lambda e: make_family("weibull", [e ** (-1.0 / k), k]),
            lambda s: s ** (-k),
            lambda e: e ** (-1.0 / k),
            lambda x: -np.asarray(x, dtype=float) ** k,
        )
    if kind == "laplace-scale":
        return loglike_scale(
            1.0,
            lambda e: make_family("laplace", [0.0, 1.0 / e]),
            lambda s: 1.0 / s,
            lambda e: 1.0 / e,
            lambda x: -np.abs(np.asarray(x, dtype=float)),
        )
    if kind == "normal-scale":
        # symmetric extension of generalized gamma (gam=2, k=1):
        # density exp(-(x/sigma)^2)/(sigma sqrt(pi)), i.e. N(0, sigma^2/2)
        return loglike_scale(
            0.5,
            lambda e: make_family("normal", [0.0, (2.0 * e) ** -0.5]),
            lambda s: s ** (-2.0),
            lambda e: e ** (-0.5),
            lambda x: -np.asarray(x, dtype=float) ** 2,
        )
    if kind == "lognormal-logscale":
        mu = float(fixed.get("mu", 0.0))
        fixed = {"mu": mu}
        return loglike_scale(
            0.5,
            lambda e: make_family("log-normal", [mu, e**-0.5]),
            lambda s: s ** (-2.0),
            lambda e: e ** (-0.5),
            lambda x: -0.5 * (np.log(np.asarray(x, dtype=float)) - mu) ** 2,
        )
    if kind == "inverse-gamma-scale":
        k = float(fixed["k"])
        return loglike_scale(
            k,
            lambda e: make_family("inverse-gamma", [e, k]),
            lambda s: s,
            lambda e: e,
            lambda x: -1.0 / np.asarray(x, dtype=float),
        )
    if kind == "pareto-shape":
        m = float(fixed["m"])
        logm = math.log(m)
        return ExpFamDescriptor(
            kind=kind,
            omega=pos,
            T=lambda x: -np.log(np.asarray(x, dtype=float)),
            logA=lambda e: -math.log(e) - logm * e,
            dA=lambda e: -1.0 / e - logm,
            d2A=lambda e: 1.0 / (e * e),
            to_natural=lambda k: k,
            from_natural=lambda e: e,
            member=lambda e: make_family("pareto", [m, e]),
            fixed=dict(fixed),
        )
    if kind == "inverse-gaussian-shape":
        mu = float(fixed["mu"])
        return loglike_scale(
            0.5,
            lambda e: make_family("inverse-gaussian", [mu, e]),
            lambda k: k,
            lambda e: e,
            lambda x: -((np.asarray(x, dtype=float) - mu) ** 2)
            / (2.0 * mu * mu * np.asarray(x, dtype=float)),
        )
    if kind == "beta-shape":
        b = float(fixed["beta"])
        return ExpFamDescriptor(
            kind=kind,
            omega=pos,
            T=lambda x: np.log(np.asarray(x, dtype=float)),
            logA=lambda e: specfun.log_gamma(e) - specfun.log_gamma(e + b),
            dA=lambda e: specfun.digamma(e) - specfun.digamma(e + b),
            d2A=lambda e: specfun.trigamma(e) - specfun.trigamma(e + b),
            to_natural=lambda k: k,
            from_natural=lambda e: e,
            member=lambda e: make_family("beta", [e, b]),
            fixed=dict(fixed),
        )
    if kind in ("generalized-gamma-shape", "gamma-shape"):
        sigma = float(fixed["sigma"])
        gam = float(fixed.get("gam", 1.0)) if kind == "generalized-gamma-shape" else 1.0
        logs = math.log(sigma)
        return ExpFamDescriptor(
            kind=kind,
            omega=pos,
            T=lambda x: np.log(np.asarray(x, dtype=float)),
            logA=lambda e: logs * e + specfun.log_gamma(e / gam),
            dA=lambda e: logs + specfun.digamma(e / gam) / gam,
            d2A=lambda e: specfun.trigamma(e / gam) / (gam * gam),
            to_natural=lambda k: k,
            from_natural=lambda e: e,
            member=lambda e: make_family("generalized-gamma", [sigma, gam, e]),
            fixed={"sigma": sigma, "gam": gam},
        )
    if kind == "poisson-rate":
        return ExpFamDescriptor(
            kind=kind,
            omega=(-inf, inf),
            T=lambda x: np.asarray(x, dtype=float),
            logA=math.exp,
            dA=math.exp,
            d2A=math.exp,
            to_natural=math.log,
            from_natural=math.exp,
            member=lambda e: make_family("poisson", [math.exp(e)]),
            fixed={},
        )
    raise UnknownFamily(f"unknown exponential-family kind {kind!r}")


# conventional-parameter scale/location family constructors used by the sweeps
def scale_family(kind: str, **fixed) -> ScaleFamily:
    base = {
        "normal": lambda: make_family("normal", [0.0, 1.0]),
        "exponential": lambda: make_family("exponential", [1.0]),
        "laplace": lambda: make_family("laplace", [0.0, 1.0]),
        "gamma": lambda: make_family("gamma", [1.0, fixed.get("k", 3.0)]),
        "weibull": lambda: make_family("weibull", [1.0, fixed.get("k", 2.0)]),
        "uniform": lambda: make_family("uniform", [0.0, 1.0]),
        "cauchy": lambda: make_family("cauchy", [0.0, 1.0]),
        "log-normal": lambda: make_family("log-normal", [0.0, fixed.get("s", 0.5)]),
    }
    if kind not in base:
        raise UnknownFamily(f"no scale-family base for {kind!r}")
    return ScaleFamily(base[kind]())


def location_family(kind: str, **fixed) -> LocationFamily:
    base = {
        "normal": lambda: make_family("normal", [0.0, 1.0]),
        "laplace": lambda: make_family("laplace", [0.0, 1.0]),
        "uniform": lambda: make_family("uniform", [-0.5, 0.5]),
        "exponential": lambda: make_family("exponential", [1.0]),
        "asymmetric-laplace": lambda: make_family(
            "asymmetric-laplace", [0.0, 1.0, fixed.get("p", 0.2)]
        ),
    }
    if kind not in base:
        raise UnknownFamily(f"no location-family base for {kind!r}")
    return LocationFamily(base[kind]())


# re-exported special functions (they belong to this catalog's contract)
digamma = specfun.digamma
trigamma = specfun.trigamma
log_gamma = specfun.log_gamma
