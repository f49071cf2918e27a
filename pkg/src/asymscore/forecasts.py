"""Non-parametric forecast representations.

Quantile-format forecasts become tail-extended piecewise-linear densities;
sample collections become Gaussian KDEs with exponential tails grafted beyond
the extreme samples; ensembles are weighted point clouds.  All of them plug
into the scoring and divergence machinery through the Distribution interface.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from .errors import (
    Atom,
    Crossing,
    DataError,
    DegenerateSpacing,
    MomentRequired,
    ParameterError,
    TooFewLevels,
    TooFewSamples,
    ZeroVariance,
)
from .families import AffineDistribution, Distribution

_MIN_LEVELS = 4
_MIN_SPACING = 1e-12


@dataclass(frozen=True)
class QuantileForecast:
    """A forecast given as quantile values at ascending probability levels."""

    levels: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "levels", np.asarray(self.levels, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))


def validate_quantiles(q: QuantileForecast) -> QuantileForecast:
    """Accept iff values are strictly increasing along strictly ascending levels.

    Raises Atom for equal adjacent values, Crossing for out-of-order values,
    TooFewLevels below four levels.
    """
    lv, vals = q.levels, q.values
    if lv.size != vals.size or lv.size < _MIN_LEVELS:
        raise TooFewLevels(f"need >= {_MIN_LEVELS} levels, got {lv.size}")
    if not (np.all(np.diff(lv) > 0) and lv[0] > 0 and lv[-1] < 1):
        raise ParameterError("levels must be strictly ascending within (0,1)")
    d = np.diff(vals)
    if np.any(d == 0):
        i = int(np.argmax(d == 0))
        raise Atom(lv[i], lv[i + 1])
    if np.any(d < 0):
        i = int(np.argmax(d < 0))
        raise Crossing(lv[i], lv[i + 1])
    return q


class TailExtendedDensity(Distribution):
    """Piecewise-linear density between quantile knots with exponential tails.

    The interior density is linear on each inter-knot segment; knot values
    come from the forward recursion f(q_{i+1}) = 2*dtau/dq - f(q_i), seeded
    by continuity with the lower tail, with negative values clamped to zero
    and each segment rescaled to carry exactly its level increment of mass.
    """

    kind = "tail-extended"

    def __init__(self, q: QuantileForecast):
        validate_quantiles(q)
        tau = q.levels
        knots = q.values
        dq = np.diff(knots)
        if np.any(dq < _MIN_SPACING):
            raise DegenerateSpacing("adjacent quantiles closer than 1e-12")

        self.metadata = dict(q.metadata)
        self.levels = tau
        self.knots = knots
        self.params = ()
        self.support = (-math.inf, math.inf)

        self.rate_lo = math.log(tau[1] / tau[0]) / dq[0]
        self.rate_hi = math.log((1.0 - tau[-2]) / (1.0 - tau[-1])) / dq[-1]
        self.mass_lo = tau[0]
        self.mass_hi = 1.0 - tau[-1]

        # forward recursion for knot densities, seeded by tail continuity
        m = knots.size
        f = np.empty(m)
        f[0] = self.rate_lo * tau[0]
        dtau = np.diff(tau)
        for i in range(m - 1):
            f[i + 1] = 2.0 * dtau[i] / dq[i] - f[i]
        fl = np.maximum(f[:-1], 0.0)
        fr = np.maximum(f[1:], 0.0)
        seg_mass = 0.5 * (fl + fr) * dq
        for i in range(m - 1):
            if seg_mass[i] > 0:
                s = dtau[i] / seg_mass[i]
                fl[i] *= s
                fr[i] *= s
            else:
                fl[i] = fr[i] = dtau[i] / dq[i]
        self.knot_densities = f
        self._fl, self._fr, self._dq, self._dtau = fl, fr, dq, dtau

    def pdf(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        q = self.knots
        lo_mask = x <= q[0]
        hi_mask = x >= q[-1]
        out[lo_mask] = self.mass_lo * self.rate_lo * np.exp(
            self.rate_lo * (x[lo_mask] - q[0])
        )
        out[hi_mask] = self.mass_hi * self.rate_hi * np.exp(
            -self.rate_hi * (x[hi_mask] - q[-1])
        )
        mid = ~(lo_mask | hi_mask)
        if np.any(mid):
            i = np.searchsorted(q, x[mid], side="right") - 1
            t = (x[mid] - q[i]) / self._dq[i]
            out[mid] = self._fl[i] + (self._fr[i] - self._fl[i]) * t
        return out if out.size > 1 else float(out[0])

    def cdf(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        q, tau = self.knots, self.levels
        lo_mask = x <= q[0]
        hi_mask = x >= q[-1]
        out[lo_mask] = self.mass_lo * np.exp(self.rate_lo * (x[lo_mask] - q[0]))
        out[hi_mask] = 1.0 - self.mass_hi * np.exp(
            -self.rate_hi * (x[hi_mask] - q[-1])
        )
        mid = ~(lo_mask | hi_mask)
        if np.any(mid):
            i = np.searchsorted(q, x[mid], side="right") - 1
            t = (x[mid] - q[i]) / self._dq[i]
            out[mid] = tau[i] + self._dq[i] * (
                self._fl[i] * t + 0.5 * (self._fr[i] - self._fl[i]) * t * t
            )
        return out if out.size > 1 else float(out[0])

    def ppf(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        out = np.empty_like(p)
        q, tau = self.knots, self.levels
        lo_mask = p <= tau[0]
        hi_mask = p >= tau[-1]
        with np.errstate(divide="ignore"):
            out[lo_mask] = q[0] + np.log(p[lo_mask] / tau[0]) / self.rate_lo
            out[hi_mask] = (
                q[-1]
                - np.log(np.maximum(1.0 - p[hi_mask], 1e-300) / self.mass_hi)
                / self.rate_hi
            )
        mid = ~(lo_mask | hi_mask)
        if np.any(mid):
            i = np.searchsorted(tau, p[mid], side="right") - 1
            c = (p[mid] - tau[i]) / self._dq[i]
            a = 0.5 * (self._fr[i] - self._fl[i])
            b = self._fl[i]
            t = np.where(
                np.abs(a) > 1e-14 * np.maximum(b, 1.0),
                (-b + np.sqrt(np.maximum(b * b + 4.0 * a * c, 0.0))) / (2.0 * a),
                np.divide(c, b, out=np.zeros_like(c), where=b > 0),
            )
            out[mid] = q[i] + self._dq[i] * np.clip(t, 0.0, 1.0)
        return out if out.size > 1 else float(out[0])

    def mean(self) -> float:
        return self._moments()[0]

    def var(self) -> float:
        m1, m2 = self._moments()
        return m2 - m1 * m1

    def _moments(self):
        q = self.knots
        rl, rh = self.rate_lo, self.rate_hi
        m1 = self.mass_lo * (q[0] - 1.0 / rl) + self.mass_hi * (q[-1] + 1.0 / rh)
        m2 = self.mass_lo * (q[0] ** 2 - 2.0 * q[0] / rl + 2.0 / rl**2)
        m2 += self.mass_hi * (q[-1] ** 2 + 2.0 * q[-1] / rh + 2.0 / rh**2)
        fl, fr, dq = self._fl, self._fr, self._dq
        mass = self._dtau
        lin1 = fl * dq**2 / 2.0 + (fr - fl) * dq**2 / 3.0
        lin2 = fl * dq**3 / 3.0 + (fr - fl) * dq**3 / 4.0
        m1 += float(np.sum(q[:-1] * mass + lin1))
        m2 += float(np.sum(q[:-1] ** 2 * mass + 2.0 * q[:-1] * lin1 + lin2))
        return m1, m2

    def total_mass(self) -> float:
        return float(self.mass_lo + np.sum(self._dtau) + self.mass_hi)


def quantile_to_distribution(q: QuantileForecast) -> TailExtendedDensity:
    """Convert a validated quantile forecast to its tail-extended density."""
    return TailExtendedDensity(q)


@dataclass(frozen=True)
class Ensemble:
    """Finite weighted ensemble of d-dimensional members."""

    members: np.ndarray  # shape (n, d) or (n,)
    weights: np.ndarray | None = None

    def __post_init__(self):
        m = np.asarray(self.members, dtype=float)
        if m.ndim == 1:
            m = m[:, None]
        object.__setattr__(self, "members", m)
        n = m.shape[0]
        if self.weights is None:
            w = np.full(n, 1.0 / n)
        else:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (n,) or np.any(w < 0):
                raise ParameterError("weights must be nonnegative, one per member")
            w = w / w.sum()
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.members.shape[1]

    def mean(self) -> np.ndarray:
        return self.weights @ self.members

    def var(self) -> float:
        # population variance (forecasts are distributions, not data)
        if self.dim != 1:
            raise ParameterError("scalar variance needs d=1")
        x = self.members[:, 0]
        mu = float(self.weights @ x)
        return float(self.weights @ (x - mu) ** 2)


class KdeDensity(Distribution):
    """Gaussian-kernel density with exponential tails beyond the extreme samples.

    Tail rates are set so the tail density is continuous at the graft point
    and each tail carries exactly the kernel-mixture mass beyond it, keeping
    the total mass at one.
    """

    kind = "kde"

    def __init__(self, samples, bandwidth: float):
        s = np.sort(np.asarray(samples, dtype=float))
        if bandwidth <= 0:
            raise ParameterError("bandwidth must be positive")
        self.samples = s
        self.bandwidth = float(bandwidth)
        self.params = (self.bandwidth,)
        self.support = (-math.inf, math.inf)
        self.x_lo, self.x_hi = float(s[0]), float(s[-1])
        self.mass_lo = float(self._mix_cdf(self.x_lo))
        self.mass_hi = float(1.0 - self._mix_cdf(self.x_hi))
        self.rate_lo = float(self._mix_pdf(self.x_lo)) / self.mass_lo
        self.rate_hi = float(self._mix_pdf(self.x_hi)) / self.mass_hi

    def _mix_pdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x[..., None] - self.samples) / self.bandwidth
        return np.exp(-0.5 * z * z).mean(axis=-1) / (
            self.bandwidth * math.sqrt(2.0 * math.pi)
        )

    def _mix_cdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x[..., None] - self.samples) / self.bandwidth
        return stats.norm.cdf(z).mean(axis=-1)

    def pdf(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        lo = x < self.x_lo
        hi = x > self.x_hi
        out[lo] = (
            self.mass_lo * self.rate_lo * np.exp(self.rate_lo * (x[lo] - self.x_lo))
        )
        out[hi] = (
            self.mass_hi * self.rate_hi * np.exp(-self.rate_hi * (x[hi] - self.x_hi))
        )
        mid = ~(lo | hi)
        if np.any(mid):
            out[mid] = self._mix_pdf(x[mid])
        return out if out.size > 1 else float(out[0])

    def logpdf(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        lo = x < self.x_lo
        hi = x > self.x_hi
        out[lo] = (
            math.log(self.mass_lo * self.rate_lo)
            + self.rate_lo * (x[lo] - self.x_lo)
        )
        out[hi] = (
            math.log(self.mass_hi * self.rate_hi)
            - self.rate_hi * (x[hi] - self.x_hi)
        )
        mid = ~(lo | hi)
        if np.any(mid):
            z = (x[mid][..., None] - self.samples) / self.bandwidth
            lse = logsumexp(-0.5 * z * z, axis=-1)
            out[mid] = lse - math.log(
                self.samples.size * self.bandwidth * math.sqrt(2.0 * math.pi)
            )
        return out if out.size > 1 else float(out[0])

    def cdf(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        lo = x < self.x_lo
        hi = x > self.x_hi
        out[lo] = self.mass_lo * np.exp(self.rate_lo * (x[lo] - self.x_lo))
        out[hi] = 1.0 - self.mass_hi * np.exp(-self.rate_hi * (x[hi] - self.x_hi))
        mid = ~(lo | hi)
        if np.any(mid):
            out[mid] = self._mix_cdf(x[mid])
        return out if out.size > 1 else float(out[0])

    def ppf(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        out = np.empty_like(p)
        lo = p < self.mass_lo
        hi = p > 1.0 - self.mass_hi
        out[lo] = self.x_lo + np.log(np.maximum(p[lo], 1e-300) / self.mass_lo) / self.rate_lo
        out[hi] = self.x_hi - np.log(
            np.maximum(1.0 - p[hi], 1e-300) / self.mass_hi
        ) / self.rate_hi
        mid = ~(lo | hi)
        if np.any(mid):
            out[mid] = self._bisect(p[mid])
        return out if out.size > 1 else float(out[0])

    def _bisect(self, p):
        a = np.full_like(p, self.x_lo)
        b = np.full_like(p, self.x_hi)
        for _ in range(80):
            m = 0.5 * (a + b)
            below = self._mix_cdf(m) < p
            a = np.where(below, m, a)
            b = np.where(below, b, m)
        return 0.5 * (a + b)

    def mean(self) -> float:
        return self._moments()[0]

    def var(self) -> float:
        m1, m2 = self._moments()
        return m2 - m1 * m1

    def _moments(self):
        # truncated-normal moments of each kernel on [x_lo, x_hi], plus
        # closed-form exponential tail moments
        s, h = self.samples, self.bandwidth
        a = (self.x_lo - s) / h
        b = (self.x_hi - s) / h
        Phi = stats.norm.cdf
        phi = stats.norm.pdf
        dP = Phi(b) - Phi(a)
        ez = phi(a) - phi(b)
        ez2 = dP + a * phi(a) - b * phi(b)
        m1_in = float(np.mean(s * dP + h * ez))
        m2_in = float(np.mean(s * s * dP + 2.0 * s * h * ez + h * h * ez2))
        rl, rh = self.rate_lo, self.rate_hi
        m1 = self.mass_lo * (self.x_lo - 1.0 / rl) + self.mass_hi * (
            self.x_hi + 1.0 / rh
        )
        m2 = self.mass_lo * (self.x_lo**2 - 2.0 * self.x_lo / rl + 2.0 / rl**2)
        m2 += self.mass_hi * (self.x_hi**2 + 2.0 * self.x_hi / rh + 2.0 / rh**2)
        return m1 + m1_in, m2 + m2_in


def kde_fit(samples) -> KdeDensity:
    """Gaussian KDE with Scott's rule bandwidth sd * n^(-1/5)."""
    s = np.asarray(samples, dtype=float)
    if s.size < 10:
        raise TooFewSamples(f"need >= 10 samples, got {s.size}")
    sd = float(np.std(s))
    if sd == 0.0:
        raise ZeroVariance("samples have zero variance")
    return KdeDensity(s, sd * s.size ** (-0.2))


def affine_to(obj, target_mean: float, target_sd: float):
    """Recenter/rescale a distribution or ensemble to given mean and sd.

    Uses the population standard deviation throughout.  Exact for every
    representation: distributions get an affine wrapper, ensembles have
    their members transformed in place.
    """
    if target_sd <= 0:
        raise ParameterError("target_sd must be positive")
    if isinstance(obj, Ensemble):
        x = obj.members
        mu = obj.weights @ x
        var = obj.weights @ (x - mu) ** 2
        sd = np.sqrt(var)
        if np.any(sd == 0):
            raise ZeroVariance("degenerate ensemble")
        return Ensemble(target_mean + target_sd * (x - mu) / sd, obj.weights)
    mu, var = obj.mean(), obj.var()
    if not (math.isfinite(mu) and math.isfinite(var)) or var <= 0:
        raise MomentRequired("affine_to needs finite mean and positive variance")
    scale = target_sd / math.sqrt(var)
    return AffineDistribution(obj, target_mean - scale * mu, scale)


# ---------------------------------------------------------------------------
# CSV ingestion (forecast rows: forecaster,location,date,horizon,level,value)

FORECAST_COLUMNS = ["forecaster", "location", "date", "horizon", "level", "value"]
TARGET_COLUMNS = ["location", "date", "horizon", "observed"]


def load_forecasts(path):
    """Read a forecast CSV into QuantileForecast records.

    Returns (forecasts, rejects); rejects are (metadata, reason_code) pairs
    for records failing validation, suitable for a sidecar CSV.
    """
    groups: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(FORECAST_COLUMNS) - set(reader.fieldnames):
            raise DataError(f"forecast CSV must have columns {FORECAST_COLUMNS}")
        for row in reader:
            key = (row["forecaster"], row["location"], row["date"], row["horizon"])
            try:
                lv, val = float(row["level"]), float(row["value"])
            except ValueError as exc:
                raise DataError(f"bad numeric field in row {row}") from exc
            groups.setdefault(key, []).append((lv, val))
    forecasts, rejects = [], []
    for key in sorted(groups):
        rows = sorted(groups[key])
        meta = dict(zip(("forecaster", "location", "date", "horizon"), key))
        q = QuantileForecast(
            np.array([r[0] for r in rows]), np.array([r[1] for r in rows]), meta
        )
        try:
            forecasts.append(validate_quantiles(q))
        except (Atom, Crossing, TooFewLevels, ParameterError) as exc:
            rejects.append((meta, type(exc).__name__))
    return forecasts, rejects


def load_targets(path):
    """Read a target CSV into a {(location, date, horizon): observed} map."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(TARGET_COLUMNS) - set(reader.fieldnames):
            raise DataError(f"target CSV must have columns {TARGET_COLUMNS}")
        for row in reader:
            try:
                out[(row["location"], row["date"], row["horizon"])] = float(
                    row["observed"]
                )
            except ValueError as exc:
                raise DataError(f"bad observed value in row {row}") from exc
    return out


def write_rejects_sidecar(path, rejects):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["forecaster", "location", "date", "horizon", "reason"])
        for meta, reason in rejects:
            w.writerow(
                [meta["forecaster"], meta["location"], meta["date"], meta["horizon"], reason]
            )
