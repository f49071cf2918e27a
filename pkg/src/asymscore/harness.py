"""Desk-scale experiment pipelines.

Builds (mu, sigma) expected-loss heatmaps over standardized targets,
standardized forecaster rankings with a variance annotation, the
dispersion-flip comparison on raw sample sets, rolling target
standardization, and synthetic asymmetric-Laplace loss grids.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import rankdata

from .divergence import divergence, expected_loss
from .errors import EmptyPairs, ParameterError, SeriesTooShort
from .families import AsymmetricLaplace
from .forecasts import affine_to, kde_fit
from .scoring import LossSpec, score_vector


@dataclass(frozen=True)
class HeatmapGrid:
    """Loss averages on the (mu, sigma) grid; argmin skips non-finite cells."""

    mu_axis: np.ndarray
    sigma_axis: np.ndarray
    cells: np.ndarray  # shape (len(mu_axis), len(sigma_axis))
    argmin: tuple

    @property
    def argmin_mu(self) -> float:
        return float(self.mu_axis[self.argmin[0]])

    @property
    def argmin_sigma(self) -> float:
        return float(self.sigma_axis[self.argmin[1]])


def _finish_grid(mu_axis, sigma_axis, cells) -> HeatmapGrid:
    masked = np.where(np.isfinite(cells), cells, math.inf)
    if not np.any(np.isfinite(masked)):
        raise ParameterError("no finite heatmap cell")
    idx = np.unravel_index(np.argmin(masked), cells.shape)
    return HeatmapGrid(np.asarray(mu_axis, dtype=float),
                       np.asarray(sigma_axis, dtype=float), cells, tuple(idx))


def heatmap(spec: LossSpec, pairs, mu_axis, sigma_axis) -> HeatmapGrid:
    """cell(mu, sigma) = mean over pairs of score(spec, affine_to(F, mu, sigma), y).

    Pairs sharing the same forecast object are scored together, so the grid
    over a single climatological forecast is fully vectorized."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyPairs("heatmap needs at least one (forecast, outcome) pair")
    mu_axis = np.asarray(mu_axis, dtype=float)
    sigma_axis = np.asarray(sigma_axis, dtype=float)
    by_forecast: dict = {}
    for F, y in pairs:
        by_forecast.setdefault(id(F), (F, []))[1].append(float(y))
    n = len(pairs)
    cells = np.zeros((mu_axis.size, sigma_axis.size))
    for F, ys in by_forecast.values():
        ys = np.asarray(ys, dtype=float)
        for i, mu in enumerate(mu_axis):
            for j, sg in enumerate(sigma_axis):
                vals = score_vector(spec, affine_to(F, mu, sg), ys)
                cells[i, j] += vals.sum() if np.all(np.isfinite(vals)) else math.inf
    cells /= n
    return _finish_grid(mu_axis, sigma_axis, cells)


@dataclass(frozen=True)
class ScoredRecord:
    forecaster: str
    location: str
    date: str
    horizon: str
    loss_tag: str
    loss_value: float
    forecast_variance: float

    def __post_init__(self):
        if math.isnan(self.loss_value):
            raise ParameterError("loss_value is NaN")


@dataclass(frozen=True)
class RankingTable:
    """Per (forecaster, loss tag) mean standardized rank in (0, 1]."""

    by: str  # 'loss' or 'variance'
    rows: dict  # (forecaster, loss_tag) -> mean standardized rank
    groups_used: int
    groups_skipped: int


def standardized_ranking(records, by: str = "loss") -> RankingTable:
    """Fractional-average ranks within each (loss, location, date, horizon)
    task group, divided by group size, then averaged per forecaster.

    Singleton groups carry no comparison and are skipped (counted)."""
    if by not in ("loss", "variance"):
        raise ParameterError(f"unknown ranking criterion {by!r}")
    groups: dict = {}
    for r in records:
        key = (r.loss_tag, r.location, r.date, r.horizon)
        groups.setdefault(key, []).append(r)
    sums: dict = {}
    counts: dict = {}
    used = skipped = 0
    for key in sorted(groups):
        grp = groups[key]
        if len(grp) < 2:
            skipped += 1
            continue
        used += 1
        vals = np.array(
            [r.loss_value if by == "loss" else r.forecast_variance for r in grp]
        )
        ranks = rankdata(vals, method="average") / len(grp)
        for r, rk in zip(grp, ranks):
            k = (r.forecaster, r.loss_tag)
            sums[k] = sums.get(k, 0.0) + float(rk)
            counts[k] = counts.get(k, 0) + 1
    rows = {k: sums[k] / counts[k] for k in sums}
    return RankingTable(by, rows, used, skipped)


@dataclass(frozen=True)
class DispersionRecord:
    unit: str
    a: float
    d_original: float
    d_flipped: float
    divergence: str


def dispersion_flip(F_samples, G_samples, div_spec: str = "cramer",
                    unit: str = "") -> DispersionRecord:
    """Mean-match a KDE of the forecast samples to the target samples, then
    compare its divergence with the dispersion-inverted counterpart.

    With a = sd(F)/sd(G), the original forecast has sd a*sd(G) about the
    common mean and the flipped one sd(G)/a."""
    if div_spec not in ("kl", "cramer"):
        raise ParameterError(f"unknown divergence {div_spec!r}")
    spec = LossSpec.log() if div_spec == "kl" else LossSpec.crps()
    F = kde_fit(np.asarray(F_samples, dtype=float))
    G = kde_fit(np.asarray(G_samples, dtype=float))
    mg, sg = G.mean(), G.sd()
    a = F.sd() / sg
    original = affine_to(F, mg, a * sg)  # mean-matched, dispersion kept
    flipped = affine_to(F, mg, sg / a)
    d_orig = float(divergence(spec, original, G))
    d_flip = float(divergence(spec, flipped, G))
    return DispersionRecord(unit, float(a), d_orig, d_flip, div_spec)


@dataclass(frozen=True)
class StandardizedSeries:
    values: np.ndarray  # standardized outcomes
    means: np.ndarray
    sds: np.ndarray
    inverse: Callable = field(compare=False)


def standardize_targets(series, window: int) -> StandardizedSeries:
    """Standardize by a centered rolling mean/sd with reflected edges.

    The rolling sd is floored at 1e-6 of the global sd so constant
    stretches standardize to zero instead of dividing by zero."""
    y = np.asarray(series, dtype=float)
    if window < 4:
        raise ParameterError("window must be at least 4")
    if y.size < window:
        raise SeriesTooShort(f"series length {y.size} < window {window}")
    half = window // 2
    kernel = np.ones(window) / window

    def rolling_mean(v):
        return np.convolve(np.pad(v, half, mode="reflect"), kernel,
                           mode="valid")[: y.size]

    means = rolling_mean(y)
    # dispersion of the locally-detrended residuals, not of the raw series,
    # so a smooth trend does not inflate the rolling sd
    resid = y - means
    var = np.maximum(rolling_mean(resid**2), 0.0)
    gsd = float(np.std(y))
    floor = 1e-6 * gsd if gsd > 0 else 1e-6
    sds = np.maximum(np.sqrt(var), floor)
    values = (y - means) / sds

    def inverse(z, t=None):
        z = np.asarray(z, dtype=float)
        if t is None:
            return means + sds * z
        return means[t] + sds[t] * z

    return StandardizedSeries(values, means, sds, inverse)


def _unit_asymmetric_laplace(p: float):
    base = AsymmetricLaplace(0.0, 1.0, p)
    return affine_to(base, 0.0, 1.0)


def asymmetric_laplace_grid(p: float, specs, mu_axis, sigma_axis) -> dict:
    """Expected-loss grids against a zero-mean unit-variance asymmetric
    Laplace target, with forecasts from the same family moved to each
    (mu, sigma).  Returns {spec label: HeatmapGrid}."""
    if not 0.0 < p < 1.0:
        raise ParameterError("skew p must lie in (0,1)")
    mu_axis = np.asarray(mu_axis, dtype=float)
    sigma_axis = np.asarray(sigma_axis, dtype=float)
    G = _unit_asymmetric_laplace(p)
    base = AsymmetricLaplace(0.0, 1.0, p)
    out = {}
    for spec in specs:
        cells = np.empty((mu_axis.size, sigma_axis.size))
        for i, mu in enumerate(mu_axis):
            for j, sg in enumerate(sigma_axis):
                F = affine_to(base, mu, sg)
                try:
                    cells[i, j] = expected_loss(spec, F, G)
                except OverflowError:
                    cells[i, j] = math.inf
        out[spec.label()] = _finish_grid(mu_axis, sigma_axis, cells)
    return out


# ---------------------------------------------------------------------------
# CSV artifacts

def write_heatmap_csv(grid: HeatmapGrid, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mu", "sigma", "loss"])
        for i, mu in enumerate(grid.mu_axis):
            for j, sg in enumerate(grid.sigma_axis):
                w.writerow([f"{mu:.12g}", f"{sg:.12g}", f"{grid.cells[i, j]:.12g}"])


def write_ranking_csv(loss_table: RankingTable, var_table: RankingTable, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["forecaster", "loss_tag", "mean_std_rank", "mean_std_variance_rank"])
        for key in sorted(loss_table.rows):
            forecaster, tag = key
            vr = var_table.rows.get(key, float("nan"))
            w.writerow([forecaster, tag, f"{loss_table.rows[key]:.12g}", f"{vr:.12g}"])


def write_dispersion_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["unit", "a", "d_original", "d_flipped", "divergence"])
        for r in records:
            w.writerow([r.unit, f"{r.a:.12g}", f"{r.d_original:.12g}",
                        f"{r.d_flipped:.12g}", r.divergence])
