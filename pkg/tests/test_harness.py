"""Tests for the experiment harness: heatmaps, standardized rankings,
dispersion flips, rolling standardization, and the asymmetric-Laplace grid."""

import math

import numpy as np
import pytest

from asymscore.errors import EmptyPairs, ParameterError, SeriesTooShort
from asymscore.families import make_family
from asymscore.harness import (
    DispersionRecord,
    ScoredRecord,
    asymmetric_laplace_grid,
    dispersion_flip,
    heatmap,
    standardize_targets,
    standardized_ranking,
    write_dispersion_csv,
    write_heatmap_csv,
    write_ranking_csv,
)
from asymscore.scoring import LossSpec


class TestHeatmap:
    def test_argmin_recovers_truth(self):
        rng = np.random.default_rng(5)
        F = make_family("normal", [0.0, 1.0])
        pairs = [(F, y) for y in rng.standard_normal(6000)]
        mu_axis = np.linspace(-1, 1, 11)
        sigma_axis = np.linspace(0.5, 2, 13)
        g = heatmap(LossSpec.crps(), pairs, mu_axis, sigma_axis)
        assert abs(g.argmin_mu) <= mu_axis[1] - mu_axis[0] + 1e-12
        assert abs(g.argmin_sigma - 1.0) <= sigma_axis[1] - sigma_axis[0] + 1e-12
        assert g.cells.shape == (len(mu_axis), len(sigma_axis))

    def test_log_loss_infinite_cells_tolerated(self):
        # a bounded-support forecast misses the outcome at small scales,
        # producing +inf cells; the argmin must resolve among finite ones
        F = make_family("uniform", [-1.0, 1.0])
        pairs = [(F, y) for y in (-0.5, 0.0, 3.0)]
        g = heatmap(
            LossSpec.log(), pairs, np.array([0.0]), np.array([0.5, 2.0, 4.0])
        )
        # sd 0.5 means support half-width sqrt(3)/2 < 3.0, so the cell is +inf
        assert g.cells[0, 0] == math.inf
        assert np.isfinite(g.cells[0, 1]) and np.isfinite(g.cells[0, 2])
        assert g.argmin_sigma == 2.0

    def test_empty_pairs_rejected(self):
        with pytest.raises(EmptyPairs):
            heatmap(LossSpec.crps(), [], np.array([0.0]), np.array([1.0]))

    def test_csv_writer(self, tmp_path):
        F = make_family("normal", [0.0, 1.0])
        g = heatmap(
            LossSpec.crps(),
            [(F, 0.1), (F, -0.2)],
            np.array([0.0, 0.5]),
            np.array([1.0, 2.0]),
        )
        path = tmp_path / "heatmap.csv"
        write_heatmap_csv(g, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "mu,sigma,loss"
        assert len(lines) == 5


class TestRanking:
    def _records(self, losses, variances, group=("l", "d", "h")):
        loc, date, hor = group
        return [
            ScoredRecord(f"f{i}", loc, date, hor, "crps", lv, vv)
            for i, (lv, vv) in enumerate(zip(losses, variances))
        ]

    def test_single_panel_ranks(self):
        t = standardized_ranking(self._records([1.0, 2.0, 3.0], [1.0, 2.0, 0.5]))
        assert sorted(t.rows.values()) == pytest.approx([1 / 3, 2 / 3, 1.0])

    def test_panel_mean_identity(self):
        # mean standardized rank within a full panel is (n + 1) / (2n)
        n = 7
        t = standardized_ranking(
            self._records(list(range(1, n + 1)), [1.0] * n)
        )
        assert sum(t.rows.values()) / n == pytest.approx((n + 1) / (2 * n))

    def test_invariant_to_monotone_transform(self):
        losses = [0.3, 1.9, 0.7, 1.1]
        a = standardized_ranking(self._records(losses, [1.0] * 4))
        b = standardized_ranking(
            self._records([math.exp(3 * x) for x in losses], [1.0] * 4)
        )
        assert a.rows == b.rows

    def test_variance_ranking(self):
        t = standardized_ranking(
            self._records([1.0, 2.0], [3.0, 1.0]), by="variance"
        )
        ranks = {k.split("|")[0] if "|" in k else k: v for k, v in t.rows.items()}
        assert t.by == "variance"
        # the higher-variance forecaster gets the larger rank
        vals = list(t.rows.values())
        assert max(vals) == 1.0 and min(vals) == 0.5

    def test_singleton_groups_skipped(self):
        recs = self._records([1.0, 2.0], [1.0, 1.0]) + [
            ScoredRecord("solo", "elsewhere", "d", "h", "crps", 9.0, 1.0)
        ]
        t = standardized_ranking(recs)
        assert t.groups_used == 1
        assert t.groups_skipped == 1
        assert all("solo" not in k for k in t.rows)

    def test_ties_get_average_rank(self):
        t = standardized_ranking(self._records([1.0, 1.0], [1.0, 1.0]))
        assert list(t.rows.values()) == pytest.approx([0.75, 0.75])

    def test_nan_loss_rejected(self):
        with pytest.raises(ParameterError):
            ScoredRecord("f", "l", "d", "h", "crps", float("nan"), 1.0)

    def test_csv_writer(self, tmp_path):
        recs = self._records([1.0, 2.0, 3.0], [1.0, 2.0, 0.5])
        lt = standardized_ranking(recs, by="loss")
        vt = standardized_ranking(recs, by="variance")
        path = tmp_path / "rank.csv"
        write_ranking_csv(lt, vt, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == (
            "forecaster,loss_tag,mean_std_rank,mean_std_variance_rank"
        )
        assert len(lines) == 4


class TestDispersionFlip:
    def test_overdispersed_prefers_flip(self):
        rng = np.random.default_rng(9)
        G = rng.normal(0, 1, 400)
        rec = dispersion_flip(rng.normal(0, 2, 400), G, "cramer", unit="u1")
        assert rec.a > 1.0
        assert rec.d_flipped < rec.d_original
        assert rec.unit == "u1" and rec.divergence == "cramer"

    def test_underdispersed_prefers_flip_kl(self):
        rng = np.random.default_rng(13)
        G = rng.normal(0, 1, 400)
        rec = dispersion_flip(rng.normal(0, 0.5, 400), G, "kl")
        assert rec.a < 1.0
        assert rec.d_flipped < rec.d_original
        assert np.isfinite(rec.d_original) and np.isfinite(rec.d_flipped)

    def test_csv_writer(self, tmp_path):
        recs = [DispersionRecord("u", 1.5, 0.2, 0.1, "cramer")]
        path = tmp_path / "disp.csv"
        write_dispersion_csv(recs, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "unit,a,d_original,d_flipped,divergence"
        assert len(lines) == 2


class TestStandardize:
    def test_trend_series_standardized(self):
        rng = np.random.default_rng(3)
        y = np.arange(300.0) * 0.5 + rng.standard_normal(300)
        s = standardize_targets(y, 21)
        assert 0.7 < float(np.var(s.values)) < 1.3
        assert abs(float(np.mean(s.values))) < 0.2

    def test_roundtrip_exact(self):
        rng = np.random.default_rng(4)
        y = rng.normal(5.0, 3.0, 120)
        s = standardize_targets(y, 15)
        assert np.max(np.abs(s.inverse(s.values) - y)) < 1e-12

    def test_constant_series_does_not_blow_up(self):
        y = np.full(60, 4.2)
        s = standardize_targets(y, 11)
        assert np.all(np.isfinite(s.values))
        assert np.max(np.abs(s.inverse(s.values) - y)) < 1e-9

    def test_short_series_rejected(self):
        with pytest.raises(SeriesTooShort):
            standardize_targets(np.arange(5.0), 11)


class TestAsymmetricLaplaceGrid:
    def test_symmetric_case_spherical_symmetry(self):
        grids = asymmetric_laplace_grid(
            0.5, [LossSpec.spherical()], [0.0], [0.5, 1.0, 2.0]
        )
        cells = grids["spherical"].cells
        assert cells[0, 0] == pytest.approx(cells[0, 2], abs=1e-6)

    def test_log_loss_minimized_at_truth(self):
        grids = asymmetric_laplace_grid(
            0.5, [LossSpec.log()], [-0.5, 0.0, 0.5], [0.5, 1.0, 2.0]
        )
        g = grids["log"]
        assert g.argmin_mu == 0.0 and g.argmin_sigma == 1.0

    def test_skewed_target_breaks_scale_symmetry(self):
        grids = asymmetric_laplace_grid(
            0.2, [LossSpec.crps()], [0.0], [0.5, 1.0, 2.0]
        )
        cells = grids["crps"].cells
        assert abs(cells[0, 0] - cells[0, 2]) > 1e-3

    def test_multiple_specs_keyed_by_label(self):
        grids = asymmetric_laplace_grid(
            0.5, [LossSpec.log(), LossSpec.crps()], [0.0], [1.0]
        )
        assert set(grids) == {"log", "crps"}
