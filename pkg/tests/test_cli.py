"""End-to-end CLI tests: every subcommand, exit codes, config overrides,
JSON mirrors, and reproducibility."""

import json

import numpy as np
import pytest

from asymscore.cli import main


def run_cli(args, capsys):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestScore:
    def test_basic(self, capsys):
        code, out, _ = run_cli(
            ["score", "--loss", "log", "--dist", "normal:0,1", "--y", "0"], capsys
        )
        assert code == 0
        assert "0.9189385332" in out

    def test_json_mirror(self, capsys):
        code, out, _ = run_cli(
            ["score", "--json", "--loss", "crps", "--dist", "normal:0,1",
             "--y", "0.7"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["score"] == pytest.approx(0.42156917007346395, abs=1e-9)

    def test_unknown_loss_usage_error(self, capsys):
        code, _, _ = run_cli(
            ["score", "--loss", "bogus", "--dist", "normal:0,1", "--y", "0"], capsys
        )
        assert code == 2

    def test_unknown_family_usage_error(self, capsys):
        code, _, _ = run_cli(
            ["score", "--loss", "log", "--dist", "nope:1", "--y", "0"], capsys
        )
        assert code == 2


class TestDiverge:
    def test_exponential_pair(self, capsys):
        code, out, _ = run_cli(
            ["diverge", "--json", "--loss", "crps", "--dist-f",
             "exponential:2", "--dist-g", "exponential:1"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["divergence"] == pytest.approx(1.0 / 6.0, abs=1e-8)


class TestAsymmetry:
    def test_single_scale_verdict(self, capsys, tmp_path):
        out_dir = tmp_path / "single"
        code, out, _ = run_cli(
            ["asymmetry", "--loss", "crps", "--family", "exponential",
             "--sigma", "2", "--out", str(out_dir)],
            capsys,
        )
        assert code == 0
        assert "over_penalized" in (out_dir / "verdicts.csv").read_text()

    def test_sweep_writes_outputs(self, capsys, tmp_path):
        out_dir = tmp_path / "sweep"
        code, _, _ = run_cli(
            ["asymmetry", "--sweep", "location", "--out", str(out_dir)], capsys
        )
        assert code == 0
        assert (out_dir / "verdicts.csv").exists()
        assert (out_dir / "verdicts.png").exists()
        header = (out_dir / "verdicts.csv").read_text().splitlines()[0]
        assert header == "loss,family,mode,param,lhs,rhs,verdict,margin"


class TestHedge:
    def test_scale_path(self, capsys, tmp_path):
        out_dir = tmp_path / "hedge"
        code, out, _ = run_cli(
            ["hedge", "--loss", "crps", "--family", "exponential",
             "--shift", "two-point:2", "--out", str(out_dir), "--json"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["direction"] == "inflate"
        assert payload["optimum"] > 1.0
        assert (out_dir / "hedge.csv").exists()
        assert (out_dir / "hedge.png").exists()

    def test_expfam_path(self, capsys, tmp_path):
        out_dir = tmp_path / "hedge2"
        code, out, _ = run_cli(
            ["hedge", "--expfam", "exponential-scale", "--shift",
             "two-point:2", "--out", str(out_dir), "--json"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["optimum"] == pytest.approx(0.8, abs=1e-9)


class TestHeatmap:
    def test_small_grid(self, capsys, tmp_path):
        out_dir = tmp_path / "hm"
        code, _, _ = run_cli(
            ["heatmap", "--loss", "crps", "--target", "normal:0,1",
             "--n", "2000", "--mu-grid=-1:1:9", "--sigma-grid", "0.5:2:9",
             "--out", str(out_dir)],
            capsys,
        )
        assert code == 0
        assert (out_dir / "heatmap.csv").exists()
        assert (out_dir / "heatmap.png").exists()

    def test_same_seed_identical_csv(self, capsys, tmp_path):
        csvs = []
        for name in ("a", "b"):
            out_dir = tmp_path / name
            code, _, _ = run_cli(
                ["heatmap", "--loss", "crps", "--n", "500",
                 "--mu-grid=-1:1:5", "--sigma-grid", "0.5:2:5",
                 "--out", str(out_dir)],
                capsys,
            )
            assert code == 0
            csvs.append((out_dir / "heatmap.csv").read_bytes())
        assert csvs[0] == csvs[1]

    def test_config_file_overridden_by_flag(self, capsys, tmp_path):
        cfg = tmp_path / "cfg"
        cfg.write_text("n=500\nmu-grid=-1:1:3\nsigma-grid=0.5:2:3\n")
        out_dir = tmp_path / "hm"
        code, _, _ = run_cli(
            ["heatmap", "--config", str(cfg), "--sigma-grid", "0.5:2:4",
             "--out", str(out_dir)],
            capsys,
        )
        assert code == 0
        lines = (out_dir / "heatmap.csv").read_text().strip().splitlines()
        # 3 mu values (config) x 4 sigma values (flag wins) + header
        assert len(lines) == 13


def _write_rank_fixture(tmp_path):
    levels = [0.1, 0.25, 0.5, 0.75, 0.9]
    values = {
        "sharp": [-1.28, -0.67, 0.0, 0.67, 1.28],
        "wide": [-2.56, -1.35, 0.0, 1.35, 2.56],
        "bad": [1.0, 0.5, 0.0, -0.5, -1.0],  # crossing -> rejected
    }
    frows = []
    for fc, vs in values.items():
        for date in ("d1", "d2"):
            for lv, v in zip(levels, vs):
                frows.append(f"{fc},us,{date},1,{lv},{v}")
    fpath = tmp_path / "forecasts.csv"
    fpath.write_text(
        "forecaster,location,date,horizon,level,value\n" + "\n".join(frows) + "\n"
    )
    tpath = tmp_path / "targets.csv"
    tpath.write_text(
        "location,date,horizon,observed\nus,d1,1,0.3\nus,d2,1,-0.6\n"
    )
    return fpath, tpath


class TestRank:
    def test_rank_with_rejects_sidecar(self, capsys, tmp_path):
        fpath, tpath = _write_rank_fixture(tmp_path)
        out_dir = tmp_path / "rank"
        code, _, _ = run_cli(
            ["rank", "--forecasts", str(fpath), "--targets", str(tpath),
             "--loss", "crps", "--out", str(out_dir)],
            capsys,
        )
        assert code == 0
        lines = (out_dir / "ranking.csv").read_text().strip().splitlines()
        assert len(lines) == 3  # header + 2 surviving forecasters
        rejects = (out_dir / "rejects.csv").read_text()
        assert "bad" in rejects and "Crossing" in rejects

    def test_missing_file_data_error(self, capsys, tmp_path):
        code, _, _ = run_cli(
            ["rank", "--forecasts", str(tmp_path / "none.csv"),
             "--targets", str(tmp_path / "none2.csv"),
             "--out", str(tmp_path / "o")],
            capsys,
        )
        assert code == 3


class TestDispersion:
    def test_two_units(self, capsys, tmp_path):
        rng = np.random.default_rng(1)
        rows = ["unit,series,value"]
        for u, sd in (("u1", 2.0), ("u2", 0.5)):
            for v in rng.normal(0, sd, 200):
                rows.append(f"{u},F,{v}")
            for v in rng.normal(0, 1, 200):
                rows.append(f"{u},G,{v}")
        spath = tmp_path / "samples.csv"
        spath.write_text("\n".join(rows) + "\n")
        out_dir = tmp_path / "disp"
        code, _, _ = run_cli(
            ["dispersion", "--samples", str(spath), "--div", "cramer",
             "--out", str(out_dir)],
            capsys,
        )
        assert code == 0
        lines = (out_dir / "dispersion.csv").read_text().strip().splitlines()
        assert len(lines) == 3
        assert (out_dir / "dispersion.png").exists()


class TestSelftest:
    def test_passes(self, capsys):
        code, out, _ = run_cli(["selftest"], capsys)
        assert code == 0
        assert "checks passed" in out


class TestUsage:
    def test_no_subcommand_is_usage_error(self, capsys):
        # argparse exits 2 itself when the subcommand is missing
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_bad_grid_syntax(self, capsys, tmp_path):
        code, _, _ = run_cli(
            ["heatmap", "--mu-grid", "oops", "--out", str(tmp_path / "x")], capsys
        )
        assert code == 2
