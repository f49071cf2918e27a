"""Command-line front end.

Subcommands: score, diverge, asymmetry, hedge, heatmap, rank, dispersion,
selftest.  Output is CSV (with optional JSON mirrors via --json) plus
rendered PNG figures alongside the CSVs on report-producing paths.
Runs are reproducible: the RNG seed defaults to a fixed constant.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import plotting, selftest
from .asymmetry import (
    location_verdict,
    scale_verdict,
    sweep_expfam,
    sweep_location,
    sweep_scale,
    VerdictRow,
    write_verdict_csv,
)
from .divergence import divergence, expected_loss
from .errors import (
    AsymscoreError,
    Atom,
    Crossing,
    DataError,
    DegenerateSpacing,
    EmptyPairs,
    MinimizerAtBoundary,
    NumericFailure,
    ParameterError,
    SeriesTooShort,
    TooFewLevels,
    TooFewSamples,
    UnknownFamily,
)
from .families import expfam_descriptor, location_family, make_family, scale_family
from .forecasts import (
    QuantileForecast,
    load_forecasts,
    load_targets,
    quantile_to_distribution,
    write_rejects_sidecar,
)
from .harness import (
    DispersionRecord,
    ScoredRecord,
    dispersion_flip,
    heatmap,
    standardized_ranking,
    write_dispersion_csv,
    write_heatmap_csv,
    write_ranking_csv,
)
from .hedging import (
    ShiftLaw,
    hedge_expfam_optimum,
    hedge_scale_direction,
    optimal_scale,
    shifted_expected_loss,
    write_hedge_csv,
)
from .scoring import LossSpec, WeightFunction, score

DEFAULT_SEED = 20240901

_USAGE_ERRORS = (ParameterError, UnknownFamily)
_DATA_ERRORS = (DataError, Atom, Crossing, TooFewLevels, TooFewSamples,
                DegenerateSpacing, EmptyPairs, SeriesTooShort, OSError)


def _parse_dist(text: str):
    """'normal:0,1' -> make_family('normal', [0.0, 1.0])."""
    kind, _, rest = text.partition(":")
    params = [float(p) for p in rest.split(",")] if rest else []
    return make_family(kind, params)


def _parse_loss(args) -> LossSpec:
    tag = args.loss
    if tag == "energy":
        return LossSpec.energy(args.beta if args.beta is not None else 1.0)
    if tag == "twcrps":
        if args.alpha is None:
            raise ParameterError("twcrps needs --alpha for the power weight")
        return LossSpec.twcrps(WeightFunction.power(args.alpha))
    return LossSpec(tag)


def _parse_shift(text: str, center: float) -> ShiftLaw:
    form, _, val = text.partition(":")
    form = form.replace("-", "_")
    if not val:
        raise ParameterError("shift needs a parameter, e.g. two-point:2")
    v = float(val)
    if form == "two_point":
        return ShiftLaw.two_point(v, center)
    if form == "log_uniform":
        return ShiftLaw.log_uniform(v, center)
    if form == "log_normal":
        return ShiftLaw.log_normal(v, center)
    raise ParameterError(f"unknown shift form {form!r}")


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        return np.linspace(float(lo), float(hi), int(n))
    except ValueError as exc:
        raise ParameterError(f"grid must be lo:hi:n, got {text!r}") from exc


def _json_mirror(csv_path: Path):
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    csv_path.with_suffix(".json").write_text(json.dumps(rows, indent=1) + "\n")


def _emit(payload: dict, args):
    if getattr(args, "json", False):
        print(json.dumps(payload))
    else:
        print(" ".join(f"{k}={v}" for k, v in payload.items()))


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands

def _cmd_score(args) -> int:
    spec = _parse_loss(args)
    F = _parse_dist(args.dist)
    val = score(spec, F, args.y)
    _emit({"loss": spec.label(), "dist": args.dist, "y": args.y, "score": val}, args)
    return 0


def _cmd_diverge(args) -> int:
    spec = _parse_loss(args)
    F = _parse_dist(args.dist_f)
    G = _parse_dist(args.dist_g)
    d = divergence(spec, F, G)
    _emit({"loss": spec.label(), "f": args.dist_f, "g": args.dist_g,
           "divergence": d.value, "method": d.method}, args)
    return 0


def _cmd_asymmetry(args) -> int:
    out = _outdir(args)
    if args.sweep:
        rows = []
        if args.sweep in ("scale", "all"):
            rows += sweep_scale()
        if args.sweep in ("location", "all"):
            rows += sweep_location()
        if args.sweep in ("expfam", "all"):
            rows += sweep_expfam()
    else:
        spec = _parse_loss(args)
        if args.mu is not None:
            fam = location_family(args.family)
            v = location_verdict(spec, fam, args.mu)
            rows = [VerdictRow(spec.label(), args.family, "location", args.mu, v)]
        else:
            sigma = args.sigma if args.sigma is not None else 2.0
            fam = scale_family(args.family)
            v = scale_verdict(spec, fam, sigma)
            rows = [VerdictRow(spec.label(), args.family, "scale", sigma, v)]
    path = out / "verdicts.csv"
    write_verdict_csv(rows, path)
    plotting.plot_verdicts(rows, out / "verdicts.png", title="asymmetry verdicts")
    if args.json:
        _json_mirror(path)
    print(f"asymmetry: {len(rows)} verdicts -> {path}")
    return 0


def _cmd_hedge(args) -> int:
    out = _outdir(args)
    center = args.center
    shift = _parse_shift(args.shift, center)
    if args.expfam:
        desc = expfam_descriptor(args.expfam)
        res = hedge_expfam_optimum(desc, shift)
        label, family = "log", args.expfam
        sigma_star = desc.from_natural(res.optimum)
        curve_x = np.geomspace(max(res.optimum / 4, 1e-3), res.optimum * 4, 41)
        curve_y = [
            sum(w * (desc.logA(e) - e * desc.dA(float(v)))
                for v, w in zip(*shift.nodes(additive=desc.omega[0] != 0.0)))
            for e in curve_x
        ]
        plotting.plot_hedge_curve(curve_x, curve_y, res.optimum,
                                  out / "hedge.png", title=f"log loss, {family}")
    else:
        spec = _parse_loss(args)
        fam = scale_family(args.family)
        res = optimal_scale(spec, fam, shift)
        label, family = spec.label(), args.family
        sigma_star = res.optimum
        curve_x = np.geomspace(center / 8, center * 8, 41)
        curve_y = [shifted_expected_loss(spec, fam, shift, s) for s in curve_x]
        plotting.plot_hedge_curve(curve_x, curve_y, sigma_star, out / "hedge.png",
                                  title=f"{label}, {family} scale")
    path = out / "hedge.csv"
    write_hedge_csv([(label, family, args.shift, res)], path)
    if args.json:
        _json_mirror(path)
    _emit({"loss": label, "family": family, "optimum": res.optimum,
           "direction": res.direction, "baseline": res.baseline_loss,
           "hedged": res.hedged_loss}, args)
    return 0


def _cmd_heatmap(args) -> int:
    out = _outdir(args)
    spec = _parse_loss(args)
    rng = np.random.default_rng(args.seed)
    G = _parse_dist(args.target)
    ys = G.sample(args.n, rng)
    F = _parse_dist(args.forecast) if args.forecast else G
    pairs = [(F, y) for y in ys]
    grid = heatmap(spec, pairs, _parse_grid(args.mu_grid), _parse_grid(args.sigma_grid))
    path = out / "heatmap.csv"
    write_heatmap_csv(grid, path)
    plotting.plot_heatmap(grid, out / "heatmap.png",
                          title=f"{spec.label()} vs {args.target}")
    if args.json:
        _json_mirror(path)
    print(f"heatmap: argmin at mu={grid.argmin_mu:g} sigma={grid.argmin_sigma:g} -> {path}")
    return 0


def _cmd_rank(args) -> int:
    out = _outdir(args)
    forecasts, rejects = load_forecasts(args.forecasts)
    targets = load_targets(args.targets)
    if rejects:
        write_rejects_sidecar(out / "rejects.csv", rejects)
    if not forecasts:
        raise DataError("no valid forecasts in input")
    specs = [LossSpec(t) for t in args.loss.split(",")]
    records = []
    for q in forecasts:
        key = (q.metadata["location"], q.metadata["date"], q.metadata["horizon"])
        if key not in targets:
            continue
        d = quantile_to_distribution(q)
        y = targets[key]
        for spec in specs:
            records.append(
                ScoredRecord(q.metadata["forecaster"], *key, spec.label(),
                             score(spec, d, y), d.var())
            )
    if not records:
        raise DataError("no forecast matched a target")
    loss_t = standardized_ranking(records, "loss")
    var_t = standardized_ranking(records, "variance")
    path = out / "ranking.csv"
    write_ranking_csv(loss_t, var_t, path)
    if args.json:
        _json_mirror(path)
    print(f"rank: {len(records)} scored records, {loss_t.groups_used} groups "
          f"({loss_t.groups_skipped} singleton skipped) -> {path}")
    return 0


def _cmd_dispersion(args) -> int:
    out = _outdir(args)
    units: dict = {}
    with open(args.samples, newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"unit", "series", "value"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise DataError(f"dispersion input needs columns {sorted(need)}")
        for row in reader:
            which = row["series"].strip().upper()
            if which not in ("F", "G"):
                raise DataError(f"series must be F or G, got {row['series']!r}")
            units.setdefault(row["unit"], {"F": [], "G": []})[which].append(
                float(row["value"])
            )
    records = []
    for unit in sorted(units):
        records.append(
            dispersion_flip(units[unit]["F"], units[unit]["G"], args.div, unit)
        )
    path = out / "dispersion.csv"
    write_dispersion_csv(records, path)
    plotting.plot_dispersion(records, out / "dispersion.png",
                             title=f"{args.div} dispersion flip")
    if args.json:
        _json_mirror(path)
    print(f"dispersion: {len(records)} units -> {path}")
    return 0


def _cmd_selftest(args) -> int:
    failures = selftest.run()
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# argument plumbing

def _add_loss_flags(p):
    p.add_argument("--loss", default="crps",
                   help="log|quadratic|spherical|crps|twcrps|energy|ds")
    p.add_argument("--beta", type=float, default=None, help="energy exponent")
    p.add_argument("--alpha", type=float, default=None, help="twcrps power weight")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None,
                        help="key=value file; command-line flags take precedence")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--threads", type=int, default=None,
                        help="worker cap (default: ASYMSCORE_THREADS or all cores)")
    common.add_argument("--json", action="store_true",
                        help="mirror CSV artifacts as JSON / print JSON summaries")
    ap = argparse.ArgumentParser(
        prog="asymscore",
        description="Proper-scoring-rule asymmetry and hedging toolkit",
    )
    sub = ap.add_subparsers(dest="command", required=True, parser_class=lambda **kw:
                            argparse.ArgumentParser(parents=[common], **kw))

    p = sub.add_parser("score", help="score one forecast-outcome pair")
    _add_loss_flags(p)
    p.add_argument("--dist", required=True, help="e.g. normal:0,1")
    p.add_argument("--y", type=float, required=True)
    p.set_defaults(fn=_cmd_score)

    p = sub.add_parser("diverge", help="induced divergence between two laws")
    _add_loss_flags(p)
    p.add_argument("--dist-f", required=True)
    p.add_argument("--dist-g", required=True)
    p.set_defaults(fn=_cmd_diverge)

    p = sub.add_parser("asymmetry", help="asymmetry verdicts and sweeps")
    _add_loss_flags(p)
    p.add_argument("--family", default="exponential")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--sweep", choices=["scale", "location", "expfam", "all"],
                   default=None)
    p.add_argument("--out", default="asymscore-out")
    p.set_defaults(fn=_cmd_asymmetry)

    p = sub.add_parser("hedge", help="hedging optimum under a parameter shift")
    _add_loss_flags(p)
    p.add_argument("--family", default="exponential")
    p.add_argument("--expfam", default=None,
                   help="natural-parameter family for exact log-loss optimum")
    p.add_argument("--shift", default="two-point:2")
    p.add_argument("--center", type=float, default=1.0)
    p.add_argument("--out", default="asymscore-out")
    p.set_defaults(fn=_cmd_hedge)

    p = sub.add_parser("heatmap", help="(mu,sigma) expected-loss heatmap")
    _add_loss_flags(p)
    p.add_argument("--target", default="normal:0,1")
    p.add_argument("--forecast", default=None,
                   help="forecast base law (defaults to the target law)")
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--mu-grid", default="-2:2:41")
    p.add_argument("--sigma-grid", default="0.25:4:41")
    p.add_argument("--out", default="asymscore-out")
    p.set_defaults(fn=_cmd_heatmap)

    p = sub.add_parser("rank", help="standardized forecaster ranking from CSVs")
    p.add_argument("--forecasts", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--loss", default="crps,log")
    p.add_argument("--out", default="asymscore-out")
    p.set_defaults(fn=_cmd_rank)

    p = sub.add_parser("dispersion", help="dispersion-flip comparison")
    p.add_argument("--samples", required=True,
                   help="CSV with columns unit,series(F|G),value")
    p.add_argument("--div", choices=["kl", "cramer"], default="cramer")
    p.add_argument("--out", default="asymscore-out")
    p.set_defaults(fn=_cmd_dispersion)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.set_defaults(fn=_cmd_selftest)
    return ap


def _config_args(path: str):
    extra = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}")
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"bad config line {line!r} (need key=value)")
        key, _, val = line.partition("=")
        extra.append(f"--{key.strip().replace('_', '-')}={val.strip()}")
    return extra


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        # config values are injected before the explicit flags, right after
        # the subcommand, so explicit flags win
        if "--config" in " ".join(argv):
            ns, _ = ap.parse_known_args(argv)
            if ns.config:
                i = argv.index(ns.command) + 1
                argv = argv[:i] + _config_args(ns.config) + argv[i:]
        args = ap.parse_args(argv)
        if args.threads is None:
            args.threads = int(os.environ.get("ASYMSCORE_THREADS", "0")) or None
        return args.fn(args)
    except _USAGE_ERRORS as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except (AsymscoreError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
