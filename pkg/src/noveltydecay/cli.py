"""Command-line entry point: ``python -m noveltydecay <command> ...``.

Exit status is 0 on success, 1 when an input or parameter fails
validation, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import sys
from pathlib import Path

import numpy as np

from . import files
from .core import GrowthParams, ModelError, NoveltyCurve
from .diststats import fit_lognormal, qq_points
from .estimate import estimate_growth_ratio, estimate_novelty, mean_variance_series
from .relaxation import decay_series, fit_kww, half_life
from .roundtrip import RoundTripSpec, run_roundtrip
from .simulate import ShockFamily, SimConfig, simulate_cohort

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def _metadata(command: str, args: argparse.Namespace, seed=None) -> dict:
    canonical = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command") and v is not None
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config_digest": files.config_digest({k: repr(v) for k, v in canonical.items()}),
        "seed": seed,
        "generated_utc": _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        "units": {"time": "minutes", "counts": "dimensionless"},
    }


def _emit_json(obj, out) -> None:
    if out:
        files.write_json(obj, out)
    else:
        sys.stdout.write(files.json_text(obj))


def _sim_config(args) -> SimConfig:
    if args.seed is None:
        raise UsageError("--seed is required")
    if args.novelty:
        curve = files.ingest_novelty(args.novelty)
        curve = NoveltyCurve(curve.r)  # exact curve: enforce monotonicity
    else:
        curve = NoveltyCurve.stretched_exponential(args.kww_a, args.kww_b, args.horizon)
    return SimConfig(
        n_stories=args.stories,
        horizon=args.horizon,
        growth=GrowthParams(args.mu, args.sigma2),
        novelty=curve,
        master_seed=args.seed,
        n0=args.n0,
        shock_family=ShockFamily(args.family),
    )


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(args) -> int:
    config = _sim_config(args)
    cohort = simulate_cohort(config, workers=args.workers)
    files.write_traces(cohort, args.out)
    digest = files.config_digest(config.canonical())
    sys.stdout.write(
        files.json_text(
            {"config_digest": digest, "seed": args.seed, "stories": len(cohort), "out": str(args.out)}
        )
    )
    return 0


def cmd_estimate_growth(args) -> int:
    cohort = files.ingest_traces(args.traces, args.fill_policy)
    series = mean_variance_series(cohort)
    fit = estimate_growth_ratio(series)
    if args.out_series:
        files.write_mean_variance(series, args.out_series)
    _emit_json(
        {
            "metadata": _metadata("estimate-growth", args),
            "n_stories": len(cohort),
            "horizon": cohort.horizon,
            "slope": fit.slope,
            "residual_rms": fit.residual_rms,
        },
        args.out_json,
    )
    return 0


def cmd_estimate_novelty(args) -> int:
    cohort = files.ingest_traces(args.traces, args.fill_policy)
    curve = estimate_novelty(cohort, args.smooth)
    files.write_novelty(curve, args.out)
    return 0


def _lognormal_section(values, label: dict, bins: int) -> dict:
    fit = fit_lognormal(values)
    edges, counts = files.log_histogram(values, bins)
    return {
        **label,
        "n": fit.n,
        "mu_log": fit.mu_log,
        "sigma_log": fit.sigma_log,
        "ks_stat": fit.ks_stat,
        "p_value": fit.p_value,
        "qq": qq_points(np.log(values)).tolist(),
        "histogram": {"log_edges": edges.tolist(), "counts": [int(c) for c in counts]},
    }


def _values_at_minute(cohort, minute: int) -> np.ndarray:
    if not 0 <= minute <= cohort.horizon:
        raise ModelError(f"--at-minute {minute} outside 0..{cohort.horizon}")
    return cohort.counts[:, minute].copy()


def cmd_fit_lognormal(args) -> int:
    if bool(args.saturation) == bool(args.traces):
        raise UsageError("give exactly one of --saturation or --traces")
    if args.traces:
        if args.at_minute is None:
            raise UsageError("--traces needs --at-minute")
        values = _values_at_minute(files.ingest_traces(args.traces, args.fill_policy), args.at_minute)
    else:
        values = files.ingest_saturation(args.saturation)
    fit = fit_lognormal(values)
    if args.out_qq:
        files.write_qq(qq_points(np.log(values)), args.out_qq)
    if args.out_hist:
        edges, counts = files.log_histogram(values, args.bins)
        files.write_histogram(edges, counts, args.out_hist)
    _emit_json(
        {
            "metadata": _metadata("fit-lognormal", args),
            "mu_log": fit.mu_log,
            "sigma_log": fit.sigma_log,
            "ks_stat": fit.ks_stat,
            "p_value": fit.p_value,
            "n": fit.n,
        },
        args.out_json,
    )
    return 0


def cmd_fit_kww(args) -> int:
    curve = files.ingest_novelty(args.novelty)
    fit = fit_kww(curve, args.t_min, args.t_max)
    if args.out_series:
        s = decay_series(curve, fit.params.b)
        files.atomic_write_text(
            args.out_series,
            files._csv_text(("t", "log_t", "t_pow_b", "log_r"), zip(*(a.tolist() for a in s))),
        )
    _emit_json(
        {
            "metadata": _metadata("fit-kww", args),
            "c": fit.params.c,
            "a": fit.params.a,
            "b": fit.params.b,
            "sse": fit.sse,
            "n_used": fit.n_used,
            "n_excluded": fit.n_excluded,
        },
        args.out_json,
    )
    return 0


def cmd_halflife(args) -> int:
    tau = half_life(args.a, args.b)
    _emit_json({"a": args.a, "b": args.b, "tau_minutes": tau}, args.out_json)
    return 0


def cmd_roundtrip(args) -> int:
    if args.seed is None:
        raise UsageError("--seed is required")
    spec = RoundTripSpec(
        stories=args.stories,
        horizon=args.horizon,
        mu=args.mu,
        sigma2=args.sigma2,
        kww_a=args.kww_a,
        kww_b=args.kww_b,
        n0=args.n0,
        family=args.family,
        smooth=args.smooth,
    )
    result = run_roundtrip(spec, args.seed, workers=args.workers)
    sys.stdout.write(result.table() + "\n")
    if args.out_json:
        files.write_json(result.as_dict(), args.out_json)
    if args.strict and not result.passed:
        return 1
    return 0


def cmd_report(args) -> int:
    cohort = files.ingest_traces(args.traces, args.fill_policy)
    series = mean_variance_series(cohort)
    growth = estimate_growth_ratio(series)
    curve = estimate_novelty(cohort, args.smooth)
    kww = fit_kww(curve, args.t_min, args.t_max)
    report = {
        "metadata": _metadata("report", args),
        "cohort": {"n_stories": len(cohort), "horizon": cohort.horizon},
        "mean_variance": [
            {"t": t, "mean": m, "variance": v} for t, m, v in series.points
        ],
        "growth_ratio": {"slope": growth.slope, "residual_rms": growth.residual_rms},
        "novelty": {"smooth_window": args.smooth, "t": curve.t.tolist(), "r": curve.r.tolist()},
        "kww": {
            "c": kww.params.c,
            "a": kww.params.a,
            "b": kww.params.b,
            "sse": kww.sse,
            "n_used": kww.n_used,
            "n_excluded": kww.n_excluded,
            "t_min": args.t_min,
            "t_max": args.t_max if args.t_max is not None else len(curve),
        },
        "half_life": {"tau_minutes": half_life(kww.params.a, kww.params.b)},
    }
    if args.at_minute:
        report["lognormal"] = [
            _lognormal_section(_values_at_minute(cohort, m), {"at_minute": m}, args.bins)
            for m in args.at_minute
        ]
    if args.saturation:
        report["saturation"] = _lognormal_section(
            files.ingest_saturation(args.saturation), {"source": str(args.saturation)}, args.bins
        )
    _emit_json(report, args.out)
    return 0


# ---------------------------------------------------------------------------
# parser


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _odd_window(text):
    v = _positive_int(text)
    if v % 2 == 0:
        raise argparse.ArgumentTypeError(f"must be odd, got {v}")
    return v


def _add_model_flags(p, stories_default):
    p.add_argument("--config", type=Path, help="flat key = value file; flags override it")
    p.add_argument("--seed", type=int, help="master seed (required)")
    p.add_argument("--stories", type=_positive_int, default=stories_default)
    p.add_argument("--horizon", type=_positive_int, default=1440, help="minutes")
    p.add_argument("--n0", type=float, default=100.0, help="initial digg count")
    p.add_argument("--mu", type=float, default=0.05)
    p.add_argument("--sigma2", type=float, default=0.0072)
    p.add_argument("--family", choices=[f.value for f in ShockFamily], default="gamma")
    p.add_argument("--kww-a", type=float, default=0.4)
    p.add_argument("--kww-b", type=float, default=0.4)
    p.add_argument("--workers", type=int, default=1)


def _add_traces_flags(p, required=True):
    p.add_argument("--traces", type=Path, required=required)
    p.add_argument(
        "--fill-policy", choices=[f.value for f in files.FillPolicy], default="forward_fill"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noveltydecay", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a cohort to a traces CSV")
    _add_model_flags(p, stories_default=1000)
    p.add_argument("--novelty", type=Path, help="t,r CSV used instead of --kww-a/--kww-b")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate-growth", help="mean/variance series and growth ratio")
    _add_traces_flags(p)
    p.add_argument("--out-series", type=Path)
    p.add_argument("--out-json", type=Path)
    p.set_defaults(func=cmd_estimate_growth)

    p = sub.add_parser("estimate-novelty", help="novelty curve r_t")
    _add_traces_flags(p)
    p.add_argument("--smooth", type=_odd_window, default=5)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_estimate_novelty)

    p = sub.add_parser("fit-lognormal", help="log-normal fit, KS test, Q-Q and histogram")
    _add_traces_flags(p, required=False)
    p.add_argument("--saturation", type=Path)
    p.add_argument("--at-minute", type=int)
    p.add_argument("--bins", type=_positive_int, default=50)
    p.add_argument("--out-json", type=Path)
    p.add_argument("--out-qq", type=Path)
    p.add_argument("--out-hist", type=Path)
    p.set_defaults(func=cmd_fit_lognormal)

    p = sub.add_parser("fit-kww", help="stretched-exponential fit of a novelty curve")
    p.add_argument("--novelty", type=Path, required=True)
    p.add_argument("--t-min", type=_positive_int, default=1)
    p.add_argument("--t-max", type=_positive_int)
    p.add_argument("--out-json", type=Path)
    p.add_argument("--out-series", type=Path)
    p.set_defaults(func=cmd_fit_kww)

    p = sub.add_parser("halflife", help="half-life of exp(-a t^b)")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--out-json", type=Path)
    p.set_defaults(func=cmd_halflife)

    p = sub.add_parser("roundtrip", help="simulate, estimate and compare against the truth")
    _add_model_flags(p, stories_default=2000)
    p.add_argument("--smooth", type=_odd_window, default=5)
    p.add_argument("--strict", action="store_true", help="exit 1 if any check fails")
    p.add_argument("--out-json", type=Path)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("report", help="consolidated JSON report for a traces CSV")
    _add_traces_flags(p)
    p.add_argument("--smooth", type=_odd_window, default=5)
    p.add_argument("--t-min", type=_positive_int, default=1)
    p.add_argument("--t-max", type=_positive_int)
    p.add_argument("--at-minute", type=int, action="append")
    p.add_argument("--saturation", type=Path)
    p.add_argument("--bins", type=_positive_int, default=50)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_report)
    parser._subparser_map = sub.choices
    return parser


def _apply_config(parser, argv, args):
    """Re-parse with values from ``--config`` as defaults, so flags still win."""
    sub = parser._subparser_map[args.command]
    cfg = files.read_config(args.config)
    known = {a.dest for a in sub._actions}
    unknown = sorted(set(cfg) - known - {"config"})
    if unknown:
        raise UsageError(f"unknown key(s) in {args.config}: {', '.join(unknown)}")
    sub.set_defaults(**cfg)
    return parser.parse_args(argv)


def run_command(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            args = _apply_config(parser, argv, args)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_command())
