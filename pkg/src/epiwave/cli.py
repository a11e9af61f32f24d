"""Command-line front end: smooth, fit, validate, forecast, simulate.

Every command reads a wide cumulative-cases CSV (local file or URL), smooths
the daily series with the two-sided moving average, and writes its outputs
into ``--out-dir``: delimited tables, a plain-text mixture record, a
standalone SVG chart, and a matplotlib PNG report figure. All outputs embed
the seed and a hash of the effective configuration, carry no timestamps,
and are written atomically, so identical invocations produce byte-identical
files.

Exit codes: 0 success; 2 unusable input or configuration; 3 region not
found; 4 fit failure. Errors print one machine-readable line to stderr.
"""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import figures, metrics, model, sir
from .data import (
    DailySeries,
    EdgePolicy,
    cumulative_to_daily,
    fetch_csv,
    moving_average,
    parse_timeseries_csv,
    series_to_csv,
    train_validation_split,
)
from .errors import (
    ConfigurationError,
    CsvFormatError,
    EpiwaveError,
    FitFailureError,
    RegionNotFoundError,
    SolverFailureError,
)
from .svgchart import PALETTE, ChartSeries, render_line_chart
from .wavelets import WaveletFamily

EXIT_INPUT = 2
EXIT_REGION = 3
EXIT_FIT = 4

_SMOOTH_HALF_WINDOW = 3  # 7-day centered window


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epiwave",
        description="Fit daily-case curves as mixtures of epidemic wavelets; validate and forecast.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    data_opts = argparse.ArgumentParser(add_help=False)
    data_opts.add_argument("--input", type=Path, help="wide cumulative-cases CSV file")
    data_opts.add_argument("--url", help="URL of the CSV; --input is the fallback if the fetch fails")
    data_opts.add_argument("--region", required=True, help="country, province, or combined key")
    data_opts.add_argument(
        "--edge-policy",
        choices=[p.value for p in EdgePolicy],
        default=EdgePolicy.FULL_WINDOW_ONLY.value,
        help="how the 7-day moving average treats the series edges",
    )

    fit_opts = argparse.ArgumentParser(add_help=False)
    fit_opts.add_argument("--wavelets", type=int, default=5, metavar="N", help="number of mixture components")
    fit_opts.add_argument("--starts", type=int, default=16, help="multi-start count")
    fit_opts.add_argument("--seed", type=int, default=0, help="seed for the jittered starts")
    fit_opts.add_argument(
        "--family",
        choices=[f.value for f in model.FITTABLE_FAMILIES],
        default=WaveletFamily.LOG_NORMAL.value,
    )
    fit_opts.add_argument("--threads", type=int, default=1, help="parallel starts (deterministic result)")

    out_opts = argparse.ArgumentParser(add_help=False)
    out_opts.add_argument("--out-dir", type=Path, default=Path("."), help="directory for output files")

    p_fit = sub.add_parser("fit", parents=[data_opts, fit_opts, out_opts],
                           help="fit the mixture to the smoothed series")
    p_fit.set_defaults(func=cmd_fit)

    p_val = sub.add_parser("validate", parents=[data_opts, fit_opts, out_opts],
                           help="fit on a train split and score the held-out days")
    p_val.add_argument("--holdout", type=int, default=6, help="days withheld for validation")
    p_val.set_defaults(func=cmd_validate)

    p_fc = sub.add_parser("forecast", parents=[data_opts, fit_opts, out_opts],
                          help="project the fitted mixture beyond the data")
    p_fc.add_argument("--horizon", type=int, default=60, help="days to project")
    p_fc.add_argument("--mixture", type=Path, help="reuse a fitted mixture record instead of refitting")
    p_fc.set_defaults(func=cmd_forecast)

    p_sim = sub.add_parser("simulate", parents=[out_opts],
                           help="generate a synthetic daily series with a known ground truth")
    p_sim.add_argument("--mixture", type=Path, help="mixture record to sample from")
    p_sim.add_argument("--beta", type=float, help="SIR contact rate (1/day)")
    p_sim.add_argument("--gamma", type=float, help="SIR recovery rate (1/day)")
    p_sim.add_argument("--population", type=float, help="SIR population size")
    p_sim.add_argument("--i0", type=float, help="initially infectious individuals")
    p_sim.add_argument("--dt", type=float, default=sir.DEFAULT_DT, help="SIR integrator step (days)")
    p_sim.add_argument("--days", type=int, required=True, help="length of the generated series")
    p_sim.add_argument("--noise-cv", type=float, default=0.0, help="multiplicative noise level")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--origin", type=dt.date.fromisoformat, default=dt.date(2020, 1, 22),
                       help="calendar date of day 1 (ISO-8601)")
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def _config_hash(args: argparse.Namespace) -> str:
    """Short digest of the effective configuration (output paths excluded)."""
    skip = {"func", "out_dir"}
    parts = [
        f"{key}={getattr(args, key)}"
        for key in sorted(vars(args))
        if key not in skip and getattr(args, key) is not None
    ]
    return hashlib.sha256("\n".join(parts).encode()).hexdigest()[:12]


def _stamp(args: argparse.Namespace) -> list[str]:
    seed = getattr(args, "seed", 0)
    return [f"config={_config_hash(args)}", f"seed={seed}"]


def _write_atomic(path: Path, content: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(content, encoding="utf-8")
    os.replace(tmp, path)


def _load_series(args: argparse.Namespace) -> tuple[DailySeries, DailySeries]:
    """Load, difference and smooth the configured region.

    Returns ``(raw_daily, smoothed)``.
    """
    if args.url:
        try:
            payload = fetch_csv(args.url)
        except CsvFormatError as exc:
            if args.input is None:
                raise
            print(f"note: {exc}; falling back to {args.input}", file=sys.stderr)
            payload = args.input.read_bytes()
    elif args.input is not None:
        if not args.input.exists():
            raise ConfigurationError(f"input file not found: {args.input}")
        payload = args.input.read_bytes()
    else:
        raise ConfigurationError("one of --input or --url is required")

    raw = parse_timeseries_csv(payload, args.region)
    raw_daily = cumulative_to_daily(raw)
    smoothed = moving_average(raw_daily, _SMOOTH_HALF_WINDOW, EdgePolicy(args.edge_policy))
    return raw_daily, smoothed


def _fit_config(args: argparse.Namespace) -> model.FitConfig:
    return model.FitConfig(
        n_wavelets=args.wavelets,
        n_starts=args.starts,
        seed=args.seed,
        family=WaveletFamily(args.family),
        threads=args.threads,
    )


def _fit_report_text(outcome: model.MixtureFit, y: np.ndarray, stamp: list[str]) -> str:
    norm = float(y @ y)
    redundant = ",".join(map(str, outcome.redundant)) or "-"
    starts = ",".join("failed" if s is None else repr(s) for s in outcome.start_sses)
    lines = [f"# {c}" for c in stamp]
    lines += [
        f"sse={outcome.report.sse!r}",
        f"relative_sse={outcome.report.sse / norm!r}",
        f"iterations={outcome.report.iterations}",
        f"converged={outcome.report.converged.value}",
        f"n_rejections={outcome.report.n_rejections}",
        f"start_index={outcome.start_index}",
        f"redundant_components={redundant}",
        f"start_sses={starts}",
    ]
    return "\n".join(lines) + "\n"


def _write_mixture(path: Path, mixture: model.WaveletMixture, args: argparse.Namespace) -> None:
    record = model.mixture_to_record(mixture, seed=getattr(args, "seed", 0),
                                     extra={"config": _config_hash(args)})
    _write_atomic(path, record)


def cmd_fit(args: argparse.Namespace) -> int:
    _, smoothed = _load_series(args)
    outcome = model.fit(smoothed, _fit_config(args))
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    _write_mixture(out / "mixture.txt", outcome.mixture, args)
    _write_atomic(out / "fit_report.txt", _fit_report_text(outcome, smoothed.values, _stamp(args)))
    print(f"fit: sse={outcome.report.sse:.6g} start={outcome.start_index} "
          f"converged={outcome.report.converged.value} -> {out / 'mixture.txt'}")
    return 0


def _raw_values_for(dates: list[dt.date], raw_daily: DailySeries) -> list[float]:
    offsets = [(d - raw_daily.origin_date).days for d in dates]
    return [float(raw_daily.values[o]) if 0 <= o < len(raw_daily) else float("nan") for o in offsets]


def cmd_validate(args: argparse.Namespace) -> int:
    if args.holdout < 1:
        raise ConfigurationError("--holdout must be >= 1")
    raw_daily, smoothed = _load_series(args)
    train, held = train_validation_split(smoothed, args.holdout)
    outcome = model.fit(train, _fit_config(args))
    predicted = model.forecast(outcome.mixture, last_observed=len(train), horizon=args.holdout)
    rows = metrics.make_validation_rows(held.dates, held.values, predicted.values)
    mean_err = metrics.mean_validation_error(rows)

    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    stamp = _stamp(args)
    _write_mixture(out / "mixture.txt", outcome.mixture, args)
    _write_atomic(out / "fit_report.txt", _fit_report_text(outcome, train.values, stamp))
    _write_atomic(out / "validation.csv",
                  metrics.validation_table_csv(rows, _raw_values_for([r.day for r in rows], raw_daily), stamp))
    summary = "\n".join(
        [f"# {c}" for c in stamp]
        + [f"rows={len(rows)}", f"mean_error={mean_err!r}", f"mean_error_pct={100 * mean_err:.2f}"]
    ) + "\n"
    _write_atomic(out / "validation_summary.txt", summary)
    print(f"validate: mean holdout error {100 * mean_err:.2f}% over {len(rows)} days "
          f"-> {out / 'validation.csv'}")
    return 0


def _chart_series(raw_daily: DailySeries, smoothed: DailySeries,
                  mixture: model.WaveletMixture, last_observed: int, horizon: int) -> list[ChartSeries]:
    def t_axis(series: DailySeries) -> tuple[float, ...]:
        offset = (series.origin_date - mixture.origin_date).days
        return tuple(float(offset + i + 1) for i in range(len(series)))

    t_model = np.arange(1, last_observed + horizon + 1, dtype=float)
    charts = [
        ChartSeries("reported", t_axis(raw_daily), tuple(map(float, raw_daily.values)),
                    color="#9e9e9e", stroke_width=1.0),
        ChartSeries("smoothed (7-day)", t_axis(smoothed), tuple(map(float, smoothed.values)),
                    color="#212121", stroke_width=2.0),
        ChartSeries("model + projection", tuple(t_model), tuple(map(float, mixture.eval(t_model))),
                    color=PALETTE[0], stroke_width=2.0),
    ]
    parts = model.decompose(mixture, (1, last_observed + horizon))
    for i, part in enumerate(parts):
        charts.append(ChartSeries(f"wave {i + 1}", tuple(t_model), tuple(map(float, part.values)),
                                  color=PALETTE[(i + 1) % len(PALETTE)], stroke_width=1.2, dash="4 3"))
    return charts


def cmd_forecast(args: argparse.Namespace) -> int:
    if args.horizon < 1:
        raise ConfigurationError("--horizon must be >= 1")
    raw_daily, smoothed = _load_series(args)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)

    if args.mixture is not None:
        if not args.mixture.exists():
            raise ConfigurationError(f"mixture record not found: {args.mixture}")
        mixture, _ = model.mixture_from_record(args.mixture.read_text(encoding="utf-8"))
    else:
        outcome = model.fit(smoothed, _fit_config(args))
        mixture = outcome.mixture
        _write_mixture(out / "mixture.txt", mixture, args)
        _write_atomic(out / "fit_report.txt", _fit_report_text(outcome, smoothed.values, _stamp(args)))

    last_date = smoothed.dates[-1]
    last_observed = (last_date - mixture.origin_date).days + 1
    if last_observed < 1:
        raise ConfigurationError("mixture origin is after the end of the data")

    projection = model.forecast(mixture, last_observed=last_observed, horizon=args.horizon)
    stamp = _stamp(args)
    _write_atomic(out / "forecast.csv", series_to_csv(projection, stamp))

    charts = _chart_series(raw_daily, smoothed, mixture, last_observed, args.horizon)
    title = f"{args.region}: fit and {args.horizon}-day projection"
    _write_atomic(out / "forecast.svg",
                  render_line_chart(charts, title=title, x_label="day", y_label="cases/day", comments=stamp))
    png_tmp = out / "forecast.png.tmp"
    figures.save_line_chart(png_tmp, charts, title=title, x_label="day", y_label="cases/day",
                            boundary=float(last_observed), fmt="png")
    os.replace(png_tmp, out / "forecast.png")
    print(f"forecast: {args.horizon} days from t={last_observed} -> {out / 'forecast.csv'}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    manifest: dict = {
        "seed": args.seed,
        "noise_cv": args.noise_cv,
        "days": args.days,
        "exact": args.noise_cv == 0.0,
        "config": _config_hash(args),
    }

    if args.mixture is not None:
        mixture, meta = model.mixture_from_record(args.mixture.read_text(encoding="utf-8"))
        manifest["mode"] = "mixture"
        manifest["family"] = meta["family"]
        manifest["components"] = [
            {"a": w.amplitude, "b": w.shape_params[0], "c": w.shape_params[1]}
            for w in mixture.components
        ]
    elif None not in (args.beta, args.gamma, args.population, args.i0):
        params = sir.SirParams(beta=args.beta, gamma=args.gamma, population=args.population)
        state0 = sir.SirState(susceptible=args.population - args.i0, infectious=args.i0, recovered=0.0)
        steps = int(round(args.days / args.dt))
        trajectory = sir.integrate_sir(params, state0, dt=args.dt, steps=steps)
        peak_index = int(np.argmax(trajectory.infectious))
        wave = sir.sir_wavelet(trajectory, amplitude=float(trajectory.infectious.max()))
        mixture = model.WaveletMixture(components=(wave,), origin_date=args.origin)
        manifest["mode"] = "sir"
        manifest["sir"] = {
            "beta": args.beta,
            "gamma": args.gamma,
            "population": args.population,
            "i0": args.i0,
            "dt": args.dt,
            "peak_day": float(trajectory.times[peak_index]),
            "susceptible_at_peak": float(trajectory.susceptible[peak_index]),
            "susceptible_at_peak_expected": args.gamma * args.population / args.beta,
        }
    else:
        raise ConfigurationError("simulate needs --mixture or all of --beta/--gamma/--population/--i0")

    series = sir.synth_daily_cases(mixture, days=args.days, noise_cv=args.noise_cv, seed=args.seed)
    norm = float(series.values @ series.values)
    truth = mixture.eval(np.arange(1, args.days + 1, dtype=float))
    truth_sse = float(((series.values - truth) ** 2).sum())
    manifest["norm_y_sq"] = norm
    manifest["sse_threshold"] = max(1.5 * truth_sse, 1e-6 * norm)

    _write_atomic(out / "simulated.csv", series_to_csv(series, _stamp(args)))
    _write_atomic(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"simulate: {args.days} days (noise_cv={args.noise_cv}) -> {out / 'simulated.csv'}")
    return 0


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, RegionNotFoundError):
        return EXIT_REGION
    if isinstance(exc, (FitFailureError, SolverFailureError)):
        return EXIT_FIT
    return EXIT_INPUT


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EpiwaveError, OSError) as exc:
        code = _exit_code(exc)
        print(f"error code={code} kind={type(exc).__name__} message={exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
