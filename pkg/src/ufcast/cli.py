"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime
failure. Every failure prints a single diagnostic line to stderr.
"""
import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .evaluation import (
    PlanError,
    SyntheticSource,
    generate,
    random_walk,
    run_evaluation,
)
from .density import OutOfRange
from .forecast import InsufficientHistory, forecast_path
from .io import (
    ConfigError,
    DataError,
    RunConfig,
    build_report,
    comparison_table,
    dumps_report,
    ensure_dir,
    fmt,
    ingest_csv,
    mae_table,
    render_table,
    write_csv_rows,
    write_series_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_CONFIG, f"{self.prog}: config error: {message}\n")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _range(text):
    try:
        lo, hi = text.split(":")
        return [float(lo), float(hi)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")


def _transform(text):
    t = {"difference": "diff"}.get(text, text)
    return t


def _add_common(p):
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="JSON run configuration (flags override it)")
    p.add_argument("--input", default=S, help="CSV file")
    p.add_argument("--column", default=S, help="column name or 0-based index (default 0)")
    p.add_argument("--drop-missing", dest="drop_missing", action="store_true", default=S)
    p.add_argument("--range", type=_range, default=S, metavar="LO:HI",
                   help="interval [A;B] of the scored series (default: data range +-5%%)")
    p.add_argument("--grid-step", dest="grid_step", type=float, default=S,
                   help="candidate grid step (default 0.01 on the normalized scale)")
    p.add_argument("--no-normalize", dest="normalize", action="store_false", default=S,
                   help="measure --grid-step in data units")
    p.add_argument("--windows", type=_int_list, default=S, metavar="N1,N2,...")
    p.add_argument("--weight-mode", dest="weight_mode", default=S,
                   choices=["telescoping", "equiprobable"])
    p.add_argument("--max-order", dest="max_order", type=int, default=S)
    p.add_argument("--max-level", dest="max_level", type=int, default=S)
    p.add_argument("--horizon", type=int, default=S)
    p.add_argument("--transform", type=_transform, default=S, choices=["none", "diff"])
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--output", default=S, help="directory for report files")


def _add_plan(p):
    S = argparse.SUPPRESS
    p.add_argument("--lengths", type=_int_list, default=S, metavar="L1,L2,...")
    p.add_argument("--adaptive", action="store_true", default=S)
    p.add_argument("--experiments", type=int, default=S)
    p.add_argument("--stride", type=int, default=S)
    p.add_argument("--baseline", default=S, metavar="inertial|column:NAME")


def build_parser():
    parser = _Parser(prog="ufcast", description="Forecasting with universal measures.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("forecast", help="point forecast(s) for the end of a series")
    _add_common(p)

    p = sub.add_parser("evaluate", help="rolling one-step/recursive MAE by history length")
    _add_common(p)
    _add_plan(p)

    p = sub.add_parser("compare", help="method vs baseline MAE table")
    _add_common(p)
    _add_plan(p)

    p = sub.add_parser("generate", help="write a synthetic series as CSV")
    p.add_argument("--kind", choices=["randomwalk", "iid", "markov"], default="randomwalk")
    p.add_argument("--length", type=int, default=2000)
    p.add_argument("--probabilities", default="0.7,0.3")
    p.add_argument("--stay", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="CSV file to write")
    return parser


def resolve_config(ns):
    args = dict(vars(ns))
    args.pop("command", None)
    base = RunConfig()
    if "config" in args:
        path = args.pop("config")
        try:
            base = RunConfig.from_json(Path(path).read_text())
        except OSError as exc:
            raise ConfigError([f"cannot read config {path}: {exc.strerror or exc}"]) from exc
    data = base.to_dict()
    data.update(args)
    if data.get("column") is not None:
        data["column"] = str(data["column"])
    return RunConfig.from_dict(data)


def _load(cfg, extra=()):
    return ingest_csv(cfg.input, cfg.column, cfg.drop_missing, extra_columns=extra)


def cmd_forecast(cfg):
    ds = _load(cfg)
    series = ds.column(list(ds.columns)[0])
    fcfg = cfg.forecast_config()
    path = forecast_path(series, cfg.horizon, fcfg)
    for f in path:
        print(fmt(f.point))
    if cfg.output:
        out = ensure_dir(cfg.output)
        rows = [["step", "candidate", "density"]]
        for step, f in enumerate(path, start=1):
            rows += [[str(step), fmt(c), fmt(s)] for c, s in zip(f.candidates, f.scores)]
        write_csv_rows(out / "scores.csv", rows)
        body = {"forecasts": [
            {"step": k, "point": f.point, "ties_broken": f.ties_broken,
             "interval": [f.interval.lo, f.interval.hi], "levels": f.levels}
            for k, f in enumerate(path, start=1)]}
        report = build_report("forecast", cfg.resolved("forecast"), ds, body)
        (out / "forecast.json").write_text(dumps_report(report))
    return EXIT_OK


def _evaluate(cfg):
    plan = cfg.plan()
    extra = (plan.baseline_column,) if plan.baseline_column else ()
    ds = _load(cfg, extra)
    main = list(ds.columns)[0]
    series = ds.column(main)
    resid = ds.column(plan.baseline_column) if plan.baseline_column else None
    report = run_evaluation(series, plan, cfg.forecast_config(), baseline_values=resid)
    return ds, series, plan, report


def cmd_evaluate(cfg):
    ds, series, plan, report = _evaluate(cfg)
    rows = mae_table(report, ds.name, series, plan.lengths, plan.adaptive)
    print(render_table(rows, f"Mean absolute error by history length ({ds.name})"))
    if cfg.output:
        out = ensure_dir(cfg.output)
        write_csv_rows(out / "mae.csv", rows)
        body = {"evaluation": report.to_dict(), "table": rows}
        report_json = build_report("evaluate", cfg.resolved("evaluate"), ds, body)
        (out / "report.json").write_text(dumps_report(report_json))
    return EXIT_OK


def cmd_compare(cfg):
    ds, series, plan, report = _evaluate(cfg)
    rows = comparison_table(report, plan.lengths, plan.adaptive)
    who = "the inertial method" if report.baseline_label == "Inertial" else report.baseline_label
    caption = f"Comparison with {who} for {ds.name}"
    print(render_table(rows, caption))
    if cfg.output:
        out = ensure_dir(cfg.output)
        write_csv_rows(out / "comparison.csv", rows)
        body = {"evaluation": report.to_dict(), "table": rows, "caption": caption}
        report_json = build_report("compare", cfg.resolved("compare"), ds, body)
        (out / "report.json").write_text(dumps_report(report_json))
    return EXIT_OK


def cmd_generate(ns):
    if ns.length < 1:
        raise ConfigError(["--length must be >= 1"])
    if ns.kind == "randomwalk":
        values = random_walk(ns.length, seed=ns.seed)
    elif ns.kind == "iid":
        probs = [float(v) for v in ns.probabilities.split(",")]
        values = generate(SyntheticSource.iid(probs, seed=ns.seed), ns.length).astype(float)
    else:
        values = generate(SyntheticSource.sticky(ns.stay, seed=ns.seed), ns.length).astype(float)
    write_series_csv(ns.output, np.asarray(values))
    return EXIT_OK


COMMANDS = {"forecast": cmd_forecast, "evaluate": cmd_evaluate, "compare": cmd_compare}


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.command == "generate":
            return cmd_generate(ns)
        cfg = resolve_config(ns).validate(ns.command)
        return COMMANDS[ns.command](cfg)
    except (ConfigError, PlanError) as exc:
        print(f"ufcast: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, InsufficientHistory, OutOfRange) as exc:
        print(f"ufcast: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"ufcast: runtime failure: {msg}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
