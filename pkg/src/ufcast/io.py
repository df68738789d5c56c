"""Dataset ingestion, run configuration and report emission."""
import csv
import json
import math
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .density import DensityConfig, Interval, WindowSpec, WEIGHT_MODES
from .evaluation import ExperimentPlan
from .forecast import ForecastConfig
from .measure import MixtureConfig

REPORT_SCHEMA = "ufcast.report/1"
MISSING = {"", "nan", "na", "n/a", "null", "none"}


class ConfigError(ValueError):
    """Invalid run configuration; ``problems`` lists every violation."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class DataError(ValueError):
    pass


def fmt(x):
    """Shortest round-trip decimal for a float."""
    return repr(float(x))


# --------------------------------------------------------------------------
# CSV ingestion
# --------------------------------------------------------------------------

@dataclass
class Dataset:
    name: str
    columns: dict
    provenance: str
    rows: int = 0
    dropped: int = 0

    def column(self, key):
        return self.columns[key]


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _resolve(selector, header, width):
    if isinstance(selector, int) or str(selector).lstrip("-").isdigit():
        idx = int(selector)
        if not 0 <= idx < width:
            raise DataError(f"column index {idx} out of range (file has {width} columns)")
        name = header[idx] if header else str(idx)
        return idx, name
    if header is None:
        raise DataError(f"column {selector!r} requested but the file has no header row")
    if selector not in header:
        raise DataError(f"column {selector!r} not found; header has {header}")
    return header.index(selector), selector


def ingest_csv(path, column=0, drop_missing=False, extra_columns=()):
    """Read one numeric column (plus optional extra columns) from a CSV file.

    The first row is taken as a header when none of its cells is numeric.
    Missing cells (empty, ``nan``, ``NA``...) are rejected unless
    ``drop_missing`` is set, in which case the whole row is dropped from
    every selected column. Any other non-numeric cell is an error naming
    the file line.
    """
    p = Path(path)
    try:
        with open(p, newline="") as fh:
            raw = [row for row in csv.reader(fh)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    lines = [(i + 1, row) for i, row in enumerate(raw) if any(c.strip() for c in row)]
    if not lines:
        raise DataError(f"{path} is empty")
    header = None
    first_line, first = lines[0]
    if not any(_is_number(c.strip()) for c in first if c.strip()):
        header = [c.strip() for c in first]
        lines = lines[1:]
    width = max(len(r) for _, r in lines) if lines else len(header or [])
    selectors = [column] + [c for c in extra_columns if c is not None]
    picked = [_resolve(s, header, width) for s in selectors]

    values = {name: [] for _, name in picked}
    dropped = 0
    for lineno, row in lines:
        cells = []
        missing = False
        for idx, name in picked:
            cell = row[idx].strip() if idx < len(row) else ""
            if cell.lower() in MISSING:
                if not drop_missing:
                    raise DataError(f"line {lineno}: missing value in column {name!r} "
                                    f"(use --drop-missing to skip such rows)")
                missing = True
                break
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"line {lineno}: non-numeric value {cell!r} in column {name!r}") from None
            if not math.isfinite(v):
                raise DataError(f"line {lineno}: non-finite value {cell!r} in column {name!r}")
            cells.append(v)
        if missing:
            dropped += 1
            continue
        for (_, name), v in zip(picked, cells):
            values[name].append(v)
    main = picked[0][1]
    if not values[main]:
        raise DataError(f"no numeric rows selected from {path}")
    cols = {name: np.asarray(v, dtype=np.float64) for name, v in values.items()}
    return Dataset(
        name=p.stem,
        columns=cols,
        provenance=f"{p.name}, column {main!r}",
        rows=len(cols[main]),
        dropped=dropped,
    )


def write_series_csv(path, values, name="value"):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([name])
        for v in values:
            w.writerow([fmt(v)])


# --------------------------------------------------------------------------
# run configuration
# --------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Flat, JSON-serializable union of forecast, plan and I/O settings."""

    input: str = None
    column: str = "0"
    drop_missing: bool = False
    range: list = None
    grid_step: float = 0.01
    normalize: bool = True
    windows: list = None
    weight_mode: str = "equiprobable"
    adaptive: bool = False
    max_order: int = 32
    exact_tail: bool = True
    max_level: int = 20
    horizon: int = 1
    transform: str = "none"
    lengths: list = None
    experiments: int = 10
    stride: int = None
    baseline: str = "inertial"
    seed: int = 0
    output: str = None

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"unknown config key {k!r}" for k in unknown])
        return cls(**data)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"config is not valid JSON: {exc}"]) from exc
        if not isinstance(data, dict):
            raise ConfigError(["config must be a JSON object"])
        return cls.from_dict(data)

    def problems(self, command=None):
        out = []
        if command is not None and not self.input:
            out.append("--input is required")
        if self.range is not None:
            if len(self.range) != 2 or not all(isinstance(v, (int, float)) for v in self.range):
                out.append("--range must be LO:HI")
            elif not self.range[0] < self.range[1]:
                out.append(f"--range needs LO < HI, got {self.range[0]}:{self.range[1]}")
        if not (isinstance(self.grid_step, (int, float)) and self.grid_step > 0):
            out.append("--grid-step must be positive")
        elif self.normalize and self.grid_step >= 1:
            out.append("--grid-step must be below 1 on the normalized scale")
        elif (not self.normalize and self.range is not None and len(self.range) == 2
              and self.grid_step >= self.range[1] - self.range[0]):
            out.append("--grid-step must be below the range width")
        if self.windows is not None:
            if not self.windows or any(int(n) < 1 for n in self.windows):
                out.append("--windows must be positive integers")
            elif len(set(self.windows)) != len(self.windows):
                out.append("--windows must be distinct")
        if self.weight_mode not in WEIGHT_MODES:
            out.append(f"--weight-mode must be one of {', '.join(WEIGHT_MODES)}")
        if self.max_order < 0:
            out.append("--max-order must be >= 0")
        if self.max_level < 1:
            out.append("--max-level must be >= 1")
        if self.horizon < 1:
            out.append("--horizon must be >= 1")
        if self.transform not in ("none", "diff"):
            out.append("--transform must be none or diff")
        if command in ("evaluate", "compare"):
            if not self.lengths:
                out.append("--lengths is required")
            elif any(int(n) < 2 for n in self.lengths):
                out.append("--lengths must be >= 2")
            elif len(set(self.lengths)) != len(self.lengths):
                out.append("--lengths must be distinct")
            if self.experiments < 1:
                out.append("--experiments must be >= 1")
            if self.stride is not None and self.stride < 1:
                out.append("--stride must be >= 1")
            if not (self.baseline == "inertial" or
                    (self.baseline.startswith("column:") and len(self.baseline) > 7)):
                out.append("--baseline must be inertial or column:NAME")
        return out

    def validate(self, command=None):
        problems = self.problems(command)
        if problems:
            raise ConfigError(problems)
        return self

    def forecast_config(self):
        windows = None
        if self.windows:
            windows = WindowSpec(tuple(self.windows), self.weight_mode)
        return ForecastConfig(
            grid_step=float(self.grid_step),
            windows=windows,
            density=DensityConfig(
                max_level=int(self.max_level),
                mixture=MixtureConfig(max_order=int(self.max_order), exact_tail=self.exact_tail),
            ),
            transform="difference" if self.transform == "diff" else "none",
            normalize=self.normalize,
            interval=Interval(*map(float, self.range)) if self.range else None,
        )

    def plan(self):
        return ExperimentPlan(
            lengths=tuple(self.lengths),
            experiments=int(self.experiments),
            adaptive=self.adaptive,
            horizon=int(self.horizon),
            stride=self.stride,
            baseline=self.baseline,
            weight_mode=self.weight_mode,
        )

    def resolved(self, command):
        """Settings with derived defaults expanded, as recorded in reports.

        The output location is left out so a report does not depend on
        where it was written.
        """
        d = self.to_dict()
        d.pop("output")
        if command in ("evaluate", "compare") and d["stride"] is None:
            d["stride"] = d["horizon"]
        return d


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps_report(payload):
    return json.dumps(_plain(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"


def build_report(command, config, dataset, body):
    return {
        "schema": REPORT_SCHEMA,
        "command": command,
        "config": config,
        "dataset": {
            "name": dataset.name,
            "provenance": dataset.provenance,
            "rows": dataset.rows,
            "dropped_rows": dataset.dropped,
        },
        **body,
    }


def _cell(result, key):
    return fmt(getattr(result, key)) if result is not None else "n/d"


def mae_table(report, dataset_name, series, lengths, adaptive):
    """Rows of the per-series MAE table (adaptive column first)."""
    by = report.by_label()
    x = np.asarray(series)
    head = ["Time series", "Range", "Adapt."] + [str(n) for n in lengths]
    row = [dataset_name, f"[{fmt(x.min())}; {fmt(x.max())}]",
           _cell(by.get("adaptive") if adaptive else None, "mae")]
    row += [_cell(by.get(str(n)), "mae") for n in lengths]
    return [head, row]


def comparison_table(report, lengths, adaptive):
    """Two-row method-vs-baseline table, one column per length."""
    by = report.by_label()
    labels = [str(n) for n in lengths] + (["adaptive"] if adaptive else [])
    head = ["Forecasting method"] + [str(n) for n in lengths] + (["Adaptive mode"] if adaptive else [])
    rows = [head,
            ["R"] + [_cell(by.get(k), "mae") for k in labels],
            [report.baseline_label] + [_cell(by.get(k), "baseline_mae") for k in labels]]
    return rows


def write_csv_rows(path, rows):
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def render_table(rows, caption=None):
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    sep = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
    lines = [caption] if caption else []
    lines.append(sep)
    for k, r in enumerate(rows):
        lines.append("| " + " | ".join(c.ljust(w) for c, w in zip(r, widths)) + " |")
        if k == 0:
            lines.append(sep)
    lines.append(sep)
    return "\n".join(lines)


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return Path(path)
