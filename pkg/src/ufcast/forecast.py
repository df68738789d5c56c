"""Point forecasts from conditional densities.

A forecast scores every point of an equally spaced candidate grid by its
conditional density given the history and returns the best one.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .density import (
    AdaptiveDensity,
    ConditionalDensity,
    DensityConfig,
    Interval,
    WindowSpec,
)

TRANSFORMS = ("none", "difference")


class InsufficientHistory(ValueError):
    pass


@dataclass(frozen=True)
class ForecastConfig:
    """How a forecast is computed.

    ``grid_step`` is measured on the unit interval when ``normalize`` is set
    and in data units otherwise. ``interval`` fixes ``[lo, hi]`` for the
    series that is actually scored (the differences when
    ``transform="difference"``); by default the data range is padded by 5%.
    """

    grid_step: float = 0.01
    windows: WindowSpec = None
    density: DensityConfig = field(default_factory=DensityConfig)
    transform: str = "none"
    normalize: bool = True
    interval: Interval = None

    def __post_init__(self):
        if not self.grid_step > 0:
            raise ValueError(f"grid_step must be positive, got {self.grid_step}")
        if self.transform not in TRANSFORMS:
            raise ValueError(f"transform must be one of {TRANSFORMS}, got {self.transform!r}")
        span = 1.0 if self.normalize else (self.interval.width if self.interval else math.inf)
        if not self.grid_step < span:
            raise ValueError(f"grid_step {self.grid_step} must be below the interval width {span}")


@dataclass
class Forecast:
    point: float
    candidates: np.ndarray
    scores: np.ndarray
    ties_broken: bool
    interval: Interval
    levels: tuple

    @property
    def best_index(self):
        return int(np.flatnonzero(self.candidates == self.point)[0])


def candidate_grid(lo, hi, step):
    """Points lo, lo+step, ..., with hi appended if it is off the lattice."""
    if not step > 0:
        raise ValueError("grid step must be positive")
    if not hi > lo:
        raise ValueError("grid needs lo < hi")
    if step > hi - lo:
        raise ValueError("grid step exceeds the interval")
    tol = 1e-9 * step
    n = int(math.floor((hi - lo) / step + 1e-9))
    pts = lo + step * np.arange(n + 1)
    pts = pts[pts <= hi + tol]
    if hi - pts[-1] > tol:
        pts = np.append(pts, hi)
    else:
        pts[-1] = hi
    return pts


def difference_transform(series):
    """First differences ``x[i+1] - x[i]``."""
    x = np.asarray(series, dtype=np.float64)
    if x.size < 2:
        raise InsufficientHistory("differencing needs at least two values")
    return np.diff(x)


def invert_difference(last_value, predicted_diff):
    return last_value + predicted_diff


def integrate_differences(first_value, diffs):
    """Rebuild a series from its first value and differences."""
    out = [float(first_value)]
    for d in np.asarray(diffs, dtype=np.float64):
        out.append(out[-1] + d)
    return np.asarray(out)


def _pick(candidates, log_scores, anchor):
    best = log_scores.max()
    tied = np.flatnonzero(log_scores == best)
    if tied.size == 1:
        return int(tied[0]), False
    # nearest to the anchor, then the smaller candidate (argmin keeps the first)
    dist = np.abs(candidates[tied] - anchor)
    return int(tied[np.argmin(dist)]), True


def _score(values, cfg, interval, windows):
    """Score the grid for the series ``values`` (already transformed)."""
    if interval is None:
        interval = Interval.around(values)
    u_hist = interval.to_unit(values)
    if cfg.normalize:
        u_grid = candidate_grid(0.0, 1.0, cfg.grid_step)
        cands = interval.from_unit(u_grid)
    else:
        cands = candidate_grid(interval.lo, interval.hi, cfg.grid_step)
        u_grid = interval.to_unit(cands)
    log_width = math.log2(interval.width)
    if windows is not None:
        model = AdaptiveDensity(u_hist, windows, cfg.density, extra_points=u_grid,
                                log2_scale=0.0 if cfg.normalize else log_width)
        levels = tuple(m.levels for m in model.models)
    else:
        levels, _ = cfg.density.choose_levels(np.concatenate([u_hist, u_grid]))
        model = ConditionalDensity(u_hist, levels, cfg.density.mixture)
    log_scores = model.log_conditional(u_grid) - log_width
    return interval, cands, log_scores, levels


def forecast_one(series, cfg=None, interval=None):
    """One-step forecast: the grid candidate of highest conditional density.

    ``interval`` overrides ``cfg.interval`` (used to pin the range across
    recursive steps). Scores are conditional densities in data units.
    """
    cfg = cfg or ForecastConfig()
    x = np.asarray(series, dtype=np.float64).ravel()
    if x.size < 2:
        raise InsufficientHistory(f"need at least two values, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    windows = cfg.windows
    if windows is not None and windows.sizes[-1] > x.size:
        raise InsufficientHistory(
            f"largest window {windows.sizes[-1]} exceeds history length {x.size}")
    interval = interval or cfg.interval

    if cfg.transform == "difference":
        values = difference_transform(x)
        if windows is not None:
            # n raw values give n - 1 differences
            sizes = [n - 1 for n in windows.sizes if n > 1]
            if not sizes:
                raise InsufficientHistory("windows too small for differencing")
            windows = WindowSpec(tuple(sizes), windows.weight_mode)
        offset = x[-1]
    else:
        values = x
        offset = 0.0

    interval, cands, log_scores, levels = _score(values, cfg, interval, windows)
    idx, tied = _pick(cands, log_scores, values[-1])
    cands = cands + offset
    return Forecast(
        point=float(cands[idx]),
        candidates=cands,
        scores=np.exp2(log_scores),
        ties_broken=tied,
        interval=interval,
        levels=levels,
    )


def forecast_path(series, horizon, cfg=None, sliding=None):
    """Recursive multi-step forecast, keeping every step's :class:`Forecast`.

    Each step appends the previous point forecast to the working series.
    With ``sliding`` (default: on when windows are configured) the oldest
    value is dropped at the same time so the working length stays fixed.
    Without differencing the interval is fixed by the initial series.
    """
    cfg = cfg or ForecastConfig()
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if sliding is None:
        sliding = cfg.windows is not None
    work = list(np.asarray(series, dtype=np.float64).ravel())
    interval = cfg.interval
    if cfg.transform == "none" and interval is None and work:
        interval = Interval.around(work)
    out = []
    for _ in range(horizon):
        f = forecast_one(work, cfg, interval=interval)
        out.append(f)
        work.append(f.point)
        if sliding:
            work.pop(0)
    return out


def forecast_multi(series, horizon, cfg=None, sliding=None):
    """Point forecasts for steps t+1 .. t+horizon (see :func:`forecast_path`)."""
    return [f.point for f in forecast_path(series, horizon, cfg, sliding)]
