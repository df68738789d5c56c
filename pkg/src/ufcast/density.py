"""Densities of real-valued series from nested binary partitions.

The interval ``[lo, hi]`` is split into ``2**s`` equal bins at level ``s``;
a series is quantized level by level, scored with the finite-alphabet
mixture ``R`` and divided by the Lebesgue measure of the occupied bins.
The levels are then mixed with the ``omega`` prior.

All internal work happens on the unit interval. Bin arithmetic there is
exact (multiplying by a power of two does not round), which makes the
partitions exactly nested.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .kernel import order_profile
from .logspace import log2_sum
from .measure import (
    MixtureConfig,
    omega_tail,
    omega_weight,
    r_log_from_profile,
    r_next_log_from_profile,
)

DEFAULT_MAX_LEVEL = 20
PAD_FRACTION = 0.05


class OutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ValueError(f"interval needs finite lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self):
        return self.hi - self.lo

    @classmethod
    def around(cls, values, pad=PAD_FRACTION):
        """Data range widened by ``pad`` of its span on each side."""
        v = np.asarray(values, dtype=np.float64)
        if v.size == 0:
            raise ValueError("cannot derive an interval from no values")
        lo, hi = float(v.min()), float(v.max())
        span = hi - lo
        if span == 0.0:
            span = max(abs(lo), 1.0)
        return cls(lo - pad * span, hi + pad * span)

    def contains(self, values):
        v = np.asarray(values, dtype=np.float64)
        return bool(np.all((v >= self.lo) & (v <= self.hi)))

    def to_unit(self, values):
        v = np.asarray(values, dtype=np.float64)
        if not self.contains(v):
            bad = v[(v < self.lo) | (v > self.hi)]
            raise OutOfRange(f"value {bad.flat[0]!r} outside [{self.lo}, {self.hi}]")
        return np.clip((v - self.lo) / self.width, 0.0, 1.0)

    def from_unit(self, u):
        return self.lo + np.asarray(u, dtype=np.float64) * self.width


@dataclass(frozen=True)
class RealSeries:
    values: np.ndarray
    interval: Interval

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if not self.interval.contains(v):
            raise OutOfRange("series has values outside its interval")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return int(self.values.size)


def unit_bins(u, level):
    """Bin indices of unit-interval coordinates at ``level``.

    Boundary points go to the right-hand bin; 1.0 goes to the last bin.
    """
    n = 1 << level
    b = np.floor(np.asarray(u, dtype=np.float64) * n).astype(np.int64)
    return np.minimum(b, n - 1)


@dataclass(frozen=True)
class Quantizer:
    interval: Interval
    level: int

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("quantizer level starts at 1 (first split)")

    @property
    def n_bins(self):
        return 1 << self.level

    @property
    def bin_width(self):
        return self.interval.width / self.n_bins

    def bins(self, values):
        return unit_bins(self.interval.to_unit(values), self.level)

    def bin_bounds(self, index):
        w = self.bin_width
        return self.interval.lo + index * w, self.interval.lo + (index + 1) * w


def quantize(value, q):
    """Bin of a single value under quantizer ``q``."""
    return int(q.bins([value])[0])


def resolution_level(values, interval, max_level=DEFAULT_MAX_LEVEL):
    """Smallest level separating every distinct value into its own bin.

    Returns ``(level, capped)``; ``capped`` is true when ``max_level`` was
    reached without separating all values.
    """
    distinct = np.unique(interval.to_unit(values))
    if distinct.size == 0:
        raise ValueError("resolution of an empty value set")
    for level in range(1, max_level + 1):
        if distinct.size == 1 or np.all(np.diff(unit_bins(distinct, level)) > 0):
            return level, False
    return max_level, True


def lebesgue_log(level, count, interval):
    """log2 of the total Lebesgue measure of ``count`` occupied level bins."""
    if level < 1:
        raise ValueError("level must be >= 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    return count * (math.log2(interval.width) - level)


@dataclass(frozen=True)
class DensityConfig:
    """``levels=None`` picks levels ``1..S`` by the resolution rule."""

    max_level: int = DEFAULT_MAX_LEVEL
    mixture: MixtureConfig = field(default_factory=MixtureConfig)
    levels: tuple = None

    def __post_init__(self):
        if self.max_level < 1:
            raise ValueError("max_level must be >= 1")
        if self.levels is not None:
            lv = tuple(sorted({int(s) for s in self.levels}))
            if not lv or lv[0] < 1:
                raise ValueError("fixed levels must be positive integers")
            object.__setattr__(self, "levels", lv)

    def choose_levels(self, unit_values):
        """Level set and cap flag for the given points (unit coordinates)."""
        if self.levels is not None:
            return self.levels, False
        s, capped = resolution_level(unit_values, Interval(0.0, 1.0), self.max_level)
        return tuple(range(1, s + 1)), capped


class ConditionalDensity:
    """Density model of one history with a frozen level set.

    Values are unit-interval coordinates; densities are per unit length.
    ``log_joint`` is log2 r(history) and :meth:`log_conditional` gives
    log2 r(a | history) for a batch of candidates.
    """

    def __init__(self, history, levels, mixture=None):
        self.history = np.asarray(history, dtype=np.float64).ravel()
        self.levels = tuple(levels)
        self.mixture = mixture or MixtureConfig()
        t = self.history.size
        self._profiles = []
        parts = []
        for s in self.levels:
            prof = order_profile(unit_bins(self.history, s), 1 << s, self.mixture.max_order)
            self._profiles.append(prof)
            parts.append(math.log2(omega_weight(s)) + r_log_from_profile(prof, self.mixture) + t * s)
        self._level_terms = np.asarray(parts)
        self.log_joint = log2_sum(self._level_terms)

    def log_conditional(self, candidates):
        u = np.asarray(candidates, dtype=np.float64).ravel()
        t = self.history.size
        rows = []
        for s, prof in zip(self.levels, self._profiles):
            sym = unit_bins(u, s)
            uniq, inv = np.unique(sym, return_inverse=True)
            lr = r_next_log_from_profile(prof, self.mixture, uniq)
            rows.append(math.log2(omega_weight(s)) + lr[inv] + (t + 1) * s)
        return log2_sum(np.vstack(rows), axis=0) - self.log_joint

    def level_posterior(self):
        """Posterior weight of each level given the history."""
        return np.exp2(self._level_terms - self.log_joint)


def _unit_series(values, interval):
    v = np.asarray(values, dtype=np.float64).ravel()
    if interval is None:
        interval = Interval.around(v)
    return interval, interval.to_unit(v)


def density_model(values, cfg=None, interval=None, extra_points=()):
    """Build a :class:`ConditionalDensity` with levels fixed over values and extra points."""
    cfg = cfg or DensityConfig()
    interval, u = _unit_series(values, interval)
    extra = interval.to_unit(extra_points) if len(extra_points) else np.empty(0)
    pts = np.concatenate([u, extra])
    levels, _ = cfg.choose_levels(pts if pts.size else np.array([0.5]))
    return interval, ConditionalDensity(u, levels, cfg.mixture)


def r_density_log(values, cfg=None, interval=None, extra_points=()):
    """log2 r(x_1..x_t) in the units of ``interval``."""
    if isinstance(values, RealSeries):
        values, interval = values.values, values.interval
    interval, model = density_model(values, cfg, interval, extra_points)
    return model.log_joint - model.history.size * math.log2(interval.width)


def r_density_conditional(values, candidate, cfg=None, interval=None):
    """r(a | x) = r(x a) / r(x) with one level set shared by both terms."""
    if isinstance(values, RealSeries):
        values, interval = values.values, values.interval
    if interval is None:
        raise ValueError("an explicit interval is required for a conditional density")
    interval, model = density_model(values, cfg, interval, [candidate])
    u = interval.to_unit([candidate])
    return float(np.exp2(model.log_conditional(u)[0])) / interval.width


# --------------------------------------------------------------------------
# adaptive windows
# --------------------------------------------------------------------------

WEIGHT_MODES = ("telescoping", "equiprobable")


def adaptive_weights(k, mode="telescoping"):
    """Prior over ``k`` windows (sorted ascending by size)."""
    if k < 1:
        raise ValueError("need at least one window")
    if mode == "equiprobable":
        w = np.full(k, 1.0 / k)
        # 1/k is rarely exact; the last weight absorbs the rounding residue
        w[-1] = 1.0 - math.fsum(w[:-1])
        return w
    if mode != "telescoping":
        raise ValueError(f"unknown weight mode {mode!r}")
    return np.asarray([omega_weight(i) for i in range(1, k)] + [omega_tail(k - 1)])


@dataclass(frozen=True)
class WindowSpec:
    sizes: tuple
    weight_mode: str = "equiprobable"

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        if not sizes:
            raise ValueError("window set is empty")
        if len(set(sizes)) != len(sizes):
            raise ValueError(f"window sizes must be distinct, got {sizes}")
        if min(sizes) < 1:
            raise ValueError("window sizes must be positive")
        if self.weight_mode not in WEIGHT_MODES:
            raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}")
        object.__setattr__(self, "sizes", tuple(sorted(sizes)))

    def weights(self):
        return adaptive_weights(len(self.sizes), self.weight_mode)


class AdaptiveDensity:
    """Mixture of per-window density models over the trailing windows.

    Each window is modelled as a standalone series with its own level set;
    all windows share the interval. The conditional of a candidate is the
    posterior-weighted mixture of the window conditionals. Window densities
    are compared per unit length unless ``log2_scale`` (log2 of the interval
    width) converts them to original units first.
    """

    def __init__(self, history_unit, windows, cfg=None, extra_points=(), log2_scale=0.0):
        cfg = cfg or DensityConfig()
        h = np.asarray(history_unit, dtype=np.float64).ravel()
        if windows.sizes[-1] > h.size:
            raise ValueError(
                f"window {windows.sizes[-1]} exceeds available history {h.size}")
        extra = np.asarray(extra_points, dtype=np.float64).ravel()
        self.windows = windows
        self.models = []
        for n in windows.sizes:
            w = h[h.size - n:]
            levels, _ = cfg.choose_levels(np.concatenate([w, extra]))
            self.models.append(ConditionalDensity(w, levels, cfg.mixture))
        self._log_prior = np.log2(windows.weights())
        self._terms = self._log_prior + np.array(
            [m.log_joint - m.history.size * log2_scale for m in self.models])
        self.log_joint = log2_sum(self._terms)

    def log_conditional(self, candidates):
        if len(self.models) == 1:
            return self.models[0].log_conditional(candidates)
        rows = np.vstack([m.log_conditional(candidates) for m in self.models])
        return log2_sum(self._terms[:, None] + rows, axis=0) - self.log_joint

    def window_posterior(self):
        return np.exp2(self._terms - self.log_joint)


def adaptive_density_log(values, windows, cfg=None, interval=None):
    """log2 of the window mixture sum_i w_i r(last n_i values)."""
    interval, u = _unit_series(values, interval)
    return AdaptiveDensity(u, windows, cfg, log2_scale=math.log2(interval.width)).log_joint
