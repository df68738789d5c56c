"""Rolling-origin evaluation against baselines, and synthetic sources.

Each configuration (one history length, or the adaptive window mixture
over all lengths) is run on the same rolling origins: origin ``j`` predicts
the target indices ``o_j .. o_j + H - 1`` from the values strictly before
``o_j``. The last experiment ends at the end of the dataset and origins
are ``stride`` apart, so targets are disjoint whenever ``stride >= H``.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .density import WindowSpec
from .forecast import ForecastConfig, forecast_multi


class PlanError(ValueError):
    pass


def inertial_forecast(series):
    """The last observed value."""
    x = np.asarray(series, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("inertial forecast of an empty series")
    return float(x[-1])


def mae(forecasts, actuals):
    f = np.asarray(forecasts, dtype=np.float64).ravel()
    a = np.asarray(actuals, dtype=np.float64).ravel()
    if f.size != a.size:
        raise ValueError(f"length mismatch: {f.size} forecasts vs {a.size} actuals")
    if f.size == 0:
        raise ValueError("MAE of nothing")
    return float(np.mean(np.abs(f - a)))


@dataclass(frozen=True)
class ExperimentPlan:
    """Protocol of one evaluation run.

    ``baseline`` is ``"inertial"`` or ``"column:NAME"``; with the latter the
    baseline error at a target index is the absolute residual stored in
    column NAME.
    """

    lengths: tuple
    experiments: int = 10
    adaptive: bool = False
    horizon: int = 1
    stride: int = None
    baseline: str = "inertial"
    weight_mode: str = "equiprobable"

    def __post_init__(self):
        lengths = tuple(int(n) for n in self.lengths)
        object.__setattr__(self, "lengths", lengths)
        if self.stride is None:
            object.__setattr__(self, "stride", int(self.horizon))
        problems = self.problems()
        if problems:
            raise PlanError("; ".join(problems))

    def problems(self, size=None):
        out = []
        if not self.lengths:
            out.append("lengths must be non-empty")
        elif min(self.lengths) < 2:
            out.append("every length must be >= 2")
        if len(set(self.lengths)) != len(self.lengths):
            out.append("lengths must be distinct")
        if self.experiments < 1:
            out.append("experiments must be >= 1")
        if self.horizon < 1:
            out.append("horizon must be >= 1")
        if self.stride is not None and self.stride < 1:
            out.append("stride must be >= 1")
        if not (self.baseline == "inertial" or
                (self.baseline.startswith("column:") and len(self.baseline) > 7)):
            out.append(f"baseline must be 'inertial' or 'column:NAME', got {self.baseline!r}")
        if size is not None and self.lengths and not out:
            need = self.required_size()
            if need > size:
                out.append(f"plan needs {need} values (max length {max(self.lengths)} + "
                           f"{self.experiments} experiments), dataset has {size}")
        return out

    def required_size(self):
        return max(self.lengths) + (self.experiments - 1) * self.stride + self.horizon

    @property
    def baseline_column(self):
        return self.baseline[7:] if self.baseline.startswith("column:") else None

    def origins(self, size):
        last = size - self.horizon
        return [last - (self.experiments - 1 - j) * self.stride for j in range(self.experiments)]


@dataclass
class ConfigResult:
    label: str
    windows: tuple
    targets: list
    forecasts: list
    actuals: list
    errors: list
    baseline_errors: list

    @property
    def mae(self):
        return float(np.mean(self.errors))

    @property
    def baseline_mae(self):
        return float(np.mean(self.baseline_errors))

    def to_dict(self):
        return {
            "label": self.label,
            "windows": list(self.windows),
            "mae": self.mae,
            "baseline_mae": self.baseline_mae,
            "targets": list(self.targets),
            "forecasts": list(self.forecasts),
            "actuals": list(self.actuals),
            "errors": list(self.errors),
            "baseline_errors": list(self.baseline_errors),
        }


@dataclass
class EvaluationReport:
    plan: ExperimentPlan
    baseline_label: str
    results: list = field(default_factory=list)

    def by_label(self):
        return {r.label: r for r in self.results}

    def to_dict(self):
        return {
            "baseline": self.baseline_label,
            "configurations": [r.to_dict() for r in self.results],
        }


def _threads():
    raw = os.environ.get("UF_THREADS")
    if raw:
        return max(1, int(raw))
    return min(4, os.cpu_count() or 1)


def run_evaluation(series, plan, cfg=None, baseline_values=None, threads=None):
    """Run every configuration of ``plan`` on ``series``.

    ``baseline_values`` supplies the residual column when the plan's
    baseline is an external column.
    """
    cfg = cfg or ForecastConfig()
    x = np.asarray(series, dtype=np.float64).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-numeric or missing values")
    problems = plan.problems(x.size)
    if plan.baseline_column is not None:
        if baseline_values is None:
            problems.append(f"baseline column {plan.baseline_column!r} not supplied")
        elif len(baseline_values) != x.size:
            problems.append("baseline column length differs from the series")
    if problems:
        raise PlanError("; ".join(problems))
    if plan.baseline_column is not None:
        resid = np.asarray(baseline_values, dtype=np.float64)

    configs = [(str(n), (n,), replace(cfg, windows=None)) for n in plan.lengths]
    if plan.adaptive:
        win = WindowSpec(plan.lengths, plan.weight_mode)
        configs.append(("adaptive", win.sizes, replace(cfg, windows=win)))

    origins = plan.origins(x.size)
    jobs = []
    for label, sizes, c in configs:
        hist = max(sizes)
        for o in origins:
            jobs.append((c, x[o - hist:o]))

    def work(job):
        c, h = job
        return forecast_multi(h, plan.horizon, c, sliding=True)

    n_threads = threads or _threads()
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as ex:
            outputs = list(ex.map(work, jobs))
    else:
        outputs = [work(j) for j in jobs]

    label = "Inertial" if plan.baseline_column is None else plan.baseline_column
    report = EvaluationReport(plan=plan, baseline_label=label)
    k = 0
    for name, sizes, _ in configs:
        res = ConfigResult(name, sizes, [], [], [], [], [])
        for o in origins:
            preds = outputs[k]
            k += 1
            for step, p in enumerate(preds):
                idx = o + step
                res.targets.append(idx)
                res.forecasts.append(float(p))
                res.actuals.append(float(x[idx]))
                res.errors.append(abs(float(p) - float(x[idx])))
                if plan.baseline_column is None:
                    res.baseline_errors.append(abs(inertial_forecast(x[:o]) - float(x[idx])))
                else:
                    res.baseline_errors.append(abs(float(resid[idx])))
        report.results.append(res)
    return report


# --------------------------------------------------------------------------
# synthetic sources
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SyntheticSource:
    """``kind="iid"`` uses ``probabilities``; ``kind="markov"`` uses
    ``transitions`` with one row per context of length ``order``
    (contexts enumerated base-|A|, oldest symbol most significant)."""

    kind: str
    probabilities: tuple = None
    transitions: tuple = None
    order: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.kind == "iid":
            p = np.asarray(self.probabilities, dtype=np.float64)
            if p.ndim != 1 or p.size < 2 or np.any(p < 0) or not math.isclose(p.sum(), 1.0):
                raise ValueError("iid probabilities must be a distribution over >= 2 symbols")
        elif self.kind == "markov":
            m = np.asarray(self.transitions, dtype=np.float64)
            if m.ndim != 2 or np.any(m < 0) or not np.allclose(m.sum(axis=1), 1.0):
                raise ValueError("transition matrix must be row-stochastic")
            if m.shape[0] != m.shape[1] ** self.order:
                raise ValueError("need |A|**order rows")
        else:
            raise ValueError(f"unknown source kind {self.kind!r}")

    @property
    def alphabet_size(self):
        if self.kind == "iid":
            return len(self.probabilities)
        return np.asarray(self.transitions).shape[1]

    @classmethod
    def iid(cls, probabilities, seed=0):
        return cls("iid", probabilities=tuple(probabilities), seed=seed)

    @classmethod
    def sticky(cls, stay, seed=0):
        """Binary order-1 chain that repeats its last symbol with prob ``stay``."""
        return cls("markov", transitions=((stay, 1 - stay), (1 - stay, stay)), order=1, seed=seed)


def generate(source, t):
    """Draw ``t`` symbols from ``source`` (reproducible given its seed)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    rng = np.random.default_rng(source.seed)
    size = source.alphabet_size
    if source.kind == "iid":
        return rng.choice(size, size=t, p=np.asarray(source.probabilities))
    m = np.asarray(source.transitions, dtype=np.float64)
    u = rng.random(t)
    cum = np.cumsum(m, axis=1)
    out = np.empty(t, dtype=np.int64)
    k = source.order
    out[:k] = rng.integers(size, size=min(k, t))
    ctx = 0
    for j in range(min(k, t)):
        ctx = ctx * size + out[j]
    n_ctx = size ** k
    for j in range(k, t):
        a = int(np.searchsorted(cum[ctx], u[j], side="right"))
        a = min(a, size - 1)
        out[j] = a
        ctx = (ctx * size + a) % n_ctx
    return out


def _entropy(p):
    p = np.asarray(p, dtype=np.float64)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def entropy_rate(source):
    """Exact entropy rate in bits per symbol."""
    if source.kind == "iid":
        return _entropy(source.probabilities)
    m = np.asarray(source.transitions, dtype=np.float64)
    size = m.shape[1]
    n_ctx = m.shape[0]
    # chain over contexts: ctx -> (ctx*|A| + a) mod n_ctx
    big = np.zeros((n_ctx, n_ctx))
    for c in range(n_ctx):
        for a in range(size):
            big[c, (c * size + a) % n_ctx] += m[c, a]
    vals, vecs = np.linalg.eig(big.T)
    pi = np.real(vecs[:, np.argmin(np.abs(vals - 1.0))])
    pi = pi / pi.sum()
    return float(sum(pi[c] * _entropy(m[c]) for c in range(n_ctx)))


def random_walk(t, seed=0, scale=1.0, start=0.0):
    """Symmetric Gaussian random walk of length ``t``."""
    rng = np.random.default_rng(seed)
    return start + np.cumsum(rng.normal(scale=scale, size=t))
