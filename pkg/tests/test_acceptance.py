"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary (and to stdout when run with ``-s``).
"""
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE, all_words
from ufcast.density import ConditionalDensity, DensityConfig, Interval, adaptive_weights
from ufcast.evaluation import (
    ExperimentPlan,
    SyntheticSource,
    entropy_rate,
    generate,
    inertial_forecast,
    random_walk,
    run_evaluation,
)
from ufcast.forecast import ForecastConfig, forecast_one
from ufcast.io import write_series_csv
from ufcast.measure import (
    MixtureConfig,
    empirical_log_loss,
    kt_block_log,
    kt_sequential_log,
    omega_tail,
    omega_weight,
    r_measure_log,
)


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    assert ok, line


def test_01_normalization():
    start = time.perf_counter()
    worst = 0.0
    for t in range(1, 11):
        words = [list(u) for u in all_words(2, t)]
        for m in range(4):
            total = math.fsum(2.0 ** kt_block_log(u, m, 2) for u in words)
            worst = max(worst, abs(total - 1.0))
        for mix in (MixtureConfig(), MixtureConfig(max_order=3, exact_tail=False)):
            total = math.fsum(2.0 ** r_measure_log(u, mix, 2) for u in words)
            worst = max(worst, abs(total - 1.0))
    elapsed = time.perf_counter() - start
    record(1, "normalization", worst <= 1e-9 and elapsed < 10,
           f"max |sum - 1| = {worst:.2e}, {elapsed:.2f} s")


def test_02_gamma_vs_sequential():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        size = int(rng.integers(2, 5))
        seq = rng.integers(size, size=int(rng.integers(1, 1001)))
        m = int(rng.integers(0, 5))
        worst = max(worst, abs(kt_block_log(seq, m, size) - kt_sequential_log(seq, m, size)))
    elapsed = time.perf_counter() - start
    record(2, "gamma form vs sequential", worst <= 1e-10 and elapsed < 5,
           f"max diff = {worst:.2e} bits, {elapsed:.2f} s")


def test_03_measure_consistency():
    rng = np.random.default_rng(7)
    worst = 0.0
    for k in range(1000):
        size = int(rng.integers(2, 5))
        seq = rng.integers(size, size=int(rng.integers(0, 40))).tolist()
        mix = MixtureConfig(max_order=int(rng.integers(0, 8)), exact_tail=bool(k % 2))
        parent = r_measure_log(seq, mix, size)
        kids = [r_measure_log(seq + [a], mix, size) for a in range(size)]
        ratio = math.fsum(2.0 ** (np.asarray(kids) - parent))
        worst = max(worst, abs(ratio - 1.0))
    record(3, "measure consistency", worst <= 1e-9, f"max relative gap = {worst:.2e}")


def test_04_omega_identities():
    s = comp = 0.0
    worst = 0.0
    for k in range(1, 10_001):
        y = omega_weight(k) - comp
        t = s + y
        comp = (t - s) - y
        s = t
        worst = max(worst, abs(s + omega_tail(k) - 1.0))
    exact = all(math.fsum(adaptive_weights(k, mode)) == 1.0
                for k in range(1, 101) for mode in ("telescoping", "equiprobable"))
    record(4, "omega identities", worst <= 1e-12 and exact,
           f"telescoping gap {worst:.2e}, adaptive weights exact: {exact}")


def test_05_universality():
    cases = [("iid(0.7)", SyntheticSource.iid([0.7, 0.3], seed=1), 0.88129, 0.02),
             ("stay-0.9 chain", SyntheticSource.sticky(0.9, seed=1), 0.46900, 0.03)]
    ok, parts = True, []
    for name, src, target, tol in cases:
        assert entropy_rate(src) == pytest.approx(target, abs=1e-5)
        x = generate(src, 20_000)
        start = time.perf_counter()
        loss = empirical_log_loss(x, alphabet=2)
        elapsed = time.perf_counter() - start
        ok &= abs(loss - target) <= tol and elapsed < 30
        parts.append(f"{name} {loss:.5f} vs {target} ({elapsed:.2f} s)")
    record(5, "universality", ok, "; ".join(parts))


def test_06_density_integration():
    rng = np.random.default_rng(6)
    level_cap = 12
    worst = 0.0
    for _ in range(50):
        t = int(rng.integers(1, 201))
        kind = rng.integers(3)
        if kind == 0:
            hist = rng.random(t)
        elif kind == 1:
            hist = np.clip(0.5 + 0.1 * rng.standard_normal(t), 0, 1)
        else:
            hist = rng.integers(0, 7, size=t) / 6.0
        levels, _ = DensityConfig(max_level=level_cap).choose_levels(hist)
        model = ConditionalDensity(hist, levels)
        top = max(levels)
        mids = (np.arange(2 ** top) + 0.5) / 2 ** top
        integral = math.fsum(np.exp2(model.log_conditional(mids)) / 2 ** top)
        worst = max(worst, abs(integral - 1.0))
    record(6, "density integration", worst <= 1e-6, f"max |integral - 1| = {worst:.2e}")


def test_07_forecast_sanity():
    rng = np.random.default_rng(77)
    hits = 0
    for _ in range(100):
        width = float(rng.uniform(1, 100))
        lo = float(rng.uniform(-50, 50))
        ks = rng.choice(np.arange(1, 100), size=3, replace=False)
        cycle = lo + ks * width / 100
        phase = int(rng.integers(3))
        x = np.array([cycle[(phase + j) % 3] for j in range(61)])
        cfg = ForecastConfig(interval=Interval(lo, lo + width))
        f = forecast_one(x[:60], cfg)
        hits += abs(f.point - x[60]) <= width / 2 ** max(f.levels)
    series = [4.0, -1.5, 2.25]
    inertial_ok = inertial_forecast(series) == 2.25
    record(7, "forecast sanity", hits >= 95 and inertial_ok,
           f"{hits}/100 within one finest bin; inertial exact: {inertial_ok}")


def test_08_random_walk_parity():
    x = random_walk(2100, seed=0)
    plan = ExperimentPlan((2000,), experiments=100)
    rep = run_evaluation(x, plan)
    res = rep.results[0]
    ratio = res.mae / res.baseline_mae
    record(8, "random-walk parity", abs(ratio - 1.0) <= 0.10,
           f"MAE {res.mae:.4f} vs inertial {res.baseline_mae:.4f} (ratio {ratio:.3f})")


def _cli(*args):
    proc = subprocess.run([sys.executable, "-m", "ufcast", *args], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


@pytest.fixture(scope="module")
def walk_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("data") / "walk.csv"
    write_series_csv(p, random_walk(1200, seed=3), name="level")
    return p


def test_09_protocol_shape(walk_file, tmp_path):
    common = ["--input", str(walk_file), "--lengths", "500,1000", "--experiments", "10"]
    out = _cli("compare", *common, "--output", str(tmp_path / "cmp"))
    rows = (tmp_path / "cmp" / "comparison.csv").read_text().splitlines()
    compare_ok = (rows[0] == "Forecasting method,500,1000"
                  and [r.split(",")[0] for r in rows[1:]] == ["R", "Inertial"]
                  and all(len(r.split(",")) == 3 for r in rows)
                  and "Comparison with the inertial method" in out)
    _cli("evaluate", *common, "--adaptive", "--output", str(tmp_path / "ev"))
    rows = (tmp_path / "ev" / "mae.csv").read_text().splitlines()
    rep = json.loads((tmp_path / "ev" / "report.json").read_text())
    labels = [c["label"] for c in rep["evaluation"]["configurations"]]
    evaluate_ok = (rows[0] == "Time series,Range,Adapt.,500,1000" and len(rows) == 2
                   and "n/d" not in rows[1] and labels == ["500", "1000", "adaptive"])
    record(9, "protocol shape", compare_ok and evaluate_ok,
           f"compare table ok: {compare_ok}; evaluate table ok: {evaluate_ok}")


def test_10_determinism(walk_file, tmp_path):
    runs = {
        "forecast": ["--horizon", "3"],
        "evaluate": ["--lengths", "300,600", "--adaptive", "--experiments", "5", "--transform", "diff"],
        "compare": ["--lengths", "300,600", "--experiments", "5", "--horizon", "2"],
    }
    same = {}
    for cmd, extra in runs.items():
        blobs = []
        for k in range(2):
            out = tmp_path / f"{cmd}{k}"
            stdout = _cli(cmd, "--input", str(walk_file), "--seed", "9", "--output", str(out), *extra)
            blobs.append([stdout] + [f.read_bytes() for f in sorted(out.iterdir())])
        same[cmd] = blobs[0] == blobs[1]
    record(10, "determinism", all(same.values()),
           ", ".join(f"{k} identical: {v}" for k, v in same.items()))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
