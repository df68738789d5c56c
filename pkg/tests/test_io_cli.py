import json
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from ufcast.cli import main
from ufcast.io import ConfigError, DataError, REPORT_SCHEMA, RunConfig, fmt, ingest_csv, write_series_csv
from ufcast.evaluation import random_walk


@pytest.fixture
def walk_csv(tmp_path):
    p = tmp_path / "walk.csv"
    write_series_csv(p, random_walk(700, seed=11), name="level")
    return p


def test_ingest_examples(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("1.0\n2.0\n3.0\n")
    ds = ingest_csv(p)
    assert ds.column("0").tolist() == [1.0, 2.0, 3.0]
    assert ds.rows == 3

    p.write_text("level,residual\n10,0.5\n11,-0.25\n")
    assert ingest_csv(p, "residual").column("residual").tolist() == [0.5, -0.25]
    assert ingest_csv(p, 0).column("level").tolist() == [10.0, 11.0]

    p.write_text("1.0\nabc\n3.0\n")
    with pytest.raises(DataError, match="line 2"):
        ingest_csv(p)


def test_ingest_missing_cells(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("v,r\n1,0.1\n,0.2\n3,NaN\n4,0.4\n")
    with pytest.raises(DataError, match="line 3"):
        ingest_csv(p, "v")
    ds = ingest_csv(p, "v", drop_missing=True, extra_columns=("r",))
    assert ds.column("v").tolist() == [1.0, 4.0]
    assert ds.column("r").tolist() == [0.1, 0.4]
    assert ds.dropped == 2


def test_ingest_errors(tmp_path):
    with pytest.raises(DataError):
        ingest_csv(tmp_path / "absent.csv")
    p = tmp_path / "e.csv"
    p.write_text("")
    with pytest.raises(DataError):
        ingest_csv(p)
    p.write_text("a,b\n1,2\n")
    with pytest.raises(DataError):
        ingest_csv(p, "c")
    with pytest.raises(DataError):
        ingest_csv(p, 5)
    p.write_text("1,2\n")
    with pytest.raises(DataError):
        ingest_csv(p, "name")


def test_fmt_round_trips():
    for v in (0.1, 1 / 3, 1e-300, 2.0 ** 60, -0.0):
        assert float(fmt(v)) == v


configs = st.builds(
    RunConfig,
    input=st.one_of(st.none(), st.text(min_size=1, max_size=8)),
    column=st.sampled_from(["0", "1", "level"]),
    drop_missing=st.booleans(),
    range=st.one_of(st.none(), st.tuples(st.floats(-1e6, 0), st.floats(1, 1e6)).map(list)),
    grid_step=st.floats(1e-4, 0.5),
    windows=st.one_of(st.none(), st.lists(st.integers(2, 5000), min_size=1, max_size=5, unique=True)),
    weight_mode=st.sampled_from(["telescoping", "equiprobable"]),
    adaptive=st.booleans(),
    max_order=st.integers(0, 64),
    exact_tail=st.booleans(),
    max_level=st.integers(1, 30),
    horizon=st.integers(1, 10),
    transform=st.sampled_from(["none", "diff"]),
    lengths=st.one_of(st.none(), st.lists(st.integers(2, 5000), min_size=1, max_size=5, unique=True)),
    experiments=st.integers(1, 50),
    stride=st.one_of(st.none(), st.integers(1, 10)),
    seed=st.integers(0, 2 ** 31),
)


@settings(max_examples=200)
@given(configs)
def test_config_round_trip(cfg):
    assert cfg.problems() == []
    assert RunConfig.from_json(cfg.to_json()) == cfg


def test_config_problems_enumerated():
    cfg = RunConfig(grid_step=-1, max_level=0, horizon=0, transform="log")
    probs = cfg.problems("evaluate")
    assert len(probs) >= 5
    with pytest.raises(ConfigError) as err:
        cfg.validate("evaluate")
    assert err.value.problems == probs
    with pytest.raises(ConfigError):
        RunConfig.from_json('{"bogus": 1}')
    with pytest.raises(ConfigError):
        RunConfig.from_json("[1, 2]")


# command line

def test_forecast_constant(tmp_path, capsys):
    p = tmp_path / "c.csv"
    p.write_text("\n".join(["42.0"] * 50) + "\n")
    out = tmp_path / "out"
    assert main(["forecast", "--input", str(p), "--horizon", "1", "--output", str(out)]) == 0
    printed = float(capsys.readouterr().out.strip())
    # interval [39.9, 44.1], grid step 0.042: half a step at most
    assert printed == pytest.approx(42.0, abs=0.021)
    rep = json.loads((out / "forecast.json").read_text())
    assert rep["schema"] == REPORT_SCHEMA
    assert rep["forecasts"][0]["point"] == printed
    rows = (out / "scores.csv").read_text().splitlines()
    assert rows[0] == "step,candidate,density" and len(rows) == 102


def test_evaluate_table_shape(walk_csv, tmp_path, capsys):
    out = tmp_path / "ev"
    rc = main(["evaluate", "--input", str(walk_csv), "--lengths", "200,400", "--adaptive",
               "--experiments", "5", "--output", str(out)])
    assert rc == 0
    rows = (out / "mae.csv").read_text().splitlines()
    assert rows[0] == "Time series,Range,Adapt.,200,400"
    assert len(rows) == 2 and len(rows[1].split(",")) == 5
    rep = json.loads((out / "report.json").read_text())
    labels = [c["label"] for c in rep["evaluation"]["configurations"]]
    assert labels == ["200", "400", "adaptive"]
    assert rep["config"]["stride"] == 1 and "output" not in rep["config"]


def test_compare_table_shape(walk_csv, tmp_path, capsys):
    out = tmp_path / "cmp"
    rc = main(["compare", "--input", str(walk_csv), "--lengths", "200,400",
               "--experiments", "5", "--output", str(out)])
    assert rc == 0
    assert "Comparison with the inertial method" in capsys.readouterr().out
    rows = [r.split(",") for r in (out / "comparison.csv").read_text().splitlines()]
    assert rows[0] == ["Forecasting method", "200", "400"]
    assert [r[0] for r in rows[1:]] == ["R", "Inertial"]
    assert all(len(r) == 3 for r in rows)


def test_config_file_and_flag_override(walk_csv, tmp_path):
    conf = tmp_path / "run.json"
    conf.write_text(RunConfig(input=str(walk_csv), lengths=[100], experiments=3, horizon=2).to_json())
    out = tmp_path / "o"
    assert main(["evaluate", "--config", str(conf), "--experiments", "2", "--output", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["config"]["experiments"] == 2 and rep["config"]["horizon"] == 2
    assert len(rep["evaluation"]["configurations"][0]["targets"]) == 4


def test_exit_codes(walk_csv, tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1\nfoo\n")
    assert main(["forecast", "--input", str(bad)]) == 3
    assert main(["forecast", "--input", str(tmp_path / "none.csv")]) == 3
    assert main(["forecast"]) == 2
    assert main(["evaluate", "--input", str(walk_csv)]) == 2
    assert main(["evaluate", "--input", str(walk_csv), "--lengths", "600", "--experiments", "500"]) == 2
    assert main(["forecast", "--input", str(walk_csv), "--range", "0:1"]) == 3
    assert main(["forecast", "--input", str(walk_csv), "--grid-step", "-1", "--max-level", "0"]) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err[-1].split("; ")) == 2
    with pytest.raises(SystemExit) as ex:
        main(["forecast", "--horizon", "x"])
    assert ex.value.code == 2


def test_generate_command(tmp_path):
    p = tmp_path / "g.csv"
    assert main(["generate", "--kind", "markov", "--length", "100", "--output", str(p)]) == 0
    assert ingest_csv(p, "value").rows == 100


@pytest.mark.parametrize("command", ["forecast", "evaluate", "compare"])
def test_byte_identical_reports(command, walk_csv, tmp_path):
    extra = [] if command == "forecast" else ["--lengths", "100,300", "--adaptive", "--experiments", "4"]
    outputs = []
    for k in range(2):
        out = tmp_path / f"r{k}"
        proc = subprocess.run([sys.executable, "-m", "ufcast", command, "--input", str(walk_csv),
                               "--seed", "5", "--horizon", "2", "--output", str(out)] + extra,
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outputs.append({f.name: f.read_bytes() for f in sorted(out.iterdir())} | {"stdout": proc.stdout})
    assert outputs[0] == outputs[1]
