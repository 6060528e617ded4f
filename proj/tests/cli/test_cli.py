import csv
import datetime
import io
import json
import os
import random
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("SPILLOVER_CLI", "spillover")
DATA = Path(os.environ.get("SPILLOVER_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def run(*args, check=True):
    proc = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"exit {proc.returncode}: {proc.stderr}")
    return proc


def write_panel(path, columns, rows):
    start = datetime.date(2020, 1, 1)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["date", *columns])
        for i, row in enumerate(rows):
            w.writerow([(start + datetime.timedelta(days=i)).isoformat(), *(repr(v) for v in row)])
    return path


@pytest.fixture
def noise(tmp_path):
    rng = random.Random(7)
    rows = [[rng.gauss(0, 1) for _ in range(3)] for _ in range(300)]
    return write_panel(tmp_path / "noise.csv", ["A", "B", "C"], rows)


@pytest.fixture
def identity_fevd(tmp_path):
    path = tmp_path / "identity.csv"
    path.write_text(",a,b,c\na,1,0,0\nb,0,1,0\nc,0,0,1\n")
    return path


def test_static_conn_table_layout():
    out = run("static-conn", "-i", DATA / "synthetic3.csv", "--transform", "first-difference", "--lag", 1).stdout
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["", "ALPHA", "BETA", "GAMMA", "Receiver"]
    assert [r[0] for r in rows[1:]] == ["ALPHA", "BETA", "GAMMA", "Giver", "Inc.Own", "NET", "NPT"]
    assert rows[5][-1] == "TCI"
    shares = [[float(v) for v in r[1:4]] for r in rows[1:4]]
    for i, (r, s) in enumerate(zip(rows[1:4], shares)):
        assert sum(s) == pytest.approx(100.0, abs=0.02)
        assert float(r[4]) == pytest.approx(100.0 - s[i], abs=0.011)
    net = [float(v) for v in rows[6][1:4]]
    assert sum(net) == pytest.approx(0.0, abs=0.02)


def test_static_conn_json_and_npdc_sign():
    args = ["static-conn", "-i", DATA / "synthetic3.csv", "--transform", "first-difference", "--lag", 1,
            "--format", "json"]
    dominance = json.loads(run(*args).stdout)
    literal = json.loads(run(*args, "--npdc-raw").stdout)
    assert dominance["tci"] == literal["tci"]
    assert dominance["npdc"][0][1] == pytest.approx(-literal["npdc"][0][1])


def test_dynamic_pair_series(noise):
    out = run("dynamic-conn", "-i", noise, "--lag", 1, "--pair", "A,B", "--measure", "pci").stdout
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["date", "pci"]
    # 300 rows, one lag and the default burn-in of 30 leave 269 dates.
    assert len(rows) - 1 == 269
    assert all(0.0 <= float(v) < 1.0 for _, v in rows[1:])


def test_dynamic_rolling_window(noise):
    out = run("dynamic-conn", "-i", noise, "--lag", 1, "--window", 100, "--tci").stdout
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["date", "tci"]
    assert len(rows) - 1 == 201
    assert rows[1][0] == "2020-04-09"


def test_export_net_threshold_on_identity(identity_fevd):
    dot = run("export-net", "--fevd", identity_fevd, "--threshold", 0.5).stdout
    assert dot.startswith("digraph")
    assert "->" not in dot


def test_correlation_kinds(noise):
    out = run("corr", "-i", noise, "--kind", "kendall", "--upper").stdout
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["", "A", "B", "C"]
    assert rows[3][1] == "" and rows[3][3] == "1"
    partial = json.loads(run("corr", "-i", noise, "--kind", "var-partial", "--format", "json").stdout)
    assert partial["kind"] == "var-partial"


def test_adf_and_cointegration_json():
    adf = json.loads(run("test-adf", "-i", DATA / "synthetic3.csv", "--stars").stdout)
    assert [r["variable"] for r in adf] == ["ALPHA", "BETA", "GAMMA"]
    assert all(r["test"] == "adf" for r in adf)
    coint = json.loads(run("test-coint", "-i", DATA / "synthetic3.csv", "-x", "ALPHA", "-y", "BETA").stdout)
    assert [(r["regressand"], r["regressor"]) for r in coint] == [("ALPHA", "BETA")]
    assert coint[0]["test"] == "engle-granger"
    assert coint[0]["decision"] in ("reject", "fail-to-reject")
    both = json.loads(run("test-coint", "-i", DATA / "synthetic3.csv", "-x", "ALPHA", "-y", "BETA",
                          "--bidirectional").stdout)
    assert [(r["regressand"], r["regressor"]) for r in both] == [("ALPHA", "BETA"), ("BETA", "ALPHA")]


def test_chow_is_reproducible(noise):
    args = ["test-chow", "-i", noise, "--lag", 1, "--reps", 99, "--seed", 3]
    assert run(*args).stdout == run(*args, "--threads", 2).stdout


def test_usage_error_exit_code(noise):
    assert run("corr", "-i", noise, "--kind", "bogus", check=False).returncode == 1
    assert run("static-conn", "--no-such-flag", check=False).returncode == 1


def test_data_error_exit_code(tmp_path):
    assert run("static-conn", "-i", tmp_path / "missing.csv", check=False).returncode == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("date,A\n2020-01-01,1\n2020-01-01,2\n")
    proc = run("describe", "-i", bad, check=False)
    assert proc.returncode == 2
    assert "duplicate date" in proc.stderr


def test_numerical_error_exit_code(tmp_path):
    rng = random.Random(3)
    rows = []
    for _ in range(200):
        a = rng.gauss(0, 1)
        rows.append([a, 2 * a])
    path = write_panel(tmp_path / "collinear.csv", ["A", "B"], rows)
    assert run("static-conn", "-i", path, "--lag", 1, check=False).returncode == 3


def test_run_config(tmp_path):
    config = json.loads((DATA / "synthetic3.json").read_text())
    config["inputs"][0]["path"] = str(DATA / "synthetic3.csv")
    config["output"]["directory"] = str(tmp_path / "out")
    config["tests"]["chow"]["bootstrap_reps"] = 99
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    artifact_dir = Path(run("run", "-c", path).stdout.strip())
    manifest = json.loads((artifact_dir / "manifest.json").read_text())
    assert len(manifest["stages"]) == 8
    assert (artifact_dir / "network.dot").exists()
