import csv
import subprocess
import sys

import pytest

from hamcone.cli import run
from hamcone.config import load_config, parse_config


@pytest.fixture()
def small_config(tmp_path, config_path):
    text = open(config_path).read()
    text = text.replace("n = 257", "n = 129")
    text = text.replace("lambda1 = 0.1, 1, 10", "lambda1 = 10, 1").replace("lambda2 = 0.1, 1, 10", "lambda2 = 1, 0.1")
    path = tmp_path / "small.ini"
    path.write_text(text)
    return str(path)


def test_check_example(config_path, capsys):
    assert run(["check", "--config", config_path]) == 0
    out = capsys.readouterr().out
    assert "gamma*_2 = 0.625" in out
    assert "c_2 = 0.510204" in out
    assert "gamma_2,* = 0.339286" in out
    assert "all hypotheses hold" in out


def test_lambda_range(config_path, capsys):
    assert run(["lambda-range", "--config", config_path]) == 0
    out = capsys.readouterr().out
    assert out.count("unbounded") == 2


def test_constants(config_path, tmp_path, capsys):
    out_csv = tmp_path / "c.csv"
    assert run(["constants", "--config", config_path, "--out", str(out_csv)]) == 0
    rows = list(csv.DictReader(open(out_csv)))
    assert float(rows[0]["gamma_star"]) == pytest.approx(1.5)
    assert float(rows[1]["gamma_lower"]) == pytest.approx(19 / 56, abs=1e-8)
    assert "closed form: b2 = 0.571428571429" in capsys.readouterr().out


def test_solve_writes_solution(small_config, tmp_path):
    out_csv = tmp_path / "u.csv"
    assert run(["solve", "--config", small_config, "--out", str(out_csv)]) == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "t,u1,u2" and len(lines) == 130
    t, u1, u2 = lines[1].split(",")
    assert float(t) == 0.0 and float(u2) > 0.9
    assert u1 == format(float(u1), ".17g")


def test_solve_deterministic(small_config, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["solve", "--config", small_config, "--out", str(a)]) == 0
    assert run(["solve", "--config", small_config, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_solve_monotone(small_config, capsys):
    assert run(["solve", "--config", small_config, "--method", "monotone"]) == 0
    out = capsys.readouterr().out
    assert "from lower solution" in out and "from upper solution" in out


def test_solve_rejects_nonpositive_lambda(tmp_path, config_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text(open(config_path).read().replace("lambda = 1\n", "lambda = -1\n", 1))
    assert run(["solve", "--config", str(bad)]) == 2
    assert "(H1)" in capsys.readouterr().err


def test_missing_file(capsys):
    assert run(["check", "--config", "/nonexistent.ini"]) == 2


def test_bad_grid_flag(config_path):
    assert run(["solve", "--config", config_path, "--grid", "100"]) == 2


def test_unknown_command(config_path, capsys):
    assert run(["frobnicate", "--config", config_path]) == 2


def test_dump_config_round_trip(config_path, capsys):
    assert run(["solve", "--config", config_path, "--grid", "65", "--dump-config"]) == 0
    dumped = capsys.readouterr().out
    cfg = parse_config(dumped)
    assert cfg == load_config(config_path).with_overrides(n=65)


def test_sweep(small_config, tmp_path):
    out_csv = tmp_path / "s.csv"
    assert run(["sweep", "--config", small_config, "--out", str(out_csv)]) == 0
    rows = list(csv.reader(open(out_csv)))
    assert rows[0] == ["lambda1", "lambda2", "converged", "residual", "norm", "region"]
    keys = [(float(r[0]), float(r[1])) for r in rows[1:]]
    assert keys == sorted(keys) and len(keys) == 4
    assert all(r[2] == "true" for r in rows[1:])


def test_module_entry_point(config_path):
    proc = subprocess.run([sys.executable, "-m", "hamcone", "lambda-range", "--config", config_path],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "unbounded" in proc.stdout
