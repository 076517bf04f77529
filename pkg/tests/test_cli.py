import csv
import math

import pytest

from floquetheat.cli import _format, _overrides, build_parser, main

CONFIG = """
threads = 1

[model]
mass = [[1.0]]
v_static = [[1.2]]
renormalized = true
drive_freq = 0.5
time_reversal_invariant = true

[[reservoirs]]
name = "hot"
sites = [0]
temperature = 0.5
spectral = {family = "power_law", strength = 0.05, exponent = 1, cutoff = 1.5, sharpness = 0.1}

[[reservoirs]]
name = "cold"
sites = [0]
temperature = 0.2
spectral = {family = "power_law", strength = 0.03, exponent = 1, cutoff = 1.8, sharpness = 0.1}
"""

DRIVE = """
[[model.drive]]
k = 1
matrix = [[0.03]]
"""


def _write(tmp_path, text):
    path = tmp_path / "run.toml"
    path.write_text(text)
    return path


def _read_csv(path):
    lines = path.read_text().splitlines()
    comments = dict(line[2:].split(": ", 1) for line in lines if line.startswith("# "))
    rows = list(csv.DictReader(line for line in lines if not line.startswith("#")))
    return comments, rows


def test_formatting():
    assert _format(True) == "true"
    assert _format(0.5) == "5.000000000000e-01"
    assert _format(math.nan) == "nan"
    assert _format("hot") == "hot"


def test_flags_become_overrides():
    args = build_parser().parse_args(
        ["heat-rates", "--kmax", "4", "--tol", "1e-6", "--out", "results", "--zero-nrh", "--lambda", "2"]
    )
    assert _overrides(args) == {
        "solver": {"k_max": 4, "rel_tol": 1e-6},
        "output": {"directory": "results"},
        "cooling": {"zero_nrh": True},
        "scan": {"lambda_alpha": 2.0},
    }
    assert _overrides(build_parser().parse_args(["validate"])) == {}


def test_unknown_command():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["simulate"])
    assert info.value.code == 2


def test_configuration_errors_exit_with_2(tmp_path, capsys):
    path = _write(tmp_path, CONFIG.replace("temperature = 0.2", "temperature = -0.2"))
    assert main(["heat-rates", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert "reservoirs.1.temperature" in capsys.readouterr().err
    assert main(["validate", "--config", str(tmp_path / "missing.toml")]) == 2
    assert not (tmp_path / "heat-rates.csv").exists()


def test_heat_rates_between_two_baths(tmp_path):
    path = _write(tmp_path, CONFIG)
    assert main(["heat-rates", "--config", str(path), "--out", str(tmp_path)]) == 0
    comments, rows = _read_csv(tmp_path / "heat-rates.csv")
    assert set(comments) == {"config_hash", "abs_tol", "rel_tol", "k_max"}
    assert comments["k_max"] == "0"
    assert [row["reservoir"] for row in rows] == ["hot", "cold"]
    hot, cold = (float(row["total"]) for row in rows)
    assert hot > 0
    assert cold == pytest.approx(-hot, rel=1e-6)
    assert float(rows[0]["work_rate"]) == 0


def test_same_configuration_gives_the_same_bytes(tmp_path):
    path = _write(tmp_path, CONFIG + "\n[scan]\ntemperatures = [0.3, 0.4]\n")
    first, second = tmp_path / "first", tmp_path / "second"
    assert main(["heat-rates", "--config", str(path), "--out", str(first)]) == 0
    assert main(["heat-rates", "--config", str(path), "--out", str(second)]) == 0
    assert (first / "heat-rates.csv").read_bytes() == (second / "heat-rates.csv").read_bytes()
    _, rows = _read_csv(first / "heat-rates.csv")
    assert [float(row["temperature"]) for row in rows] == [0.3, 0.3, 0.4, 0.4]


@pytest.mark.slow
def test_validation_suite_passes_on_a_driven_oscillator(tmp_path, capsys):
    path = _write(tmp_path, CONFIG + DRIVE)
    assert main(["validate", "--config", str(path), "--out", str(tmp_path), "--kmax", "6"]) == 0
    out = capsys.readouterr().out
    for check in ["first_law", "second_law", "rh_sign[hot]", "nrh_sign[cold]", "symmetries", "heisenberg", "work_rate"]:
        assert f"PASS {check} " in out
    comments, rows = _read_csv(tmp_path / "validate.csv")
    assert comments["failed"] == "0"
    assert all(row["passed"] == "true" for row in rows)
