import csv
import json
import subprocess
import sys

import pytest

from affinefourier.cli import COMMANDS, run

PHI = '{"poly": "x^2 - x - 1"}'


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_det_cylinder_prints_quarter(tmp_path, capsys):
    spec = '{"kernel": {"variant": "diagonal", "p": 0.5}, "F": [1, 2], "xi": [1, 0]}'
    assert run(["det-cylinder", "--spec", spec, "--out", str(tmp_path / "c")]) == 0
    assert capsys.readouterr().out.strip() == "0.25"


def test_erdos_scan_artifacts(tmp_path):
    out = tmp_path / "scan"
    assert run(["erdos-scan", "--spec", PHI, "--kmax", "8", "--out", str(out)]) == 0
    rows = read_csv(out.with_suffix(".csv"))
    assert rows[0] == ["k", "re", "im", "abs", "split_residual", "depth"]
    assert len(rows) == 10
    header = json.loads(out.with_suffix(".json").read_text())
    assert header["results"]["N"] == 4 and header["results"]["certified_bound"] > 0
    assert header["spec"] == json.loads(PHI)
    # 17-significant-digit round trip
    for row in rows[1:]:
        for v in row[1:5]:
            assert repr(float(v)) == v


def test_malformed_polynomial(tmp_path):
    out = tmp_path / "bad"
    assert run(["pisot-trace", "--spec", '{"poly": "x^2-+x"}', "--out", str(out)]) == 2
    assert not out.with_suffix(".csv").exists()


def test_malformed_json_and_unknown_command(tmp_path):
    assert run(["pisot-trace", "--spec", "{not json", "--out", str(tmp_path / "x")]) == 2
    assert run(["no-such-command"]) == 2


def test_numeric_failure_exit(tmp_path):
    spec = '{"ifs": {"dim": 1, "A": [1.000001], "B": [[0], [1]]}, "xi": [[1000000]]}'
    assert run(["ifs-transform", "--spec", spec, "--tol", "1e-300", "--out", str(tmp_path / "n")]) == 3


def test_deterministic_body(tmp_path):
    spec = '{"ifs": {"dim": 1, "A": [3], "B": [[-1], [1]]}, "xi": [[1], [2]], "samples": 5000}'
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["ifs-transform", "--spec", spec, "--seed", "7", "--out", str(a)]) == 0
    assert run(["ifs-transform", "--spec", spec, "--seed", "7", "--out", str(b)]) == 0
    assert a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()


@pytest.mark.parametrize(
    "command, spec",
    [
        ("pisot-certify", PHI),
        ("pisot-trace", PHI),
        ("pisot-matrix-scan", '{"poly": "x^2 - x - 1", "b": 0.7, "c": 2}'),
        ("det-consistency", '{"kernel": {"variant": "toeplitz", "a": 0.7}, "universe": 5, "max_size": 2}'),
        ("induced-transform", '{"kernel": {"variant": "toeplitz", "a": 0.5}, "lambda": 0.5, "t": [0, 1]}'),
        ("toeplitz-compare", '{"p": 0.3, "a": 0.5, "lambda": 0.5, "t": 1.3, "n_max": 6}'),
        ("det-lambda", '{"kernel": {"variant": "diagonal", "p": 0.5}, "lambda": 0.5, "t": [0.5]}'),
        ("chaos-scan", PHI),
    ],
)
def test_every_command_runs(tmp_path, command, spec):
    out = tmp_path / command
    assert run([command, "--spec", spec, "--kmax", "6", "--out", str(out)]) == 0
    assert len(read_csv(out.with_suffix(".csv"))) > 1


def test_spec_from_file_and_env_dir(tmp_path, monkeypatch):
    path = tmp_path / "spec.json"
    path.write_text(PHI)
    monkeypatch.setenv("AFFINEFOURIER_OUTDIR", str(tmp_path / "outdir"))
    assert run(["pisot-certify", "--spec", str(path)]) == 0
    assert (tmp_path / "outdir" / "pisot-certify.csv").exists()


def test_all_spec_commands_registered():
    assert set(COMMANDS) == {
        "pisot-certify", "pisot-trace", "ifs-transform", "erdos-scan", "pisot-matrix-scan",
        "det-cylinder", "det-consistency", "induced-transform", "toeplitz-compare", "det-lambda", "chaos-scan",
    }


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "affinefourier.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "erdos-scan" in r.stdout
