import json
import subprocess
import sys
from pathlib import Path

import pytest

from syzmirror.cli import main
from syzmirror.reports import COMMANDS

HERE = Path(__file__).parent
BROKEN = str(HERE / "data" / "broken.json")


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_mirror_text_golden(capsys):
    code, out, _ = run(["mirror", "--preset", "CP2"], capsys)
    assert code == 0
    assert out == (HERE / "golden" / "mirror_CP2.txt").read_text()


def test_mirror_json(capsys):
    code, out, _ = run(["mirror", "--preset", "CP2", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["status"] == "ok"
    assert data["payload"]["superpotential"] == "z1 + z2 + q1*z1^-1*z2^-1"


def test_verify_iso_cp2(capsys):
    code, out, _ = run(["verify-iso", "--preset", "CP2", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["status"] == "ok"
    assert data["payload"]["dimension"] == 3


def test_bl1_verify_iso_warns(capsys):
    code, out, _ = run(["verify-iso", "--preset", "Bl1CP2", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["status"] == "warn"
    assert data["payload"]["within_hypothesis"] is False


def test_broken_file_fails(capsys):
    code, out, _ = run(["validate", "--file", BROKEN, "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 1 and data["status"] == "fail"
    assert "cone [1, 3] is not unimodular (|det| = 2)" in data["payload"]["failures"]


@pytest.mark.parametrize("argv", [
    ["mirror", "--preset", "CP9"],
    ["mirror", "--file", "/nonexistent/poly.json"],
    ["critical", "--preset", "CP1", "--q", "q1=abc"],
])
def test_input_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and "error" in err


def test_malformed_json_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run(["validate", "--file", str(bad)], capsys)
    assert code == 2


def test_unknown_command_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", "--preset", "CP2"])
    assert exc.value.code == 2


def test_out_flag(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, out, _ = run(["jacobian", "--preset", "CP1", "--format", "json", "--out", str(path)], capsys)
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["payload"]["dimension"] == 2


@pytest.mark.parametrize("command", COMMANDS)
def test_reports_are_byte_identical(command, capsys):
    argv = [command, "--preset", "CP2", "--format", "json", "--cutoff", "2"]
    first = run(argv, capsys)
    second = run(argv, capsys)
    assert first == second
    assert json.loads(first[1])["command"] == command


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "syzmirror.cli", "mirror", "--preset", "CP1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "superpotential: z1 + q1*z1^-1" in proc.stdout


def test_critical_and_clifford(capsys):
    code, out, _ = run(["critical", "--preset", "CP1", "--q", "q1=4", "--format", "json"], capsys)
    pts = sorted(p["z"][0][0] for p in json.loads(out)["payload"]["points"])
    assert code == 0 and pts == [-2.0, 2.0]
    code, out, _ = run(["clifford", "--preset", "CP2", "--z", "1,1", "--format", "json"], capsys)
    data = json.loads(out)["payload"]
    assert code == 0
    assert data["points"][0]["clifford"] == [[[2.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [2.0, 0.0]]]
