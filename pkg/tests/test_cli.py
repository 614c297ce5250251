import json
import math
import subprocess
import sys

import pytest

from pbphase.cli import run
from pbphase.special import i0


def values(capsys, argv):
    assert run(argv) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "quantity,value"
    return dict(line.split(",", 1) for line in lines[1:])


def test_variance_vacuum(capsys):
    out = values(capsys, ["variance", "--nbar", "0", "--delta-xi", "1.0"])
    assert float(out["variance"]) == pytest.approx(math.pi ** 2 / 3, abs=1e-12)
    assert out["satisfies_bounds"] == "true"


def test_nfm_norm(capsys):
    out = values(capsys, ["nfm-norm", "--a1", "0", "--a2-sq", "4"])
    assert float(out["normalization"]) == pytest.approx(1 - math.exp(-4) * i0(2.0) ** 2, abs=1e-15)


def test_scalar_commands(capsys):
    assert float(values(capsys, ["fluct-pb", "--nbar", "1"])["fluct_pb"]) == pytest.approx(
        0.40217311612114338, abs=1e-14)
    assert float(values(capsys, ["nfm-cos2", "--a2-sq", "3"])["cos2"]) == 0.5
    assert float(values(capsys, ["pbpd", "--nbar", "4"])["pbpd"]) == pytest.approx(
        0.14697453928872852, abs=1e-14)
    out = values(capsys, ["bounds", "--nbar", "4"])
    assert float(out["judge_margin"]) >= 0


def test_json_format(capsys):
    assert run(["sgpd", "--nbar", "2", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["command"] == "sgpd" and 0 < doc["values"]["sgpd"] < 1


def test_figure_to_file_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["figure", "fig7", "--grid", "5", "--out", str(a)]) == 0
    assert run(["figure", "fig7", "--grid", "5", "--out", str(b)]) == 0
    assert a.read_text() == b.read_text()
    rows = [r.split(",") for r in a.read_text().splitlines() if not r.startswith("#")]
    assert rows[0][1] == "cos2" and all(r[1] == "0.5" for r in rows[1:])


def test_figure_with_adjusted_overlay(tmp_path, capsys):
    path = tmp_path / "gbl.csv"
    path.write_text("n_bar,value,value_err\n4,0.8,0.2\n")
    assert run(["figure", "fig6", "--grid", "3", "--overlay", str(path), "--gbl-adjust",
                "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["overlays"][0]["points"][0]["value"] == 0.4
    assert run(["figure", "fig6", "--grid", "3", "--overlay", str(path)]) == 1


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        run(["bogus"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run(["variance", "--nbar", "abc"])
    assert info.value.code == 2
    assert run(["variance"]) == 2
    assert run(["variance", "--nbar", "-1"]) == 2
    assert run(["figure", "fig1", "--grid", "1"]) == 2


def test_tolerance_env(monkeypatch, capsys):
    monkeypatch.setenv("PBPHASE_TOL", "1e-4")
    coarse = values(capsys, ["moments", "--nbar", "4"])
    monkeypatch.delenv("PBPHASE_TOL")
    fine = values(capsys, ["moments", "--nbar", "4"])
    assert int(float(coarse["terms_used"])) < int(float(fine["terms_used"]))
    monkeypatch.setenv("PBPHASE_TOL", "nope")
    assert run(["moments", "--nbar", "4"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pbphase", "dist", "--nbar", "1", "--grid", "8"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("# figure: dist")
    assert len([r for r in proc.stdout.splitlines() if not r.startswith("#")]) == 9
