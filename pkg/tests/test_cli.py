"""End-to-end runs of the command line interface."""

import json
import math
import subprocess
import sys

import pytest

from fermi_spectra.cli import main

RECT = {
    "curve": {"mode": "curvature", "L": math.pi, "k": "0"},
    "width": "0.4",
    "p": 2.0,
    "mesh": {"ns": 64, "nt": 16},
}


def write_cfg(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def run(tmp_path, command, payload, extra=()):
    cfg = write_cfg(tmp_path, payload)
    out = tmp_path / "out"
    code = main([command, "--config", str(cfg), "--out", str(out), *extra])
    report = None
    report_path = out / "report.json"
    if report_path.exists():
        report = json.loads(report_path.read_text())
    return code, out, report


class TestCertify:
    def test_rectangle_certified(self, tmp_path, capsys):
        code, _, report = run(tmp_path, "certify", RECT)
        assert code == 0
        cert = report["results"]["certificate"]
        assert cert["certified"] is True
        assert cert["case_label"] == "a"
        assert cert["threshold"] == pytest.approx(1.5625, abs=1e-12)
        assert "certified=True" in capsys.readouterr().out

    def test_report_envelope(self, tmp_path):
        code, _, report = run(tmp_path, "certify", RECT)
        assert code == 0
        assert report["schema"] == 1
        assert report["command"] == "certify"
        assert len(report["config_sha256"]) == 64
        assert report["domain"]["curve_mode"] == "curvature"
        assert report["domain"]["valid"] is True


class TestBounds:
    def test_inapplicable_bound_still_succeeds(self, tmp_path):
        payload = dict(
            RECT,
            curve={"mode": "curvature", "L": math.pi, "k": "0.3*cos(2*s)"},
            width="0.2",
        )
        code, _, report = run(tmp_path, "bounds", payload)
        assert code == 0
        reports = {b["label"]: b for b in report["results"]["bounds"]}
        assert not reports["constant-width"]["applicable"]
        names = [
            h["name"]
            for h in reports["constant-width"]["hypotheses"]
            if not h["passed"]
        ]
        assert "concave curvature" in names
        assert reports["lyapunov"]["applicable"]

    def test_rectangle_bound_values(self, tmp_path):
        code, _, report = run(tmp_path, "bounds", RECT)
        assert code == 0
        reports = {b["label"]: b for b in report["results"]["bounds"]}
        assert reports["constant-width"]["value"] == pytest.approx(1.0, abs=1e-12)
        assert reports["constant-width"]["applicable"]


class TestSolvers:
    def test_solve1d_outputs(self, tmp_path):
        code, out, report = run(tmp_path, "solve1d", RECT)
        assert code == 0
        res = report["results"]
        assert res["shooting"]["mu"] == pytest.approx(1.0, rel=1e-6)
        assert res["cross_rel_diff"] < 1e-3
        header = (out / "solve1d.csv").read_text().splitlines()[0]
        assert header == "s,w,u,du"

    def test_solve2d_outputs(self, tmp_path):
        code, out, report = run(tmp_path, "solve2d", RECT)
        assert code == 0
        res = report["results"]
        assert res["full"]["mu"] == pytest.approx(1.0, rel=1e-3)
        assert res["odd"]["mu"] == pytest.approx(res["full"]["mu"], rel=1e-9)
        header = (out / "solve2d.csv").read_text().splitlines()[0]
        assert header == "s,t,u"

    def test_sweep_outputs(self, tmp_path):
        payload = {
            "curve": {"mode": "curvature", "L": math.pi, "k": "-0.5"},
            "width": "1",
            "p": 2.0,
            "mesh": {"ns": 64, "nt": 16},
            "epsilons": [0.4, 0.2],
        }
        code, out, report = run(tmp_path, "sweep", payload)
        assert code == 0
        entries = report["results"]["entries"]
        assert len(entries) == 2
        assert entries[1]["rel_err"] < entries[0]["rel_err"]
        header = (out / "sweep.csv").read_text().splitlines()[0]
        assert header == "epsilon,mu,mu_star,rel_err"

    def test_sweep_partial_failure_still_exits_zero(self, tmp_path):
        payload = {
            "curve": {"mode": "curvature", "L": math.pi, "k": "-0.5"},
            "width": "1",
            "mesh": {"ns": 64, "nt": 16},
            "epsilons": [2.5, 0.2],
        }
        code, _, report = run(tmp_path, "sweep", payload)
        assert code == 0
        entries = report["results"]["entries"]
        assert entries[0]["failure"] is not None
        assert entries[0]["mu"] is None
        assert entries[1]["failure"] is None

    def test_figure2_outputs(self, tmp_path):
        code, out, report = run(tmp_path, "figure2", {"figure2_n": 50})
        assert code == 0
        res = report["results"]
        assert res["points"] == 50
        assert res["all_positive"] is True
        lines = (out / "figure2.csv").read_text().splitlines()
        assert lines[0] == "x,r,b,b_minus_r"
        assert len(lines) == 51


class TestExitCodes:
    def test_config_error_is_one(self, tmp_path, capsys):
        code, _, _ = run(tmp_path, "certify", dict(RECT, p=0.5))
        assert code == 1
        assert "config error" in capsys.readouterr().err

    def test_missing_file_is_one(self, tmp_path):
        assert main(["certify", "--config", str(tmp_path / "nope.json")]) == 1

    def test_unknown_command_is_usage_error(self, tmp_path):
        cfg = write_cfg(tmp_path, RECT)
        assert main(["frobnicate", "--config", str(cfg)]) == 1

    def test_solver_error_is_two(self, tmp_path, capsys):
        payload = dict(RECT, curve={"mode": "curvature", "L": math.pi, "k": "4"})
        code, _, _ = run(tmp_path, "solve2d", payload)
        assert code == 2
        assert "solver error" in capsys.readouterr().err

    def test_invalid_domain_message_names_collisions(self, tmp_path, capsys):
        payload = dict(RECT, curve={"mode": "curvature", "L": math.pi, "k": "4"})
        run(tmp_path, "solve2d", payload)
        assert "collisions" in capsys.readouterr().err


class TestOverridesAndDeterminism:
    def test_p_flag_beats_config(self, tmp_path):
        code, _, report = run(tmp_path, "bounds", RECT, extra=["--p", "3.0"])
        assert code == 0
        assert report["p"] == 3.0

    def test_mesh_flags_beat_config(self, tmp_path):
        code, _, report = run(
            tmp_path, "solve2d", RECT, extra=["--ns", "32", "--nt", "8"]
        )
        assert code == 0
        assert report["mesh"]["ns"] == 32
        assert report["mesh"]["nt"] == 8

    def test_reruns_are_byte_identical(self, tmp_path):
        cfg = write_cfg(tmp_path, RECT)
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["solve1d", "--config", str(cfg), "--out", str(out)]) == 0
            outs.append(out)
        for fname in ("report.json", "solve1d.csv"):
            assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()

    def test_report_uses_lf_and_sorted_keys(self, tmp_path):
        cfg = write_cfg(tmp_path, RECT)
        out = tmp_path / "out"
        assert main(["certify", "--config", str(cfg), "--out", str(out)]) == 0
        raw = (out / "report.json").read_bytes()
        assert b"\r" not in raw
        assert raw.endswith(b"\n")
        doc = json.loads(raw)
        assert list(doc) == sorted(doc)


def test_console_script_installed(tmp_path):
    cfg = write_cfg(tmp_path, {"figure2_n": 10})
    out = tmp_path / "out"
    proc = subprocess.run(
        ["fermi-spectra", "figure2", "--config", str(cfg), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "figure2" in proc.stdout
    assert (out / "report.json").exists()


def test_module_entry_matches_script(tmp_path):
    cfg = write_cfg(tmp_path, {"figure2_n": 10})
    out = tmp_path / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "fermi_spectra.cli", "figure2",
         "--config", str(cfg), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
