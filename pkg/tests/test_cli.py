import json
import math
import subprocess
import sys

import numpy as np
import pytest

from indivisible import cli
from indivisible import stochastic as stoch
from indivisible.serialize import canonical_dumps


def write(path, obj):
    path.write_text(canonical_dumps(obj) + "\n")
    return str(path)


@pytest.fixture
def qubit_file(tmp_path):
    t1, t2 = math.pi / 4.0, math.pi / 2.0
    c, s = math.cos(t1) ** 2, math.sin(t1) ** 2
    return write(tmp_path / "qubit.json", {
        "n": 2,
        "targets": [0.0, t1, t2],
        "conditioning": [0.0],
        "transitions": [
            {"t": t1, "t0": 0.0, "matrix": [[c, s], [s, c]]},
            {"t": t2, "t0": 0.0, "matrix": [[0.0, 1.0], [1.0, 0.0]]},
        ],
        "initial": [1.0, 0.0],
    })


def run(args):
    return cli.main([str(a) for a in args])


def test_embed_writes_report_and_csv(tmp_path):
    inp = write(tmp_path / "law.json", {"law": "harmonic", "x0": 1.0, "v0": 0.0})
    out = tmp_path / "report.json"
    code = run(["embed", "--input", inp, "--output", out,
                "--dt", "1e-3", "--T", str(2.0 * math.pi)])
    assert code == 0
    report = json.loads(out.read_text())
    assert abs(report["final"]["x"] - 1.0) <= 1e-6
    assert report["time_reversal"]["invariant"] is True
    csv_lines = (tmp_path / "report.csv").read_text().splitlines()
    assert csv_lines[0] == "t,x,y"
    assert len(csv_lines) == report["samples"] + 1


def test_embed_unknown_law_exits_1(tmp_path, capsys):
    inp = write(tmp_path / "law.json", {"law": "pendulum"})
    code = run(["embed", "--input", inp, "--output", tmp_path / "r.json"])
    assert code == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["field"] == "law"


def test_sh_sim_meets_tolerance(tmp_path):
    inp = write(tmp_path / "sx.json", {
        "n": 2, "re": [[0.0, 1.0], [1.0, 0.0]],
        "im": [[0.0, 0.0], [0.0, 0.0]]})
    out = tmp_path / "sh.json"
    code = run(["sh-sim", "--input", inp, "--output", out,
                "--dt", "1e-4", "--T", "10", "--stride", "1000"])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["max_deviation_from_exact"] <= 1e-6
    header = (tmp_path / "sh.csv").read_text().splitlines()[0]
    assert header == "t,q_1,q_2,p_1,p_2"


def test_divisibility_qubit_defaults_to_latest_pair(tmp_path, qubit_file):
    out = tmp_path / "div.json"
    code = run(["divisibility", "--input", qubit_file, "--output", out])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["status"] == "indivisible"
    assert report["t"] == pytest.approx(math.pi / 2.0)
    assert report["tp"] == pytest.approx(math.pi / 4.0)
    assert "certificate" in report


def test_divisibility_all_pairs(tmp_path, qubit_file):
    out = tmp_path / "div.json"
    code = run(["divisibility", "--input", qubit_file, "--output", out,
                "--all-pairs", "--jobs", "2"])
    assert code == 0
    report = json.loads(out.read_text())
    assert len(report["pairs"]) == 1
    assert report["pairs"][0]["status"] == "indivisible"


def test_divisibility_explicit_pair_divisible(tmp_path):
    g1 = [[0.7, 0.2], [0.3, 0.8]]
    m = np.array([[0.9, 0.4], [0.1, 0.6]])
    g2 = (m @ np.array(g1)).tolist()
    inp = write(tmp_path / "proc.json", {
        "n": 2, "targets": [0.0, 1.0, 2.0], "conditioning": [0.0],
        "transitions": [
            {"t": 1.0, "t0": 0.0, "matrix": g1},
            {"t": 2.0, "t0": 0.0, "matrix": g2},
        ],
        "initial": [1.0, 0.0]})
    out = tmp_path / "div.json"
    code = run(["divisibility", "--input", inp, "--output", out,
                "--t", "2.0", "--tp", "1.0"])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["status"] == "divisible"
    assert report["residual"] <= 1e-9
    witness = np.array(report["witness"])
    np.testing.assert_allclose(witness.sum(axis=0), 1.0, atol=1e-12)


def test_divisibility_indeterminate_exits_2(tmp_path, qubit_file, monkeypatch):
    def always_indeterminate(gamma_t, gamma_tp, **kwargs):
        return stoch.DivisibilityVerdict("indeterminate",
                                         certificate="forced for the test")
    monkeypatch.setattr(cli.stoch, "divisibility_check", always_indeterminate)
    code = run(["divisibility", "--input", qubit_file,
                "--output", tmp_path / "div.json"])
    assert code == 2


def test_correspond_identity(tmp_path):
    inp = write(tmp_path / "u.json", {
        "re": [[1.0, 0.0], [0.0, 1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]})
    out = tmp_path / "corr.json"
    assert run(["correspond", "--input", inp, "--output", out]) == 0
    report = json.loads(out.read_text())
    assert report["gamma"] == [[1.0, 0.0], [0.0, 1.0]]
    assert report["row_sum_deviation"] <= 1e-12


def test_unistochastic_found_and_not_found_exit_codes(tmp_path):
    flat = write(tmp_path / "flat.json", {"matrix": [[0.5, 0.5], [0.5, 0.5]]})
    out = tmp_path / "uni.json"
    assert run(["unistochastic", "--input", flat, "--output", out]) == 0
    report = json.loads(out.read_text())
    assert report["status"] == "found"
    u = np.array(report["unitary"]["re"]) + 1j * np.array(report["unitary"]["im"])
    np.testing.assert_allclose(np.abs(u) ** 2, 0.5, atol=1e-10)
    # an iteration budget of zero cannot converge: not_found is exit 2
    assert run(["unistochastic", "--input", flat, "--output", out,
                "--max-iters", "0"]) == 2
    assert json.loads(out.read_text())["status"] == "not_found"


def test_unistochastic_certificate_is_reported(tmp_path):
    fix = write(tmp_path / "fix.json", {
        "matrix": [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]})
    out = tmp_path / "uni.json"
    assert run(["unistochastic", "--input", fix, "--output", out]) == 0
    report = json.loads(out.read_text())
    assert report["status"] == "not_unistochastic"
    assert "triangle" in report["certificate"]


def test_dilate_reports_residuals(tmp_path):
    fix = write(tmp_path / "fix.json", {
        "matrix": [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]})
    out = tmp_path / "dil.json"
    assert run(["dilate", "--input", fix, "--output", out]) == 0
    report = json.loads(out.read_text())
    assert report["dilation_dim"] == 9
    assert report["unitarity_residual"] <= 1e-10
    assert report["marginal_residual"] <= 1e-10
    assert report["kraus_identity_residual"] <= 1e-12


def test_extract_hamiltonian(tmp_path):
    inp = write(tmp_path / "h.json", {
        "n": 2, "re": [[0.3, 0.1], [0.1, -0.2]],
        "im": [[0.0, -0.4], [0.4, 0.0]]})
    out = tmp_path / "ham.json"
    assert run(["extract-hamiltonian", "--input", inp, "--output", out,
                "--dt", "1e-4"]) == 0
    report = json.loads(out.read_text())
    assert report["max_error_vs_input"] <= 5e-6
    assert report["anti_hermitian_residual"] <= 1e-10


def test_config_overrides_flags(tmp_path):
    inp = write(tmp_path / "law.json", {"law": "free", "x0": 0.0, "v0": 1.0})
    cfg = write(tmp_path / "cfg.json", {"T": 2.0, "dt": 0.5})
    out = tmp_path / "r.json"
    code = run(["embed", "--input", inp, "--output", out,
                "--T", "9.0", "--config", cfg])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["duration"] == 2.0
    assert report["dt"] == 0.5


def test_config_rejects_unknown_keys(tmp_path, capsys):
    inp = write(tmp_path / "law.json", {"law": "free"})
    cfg = write(tmp_path / "cfg.json", {"steps": 7})
    code = run(["embed", "--input", inp, "--output", tmp_path / "r.json",
                "--config", cfg])
    assert code == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["field"] == "<config>.steps"


def test_malformed_matrix_exits_1(tmp_path, capsys):
    bad = write(tmp_path / "bad.json", {"matrix": [[0.5, 0.5], [0.5, "x"]]})
    code = run(["unistochastic", "--input", bad, "--output", tmp_path / "o.json"])
    assert code == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["field"] == "matrix[1][1]"


def test_reruns_are_byte_identical(tmp_path, qubit_file):
    inp = write(tmp_path / "law.json", {"law": "damped", "x0": 1.0, "v0": 0.0})
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for out in (first, second):
        run(["embed", "--input", inp, "--output", out, "--T", "3.0"])
    assert first.read_bytes() == second.read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    for out in (first, second):
        run(["divisibility", "--input", qubit_file, "--output", out])
    assert first.read_bytes() == second.read_bytes()


def test_console_script_is_installed(tmp_path):
    inp = write(tmp_path / "u.json", {
        "re": [[1.0, 0.0], [0.0, 1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]})
    proc = subprocess.run(
        ["indivisible", "correspond", "--input", inp,
         "--output", str(tmp_path / "out.json")],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "correspond" in proc.stdout
