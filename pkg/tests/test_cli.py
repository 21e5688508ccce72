import csv
import io
import json

import pytest

from kmpoly.cli import main

SET1 = ["--g", "1", "--g0", "3", "--g1", "1", "--g2", "1", "--g3", "1"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_monic(capsys):
    code, out, _ = run(capsys, "compute", "--n", "2", *SET1, "--lambda", "2,1")
    assert code == 0
    d = json.loads(out)
    coeffs = {c["partition"]: c["re"] for c in d["polynomials"]["operator"]["coefficients"]}
    assert coeffs["2,1"] == 1.0
    assert d["evaluation_direct"] == pytest.approx(d["evaluation_constant"], rel=1e-10)
    assert d["norm_closed_form"] > 0


def test_compute_both_methods(capsys):
    code, out, _ = run(capsys, "compute", "--n", "2", *SET1, "--lambda", "2,1", "--method", "both")
    assert code == 0 and json.loads(out)["method_max_deviation"] < 1e-9


def test_compute_phi43(capsys):
    code, out, _ = run(capsys, "compute", "--n", "1", "--g0", "0.9", "--g1", "0.4", "--g2", "0.3", "--g3", "0.2",
                       "--lambda", "3", "--check-phi43")
    assert code == 0 and json.loads(out)["phi43_residual"] < 1e-10


def test_compute_phi43_needs_n1(capsys):
    code, _, err = run(capsys, "compute", "--n", "2", "--lambda", "1", "--check-phi43")
    assert code == 2 and "n 1" in err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("n=2\ng=1\ng0=3\ng1=1\ng2=1\ng3=1\n")
    code, out, _ = run(capsys, "compute", "--config", str(cfg), "--lambda", "1", "--g", "0.5")
    assert code == 0 and json.loads(out)["params"]["g"] == 0.5


@pytest.mark.parametrize(
    "argv",
    [
        ["compute", "--n", "2", "--lambda", "1,2"],
        ["compute", "--lambda", "1"],
        ["compute", "--n", "2", "--alpha", "-1", "--lambda", "1"],
        ["verify", "--check", "bogus"],
        ["table", "--n", "4"],
        ["frobnicate"],
    ],
)
def test_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_table_zero_couplings(capsys):
    code, out, _ = run(capsys, "table", "--n", "1", "--max-weight", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["lambda"] for r in rows] == ["0", "1", "2", "3"]
    for r in rows:
        assert float(r["eval_direct"]) == pytest.approx(float(r["eval_closed"]), rel=1e-9)
        assert float(r["norm_quadrature"]) == pytest.approx(float(r["norm_closed"]), rel=1e-9)
    assert [float(r["eval_direct"]) for r in rows] == [1.0, 2.0, 2.0, 2.0]


def test_table_json_and_out(tmp_path, capsys):
    out = tmp_path / "t.json"
    code, _, _ = run(capsys, "table", "--n", "2", "--g", "0.7", "--g0", "1.9", "--g1", "0.8", "--g2", "0.6",
                     "--g3", "0.5", "--format", "json", "--out", str(out))
    assert code == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 6
    assert max(r["norm_rel_dev"] for r in rows) < 1e-6 and max(r["eval_rel_dev"] for r in rows) < 1e-6


def test_table_n4_without_quadrature(capsys):
    code, out, _ = run(capsys, "table", "--n", "4", "--g", "0.5", "--g0", "1", "--max-weight", "1", "--no-quadrature")
    assert code == 0 and out.count("\n") == 3


def test_verify_single_check(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--check", "gustafson", "--n", "2", "--out", str(tmp_path))
    assert code == 0
    assert "gustafson" in out and "ALL PASSED" in out
    assert json.loads((tmp_path / "gustafson.json").read_text())["passed"]


def test_verify_offhyperplane_exit_zero(capsys):
    code, out, _ = run(capsys, "verify", "--check", "duality", "--offhyperplane", "--n", "2", "--max-weight", "2")
    assert code == 0 and "experimental" in out


def test_verify_failure_exit_one(capsys):
    # a grid far too coarse for the weakest coupling set
    code, out, _ = run(capsys, "verify", "--check", "norm_formula", "--n", "2", "--grid", "12")
    assert code == 1 and "FAIL" in out


def test_verify_seed_env(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("KM_SEED", "3")
    code, _, _ = run(capsys, "verify", "--check", "uv_annihilation", "--out", str(tmp_path))
    assert code == 0
    monkeypatch.setenv("KM_SEED", "x")
    code, _, _ = run(capsys, "verify", "--check", "uv_annihilation")
    assert code == 2


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "kmpoly", "verify", "--check", "commutativity", "--n", "2",
                          "--max-weight", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and "commutativity" in res.stdout
