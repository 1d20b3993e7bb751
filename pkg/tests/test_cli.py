import json
import subprocess
import sys

import pytest

from kahler_g2 import flow as F
from kahler_g2.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0 and "glps" in out and "gibb-kahler" in out and "airy:c" in out
    code, out, _ = run(capsys, "catalog", "--algebras")
    assert code == 0 and "iwasawa" in out
    code, out, _ = run(capsys, "catalog", "--json")
    data = json.loads(out)
    assert data["schema"] == 1 and "constant:p,q,k,l" in data["families"]
    assert "case2b" in data["algebras"] and set(data["flow_presets"]) == {"bell", "above", "kahler"}


def test_verify_glps_json(capsys):
    code, out, _ = run(capsys, "verify", "--family", "glps", "--samples", "12", "--seed", "42",
                       "--json", "--no-meta")
    rep = json.loads(out)
    assert code == 0 and rep["pass"]
    assert rep["ranks"] == [[7, 14]]
    names = {c["name"] for c in rep["checks"]}
    assert {"d_phi", "d_star_phi", "ricci", "su3_algebraic", "kahler_potential", "eq13_evolution"} <= names
    assert all(c["max_residual"] <= c["tolerance"] for c in rep["checks"])
    assert "meta" not in rep


def test_verify_is_deterministic(capsys):
    argv = ("verify", "--family", "constant:-1,1,1,1", "--samples", "6", "--seed", "3", "--json", "--no-meta")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    _, c, _ = run(capsys, *argv[:-1])
    assert "meta" in json.loads(c)


def test_constant_0001_matches_glps(capsys):
    base = ("--samples", "5", "--seed", "7", "--json", "--no-meta")
    _, a, _ = run(capsys, "verify", "--family", "glps", *base)
    _, b, _ = run(capsys, "verify", "--family", "constant:0,0,0,1", *base)
    ra, rb = json.loads(a), json.loads(b)
    assert [c["max_residual"] for c in ra["checks"]] == [c["max_residual"] for c in rb["checks"]]
    assert ra["ranks"] == rb["ranks"]


def test_verify_gibbons_text(capsys):
    code, out, _ = run(capsys, "verify", "--family", "gibb-kahler", "--samples", "4")
    assert code == 0
    assert out.strip().splitlines()[-1] == "PASS"
    assert "ricci_form" in out


def test_verify_errors(capsys):
    code, _, err = run(capsys, "verify", "--family", "constant:1,0,0,0")
    assert code == 2 and "positivity" in err
    code, _, err = run(capsys, "verify", "--family", "taub-nut")
    assert code == 2 and "unknown family" in err
    code, _, _ = run(capsys, "verify", "--family", "glps", "--window", "1")
    assert code == 2
    code, _, _ = run(capsys, "nonsense")
    assert code == 2


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--family", "airy:1", "--samples", "3", "--tol", "1e-30")
    assert code == 1 and "FAIL" in out


def test_flow_bell(capsys, tmp_path):
    out_file = tmp_path / "bell.csv"
    code, out, _ = run(capsys, "flow", "--Hc", "2", "--start", "0,1", "--step", "1e-3",
                       "--out", str(out_file), "--json")
    summary = json.loads(out)
    assert code == 0 and summary["status"] == "degenerate"
    assert summary["drift"] <= 1e-8
    assert summary["endpoint"]["t"] == pytest.approx(1.0, abs=1e-3)
    assert summary["endpoint"]["z"] < 1e-6
    rows = F.read_csv(out_file.read_text().splitlines())
    assert list(rows[0]) == ["tau", "t", "z", "H"]


def test_flow_kahler_level(capsys):
    code, out, err = run(capsys, "flow", "--Hc", "0", "--start", "1,1", "--tau-max", "3", "--compare-quartic")
    assert code == 0 and "H drift" in err
    rows = F.read_csv(out.splitlines())
    assert max(abs(r["z"] - r["t"] ** 4) for r in rows) <= 1e-6
    assert max(abs(r["z"] - r["quartic"]) for r in rows) <= 1e-6


def test_flow_above_level(capsys):
    code, out, _ = run(capsys, "flow", "--Hc", "-2", "--start", "0,1", "--fixed-step", "--tau-max", "2")
    assert code == 0
    rows = F.read_csv(out.splitlines())
    near = min(rows, key=lambda r: abs(r["t"] - 1.0))
    assert near["z"] == pytest.approx(F.quartic_level(-2, near["t"]), abs=1e-6)
    assert rows[-1]["t"] > 1.0


def test_flow_errors(capsys):
    assert run(capsys, "flow", "--Hc", "2", "--start", "0,2")[0] == 2
    assert run(capsys, "flow", "--start", "1")[0] == 2
    assert run(capsys, "flow", "--Hc", "0", "--params", "0,0,0,1", "--start", "1,1")[0] == 2
    code, _, err = run(capsys, "flow", "--params", "0,0,1,1", "--start", "0.5,1", "--tau-max", "0.5")
    assert code == 0 and "steps" in err


def test_ma_commands(capsys):
    code, out, _ = run(capsys, "ma", "--c", "1", "--H", "cos(lambda)", "--json", "--no-meta")
    rep = json.loads(out)
    assert code == 0 and rep["command"] == "ma" and rep["pass"]
    code, out, _ = run(capsys, "ma", "--c", "0", "--H", "1", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["u_minus_t"] <= 1e-14
    code, _, err = run(capsys, "ma", "--c", "1", "--H", "sin(2*lambda)")
    assert code == 2 and "Helmholtz" in err


def test_ma_build_g2(capsys):
    code, out, _ = run(capsys, "ma", "--c", "1", "--H", "sin(lambda)", "--build-g2", "--samples", "4",
                       "--json", "--no-meta")
    rep = json.loads(out)
    assert code == 0
    ricci = next(c for c in rep["checks"] if c["name"] == "ricci")
    assert ricci["max_residual"] <= 1e-6
    assert rep["ranks"] == [[7, 14]]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kahler_g2", "catalog", "--algebras"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "case3" in proc.stdout
