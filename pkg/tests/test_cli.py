import json
import subprocess
import sys

import pytest

from torsion_equidist.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def lines(text):
    return dict(l.split(" = ", 1) for l in text.splitlines() if " = " in l and not l.startswith("#"))


def test_delta(capsys):
    code, out, _ = call(capsys, "delta", "--omega", "1/5,2/5")
    assert code == 0
    assert out.startswith("# torsion-equidist 0.1.0 delta ")
    assert "seed=0" in out.splitlines()[0]
    assert lines(out)["delta"] == "2"


def test_discrepancy_equispaced(capsys):
    code, out, _ = call(capsys, "discrepancy", "--points", "equispaced:8", "--d", "1")
    assert code == 0
    assert lines(out)["D"] == "0.125 (exact 1/8)"


def test_constants(capsys, tmp_path):
    trace = tmp_path / "trace.json"
    code, out, _ = call(capsys, "constants", "--d", "2", "--k", "2", "--eps0", "1/2", "--trace", str(trace))
    assert code == 0
    vals = lines(out)
    assert vals["gamma"].split()[0] == "1/7205759403792793600000" == f"1/{2 ** 61 * 5 ** 5}"
    assert vals["kappa"] == "1/7205759403792793600000"
    assert vals["v"] == f"1/{2 ** 24 * 25},1/512"
    data = json.loads(trace.read_text())
    assert data["inputs"]["eps0"] == "1/2"


def test_json_mode(capsys):
    code, out, _ = call(capsys, "constants", "--d", "2", "--k", "2", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["header"]["program"] == "torsion-equidist" and data["header"]["seed"] == 0
    assert data["result"]["gamma"] == "1/7205759403792793600000"


def test_orbit_and_polytope(capsys):
    code, out, _ = call(capsys, "orbit", "--omega", "1/5,2/5")
    assert code == 0 and '3,"(4/5,3/5)"' in out
    code, out, _ = call(capsys, "polytope", "--vertices", "0,0;1,0;0,1", "--eps", "1/2")
    vals = lines(out)
    assert code == 0 and vals["volume"] == "1/2" and vals["inradius"] == "1/4" and vals["shell_volume"] == "3/8"


def test_koksma_bound(capsys):
    code, out, _ = call(capsys, "koksma-bound", "--vertices", "0,0;1,0;1,1;0,1", "--D", "1e-4", "--M", "1", "--rho", "0")
    assert code == 0
    assert float(lines(out)["isotropic_term"]) == pytest.approx((8 * 2 ** 0.5 + 1) * 0.04)


def test_equidist(capsys):
    code, out, _ = call(
        capsys, "equidist", "--poly", "T1 - 1", "--vertices", "0,0;1,0;1,1;0,1", "--omega", "1/5,2/5", "--quad-points", "4096"
    )
    assert code == 0
    assert float(lines(out)["lhs_sum"]) == pytest.approx(0.402359478109, abs=1e-11)


def test_heights_point(capsys):
    code, out, _ = call(capsys, "heights", "--omega", "1/2,1/2", "--no-split")
    assert code == 0
    assert float(lines(out)["h_total"]) == pytest.approx(0, abs=1e-12)


def test_usage_errors_exit_2(capsys):
    for argv in (["bogus"], ["delta"], ["delta", "--omega", "1/0,1"], ["equidist", "--poly", "T1-1", "--vertices", "0,0;1,0;0,1"]):
        with pytest.raises(SystemExit) as exc:
            run(argv)
        assert exc.value.code == 2
    capsys.readouterr()


def test_computation_errors_exit_1(capsys):
    code, _, err = call(capsys, "constants", "--d", "1", "--k", "2")
    assert code == 1 and err.startswith("error: ValueError")
    code, _, err = call(capsys, "equidist", "--poly", "T1-T2", "--vertices", "0,0;1,0;0,1", "--omega", "1/7,1/7", "--json")
    assert code == 1 and json.loads(err)["error"] == "ZeroOnOrbit"
    code, _, err = call(capsys, "heights", "--omega", "0,0")
    assert code == 1 and "identity" in err


def test_output_file(capsys, tmp_path):
    path = tmp_path / "out.txt"
    assert run(["delta", "--omega", "1/5,2/5", "-o", str(path)]) == 0
    assert "delta = 2" in path.read_text()


def test_precision_env(capsys, monkeypatch):
    monkeypatch.setenv("TORSION_EQUIDIST_PRECISION", "4")
    code, out, _ = call(capsys, "heights", "--omega", "1/3,2/3", "--no-split")
    assert lines(out)["h_arch"] == "0.5493"


def test_byte_identical_reruns():
    argv = [sys.executable, "-m", "torsion_equidist", "equidist", "--poly", "T1-1", "--vertices", "0,0;1,0;0,1",
            "--golden-primes", "5:40", "--quad-points", "1024", "--seed", "3"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and b"seed=3" in a
