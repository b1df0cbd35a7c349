import json

import numpy as np
import pytest

from starsplit import catalog, jsonio
from starsplit.cli import main
from starsplit.complex_structure import InvariantComplexManifold


@pytest.fixture
def corrupted_file(tmp_path):
    M = InvariantComplexManifold(
        "corrupt", 3, {3: {"(2,0)": [(1, 2, "1")], "(1,1)": []},
                       2: {"(2,0)": [(2, 3, "1")], "(1,1)": []}})
    path = tmp_path / "corrupted.json"
    path.write_text(json.dumps(M.to_json_dict()))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0
    for name in catalog.list_names():
        assert name in out


def test_classify_iwasawa(capsys):
    code, out, _ = run(capsys, "classify", "--manifold", "iwasawa3")
    assert code == 0
    assert "f = 1" in out
    assert "balanced                 yes" in out
    assert "spectrum" in out  # the eigenvalue-convention note is surfaced


def test_classify_torus(capsys):
    code, out, _ = run(capsys, "classify", "--manifold", "torus_3")
    assert code == 0
    assert "f = 0" in out
    assert "no " not in out.split("note:")[0]


def test_invariants_json_values(capsys):
    code, out, _ = run(capsys, "invariants", "--manifold", "calabi_eckmann",
                       "--param", "t=0+0.25i", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["f"] == pytest.approx(2.0, abs=1e-10)
    assert data["eigenvalues"] == pytest.approx([-1.0, 1.0, 1.0], abs=1e-10)


def test_json_round_trips_byte_identical(capsys):
    code, out, _ = run(capsys, "classify", "--manifold", "iwasawa3", "--json")
    assert code == 0
    text = out.strip()
    assert jsonio.dumps(json.loads(text)) == text
    code, out, _ = run(capsys, "invariants", "--manifold", "nakamura", "--json")
    text = out.strip()
    assert jsonio.dumps(json.loads(text)) == text


def test_scan_csv(capsys):
    code, out, _ = run(capsys, "scan", "--manifold", "calabi_eckmann",
                       "--param", "t", "--values", "0.1,0.1+0.1i,-0.2i",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 4
    fs = [float(line.split(",")[1]) for line in lines[1:]]
    assert fs == pytest.approx([0.0, 0.8, -1.6], abs=1e-10)


def test_scan_requires_bare_param(capsys):
    code, _, err = run(capsys, "scan", "--manifold", "calabi_eckmann",
                       "--values", "0.1")
    assert code == 2
    assert "scan" in err


def test_verify_commutation_iwasawa3(capsys):
    code, out, _ = run(capsys, "verify", "--manifold", "iwasawa3",
                       "--suite", "commutation")
    assert code == 0
    assert "pass" in out and "FAIL" not in out


def test_verify_all_iwasawa5(capsys):
    code, out, _ = run(capsys, "verify", "--manifold", "iwasawa5", "--suite", "all")
    assert code == 0
    assert "FAIL" not in out


def test_verify_failure_exit_code(capsys, tmp_path):
    # an unreachable tolerance turns honest fp residuals into failures: exit 1,
    # distinct from invalid input (exit 2)
    metric = tmp_path / "offdiag.json"
    H = np.array([[2, 0.3 + 0.1j, 0], [0.3 - 0.1j, 1.5, 0.2j], [0, -0.2j, 1.0]])
    metric.write_text(json.dumps(
        {"type": "hermitian", "matrix": [[z.real, z.imag] for z in H.reshape(-1)]}))
    code, out, _ = run(capsys, "verify", "--manifold", "iwasawa3",
                       "--metric", str(metric), "--suite", "commutation",
                       "--tol", "1e-18")
    assert code == 1
    assert "FAIL" in out


def test_verify_operator_suite_with_gamma(capsys, tmp_path):
    gamma = tmp_path / "gamma.json"
    gamma.write_text(json.dumps({"type": "diagonal", "coeffs": [1.0, 2.0, 3.0]}))
    code, out, _ = run(capsys, "verify", "--manifold", "iwasawa3",
                       "--suite", "operators", "--gamma", str(gamma))
    assert code == 0
    assert "FAIL" not in out


def test_verify_corrupted_manifold(capsys, corrupted_file):
    code, _, err = run(capsys, "verify", "--manifold", corrupted_file)
    assert code == 2
    assert "d²" in err and "≠" in err


def test_classify_with_corrupted_manifold(capsys, corrupted_file):
    code, _, err = run(capsys, "classify", "--manifold", corrupted_file)
    assert code == 2


def test_missing_file(capsys):
    code, _, err = run(capsys, "classify", "--manifold", "no_such_file.json")
    assert code == 2
    assert "error" in err


def test_non_pd_metric_rejected(capsys, tmp_path):
    metric = tmp_path / "bad_metric.json"
    metric.write_text(json.dumps({"type": "diagonal", "coeffs": [1.0, -1.0, 1.0]}))
    code, _, err = run(capsys, "classify", "--manifold", "iwasawa3",
                       "--metric", str(metric))
    assert code == 2
    assert "positive" in err


def test_calabi_eckmann_guard(capsys):
    code, _, err = run(capsys, "classify", "--manifold", "calabi_eckmann",
                       "--param", "t=1")
    assert code == 2
    assert "|t|" in err or "t" in err


def test_pair_report_via_gamma(capsys, tmp_path):
    gamma = tmp_path / "gamma.json"
    gamma.write_text(json.dumps({"type": "diagonal", "coeffs": [1.0, 2.0, 3.0]}))
    code, out, _ = run(capsys, "classify", "--manifold", "iwasawa3",
                       "--gamma", str(gamma), "--json")
    assert code == 0
    data = json.loads(out)
    assert data["pair"]["pluriclosed"]["holds"] is True


def test_triple_report_via_phi(capsys, tmp_path):
    u, v = np.exp(0.3j), np.exp(-0.6j)
    mat = np.diag([u, v, u * v])
    phi = tmp_path / "phi.json"
    phi.write_text(json.dumps(
        {"matrix": [[z.real, z.imag] for z in mat.reshape(-1)]}))
    code, out, _ = run(capsys, "classify", "--manifold", "iwasawa3",
                       "--phi", str(phi), "--json")
    assert code == 0
    data = json.loads(out)
    assert data["triple"]["pluriclosed"]["holds"] is True
    assert data["triple"]["gamma_isometric"] is True
    assert data["triple"]["rho_pullback_residual"] < 1e-10


def test_search_command(capsys):
    code, out, _ = run(capsys, "search", "--manifold", "iwasawa3",
                       "--budget", "150", "--seed", "2", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["best_defect"] < 1e-8
    assert data["report"]["flags"]["pluriclosed_star_split"]["holds"] is True


def test_verify_json_output(capsys):
    code, out, _ = run(capsys, "verify", "--manifold", "torus_3",
                       "--suite", "commutation", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["all_passed"] is True
    entries = data["suites"][0]
    assert all(set(e) >= {"id", "anchor", "residual", "pass"} for e in entries)


def test_scan_file_manifold(capsys, tmp_path):
    M, _, _ = catalog.get("calabi_eckmann")
    path = tmp_path / "ce.json"
    path.write_text(json.dumps(M.to_json_dict()))
    # file manifolds scan against the identity metric: f = 4 Im t there
    code, out, _ = run(capsys, "scan", "--manifold", str(path),
                       "--param", "t", "--values", "0.25i", "--format", "csv")
    assert code == 0
    f = float(out.strip().split("\n")[1].split(",")[1])
    assert f == pytest.approx(1.0, abs=1e-10)


def test_file_manifold_classify(capsys, tmp_path):
    M, _, _ = catalog.get("nakamura")
    path = tmp_path / "nakamura.json"
    path.write_text(json.dumps(M.to_json_dict()))
    code, out, _ = run(capsys, "classify", "--manifold", str(path))
    assert code == 0
    assert "f = 2" in out


def test_bad_param_syntax(capsys):
    code, _, err = run(capsys, "classify", "--manifold", "iwasawa3",
                       "--param", "=3")
    assert code == 2
