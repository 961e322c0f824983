from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from aksoliton.cli import dumps_json, main


def write(tmp_path, doc, name="alg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


N13 = {
    "dim": 6,
    "params": {"lam": 1.0},
    "brackets": [
        {"i": 1, "j": 2, "k": 4, "c": "-1/(2*lam)"},
        {"i": 1, "j": 2, "k": 5, "c": "1/lam"},
        {"i": 1, "j": 3, "k": 4, "c": "(4*lam-1)/(4*lam)"},
        {"i": 1, "j": 3, "k": 5, "c": "1/(2*lam)"},
        {"i": 1, "j": 5, "k": 6, "c": 1},
        {"i": 2, "j": 3, "k": 6, "c": "1/lam"},
    ],
    "omega": "canonical",
}


class TestValidate:
    def test_n13(self, tmp_path, capsys):
        code, rep = run_json(capsys, "validate", write(tmp_path, N13))
        assert code == 0
        assert rep["valid"] and rep["nilpotency_step"] == 3 and rep["unimodular"]

    def test_duplicate_constant(self, tmp_path, capsys):
        doc = dict(N13, brackets=N13["brackets"] + [{"i": 1, "j": 2, "k": 4, "c": 3}])
        code, out, err = run(capsys, "validate", write(tmp_path, doc))
        assert code == 2
        assert "duplicate" in err and "brackets[6]" in err

    def test_not_closed(self, tmp_path, capsys):
        doc = {"dim": 6, "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1}], "omega": "canonical"}
        code, rep = run_json(capsys, "validate", write(tmp_path, doc))
        assert code == 2
        assert rep["closedness_defect"] == 1.0
        assert not rep["valid"]

    def test_jacobi_failure(self, tmp_path, capsys):
        doc = {"dim": 4, "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1}, {"i": 1, "j": 3, "k": 1, "c": 1}],
               "omega": "canonical"}
        code, rep = run_json(capsys, "validate", write(tmp_path, doc))
        assert code == 2
        assert rep["jacobi_defect"] > 0

    def test_bad_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{\n  \"dim\": 6,\n  oops\n}")
        code, _, err = run(capsys, "validate", str(path))
        assert code == 2 and "line 3" in err

    def test_entry_source(self, capsys):
        code, rep = run_json(capsys, "validate", "--entry", "raw.n18.omega2", "--param", "t=3")
        assert code == 0 and rep["nilpotency_step"] == 2

    def test_no_input(self, capsys):
        code, _, err = run(capsys, "validate")
        assert code == 2 and "no input" in err


class TestCurvature:
    def test_dim8(self, capsys):
        code, rep = run_json(capsys, "curvature", "--entry", "example.dim8")
        assert code == 0
        assert np.allclose(rep["ric_ac"], np.diag([0, 1, 2, 4, -4, -2, -1, 0]) / 56, atol=1e-12)

    def test_abelian(self, tmp_path, capsys):
        code, rep = run_json(capsys, "curvature", write(tmp_path, {"dim": 6, "brackets": []}))
        assert code == 0
        for key in ("mm_gl", "ricci", "ric_ac", "chern_ricci_operator", "h_hat"):
            assert np.allclose(rep[key], 0)
        assert rep["scalar_curvature"] == 0

    def test_einstein(self, capsys):
        code, rep = run_json(capsys, "curvature", "--entry", "example.einstein")
        assert code == 0
        assert np.max(np.abs(np.array(rep["ricci"]) + 6 * np.eye(6))) <= 1e-10

    def test_text_output(self, capsys):
        code, out, _ = run(capsys, "curvature", "--entry", "example.einstein")
        assert code == 0 and "scalar_curvature: -36" in out


class TestMinimal:
    def test_n11_lambda0(self, capsys):
        code, rep = run_json(capsys, "minimal", "--entry", "n11.omega1.lambda0")
        assert code == 0
        assert rep["status"] == "minimal"
        assert len(rep["y"]) == 3
        assert rep["decomposition"]["scalar"] == pytest.approx(-1.0)
        assert np.allclose(rep["decomposition"]["derivation_diag"], 0.5 * np.array([1, 1, 2, 2, 3, 3]), atol=1e-9)

    def test_n11_lambda1(self, capsys):
        code, out, _ = run(capsys, "minimal", "--entry", "n11.omega1.lambda", "--param", "lam=1")
        assert code == 3
        assert "no_positive_solution" in out

    def test_not_nice(self, tmp_path, capsys):
        from scipy.linalg import expm

        from aksoliton.algebra_io import bracket_to_json
        from aksoliton.catalog import get_entry
        from aksoliton.lie_core import act_basis_change
        from aksoliton.symplectic import canonical_form

        # a generic symplectic change of basis destroys niceness but keeps omega_cn
        rng = np.random.default_rng(0)
        s = rng.normal(size=(6, 6))
        g = expm(0.3 * canonical_form(3).matrix @ (s + s.T))
        mu = act_basis_change(g, get_entry("table3step.14.1").bracket())
        doc = {"dim": 6, "brackets": bracket_to_json(mu)}
        code, rep = run_json(capsys, "minimal", write(tmp_path, doc))
        assert code == 4 and rep["status"] == "not_nice"

    def test_not_converged(self, capsys):
        code, rep = run_json(capsys, "minimal", "--entry", "n11.omega1.lambda0", "--max-iter", "1")
        assert code == 5 and rep["status"] == "not_converged"

    def test_noncanonical_form_is_normalized(self, capsys):
        code, rep = run_json(capsys, "minimal", "--entry", "raw.n18.omega3")
        assert "basis_change" in rep
        assert code in (0, 4)

    def test_invalid_input(self, tmp_path, capsys):
        doc = {"dim": 6, "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1}]}
        code, _, _ = run(capsys, "minimal", write(tmp_path, doc))
        assert code == 2


class TestCertify:
    def test_einstein(self, capsys):
        code, rep = run_json(capsys, "certify", "--entry", "example.einstein")
        assert code == 0 and rep["verdict"] == "refuted_on_nice_diagonal"

    def test_dim8(self, capsys):
        code, rep = run_json(capsys, "certify", "--entry", "example.dim8")
        assert code == 0 and rep["is_soliton"]
        assert rep["c"] == pytest.approx(-3 / 56)


class TestCatalogCommands:
    def test_list(self, capsys):
        code, out, _ = run(capsys, "catalog", "list", "--tag", "table2step")
        assert code == 0
        assert out.split() == [f"table2step.{r}" for r in
                               ["16.1", "17", "18.1", "18.2", "18.3", "23.1", "23.2", "23.3", "24.1", "24.2", "25"]]

    def test_show_round_trips_into_commands(self, tmp_path, capsys):
        code, out, _ = run(capsys, "catalog", "show", "table2step.25")
        assert code == 0
        path = tmp_path / "e.json"
        path.write_text(out)
        code, rep = run_json(capsys, "certify", str(path))
        assert code == 0 and rep["verdict"] == "soliton_via_cond2"

    def test_verify_subset(self, capsys):
        code, out, _ = run(capsys, "catalog", "verify", "--entry", "table3step.14.1", "--entry", "table2step.25")
        assert code == 0
        assert "2/2 entries passed" in out

    def test_verify_mismatch_exit(self, capsys):
        code, rep = run_json(capsys, "catalog", "verify", "--entry", "table2step.25", "--tol", "1e-30")
        assert code == 5
        assert rep["failed"] == ["table2step.25"]

    def test_verify_full(self, capsys):
        code, out, _ = run(capsys, "catalog", "verify")
        assert code == 0, out

    def test_unknown_entry(self, capsys):
        code, _, err = run(capsys, "catalog", "verify", "--entry", "nope")
        assert code == 2 and "nope" in err


class TestJsonContract:
    def test_seventeen_digits(self):
        assert dumps_json({"x": 0.1}) == '{\n  "x": 0.10000000000000001\n}'
        assert dumps_json([1.0, -0.0, float("nan")]) == "[1, 0, null]"

    def test_valid_and_byte_identical(self):
        argv = [sys.executable, "-m", "aksoliton.cli", "minimal", "--entry", "n13.omega2.lambda",
                "--param", "lam=2", "--format", "json", "--seed", "3"]
        first = subprocess.run(argv, capture_output=True, check=True).stdout
        second = subprocess.run(argv, capture_output=True, check=True).stdout
        assert first == second
        json.loads(first)

    @pytest.mark.parametrize("argv,code", [
        (["validate", "--entry", "example.einstein"], 0),
        (["minimal", "--entry", "n11.omega1.lambda", "--param", "lam=1"], 3),
        (["catalog", "verify", "--entry", "table2step.25", "--tol", "1e-30"], 5),
    ])
    def test_exit_codes_by_script(self, argv, code):
        proc = subprocess.run([sys.executable, "-m", "aksoliton.cli", *argv], capture_output=True)
        assert proc.returncode == code
