"""Command-line interface: exit codes, JSON output, determinism, env vars."""

import json

import pytest

from curveflow.cli import (EXIT_FAIL, EXIT_PASS, EXIT_UNDECIDED, EXIT_USAGE,
                           run)


def run_json(argv, tmp_path, name="out.json"):
    path = tmp_path / name
    code = run(argv + ["--json", str(path)])
    return code, json.loads(path.read_text())


class TestExitCodes:
    def test_thermo_pass(self, tmp_path):
        code, payload = run_json(["thermo", "general"], tmp_path)
        assert code == EXIT_PASS
        assert payload["schema"] == 1
        assert payload["pass"] is True
        assert payload["kappa_cross_term_zero"] is True

    def test_admissible_verdict(self, tmp_path):
        code, payload = run_json(
            ["admissible", "--gamma", "-1", "1", "1", "2", "--c1", "1",
             "--c2", "1", "--s0", "0", "--ratio", "rational:1:2"], tmp_path)
        assert code == EXIT_PASS
        assert payload["verdict"] is True

    def test_admissible_false_verdict_reports_conditions(self, tmp_path):
        code, payload = run_json(
            ["admissible", "--gamma", "-1", "1", "1", "2", "--c1", "-1",
             "--c2", "1", "--s0", "0", "--ratio", "rational:1:2"], tmp_path)
        assert code == EXIT_PASS  # the command answers; it does not assert
        assert payload["verdict"] is False
        assert "C1" in payload["violated_conditions"]

    def test_check_failure_exits_1(self, tmp_path):
        # |lambda| >= 1 puts the linear lift outside its domain
        code, payload = run_json(["lift", "linear", "--lambda", "2"], tmp_path)
        assert code == EXIT_FAIL
        assert payload["pass"] is False
        assert "error" in payload

    def test_usage_errors_exit_2(self):
        assert run(["admissible", "--gamma", "1", "2", "3", "--c1", "1",
                    "--c2", "1", "--s0", "0"]) == EXIT_USAGE
        assert run(["symmetries", "cubic"]) == EXIT_USAGE
        assert run(["admissible", "--gamma", "1", "2", "3", "4", "--c1", "x",
                    "--c2", "1", "--s0", "0"]) == EXIT_USAGE
        assert run(["admissible", "--gamma", "1", "2", "3", "4", "--c1", "1",
                    "--c2", "1", "--s0", "0", "--ratio", "sometimes"]) == EXIT_USAGE
        assert run(["lift", "power", "--lambda2", "2"]) == EXIT_USAGE

    def test_exit_code_constants(self):
        assert (EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_UNDECIDED) == (0, 1, 2, 3)


class TestLiftCommand:
    def test_writes_csv(self, tmp_path):
        csv_path = tmp_path / "lift.csv"
        code, payload = run_json(
            ["lift", "quadratic", "--out", str(csv_path)], tmp_path)
        assert code == EXIT_PASS
        assert payload["max_ode_residual"] < 1e-8
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "tau,l,z,a"
        assert len(lines) == 2002

    def test_curve_file_input(self, tmp_path):
        import numpy as np
        tau = np.linspace(0.0, 1.0, 501)
        curve_path = tmp_path / "curve.csv"
        with open(curve_path, "w") as fh:
            fh.write("tau,x,y\n")
            for row in zip(tau, tau, 0 * tau):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        code, payload = run_json(
            ["lift", "log", "--curve", str(curve_path)], tmp_path)
        assert code == EXIT_PASS


class TestDeterminism:
    def test_identical_seed_gives_identical_json(self, tmp_path):
        argv = ["admissible", "--gamma", "-1", "1", "1", "2", "--c1", "1",
                "--c2", "1", "--s0", "0", "--ratio", "rational:1:2",
                "--sweep", "40", "--seed", "5"]
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        assert run(argv + ["--json", str(a)]) == EXIT_PASS
        assert run(argv + ["--json", str(b)]) == EXIT_PASS
        assert a.read_bytes() == b.read_bytes()

    def test_env_variable_binding(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CURVEFLOW_SEED", "9")
        path = tmp_path / "env.json"
        code = run(["admissible", "--gamma", "-1", "1", "1", "2", "--c1", "1",
                    "--c2", "1", "--s0", "0", "--ratio", "rational:1:2",
                    "--sweep", "25", "--json", str(path)])
        assert code == EXIT_PASS
        explicit = tmp_path / "explicit.json"
        monkeypatch.delenv("CURVEFLOW_SEED")
        run(["admissible", "--gamma", "-1", "1", "1", "2", "--c1", "1",
             "--c2", "1", "--s0", "0", "--ratio", "rational:1:2",
             "--sweep", "25", "--seed", "9", "--json", str(explicit)])
        assert path.read_bytes() == explicit.read_bytes()


class TestSymmetriesCommand:
    def test_generic_table_passes(self, tmp_path):
        code, payload = run_json(["symmetries", "generic"], tmp_path)
        assert code == EXIT_PASS
        assert [e["name"] for e in payload["generators"]] == [
            "X1", "X2", "X3", "X4", "X5"]
        assert all(e["pass"] for e in payload["generators"])

    def test_linear_records_both_variants(self, tmp_path):
        code, payload = run_json(["symmetries", "linear"], tmp_path)
        assert code == EXIT_PASS
        assert payload["x9_variants"] == {"section": True, "appendix": False}


class TestAlgebraCommand:
    def test_power_case(self, tmp_path):
        code, payload = run_json(["algebra", "power"], tmp_path)
        assert code == EXIT_PASS
        assert payload["derived_series_dims"] == [6, 3, 0]
        assert payload["kernel_dim"] == 1
        assert payload["solvable"] is True
        assert payload["theta_span_matches"] is True


class TestInvariantsCommand:
    def test_kinematic_generic(self, tmp_path):
        code, payload = run_json(["invariants", "generic"], tmp_path)
        assert code == EXIT_PASS
        assert payload["kinematic"]["independent_order1"] == 4
        assert all(payload["kinematic"]["invariants"].values())

    def test_euler_exp_flags(self, tmp_path):
        code, payload = run_json(["invariants", "exp", "--euler"], tmp_path)
        assert code == EXIT_PASS  # flagged entries are reported, not hidden
        assert payload["euler_flagged"] == [
            "exp(-xi2*a/2)*D_t", "rho*u*exp(xi2*xi4*a/(2*xi5))",
            "u*exp(-xi2*a/2)"]
