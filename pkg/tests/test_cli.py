"""CLI contract: exit codes, file outputs, determinism, config handling."""

import json
import os

import numpy as np
import pytest

from oscillab.cli import run
from oscillab.numerics import Grid, Weight, save_weight_csv


class TestExitCodes:
    def test_validate_phase_pass(self, capsys):
        assert run(["validate-phase", "--kind", "monomial", "--ell", "3"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out

    def test_validate_phase_hypothesis_failure(self, tmp_path):
        # x^3 is not finite type 2 at the origin
        cfg = tmp_path / "phase.json"
        cfg.write_text(json.dumps({"phase": {"kind": "monomial", "ell": 3}}))
        assert run(["validate-phase", "--config", str(cfg), "--ell", "2",
                    "--u", "0.25", "--epsilon", "0.5"]) == 1

    def test_validate_phase_bad_ell_is_usage_error(self):
        assert run(["validate-phase", "--kind", "monomial", "--ell", "1"]) == 2

    def test_unknown_subcommand_is_usage_error(self):
        assert run(["no-such-command"]) == 2

    def test_bad_weight_source(self, tmp_path):
        assert run(["maximal", "--ell", "3", "--lambda", "64",
                    "--weight", "nonsense", "--out", str(tmp_path)]) == 2


class TestMaximalCommand:
    def test_constant_weight_closed_form(self, capsys, tmp_path):
        code = run(["maximal", "--ell", "3", "--lambda", "64",
                    "--weight", "const", "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert code == 0
        value = float(out.splitlines()[0].split(":")[1])
        assert abs(value / (2 * 64.0 ** (-2 / 3)) - 1) <= 0.03

    def test_csv_weight_and_named_operator(self, tmp_path, capsys):
        lam = 64.0
        g = Grid.from_step(0.0, 2.0, 1.0 / (16 * lam))
        path = str(tmp_path / "w.csv")
        save_weight_csv(Weight(g, np.ones(g.n)), path)
        code = run(["maximal", "--ell", "3", "--lambda", "64",
                    "--weight", f"csv:{path}", "--op", "M", "--out", str(tmp_path)])
        assert code == 0
        value = float(capsys.readouterr().out.splitlines()[0].split(":")[1])
        assert value == pytest.approx(1.0)


class TestSweepOutputs:
    def test_sweep_operator_files_and_determinism(self, tmp_path, capsys):
        args = ["sweep-operator", "--kind", "monomial", "--ell", "3",
                "--lambdas", "64..256", "--out", str(tmp_path), "--emit-plots"]
        assert run(args) == 0
        sweep = (tmp_path / "sweep.csv").read_bytes()
        summary = (tmp_path / "summary.json").read_bytes()
        assert (tmp_path / "plot-sweep-operator.svg").exists()
        payload = json.loads(summary)
        assert payload["pass"] is True
        assert abs(payload["slope"] + 1 / 3) <= 0.15
        # byte-identical rerun
        assert run(args) == 0
        assert (tmp_path / "sweep.csv").read_bytes() == sweep
        assert (tmp_path / "summary.json").read_bytes() == summary

    def test_sweep_maximal_summary(self, tmp_path, capsys):
        assert run(["sweep-maximal", "--ell", "4", "--lambdas", "16..256",
                    "--out", str(tmp_path)]) == 0
        payload = json.loads((tmp_path / "summary.json").read_text())
        assert abs(payload["slope"] - payload["target_slope"]) <= 0.1

    def test_csv_values_trace_to_report(self, tmp_path, capsys):
        assert run(["sweep-maximal", "--ell", "3", "--lambdas", "16..64",
                    "--out", str(tmp_path)]) == 0
        rows = (tmp_path / "sweep.csv").read_text().strip().splitlines()
        assert rows[0] == "experiment,ell,lambda,value"
        for row in rows[1:]:
            name, ell, lam, value = row.split(",")
            assert name == "sweep-maximal" and int(ell) == 3
            float(lam), float(value)  # round-trippable reprs


class TestConfig:
    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({
            "phase": {"kind": "monomial", "ell": 3},
            "ell": 3,
            "lambdas": [64, 128, 256],
            "out_dir": str(tmp_path / "cfgout"),
        }))
        assert run(["sweep-operator", "--config", str(cfg)]) == 0
        assert (tmp_path / "cfgout" / "summary.json").exists()

    def test_malformed_config(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text("{not json")
        assert run(["sweep-operator", "--config", str(cfg)]) == 2


class TestChecks:
    def test_check_lp(self, tmp_path, capsys):
        assert run(["check-lp", "--out", str(tmp_path), "--pairs", "3"]) == 0
        payload = json.loads((tmp_path / "summary.json").read_text())
        assert payload["pass"] is True
        assert payload["telescoping_deviation"] <= 1e-12
        assert (tmp_path / "results.csv").exists()

    def test_check_main_small(self, tmp_path, capsys):
        assert run(["check-main", "--kind", "monomial", "--ell", "3",
                    "--lambdas", "64..128", "--pairs", "5",
                    "--out", str(tmp_path)]) == 0
        rows = (tmp_path / "results.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 2 * 5
        header = rows[0].split(",")
        assert header == ["experiment", "ell", "lambda", "p", "seed",
                          "lhs", "rhs", "ratio"]
        for row in rows[1:]:
            parts = row.split(",")
            lhs, rhs, ratio = float(parts[5]), float(parts[6]), float(parts[7])
            if rhs > 0:
                assert abs(ratio * rhs - lhs) <= 1e-12 * max(lhs, 1.0)

    def test_check_lemmas_small(self, tmp_path, capsys):
        assert run(["check-lemmas", "--kind", "monomial", "--ell", "3",
                    "--lambdas", "256..1024", "--pairs", "4",
                    "--out", str(tmp_path)]) == 0
        payload = json.loads((tmp_path / "summary.json").read_text())
        assert payload["pass"] is True

    def test_check_lp_family_config(self, tmp_path, capsys):
        cfg = tmp_path / "fam.json"
        cfg.write_text(json.dumps({"dyadic": {"kmin": -1, "kmax": 7},
                                   "spaced": {"L": 1.0}}))
        out = tmp_path / "out"
        assert run(["check-lp", "--config", str(cfg), "--out", str(out),
                    "--pairs", "2"]) == 0
        payload = json.loads((out / "summary.json").read_text())
        assert list(payload["spaced_constants"]) == ["1.0"]


class TestThreadCap:
    def test_thread_pool_results_identical(self, tmp_path, monkeypatch, capsys):
        args = ["sweep-maximal", "--ell", "3", "--lambdas", "16..128",
                "--out", str(tmp_path / "a")]
        assert run(args) == 0
        serial = (tmp_path / "a" / "sweep.csv").read_bytes()
        monkeypatch.setenv("OSCILLAB_THREADS", "4")
        args[-1] = str(tmp_path / "b")
        assert run(args) == 0
        assert (tmp_path / "b" / "sweep.csv").read_bytes() == serial
