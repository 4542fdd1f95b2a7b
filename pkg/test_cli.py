#!/usr/bin/env python3
"""
Tests for the sfc command line
==============================

Each subcommand is driven through click's CliRunner; exit codes follow
0 success, 1 error, 2 tolerance failure.
"""

import csv
import json
from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner

from src.cli.main import cli
from src.harness import Cell, TableReport

CONFIG_DIR = Path(__file__).parent / "config"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(yaml.safe_dump({"dv": 3, "dc": 6, "L": 2, "alpha": "2", "M": 4}))
    return path


class TestInspection:
    """Commands that only look at ensembles."""

    def test_tables(self, runner):
        result = runner.invoke(cli, ["tables"])
        assert result.exit_code == 0
        assert "I, II, III, IV" in result.output

    def test_profile(self, runner):
        result = runner.invoke(cli, ["profile", "--config", str(CONFIG_DIR / "ensembles" / "a2.yaml")])
        assert result.exit_code == 0, result.output
        assert "N = 17243" in result.output

    def test_profile_csv(self, runner, tiny_config, tmp_path):
        out = tmp_path / "profile.csv"
        result = runner.invoke(cli, ["profile", "--config", str(tiny_config), "--csv", str(out)])
        assert result.exit_code == 0, result.output
        assert out.read_text().startswith("position,")

    def test_design(self, runner):
        result = runner.invoke(cli, ["design", "--length", "12750", "--rate", "0.482", "--alpha", "1.11"])
        assert result.exit_code == 0, result.output
        assert "260" in result.output and "12734" in result.output

    def test_design_infeasible(self, runner):
        result = runner.invoke(cli, ["design", "--length", "10000", "--rate", "0.6", "--alpha", "1.1"])
        assert result.exit_code == 1

    def test_bad_config_file(self, runner, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("dv: 3\ndc: 6\nL: 2\nalpha: 2\nM: 4\nextra: 1\n")
        result = runner.invoke(cli, ["profile", "--config", str(path)])
        assert result.exit_code == 1


class TestGraphCommands:
    """construct, then simulate on the stored graph."""

    def test_construct_and_simulate(self, runner, tiny_config, tmp_path):
        graph = tmp_path / "g.sfcgraph"
        alist = tmp_path / "g.alist"
        result = runner.invoke(cli, ["construct", "--config", str(tiny_config), "--seed", "3",
                                     "--out", str(graph), "--alist", str(alist)])
        assert result.exit_code == 0, result.output
        assert graph.exists() and alist.exists()

        outcomes = tmp_path / "outcomes.csv"
        result = runner.invoke(cli, ["simulate", "--graph", str(graph), "--epsilon", "0.4",
                                     "--trials", "20", "--seed", "1", "--record-trace",
                                     "--out", str(outcomes)])
        assert result.exit_code == 0, result.output
        with open(outcomes, newline="") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 20
        assert all(r["bp_agrees"] == "1" for r in rows)
        assert (tmp_path / "trace_00000.csv").exists()


class TestEvolve:
    """Single-epsilon evolution run."""

    def test_writes_csv_and_summary(self, runner, tiny_config, tmp_path):
        result = runner.invoke(cli, ["evolve", "--config", str(tiny_config), "--epsilon", "0.3",
                                     "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "evolution_0.3000.csv").exists()
        summary = json.loads((tmp_path / "summary_0.3000.json").read_text())
        assert summary["completed"] is True
        assert summary["ensemble"]["M"] == 4

    def test_bad_empirical_option(self, runner, tiny_config, tmp_path):
        result = runner.invoke(cli, ["evolve", "--config", str(tiny_config), "--epsilon", "0.3",
                                     "--empirical", "M=ten,trials=5", "--out", str(tmp_path)])
        assert result.exit_code == 1


class TestHarnessCommands:
    """reproduce, run and plot-data."""

    def test_reproduce_lengths(self, runner, tmp_path):
        out = tmp_path / "diff.json"
        result = runner.invoke(cli, ["reproduce", "--table", "II", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert json.loads(out.read_text())[0]["passed"] is True

    def test_reproduce_failure_exit_code(self, runner, monkeypatch):
        failing = TableReport("II", [Cell("A2", "length", 17_243, 17_244, "exact")])
        monkeypatch.setattr("src.cli.main.reproduce_tables", lambda *a, **k: [failing])
        result = runner.invoke(cli, ["reproduce", "--table", "II"])
        assert result.exit_code == 2

    def test_run_and_plot_data(self, runner, tmp_path):
        config = tmp_path / "experiment.yaml"
        config.write_text(yaml.safe_dump({
            "name": "cli_run",
            "ensemble": {"dv": 3, "dc": 6, "L": 2, "alpha": "2", "M": 4},
            "epsilons": [0.35, 0.5],
            "codes": 2,
            "codewords": 4,
            "seed": 5,
            "workers": 1,
            "output_dir": str(tmp_path / "runs"),
        }))
        result = runner.invoke(cli, ["run", "--config", str(config), "--plot-data"])
        assert result.exit_code == 0, result.output
        run_dir = tmp_path / "runs" / "cli_run"
        assert (run_dir / "results.csv").exists()
        assert (run_dir / "plot_data" / "error_rates.csv").exists()
        assert (run_dir / "plot_data" / "schema.json").exists()

    def test_plot_data_without_artifacts(self, runner, tmp_path):
        result = runner.invoke(cli, ["plot-data", "--run-dir", str(tmp_path)])
        assert result.exit_code == 1
