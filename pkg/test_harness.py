#!/usr/bin/env python3
"""
Tests for the harness package
=============================

Statistics, GF(2) rank, the waterfall campaign with checkpoints, plot data,
table reproduction and the SC/SFC comparison.
"""

import csv
import json

import numpy as np
import pytest
from scipy import sparse

from src.ensemble import EnsembleParams
from src.evolution import solve_ege
from src.harness import (
    Cell,
    CellStats,
    TableRegistry,
    TableReport,
    compare_sc_sfc,
    emit_plot_data,
    evolution_filename,
    get_table_registry,
    gf2_rank,
    rank_rate,
    reproduce_tables,
    rule_of_three,
    run_waterfall,
    unit_seed,
    wilson_interval,
    write_evolution_csv,
)
from src.harness.tables import ExperimentEnsembleTable
from src.sampler import sample_graph
from src.utils.config import ExperimentConfig, SolverSettings
from src.utils.exceptions import (
    ConfigurationError,
    MissingArtifactError,
    ToleranceFailure,
    ValidationError,
)


def make_config(tmp_path, params, name="tiny", **overrides):
    data = dict(name=name, ensemble=params, epsilons=[0.3, 0.5], codes=3, codewords=5,
                seed=11, output_dir=tmp_path)
    data.update(overrides)
    return ExperimentConfig(**data)


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class TestStatistics:
    """Wilson interval, rule of three and cell accumulation."""

    def test_wilson_no_errors(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == 0.0
        assert hi == pytest.approx(0.03699, abs=1e-4)

    def test_wilson_all_errors(self):
        lo, hi = wilson_interval(100, 100)
        assert hi == 1.0
        assert lo == pytest.approx(1 - 0.03699, abs=1e-4)

    def test_wilson_contains_estimate(self):
        lo, hi = wilson_interval(17, 250)
        assert lo < 17 / 250 < hi

    def test_rule_of_three(self):
        assert rule_of_three(300) == pytest.approx(0.01)
        assert rule_of_three(0) == 1.0

    def test_merge_is_additive(self):
        a, b = CellStats(), CellStats()
        a.add_word(100, 0, 3)
        a.add_word(100, 4, 7)
        b.add_word(100, 0, 3)
        merged = a.merge(b)
        assert (merged.words, merged.word_errors, merged.bit_errors) == (3, 1, 4)
        assert merged.iteration_hist == {3: 2, 7: 1}
        assert merged.ber == pytest.approx(4 / 300)
        assert b.merge(a).to_dict() == merged.to_dict()

    def test_upper_bound_without_errors(self):
        stats = CellStats()
        for _ in range(300):
            stats.add_word(10, 0, 1)
        assert stats.wer == 0.0
        assert stats.wer_upper_bound == pytest.approx(0.01)

    def test_dict_round_trip(self):
        stats = CellStats()
        stats.add_word(50, 2, 9)
        assert CellStats.from_dict(json.loads(json.dumps(stats.to_dict()))) == stats


class TestRank:
    """GF(2) rank and the true code rate."""

    def test_dependent_rows(self):
        assert gf2_rank(np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])) == 2

    def test_identity(self):
        assert gf2_rank(np.eye(9, dtype=int)) == 9

    def test_sparse_input(self):
        H = sparse.csr_matrix(np.array([[1, 0, 1, 1], [0, 1, 1, 0], [1, 1, 0, 1]]))
        assert gf2_rank(H) == 2

    def test_rank_rate_is_at_least_design_rate(self, small_graph):
        design = 1 - small_graph.num_checks / small_graph.num_variables
        assert rank_rate(small_graph) >= design - 1e-12


class TestCampaign:
    """Checkpointed waterfall runs."""

    def test_unit_seed(self):
        assert unit_seed(1, 2, 3) == unit_seed(1, 2, 3)
        assert unit_seed(1, 2, 3) != unit_seed(1, 2, 4)
        assert 0 <= unit_seed(7) < 2 ** 63

    def test_outputs(self, tmp_path, tiny_params):
        config = make_config(tmp_path, tiny_params)
        table = run_waterfall(config)
        run_dir = tmp_path / "tiny"
        assert (run_dir / "config.yaml").exists()
        assert len(list((run_dir / "checkpoints").glob("code_*.json"))) == 3
        rows = read_csv(run_dir / "results.csv")
        assert [float(r["epsilon"]) for r in rows] == [0.3, 0.5]
        assert table.codes_done == 3 and table.num_variables == 40
        for cell in table.cells:
            assert cell.stats.words == 15
            assert cell.stats.mismatches == 0
            assert cell.stats.cross_checks == 3
        summary = json.loads((run_dir / "summary.json").read_text())
        assert summary["codes_done"] == 3

    def test_deterministic(self, tmp_path, tiny_params):
        a = run_waterfall(make_config(tmp_path, tiny_params, name="a"))
        b = run_waterfall(make_config(tmp_path, tiny_params, name="b"))
        assert [c.stats.to_dict() for c in a.cells] == [c.stats.to_dict() for c in b.cells]

    def test_resume_after_interruption(self, tmp_path, tiny_params):
        config = make_config(tmp_path, tiny_params)
        full = run_waterfall(config)
        (tmp_path / "tiny" / "checkpoints" / "code_00001.json").unlink()
        calls = []
        resumed = run_waterfall(config, resume=True, progress=lambda done, total: calls.append(done))
        assert calls[0] == 2 and calls[-1] == 3
        assert [c.stats.to_dict() for c in resumed.cells] == [c.stats.to_dict() for c in full.cells]

    def test_resume_with_other_config(self, tmp_path, tiny_params):
        run_waterfall(make_config(tmp_path, tiny_params))
        with pytest.raises(ConfigurationError):
            run_waterfall(make_config(tmp_path, tiny_params, codewords=6), resume=True)

    def test_cell_lookup(self, tmp_path, tiny_params):
        table = run_waterfall(make_config(tmp_path, tiny_params))
        assert table.cell(0.5).epsilon == 0.5
        with pytest.raises(KeyError):
            table.cell(0.4)


class TestPlotData:
    """CSV emission from run directories."""

    def test_error_rates(self, tmp_path, tiny_params):
        run_waterfall(make_config(tmp_path, tiny_params))
        written = emit_plot_data(tmp_path / "tiny")
        assert [p.name for p in written] == ["error_rates.csv", "schema.json"]
        rows = read_csv(written[0])
        assert list(rows[0].keys())[:2] == ["epsilon", "wer"]
        schema = json.loads(written[-1].read_text())
        assert set(schema) == {"error_rates.csv"}

    def test_evolution_series(self, tmp_path, tiny_params):
        traj = solve_ege(tiny_params, 0.45, settings=SolverSettings.from_defaults(adaptive=False))
        write_evolution_csv(tmp_path / evolution_filename(0.45), traj)
        written = emit_plot_data(tmp_path, out_dir=tmp_path / "out")
        assert [p.name for p in written] == ["r1_tau.csv", "schema.json"]
        rows = read_csv(written[0])
        assert list(rows[0].keys()) == ["tau", "r1@0.4500"]
        assert 0 < len(rows) <= len(traj.taus)
        assert float(rows[0]["r1@0.4500"]) == pytest.approx(traj.r1[0], rel=1e-7)

    def test_empty_directory(self, tmp_path):
        with pytest.raises(MissingArtifactError):
            emit_plot_data(tmp_path)

    def test_partial_run(self, tmp_path, tiny_params):
        run_waterfall(make_config(tmp_path, tiny_params))
        (tmp_path / "tiny" / "summary.json").unlink()
        with pytest.raises(MissingArtifactError):
            emit_plot_data(tmp_path / "tiny")


class TestTables:
    """Registry and cell comparison."""

    def test_registered_tables(self):
        assert get_table_registry().ids() == ["I", "II", "III", "IV"]

    def test_unknown_table(self):
        with pytest.raises(ValidationError):
            reproduce_tables(["IX"])

    def test_cell_kinds(self):
        assert Cell("A", "length", 10, 10, "exact").passed is True
        assert Cell("A", "gamma", 6.77, 6.95, "rel", 0.02).passed is False
        assert Cell("A", "eps_bp", 0.4703, 0.4707, "abs", 5e-4).passed is True
        assert Cell("A", "rate", 0.476, 0.49).passed is None
        report = TableReport("X", [Cell("A", "length", 10, 11, "exact"), Cell("A", "rate", 0.4, 0.5)])
        assert not report.passed and len(report.failures) == 1

    def test_registry_lookup_is_case_insensitive(self):
        registry = TableRegistry()
        registry.register("ii", ExperimentEnsembleTable)
        assert registry.get("II") is ExperimentEnsembleTable

    def test_lengths_table(self):
        (report,) = reproduce_tables(["II"])
        assert report.passed
        lengths = [c for c in report.cells if c.column == "length"]
        assert len(lengths) == 6

    def test_construction_table(self):
        (report,) = reproduce_tables(["IV"])
        assert report.passed

    def test_strict_failure(self, monkeypatch):
        def failing(self):
            yield Cell("A2", "length", 17_243, 17_244, "exact")

        monkeypatch.setattr(ExperimentEnsembleTable, "cells", failing)
        with pytest.raises(ToleranceFailure):
            reproduce_tables(["II"], strict=True)
        (report,) = reproduce_tables(["II"], strict=False)
        assert not report.passed


class TestComparison:
    """SC target against an SFC ensemble on the same plan."""

    def test_rows(self, tmp_path, tiny_params):
        sc = EnsembleParams(dv=3, dc=6, L=2, alpha=1, M=8)
        result = compare_sc_sfc(sc, tiny_params, epsilons=[0.4], codes=2, codewords=3,
                                seed=1, output_dir=tmp_path)
        (row,) = result.rows()
        assert row["epsilon"] == 0.4
        assert set(row) == {"epsilon", "sc_wer", "sfc_wer", "sc_ber", "sfc_ber",
                            "sc_iterations", "sfc_iterations"}
        assert (tmp_path / "sc_vs_sfc" / "sc" / "results.csv").exists()
        assert (tmp_path / "sc_vs_sfc" / "sfc" / "results.csv").exists()
