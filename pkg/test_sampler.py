#!/usr/bin/env python3
"""
Tests for the sampler package
=============================

Graph sampling invariants, girth conditioning and the graph text format.
"""

import numpy as np
import pytest

from src.ensemble import EnsembleParams, connection_law, position_profile
from src.sampler import (
    GirthConditioner,
    condition_girth,
    find_short_cycles,
    load_graph,
    parse_graph,
    sample_graph,
    save_graph,
    serialize_graph,
    spawn_seeds,
    write_alist,
)
from src.utils.exceptions import GraphFormatError, ValidationError


def has_four_cycle(graph) -> bool:
    """Two variables sharing two checks, found from H^T H."""
    H = graph.parity_check_matrix().astype(np.int64)
    overlap = (H.T @ H).toarray()
    np.fill_diagonal(overlap, 0)
    return bool((overlap >= 2).any())


class TestSampleGraph:
    """Construction step 4 plus shortening."""

    def test_degrees(self, tiny_params):
        graph = sample_graph(tiny_params, seed=1)
        assert graph.num_variables == 40
        assert graph.var_checks.shape == (40, 3)
        degrees = graph.check_degrees
        for c, (pos, cap) in enumerate(zip(graph.check_positions, graph.check_capacity)):
            if tiny_params.is_interior(int(pos)):
                assert degrees[c] == cap
            else:
                assert degrees[c] <= cap

    def test_socket_positions(self, small_graph):
        expected = small_graph.var_positions[:, None] + np.arange(3)[None, :]
        np.testing.assert_array_equal(small_graph.edge_positions(), expected)

    def test_counts_follow_profile(self, small_params, small_graph):
        prof = position_profile(small_params)
        variables, checks = small_graph.position_counts()
        assert variables.tolist() == [prof.variable_count(i) for i in small_params.variable_positions]
        assert checks.tolist() == [prof.check_count(i) for i in small_params.check_positions]

    def test_deterministic(self, small_params):
        assert sample_graph(small_params, 11) == sample_graph(small_params, 11)
        assert sample_graph(small_params, 11) != sample_graph(small_params, 12)

    def test_real_socket_fraction_matches_s(self):
        """At alpha = 1 the share of check sockets kept at position i is exactly s(i)."""
        params = EnsembleParams(dv=3, dc=6, L=2, alpha=1, M=60)
        graph = sample_graph(params, seed=3)
        law = connection_law(params)
        degrees = graph.check_degrees
        for i in params.check_positions:
            at = graph.check_positions == i
            kept = degrees[at].sum() / graph.check_capacity[at].sum()
            assert kept == pytest.approx(law.s(i), abs=1e-12)

    def test_empty_boundary_checks(self):
        """Frequency of checks losing every edge against (1 - s)^d_c."""
        params = EnsembleParams(dv=3, dc=6, L=2, alpha=1, M=200)
        prof = position_profile(params)
        s = connection_law(params).s(-2)
        p_empty = (1 - s) ** 6
        empty = total = 0
        for seed in spawn_seeds(5, 50):
            graph = sample_graph(params, seed)
            at = graph.check_positions == -2
            empty += int(np.count_nonzero(graph.check_degrees[at] == 0))
            total += prof.check_count(-2)
        sd = np.sqrt(total * p_empty * (1 - p_empty))
        assert abs(empty - total * p_empty) < 4 * sd

    def test_edge_perspective_degrees_match_rho_prime(self):
        """Degree seen from a real edge at a boundary position against rho'(m, i)."""
        params = EnsembleParams(dv=3, dc=6, L=2, alpha=1, M=200)
        law = connection_law(params)
        counts = np.zeros(params.d_c + 1)
        edges = 0
        for seed in spawn_seeds(9, 50):
            graph = sample_graph(params, seed)
            degrees = graph.check_degrees[graph.check_positions == -2]
            counts += np.bincount(degrees, minlength=params.d_c + 1)
            edges += int(degrees.sum())
        for m in range(1, params.d_c + 1):
            # checks of degree m carry m of the real edges
            expected = edges * law.rho_prime(m, -2) / m
            assert abs(counts[m] - expected) < 4 * np.sqrt(expected) + 0.02 * expected


class TestGirthConditioning:
    """Same-position swaps removing short cycles."""

    def test_removes_four_cycles(self):
        params = EnsembleParams(dv=3, dc=6, L=2, alpha=1, M=100)
        graph = sample_graph(params, seed=2)
        assert has_four_cycle(graph)
        clean = condition_girth(graph, max_removed_cycle=4, seed=2)
        assert not has_four_cycle(clean)
        assert clean.girth_conditioned and clean.max_removed_cycle == 4

    def test_structure_preserved(self):
        params = EnsembleParams(dv=3, dc=6, L=2, alpha=1, M=100)
        graph = sample_graph(params, seed=4)
        clean = condition_girth(graph, max_removed_cycle=4, seed=4)
        np.testing.assert_array_equal(clean.check_degrees, graph.check_degrees)
        np.testing.assert_array_equal(clean.var_positions, graph.var_positions)
        np.testing.assert_array_equal(clean.edge_positions(), graph.edge_positions())
        clean.validate()

    def test_clean_graph_is_untouched(self):
        params = EnsembleParams(dv=3, dc=6, L=2, alpha=1, M=100)
        clean = condition_girth(sample_graph(params, seed=6), max_removed_cycle=4, seed=6)
        conditioner = GirthConditioner(max_removed_cycle=4)
        again = conditioner.condition(clean, seed=99)
        assert conditioner.swaps == 0
        assert again == clean

    def test_odd_cycle_length_rejected(self):
        with pytest.raises(ValidationError):
            GirthConditioner(max_removed_cycle=5)

    @pytest.mark.slow
    def test_girth_eight_at_experiment_scale(self):
        params = EnsembleParams(dv=3, dc=6, L=3, alpha="11/10", M=500)
        clean = condition_girth(sample_graph(params, seed=1), max_removed_cycle=6, seed=1)
        assert find_short_cycles(clean, 6) == {}


class TestGraphFormat:
    """Canonical text serialization."""

    def test_round_trip(self, small_graph):
        assert parse_graph(serialize_graph(small_graph)) == small_graph

    def test_canonical_bytes(self, small_params):
        assert serialize_graph(sample_graph(small_params, 5)) == serialize_graph(sample_graph(small_params, 5))

    def test_truncated_stream_names_section(self, small_graph):
        text = serialize_graph(small_graph).decode()
        truncated = text.split("CHECKS")[0]
        with pytest.raises(GraphFormatError) as info:
            parse_graph(truncated)
        assert info.value.missing_section == "CHECKS"

    def test_malformed_line_number(self, small_graph):
        lines = serialize_graph(small_graph).decode().splitlines()
        lines[4] = "0 x"
        with pytest.raises(GraphFormatError) as info:
            parse_graph("\n".join(lines))
        assert info.value.line_number == 5

    def test_save_and_load(self, small_graph, tmp_path):
        path = save_graph(small_graph, tmp_path / "g.sfcgraph")
        assert load_graph(path) == small_graph

    def test_alist_header(self, tiny_params, tmp_path):
        graph = sample_graph(tiny_params, seed=1)
        path = tmp_path / "g.alist"
        write_alist(graph, path)
        first = path.read_text().splitlines()[0]
        assert first == f"{graph.num_variables} {graph.num_checks}"

    def test_binary_garbage_is_a_format_error(self, tmp_path):
        path = tmp_path / "bad.sfcgraph"
        path.write_bytes(b"SFCGRAPH 1\n\xff\xfe")
        with pytest.raises(GraphFormatError) as info:
            load_graph(path)
        assert info.value.file_path == str(path)


class TestGraphValidation:
    """Structural invariants raise explicit errors."""

    def test_sampled_graph_is_valid(self, small_graph):
        small_graph.validate()

    def test_misplaced_socket(self, small_graph):
        bad = small_graph.var_checks.copy()
        bad[0, 1] = bad[0, 0]
        with pytest.raises(ValidationError):
            small_graph.with_var_checks(bad, False, 0).validate()

    def test_overfull_check(self, tiny_params):
        graph = sample_graph(tiny_params, seed=1)
        left = graph.check_positions == -tiny_params.L
        # the remainder check at -L has capacity 1
        target = int(np.flatnonzero(left)[np.argmin(graph.check_capacity[left])])
        assert graph.check_capacity[target] == 1
        bad = graph.var_checks.copy()
        bad[graph.var_positions == -tiny_params.L, 0] = target
        with pytest.raises(ValidationError):
            graph.with_var_checks(bad, False, 0).validate()
