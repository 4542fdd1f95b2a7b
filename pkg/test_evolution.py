#!/usr/bin/env python3
"""
Tests for the evolution package
===============================

Initial conditions, drift, the EGE/CE solvers, threshold search and the
Monte-Carlo oracle.
"""

import math

import numpy as np
import pytest

from src.ensemble import EnsembleParams, reference_ensemble
from src.evolution import (
    bp_threshold,
    ce_initial,
    coordinate,
    default_probes,
    drift,
    ege_initial,
    empirical_moments,
    gamma_measurement,
    jacobian,
    jump_covariance,
    locate_minimum,
    solve_ce,
    solve_ege,
)
from src.utils.config import SolverSettings
from src.utils.exceptions import BracketError, SolverError, ValidationError


def thinned(n, j, q):
    """C(n, j) q^j (1 - q)^(n - j), 0 outside [0, n]."""
    if not 0 <= j <= n:
        return 0.0
    return math.comb(n, j) * q ** j * (1 - q) ** (n - j)


def coupled_chain_initial(params, eps, cross_term):
    """
    Initial mean and covariance of the alpha = 1 chain in closed form.

    Every section has mass 1, so a check socket at i is real with
    probability s = (#real positions in its window) / d_v, and an erased
    neighbour count is Binomial(d_c, s * eps).
    """
    d_v, d_c, L = params.d_v, params.d_c, params.L
    n_pos = 2 * L + d_v
    s = [len(range(max(-L, i - d_v + 1), min(L, i) + 1)) / d_v for i in range(-L, L + d_v)]
    degrees = range(1, d_c + 1)
    p = np.array([[thinned(d_c, j, si * eps) for j in degrees] for si in s])
    a1 = np.array([[thinned(d_c - 1, j - 1, si * eps) for j in degrees] for si in s])
    a0 = np.array([[thinned(d_c - 1, j, si * eps) for j in degrees] for si in s])

    mean = np.zeros((n_pos, d_c + 1))
    delta = np.zeros((n_pos, d_c + 1, n_pos, d_c + 1))
    for k in range(n_pos):
        for a in range(d_c):
            mean[k, a] = (a + 1) / d_c * d_v * p[k, a]
            for b in range(d_c):
                cov = p[k, a] * (1 - p[k, a]) if a == b else -p[k, a] * p[k, b]
                delta[k, a, k, b] = d_v / d_c * (a + 1) * (b + 1) * cov
    for ku in range(n_pos):
        for kx in range(ku + 1, min(ku + d_v, n_pos)):
            shared = len(range(max(-L, kx - L - d_v + 1), min(L, ku - L) + 1))
            for a in range(d_c):
                for b in range(d_c):
                    joint = eps * a1[ku, a] * a1[kx, b] + (1 - eps) * a0[ku, a] * a0[kx, b]
                    value = (a + 1) * (b + 1) * shared * (joint - p[ku, a] * p[kx, b])
                    delta[ku, a, kx, b] = delta[kx, b, ku, a] = value
    offsets = range(1, d_v) if cross_term == "printed" else range(d_v)
    for ku in range(2 * L + 1):
        mean[ku, d_c] = eps
        delta[ku, d_c, ku, d_c] = eps * (1 - eps)
        for off in offsets:
            kx = ku + off
            for a in range(d_c):
                if cross_term == "printed":
                    value = (a + 1) * eps * a1[kx, a] * eps * p[kx, a]
                else:
                    value = (a + 1) * eps * (1 - eps) * (a1[kx, a] - a0[kx, a])
                delta[ku, d_c, kx, a] = delta[kx, a, ku, d_c] = value
    size = n_pos * (d_c + 1)
    return mean, delta.reshape(size, size)


@pytest.fixture
def settings():
    return SolverSettings.from_defaults(adaptive=False)


class TestInitialMean:
    """EGE state at tau = 0."""

    def test_interior_value(self):
        params = EnsembleParams(dv=3, dc=6, L=3, alpha=1, M=10)
        state = ege_initial(params, 0.5)
        # 1/6 * 3 * 6 * 0.5^6
        assert state.r_hat(1, 0) == pytest.approx(0.046875, abs=1e-12)
        assert state.v_hat(0) == pytest.approx(0.5)

    def test_full_erasure(self):
        params = EnsembleParams(dv=3, dc=6, L=3, alpha=1, M=10)
        state = ege_initial(params, 1.0)
        assert state.r_hat(6, 0) == pytest.approx(3.0)
        assert state.r_hat(1, 0) == pytest.approx(0.0)

    def test_variable_mass(self, small_params):
        state = ege_initial(small_params, 0.4)
        expected = 0.4 * sum(small_params.weight(u) for u in small_params.variable_positions)
        assert state.v.sum() == pytest.approx(expected)
        assert state.v_hat(small_params.L + 1) == 0.0

    def test_edge_mass_is_d_v_per_variable(self, small_params):
        state = ege_initial(small_params, 0.4)
        assert state.r.sum() == pytest.approx(3 * state.v.sum(), rel=1e-9)

    def test_bad_epsilon(self, small_params):
        with pytest.raises(ValidationError):
            ege_initial(small_params, -0.1)


class TestInitialCovariance:
    """CE state at tau = 0."""

    def test_variable_variance(self):
        params = EnsembleParams(dv=3, dc=6, L=20, alpha="1.1", M=500)
        cov = ce_initial(params, 0.45)
        assert cov.delta(7, 0, 7, 0) == pytest.approx(1.1 ** 20 * 0.45 * 0.55, rel=1e-9)

    def test_symmetric(self, small_params):
        for cross in ("printed", "derived"):
            m = ce_initial(small_params, 0.45, cross).matrix
            np.testing.assert_allclose(m, m.T, atol=1e-14)

    def test_distant_positions_uncorrelated(self, small_params):
        cov = ce_initial(small_params, 0.45)
        for u in small_params.check_positions:
            for x in small_params.check_positions:
                if abs(u - x) >= small_params.d_v:
                    for j in (1, 3, 7):
                        for z in (1, 6, 7):
                            assert cov.delta(j, u, z, x) == 0.0

    def test_no_erasures(self, small_params):
        assert not ce_initial(small_params, 0.0).matrix.any()

    def test_same_position_interior_block(self):
        """Multinomial covariance of the check degree counts at alpha = 1."""
        params = EnsembleParams(dv=3, dc=6, L=3, alpha=1, M=10)
        eps = 0.4
        cov = ce_initial(params, eps)
        p = [math.comb(6, j) * eps ** j * (1 - eps) ** (6 - j) for j in range(7)]
        for j in range(1, 7):
            for z in range(1, 7):
                if j == z:
                    expected = 3 / 6 * j * j * p[j] * (1 - p[j])
                else:
                    expected = -3 / 6 * j * z * p[j] * p[z]
                assert cov.delta(j, 0, z, 0) == pytest.approx(expected, abs=1e-12)

    def test_derived_cross_term_vanishes_at_full_erasure(self, small_params):
        cov = ce_initial(small_params, 1.0, "derived")
        assert cov.delta(7, 0, 6, 1) == 0.0

    @pytest.mark.parametrize("eps", [0.1, 0.45, 0.9])
    @pytest.mark.parametrize("cross", ["printed", "derived"])
    def test_alpha_one_matches_coupled_chain(self, eps, cross):
        params = EnsembleParams(dv=3, dc=6, L=4, alpha=1, M=10)
        mean, delta = coupled_chain_initial(params, eps, cross)
        np.testing.assert_allclose(ege_initial(params, eps).values, mean, rtol=0, atol=1e-12)
        np.testing.assert_allclose(ce_initial(params, eps, cross).matrix, delta, rtol=0, atol=1e-12)

    def test_unknown_variant(self, small_params):
        with pytest.raises(ValidationError):
            ce_initial(small_params, 0.4, "other")

    def test_coordinate_bounds(self, small_params):
        assert coordinate(small_params, 1, -small_params.L) == 0
        with pytest.raises(IndexError):
            coordinate(small_params, 8, 0)


class TestDrift:
    """One-step expected change and its second moment."""

    def test_conservation(self, small_params):
        X = ege_initial(small_params, 0.45).values
        f = drift(small_params, X)
        assert f[:, 6].sum() == pytest.approx(-1.0, abs=1e-10)
        assert f[:, :6].sum() == pytest.approx(-3.0, abs=1e-10)

    def test_stalled_state_has_no_drift(self, small_params):
        X = ege_initial(small_params, 0.45).values.copy()
        X[:, 0] = 0.0
        assert not drift(small_params, X).any()

    def test_conservation_along_trajectory(self, small_params, settings):
        traj = solve_ege(small_params, 0.45, settings=settings)
        v0 = traj.states[0, :, 6].sum()
        checked = 0
        for X in traj.states[::5]:
            if X[:, 6].sum() < 1e-3 * v0 or X[:, 0].sum() < 1e-6:
                continue
            f = drift(small_params, X)
            assert f[:, 6].sum() == pytest.approx(-1.0, abs=1e-9)
            assert f[:, :6].sum() == pytest.approx(-3.0, abs=1e-9)
            checked += 1
        assert checked > 10

    def test_jacobian_matches_finite_differences(self):
        params = EnsembleParams(dv=3, dc=6, L=2, alpha="11/10", M=10)
        X = ege_initial(params, 0.45).values
        J = jacobian(params, X)
        h = 1e-6
        for i in range(0, X.size, 5):
            e = np.zeros(X.size)
            e[i] = h
            up = drift(params, X + e.reshape(X.shape)).reshape(-1)
            down = drift(params, X - e.reshape(X.shape)).reshape(-1)
            np.testing.assert_allclose(J[:, i], (up - down) / (2 * h), atol=1e-6)

    def test_jump_covariance_is_psd(self, small_params):
        X = ege_initial(small_params, 0.45).values
        G = jump_covariance(small_params, X)
        np.testing.assert_allclose(G, G.T, atol=1e-12)
        assert np.linalg.eigvalsh(G).min() > -1e-9 * np.abs(G).max()


class TestLocateMinimum:
    """Refined interior minimum of r1(tau)."""

    def test_parabola(self):
        taus = np.linspace(0, 3, 301)
        tau_star, r1_star, flat = locate_minimum(taus, (taus - 1.234) ** 2 + 0.5, 1e-6)
        assert tau_star == pytest.approx(1.234, abs=1e-6)
        assert r1_star == pytest.approx(0.5, abs=1e-6)
        assert not flat

    def test_monotone(self):
        taus = np.linspace(0, 1, 101)
        assert locate_minimum(taus, 1 - taus, 1e-6) == (None, None, False)

    def test_needs_rise_on_the_right(self):
        taus = np.linspace(0, 2, 201)
        assert locate_minimum(taus, np.maximum(1 - taus, 0.0), 1e-6) == (None, None, False)

    def test_flat_phase(self):
        taus = np.linspace(0, 3, 301)
        tau_star, _, flat = locate_minimum(taus, 0.5 + 1e-12 * (taus - 1.2) ** 2, 1e-6)
        assert tau_star is None and flat

    def test_tail_ignored(self):
        taus = np.linspace(0, 3, 301)
        result = locate_minimum(taus, (taus - 2.9) ** 2, 1e-6, tail_tau=2.5)
        assert result[0] is None


class TestSolvers:
    """EGE and CE integration on a short chain."""

    def test_variable_mass_decreases_at_unit_rate(self, small_params, settings):
        traj = solve_ege(small_params, 0.3, settings=settings)
        assert traj.completed
        v = traj.states[:, :, 6].sum(axis=1)
        np.testing.assert_allclose(v, v[0] - traj.taus, atol=1e-6)
        assert traj.taus[-1] == pytest.approx(v[0] * (1 - settings.stop_mass), rel=1e-9)

    def test_stall_above_capacity(self, small_params, settings):
        traj = solve_ege(small_params, 0.7, settings=settings)
        assert not traj.completed
        assert traj.stall_tau is not None and traj.stall_tau > 0

    def test_states_stay_nonnegative(self, small_params, settings):
        traj = solve_ege(small_params, 0.45, settings=settings)
        assert traj.states.min() >= 0.0

    def test_covariance_evolution(self, small_params, settings):
        mean = solve_ege(small_params, 0.45, settings=settings)
        cov = solve_ce(small_params, 0.45, mean=mean, settings=settings, tau_end=0.5,
                       snapshot_taus=[0.0, 0.25])
        assert cov.delta1[0] == pytest.approx(ce_initial(small_params, 0.45).delta1)
        assert np.all(np.isfinite(cov.delta1))
        assert cov.max_asymmetry < 1e-8
        assert cov.taus[-1] >= 0.5 - 1e-12 and cov.taus[-1] < 0.5 + mean.step + 1e-12
        assert set(cov.snapshots) == {0.0, 0.25}

    def test_stall_just_above_threshold(self):
        """Decay of r1 toward zero ends in a stall, not in ever smaller steps."""
        params = EnsembleParams(dv=3, dc=6, L=7, alpha="11/10", M=500)
        settings = SolverSettings.from_defaults(adaptive=False)
        traj = solve_ege(params, 0.475, settings=settings)
        assert not traj.completed
        assert traj.stall_tau is not None
        final = traj.states[-1]
        assert final[:, 0].sum() <= np.sqrt(settings.stall_ratio) * final[:, 6].sum()
        assert final[:, 6].sum() > 0.1 * traj.states[0, :, 6].sum()

    def test_step_cap(self, small_params):
        settings = SolverSettings.from_defaults(adaptive=False, max_steps=5)
        with pytest.raises(SolverError):
            solve_ege(small_params, 0.3, settings=settings)

    def test_covariance_stays_symmetric_along_trajectory(self, small_params, settings):
        mean = solve_ege(small_params, 0.45, settings=settings)
        end = 0.9 * mean.taus[-1]
        cov = solve_ce(small_params, 0.45, mean=mean, settings=settings, cross_term="derived",
                       tau_end=end)
        assert cov.taus[-1] >= end
        assert np.all(np.isfinite(cov.delta1))
        assert cov.max_asymmetry < 1e-8

    def test_bracket_error(self, small_params, settings):
        with pytest.raises(BracketError):
            bp_threshold(small_params, settings=settings, low=0.8, high=0.9)


class TestEmpiricalMoments:
    """Monte-Carlo oracle."""

    def test_initial_mean_matches_closed_form(self):
        params = EnsembleParams(dv=3, dc=6, L=2, alpha="11/10", M=300)
        moments = empirical_moments(params, 0.43, trials=40, seed=1, taus=[0.0, 0.5])
        model = ege_initial(params, 0.43).r1
        se = moments.r1[:, 0].std(ddof=1) / np.sqrt(moments.trials)
        assert abs(moments.r1[:, 0].mean() - model) < 4 * se + 0.02 * model
        assert moments.delta1.shape == (2,)
        assert np.all(moments.delta1 >= 0)
        assert 0.0 <= moments.normality_pvalue(0) <= 1.0

    def test_full_covariance_shape(self):
        params = EnsembleParams(dv=3, dc=6, L=1, alpha=1, M=50)
        moments = empirical_moments(params, 0.4, trials=5, seed=2, taus=[0.0], full_covariance=True)
        D = params.num_check_positions * 7
        assert moments.covariance.shape == (1, D, D)

    def test_needs_two_trials(self, small_params):
        with pytest.raises(ValidationError):
            empirical_moments(small_params, 0.4, trials=1)

    def test_default_sample_times(self, small_params):
        taus = default_probes(small_params, 0.4)
        assert len(taus) == 20
        assert taus[0] == 0.0
        assert taus[-1] == pytest.approx(0.9 * ege_initial(small_params, 0.4).v.sum())


@pytest.mark.slow
class TestPublishedEvolutionValues:
    """Threshold and gamma of the published ensembles."""

    @pytest.mark.parametrize("name", ["T1.05", "T1.10", "T1.20"])
    def test_threshold(self, name):
        ref = reference_ensemble(name)
        assert bp_threshold(ref.params, tolerance=1e-4) == pytest.approx(ref.eps_bp, abs=5e-4)

    def test_gamma(self):
        ref = reference_ensemble("A2")
        gm = gamma_measurement(ref.params, eps_bp=ref.eps_bp)
        assert gm.gamma == pytest.approx(ref.gamma, rel=0.02)

    def test_threshold_is_independent_of_m(self):
        ref = reference_ensemble("T1.10")
        settings = SolverSettings.from_defaults(adaptive=False)
        a = bp_threshold(ref.params, tolerance=1e-4, settings=settings)
        b = bp_threshold(ref.params.with_updates(M=7), tolerance=1e-4, settings=settings)
        assert a == b


@pytest.mark.slow
class TestEvolutionAgainstPeeling:
    """Mean, variance and shape of r1(tau) from peeled sample codes."""

    params = EnsembleParams(dv=3, dc=6, L=3, alpha="11/10", M=2000)
    eps = 0.4
    sample_taus = [0.0, 0.5, 1.0, 1.5]

    @pytest.fixture(scope="class")
    def moments(self):
        return empirical_moments(self.params, self.eps, trials=200, seed=3, taus=self.sample_taus)

    @pytest.fixture(scope="class")
    def mean(self):
        return solve_ege(self.params, self.eps, settings=SolverSettings.from_defaults(adaptive=False))

    def test_mean_trajectory(self, moments, mean):
        model = np.interp(moments.taus, mean.taus, mean.r1)
        observed = moments.r1.mean(axis=0)
        se = moments.r1.std(axis=0, ddof=1) / np.sqrt(moments.trials)
        assert np.all(np.abs(observed - model) < 4 * se + 0.01 * model)

    def test_variance_follows_covariance_evolution(self, moments, mean):
        settings = SolverSettings.from_defaults(adaptive=False)
        cov = solve_ce(self.params, self.eps, mean=mean, settings=settings, tau_end=max(self.sample_taus))
        model = np.interp(moments.taus, cov.taus, cov.delta1)
        np.testing.assert_allclose(moments.delta1, model, rtol=0.35)

    def test_r1_is_gaussian(self, moments):
        for i in range(len(self.sample_taus)):
            assert moments.normality_pvalue(i) > 1e-3
