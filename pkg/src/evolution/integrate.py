"""
Evolution Solvers
=================

- solve_ege: expected graph evolution, classical RK4 on the mean state
- solve_ce: covariance evolution along a mean trajectory, forward Euler
  with the Jacobian and jump covariance frozen over each RK4 interval
- locate_minimum: strict interior local minimum of r1(tau)

The variable mass decreases at exactly unit rate, so a successful
trajectory ends at tau = sum(v(0)). Close to that end the equations turn
stiff; a step that would drive an entry negative is retried with half the
step before anything is clamped.

Decoding counts as stalled once the degree-1 mass is negligible against the
remaining variable mass (solver.stall_ratio).
"""

import logging
from typing import Iterable, Optional, Tuple

import numpy as np

from ..ensemble.params import EnsembleParams
from ..utils.config import SolverSettings
from ..utils.exceptions import SolverError
from .drift import drift, jacobian, jump_covariance
from .initial import ce_initial, ege_initial
from .state import CovarianceState, CovTrajectory, MeanTrajectory, r1_coordinates

logger = logging.getLogger(__name__)

MAX_LOCAL_HALVINGS = 24
TAIL_FRACTION = 0.01


def default_step(params: EnsembleParams, settings: Optional[SolverSettings] = None) -> float:
    """RK4 step h = step_scale * alpha^L."""
    settings = settings or SolverSettings.from_defaults()
    return settings.step_scale * params.alpha_float ** params.L


def _rk4(params: EnsembleParams, X: np.ndarray, h: float) -> np.ndarray:
    k1 = drift(params, X)
    k2 = drift(params, X + 0.5 * h * k1)
    k3 = drift(params, X + 0.5 * h * k2)
    k4 = drift(params, X + h * k3)
    return X + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def locate_minimum(taus: np.ndarray, r1: np.ndarray, curvature_tolerance: float,
                   tail_tau: Optional[float] = None) -> Tuple[Optional[float], Optional[float], bool]:
    """
    First strict interior local minimum of r1, refined by a parabola through
    the three grid points around it.

    Returns:
        (tau_star, r1_star, flat). A candidate whose curvature is below
        ``curvature_tolerance`` marks a flat critical phase and ends the search.
    """
    if len(r1) < 3:
        return None, None, False
    d = np.diff(r1)
    candidates = np.flatnonzero((d[:-1] < 0) & (d[1:] >= 0)) + 1
    for i in candidates:
        if tail_tau is not None and taus[i] >= tail_tau:
            break
        t = taus[i - 1:i + 2]
        y = r1[i - 1:i + 2]
        a, b, c = np.polyfit(t - t[1], y, 2)
        curvature = 2.0 * a
        if curvature < curvature_tolerance:
            logger.debug(f"Flat r1 phase near tau={taus[i]:.4f} (curvature {curvature:.3g})")
            return None, None, True
        if r1[i + 1:].max() <= r1[i]:
            continue
        offset = float(np.clip(-b / (2.0 * a), t[0] - t[1], t[2] - t[1]))
        tau_star = float(t[1] + offset)
        r1_star = float(np.polyval((a, b, c), offset))
        return tau_star, r1_star, False
    return None, None, False


def _stalled(X: np.ndarray, d_c: int, r1_floor: float, settings: SolverSettings) -> bool:
    r1 = X[:, 0].sum()
    return r1 <= r1_floor or r1 <= settings.stall_ratio * X[:, d_c].sum()


def _integrate_mean(params: EnsembleParams, eps: float, h: float,
                    settings: SolverSettings) -> MeanTrajectory:
    d_c, L = params.d_c, params.L
    X = ege_initial(params, eps).values
    v0 = float(X[:, d_c].sum())
    r1_floor = settings.clamp_tolerance * max(1.0, float(X[:, 0].sum()))
    collapse_ratio = np.sqrt(settings.stall_ratio)
    tau_end = v0 * (1.0 - settings.stop_mass)

    taus = [0.0]
    states = [X.copy()]
    completed = v0 <= 0.0
    stall_tau = None
    tau = 0.0
    step = h
    steps = 0

    while not completed and stall_tau is None:
        if _stalled(X, d_c, r1_floor, settings):
            stall_tau = tau
            break
        if steps >= settings.max_steps:
            raise SolverError(
                f"no completion or stall after {steps} steps",
                step=step, tau=tau,
                advice="raise solver.max_steps or solver.stall_ratio",
            )
        hh = min(step, tau_end - tau)
        halvings = 0
        while True:
            X_new = _rk4(params, X, hh)
            if not np.all(np.isfinite(X_new)):
                raise SolverError(
                    "non-finite state",
                    step=hh, tau=tau,
                    advice="reduce the RK4 step (solver.step_scale)",
                )
            if X_new.min() >= -settings.clamp_tolerance or halvings >= MAX_LOCAL_HALVINGS:
                break
            hh *= 0.5
            halvings += 1
        np.maximum(X_new, 0.0, out=X_new)
        X = X_new
        tau += hh
        steps += 1
        step = min(h, 2.0 * hh) if halvings else h
        taus.append(tau)
        states.append(X.copy())
        if tau >= tau_end or X[:, d_c].sum() <= settings.stop_mass * v0:
            completed = True
        elif _stalled(X, d_c, r1_floor, settings):
            stall_tau = tau
        elif halvings >= MAX_LOCAL_HALVINGS and X[:, 0].sum() <= collapse_ratio * X[:, d_c].sum():
            # step collapsed while the degree-1 set is nearly empty
            stall_tau = tau

    taus_arr = np.asarray(taus)
    states_arr = np.stack(states)
    r1 = states_arr[:, : 2 * L + 1, 0].sum(axis=1)
    tau_star, r1_star, flat = locate_minimum(
        taus_arr, r1, settings.curvature_tolerance,
        tail_tau=v0 * (1.0 - TAIL_FRACTION),
    )
    logger.debug(f"EGE {params.label()} eps={eps:.6f} h={h:.3g}: {steps} steps, "
                 f"completed={completed}, tau*={tau_star}")
    return MeanTrajectory(
        params=params, epsilon=eps, step=h,
        taus=taus_arr, states=states_arr, r1=r1,
        completed=completed, tau_star=tau_star, r1_star=r1_star,
        flat=flat, stall_tau=stall_tau,
    )


def _relative_change(old: float, new: float) -> float:
    return abs(new - old) / max(abs(old), 1e-300)


def solve_ege(params: EnsembleParams, eps: float, step: Optional[float] = None,
              settings: Optional[SolverSettings] = None,
              adaptive: Optional[bool] = None) -> MeanTrajectory:
    """
    Integrate the expected graph evolution from the channel state.

    Args:
        params: Ensemble
        eps: Channel erasure probability
        step: RK4 step (default step_scale * alpha^L)
        settings: Solver settings (default from config)
        adaptive: Override ``settings.adaptive``; halve the step until tau*
            and r1(tau*) change by less than ``adaptive_rel_change``

    Raises:
        SolverError: If the integration produces non-finite values or neither
            completes nor stalls within ``settings.max_steps`` steps
    """
    settings = settings or SolverSettings.from_defaults()
    adaptive = settings.adaptive if adaptive is None else adaptive
    h = step or default_step(params, settings)
    traj = _integrate_mean(params, eps, h, settings)
    if not adaptive or not traj.has_minimum:
        return traj

    for n in range(1, settings.max_halvings + 1):
        finer = _integrate_mean(params, eps, h / 2 ** n, settings)
        finer.halvings = n
        if not finer.has_minimum:
            logger.warning(f"Minimum of r1 vanished after halving the step at eps={eps}")
            return finer
        change = max(_relative_change(traj.tau_star, finer.tau_star),
                     _relative_change(traj.r1_star, finer.r1_star))
        traj = finer
        if change < settings.adaptive_rel_change:
            return traj
    logger.warning(f"tau* not settled after {settings.max_halvings} halvings at eps={eps}")
    return traj


def _project_psd(matrix: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(matrix)
    values = np.clip(values, 0.0, None)
    out = (vectors * values) @ vectors.T
    return 0.5 * (out + out.T)


def solve_ce(params: EnsembleParams, eps: float, mean: Optional[MeanTrajectory] = None,
             settings: Optional[SolverSettings] = None, tau_end: Optional[float] = None,
             cross_term: Optional[str] = None,
             snapshot_taus: Iterable[float] = ()) -> CovTrajectory:
    """
    Integrate d(delta)/dtau = J delta + delta J^T + Gamma along ``mean``.

    Args:
        mean: Mean trajectory (solved here when omitted)
        tau_end: Stop at the first grid point past this time
        cross_term: Override ``settings.cross_term``
        snapshot_taus: Keep the full matrix at the first grid point at or
            after each of these times
    """
    settings = settings or SolverSettings.from_defaults()
    mean = mean or solve_ege(params, eps, settings=settings)
    cross = cross_term or settings.cross_term
    delta = ce_initial(params, eps, cross).matrix.copy()
    idx = r1_coordinates(params)
    pending = sorted(snapshot_taus)
    snapshots = {}

    def delta1(m: np.ndarray) -> float:
        return float(m[np.ix_(idx, idx)].sum())

    taus = [0.0]
    series = [delta1(delta)]
    projections = 0
    asymmetry = 0.0
    while pending and pending[0] <= 0.0:
        snapshots[pending.pop(0)] = delta.copy()

    for n in range(len(mean.taus) - 1):
        t0, t1 = float(mean.taus[n]), float(mean.taus[n + 1])
        if tau_end is not None and t0 >= tau_end:
            break
        X = mean.states[n]
        J = jacobian(params, X)
        G = jump_covariance(params, X)
        dt = (t1 - t0) / settings.euler_substeps
        for _ in range(settings.euler_substeps):
            S = J @ delta
            delta = delta + dt * (S + S.T + G)
            asymmetry = max(asymmetry, float(np.abs(delta - delta.T).max()))
        if np.diag(delta).min() < -settings.psd_tolerance:
            if projections == 0:
                logger.warning(f"Negative CE variance at tau={t1:.4f}; projecting onto the PSD cone")
            delta = _project_psd(delta)
            projections += 1
        taus.append(t1)
        series.append(delta1(delta))
        while pending and pending[0] <= t1:
            snapshots[pending.pop(0)] = delta.copy()

    taus_arr = np.asarray(taus)
    series_arr = np.asarray(series)
    delta1_star = None
    if mean.tau_star is not None and mean.tau_star <= taus_arr[-1]:
        delta1_star = float(np.interp(mean.tau_star, taus_arr, series_arr))
    logger.debug(f"CE {params.label()} eps={eps:.6f}: {len(taus)} points, delta1*={delta1_star}")
    return CovTrajectory(
        params=params, epsilon=eps,
        taus=taus_arr, delta1=series_arr, delta1_star=delta1_star,
        final=CovarianceState(params=params, matrix=delta, tau=float(taus_arr[-1])),
        projections=projections,
        max_asymmetry=asymmetry,
        snapshots=snapshots,
    )
