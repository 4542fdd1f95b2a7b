"""
Threshold and Scaling Parameter
===============================

- bp_threshold: largest epsilon for which the expected evolution keeps
  degree-1 checks until every erasure is resolved (bisection)
- gamma_coefficient: slope of r1(tau*) below the threshold,
  gamma = r1(tau*; eps_bp - offset) / offset
"""

import logging
from dataclasses import dataclass
from typing import Optional

from ..ensemble.params import EnsembleParams
from ..utils.config import SolverSettings
from ..utils.exceptions import BracketError, NoLocalMinimumError
from .integrate import solve_ege
from .state import MeanTrajectory

logger = logging.getLogger(__name__)


def completes(params: EnsembleParams, eps: float, settings: SolverSettings,
              step: Optional[float] = None) -> bool:
    """Whether the non-adaptive mean trajectory at ``eps`` decodes everything."""
    return solve_ege(params, eps, step=step, settings=settings, adaptive=False).completed


def bp_threshold(params: EnsembleParams, tolerance: Optional[float] = None,
                 settings: Optional[SolverSettings] = None, step: Optional[float] = None,
                 low: Optional[float] = None, high: Optional[float] = None) -> float:
    """
    Bisect for the BP threshold.

    Args:
        params: Ensemble
        tolerance: Final bracket width (default ``settings.threshold_tolerance``)
        low, high: Bracket (default ``settings.bracket_low/high``)

    Returns:
        Midpoint of the final bracket

    Raises:
        BracketError: If decoding does not complete at ``low`` or does at ``high``
    """
    settings = settings or SolverSettings.from_defaults()
    tol = tolerance or settings.threshold_tolerance
    lo = settings.bracket_low if low is None else low
    hi = settings.bracket_high if high is None else high

    lo_ok = completes(params, lo, settings, step)
    hi_ok = completes(params, hi, settings, step)
    if not lo_ok or hi_ok:
        raise BracketError(lo, hi, completed_low=lo_ok, completed_high=hi_ok)

    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if completes(params, mid, settings, step):
            lo = mid
        else:
            hi = mid
        iterations += 1
        logger.debug(f"Threshold bracket [{lo:.6f}, {hi:.6f}]")
    eps_bp = 0.5 * (lo + hi)
    logger.info(f"BP threshold of {params.label()}: {eps_bp:.5f} ({iterations} bisections)")
    return eps_bp


@dataclass
class GammaResult:
    """gamma together with the trajectory it was read from."""

    gamma: float
    eps_bp: float
    epsilon: float
    trajectory: MeanTrajectory


def gamma_measurement(params: EnsembleParams, eps_bp: Optional[float] = None,
                      settings: Optional[SolverSettings] = None,
                      step: Optional[float] = None) -> GammaResult:
    """
    Measure gamma at eps_bp - gamma_offset with the adaptive solver.

    Raises:
        NoLocalMinimumError: If r1 has no strict interior local minimum there
    """
    settings = settings or SolverSettings.from_defaults()
    if eps_bp is None:
        eps_bp = bp_threshold(params, settings=settings, step=step)
    offset = settings.gamma_offset
    eps = eps_bp - offset
    traj = solve_ege(params, eps, step=step, settings=settings)
    if not traj.has_minimum:
        raise NoLocalMinimumError(eps, flat=traj.flat)
    gamma = traj.r1_star / offset
    logger.info(f"gamma of {params.label()}: {gamma:.4f} (tau*={traj.tau_star:.3f})")
    return GammaResult(gamma=gamma, eps_bp=eps_bp, epsilon=eps, trajectory=traj)


def gamma_coefficient(params: EnsembleParams, eps_bp: Optional[float] = None,
                      settings: Optional[SolverSettings] = None,
                      step: Optional[float] = None) -> float:
    """gamma = r1(tau*) at eps_bp - offset, divided by the offset."""
    return gamma_measurement(params, eps_bp, settings, step).gamma
