"""
Ensemble Characterization
=========================

Runs the evolution pipeline for one ensemble (threshold, gamma, delta1 at
tau*) and turns it into a waterfall prediction report. A report depends on
L only through its three parameters, so one report serves every M via
``curve_for``.
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..ensemble.params import EnsembleParams
from ..evolution.integrate import solve_ce, solve_ege
from ..evolution.threshold import bp_threshold, gamma_measurement
from ..utils.config import SolverSettings, load_defaults
from ..utils.exceptions import NoLocalMinimumError, handle_sfc_error
from .waterfall import waterfall_curve

logger = logging.getLogger(__name__)


def default_eps_grid(eps_bp: float) -> np.ndarray:
    """0.40 to eps_bp + 0.01 in steps of 0.0025 (``predict`` section of the defaults)."""
    cfg = load_defaults().get("predict", {})
    start = float(cfg.get("eps_min", 0.40))
    step = float(cfg.get("eps_step", 0.0025))
    stop = eps_bp + float(cfg.get("eps_above_threshold", 0.01))
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(max(count, 1)), 10)


@dataclass
class PredictionReport:
    """
    Attributes:
        params: Ensemble
        eps_bp, gamma, delta1_star: Waterfall parameters
        tau_star: Bottleneck time at eps_bp - gamma_offset
        curve: (eps, P_B) at params.M
        delta1_spread: delta1 at the own tau* of further epsilons, if requested
        provenance: Solver settings and step sizes behind the numbers
    """

    params: EnsembleParams
    eps_bp: float
    gamma: float
    delta1_star: float
    tau_star: Optional[float] = None
    curve: List[Tuple[float, float]] = field(default_factory=list)
    delta1_spread: Dict[float, float] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def steepness(self) -> float:
        return self.gamma / float(np.sqrt(self.delta1_star))

    def curve_for(self, M: int, eps_grid: Optional[Iterable[float]] = None) -> List[Tuple[float, float]]:
        """Prediction for another section size M (same ensemble parameters otherwise)."""
        grid = default_eps_grid(self.eps_bp) if eps_grid is None else eps_grid
        return waterfall_curve(M, grid, self.eps_bp, self.gamma, self.delta1_star)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ensemble": self.params.to_config(),
            "label": self.params.label(),
            "eps_bp": self.eps_bp,
            "gamma": self.gamma,
            "delta1_star": self.delta1_star,
            "steepness": self.steepness,
            "tau_star": self.tau_star,
            "delta1_spread": {f"{k:.6f}": v for k, v in self.delta1_spread.items()},
            "provenance": self.provenance,
            "note": "the estimate depends on L only through eps_bp, gamma and delta1_star",
        }

    @handle_sfc_error
    def save(self, json_path: Path, csv_path: Optional[Path] = None) -> None:
        """Write the flat JSON record and, optionally, the curve as CSV."""
        json_path = Path(json_path)
        json_path.parent.mkdir(parents=True, exist_ok=True)
        json_path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        if csv_path is not None:
            csv_path = Path(csv_path)
            csv_path.parent.mkdir(parents=True, exist_ok=True)
            with open(csv_path, "w", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(["epsilon", "block_error"])
                for eps, p in self.curve:
                    writer.writerow([f"{eps:.6f}", f"{p:.6e}"])


def characterize_ensemble(params: EnsembleParams, eps_grid: Optional[Sequence[float]] = None,
                          settings: Optional[SolverSettings] = None, eps_bp: Optional[float] = None,
                          spread_offsets: Sequence[float] = ()) -> PredictionReport:
    """
    Threshold, gamma and delta1(tau*) of ``params`` plus the predicted curve.

    Args:
        params: Ensemble; ``params.M`` sets the curve's section size
        eps_grid: Channel parameters of the curve (default ``default_eps_grid``)
        settings: Solver settings
        eps_bp: Skip the bisection when the threshold is already known
        spread_offsets: Extra gaps below eps_bp at which delta1 is evaluated
            at that epsilon's own tau*

    Raises:
        NoLocalMinimumError: If r1 has no strict local minimum below threshold
    """
    settings = settings or SolverSettings.from_defaults()
    if eps_bp is None:
        eps_bp = bp_threshold(params, settings=settings)
    gm = gamma_measurement(params, eps_bp, settings=settings)
    traj = gm.trajectory
    ce = solve_ce(params, gm.epsilon, mean=traj, settings=settings,
                  tau_end=traj.tau_star + traj.step)
    if ce.delta1_star is None:
        raise NoLocalMinimumError(gm.epsilon, flat=traj.flat)

    spread: Dict[float, float] = {}
    for offset in spread_offsets:
        eps = eps_bp - offset
        other = solve_ege(params, eps, settings=settings)
        if not other.has_minimum:
            logger.warning(f"No tau* at eps={eps:.4f}; left out of the delta1 spread")
            continue
        spread[eps] = solve_ce(params, eps, mean=other, settings=settings,
                               tau_end=other.tau_star + other.step).delta1_star

    grid = default_eps_grid(eps_bp) if eps_grid is None else eps_grid
    report = PredictionReport(
        params=params,
        eps_bp=eps_bp,
        gamma=gm.gamma,
        delta1_star=ce.delta1_star,
        tau_star=traj.tau_star,
        curve=waterfall_curve(params.M, grid, eps_bp, gm.gamma, ce.delta1_star),
        delta1_spread=spread,
        provenance={
            "solver": settings.model_dump(),
            "step": traj.step,
            "halvings": traj.halvings,
            "gamma_epsilon": gm.epsilon,
            "ce_projections": ce.projections,
        },
    )
    logger.info(f"{params.label()}: eps_bp={eps_bp:.4f} gamma={report.gamma:.3f} "
                f"delta1*={report.delta1_star:.3f} steepness={report.steepness:.3f}")
    return report
