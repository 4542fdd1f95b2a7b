"""
Waterfall Estimate
==================

Finite-length block error probability of an SFC-LDPC ensemble in the
waterfall region,

    P_B(M, eps) ~= Q( gamma (eps_bp - eps) / sqrt(delta1_star / M) ),

where Q is the upper tail of the standard normal distribution. The value
depends on the ensemble only through (eps_bp, gamma, delta1_star) and on
the length only through M.
"""

import logging
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import norm

from ..utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


def q_function(x):
    """Q(x) = P(N(0,1) > x), evaluated through the complementary error function."""
    return norm.sf(x)


def _check(M: int, delta1_star: float) -> None:
    if M < 1:
        raise ValidationError("section size must be at least 1", field="M", value=M)
    if not delta1_star > 0:
        raise ValidationError("delta1(tau*) must be positive", field="delta1_star", value=delta1_star)


def waterfall_argument(M: int, eps, eps_bp: float, gamma: float, delta1_star: float):
    _check(M, delta1_star)
    return gamma * (eps_bp - np.asarray(eps, dtype=float)) / np.sqrt(delta1_star / M)


def waterfall_estimate(M: int, eps: float, eps_bp: float, gamma: float, delta1_star: float) -> float:
    """
    Predicted block error probability at one channel parameter.

    Raises:
        ValidationError: If M < 1 or delta1_star <= 0

    Example:
        >>> waterfall_estimate(500, 0.4703, 0.4703, 6.77, 1.03)
        0.5
    """
    return float(q_function(waterfall_argument(M, eps, eps_bp, gamma, delta1_star)))


def waterfall_curve(M: int, eps_grid: Iterable[float], eps_bp: float, gamma: float,
                    delta1_star: float) -> List[Tuple[float, float]]:
    """(eps, P_B) pairs over ``eps_grid``."""
    grid = np.asarray(list(eps_grid), dtype=float)
    values = q_function(waterfall_argument(M, grid, eps_bp, gamma, delta1_star))
    return [(float(e), float(p)) for e, p in zip(grid, values)]


def horizontal_shift(eps: Sequence[float], simulated: Sequence[float], M: int, eps_bp: float,
                     gamma: float, delta1_star: float, bound: float = 0.05) -> float:
    """
    Epsilon offset s that best aligns the simulated curve with the prediction.

    Minimizes sum (log10 P_sim(eps) - log10 P_B(eps - s))^2 over the cells
    with at least one observed error. A positive s means the simulated curve
    lies to the right of the prediction.

    Raises:
        ValidationError: If no cell has a positive simulated error rate
    """
    eps = np.asarray(eps, dtype=float)
    sim = np.asarray(simulated, dtype=float)
    keep = sim > 0
    if not keep.any():
        raise ValidationError("no simulated cell with observed errors", field="simulated")
    eps, log_sim = eps[keep], np.log10(sim[keep])

    def loss(s: float) -> float:
        pred = q_function(waterfall_argument(M, eps - s, eps_bp, gamma, delta1_star))
        pred = np.clip(pred, 1e-300, None)
        return float(np.sum((log_sim - np.log10(pred)) ** 2))

    result = minimize_scalar(loss, bounds=(-bound, bound), method="bounded")
    logger.debug(f"Horizontal shift {result.x:+.5f} (loss {result.fun:.4g}) over {keep.sum()} cells")
    return float(result.x)
