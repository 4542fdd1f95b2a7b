"""
Erasure BP Decoder
==================

Flooding-schedule belief propagation over the BEC, vectorized with numpy.
In every iteration each check with exactly one erased neighbour recovers
that neighbour. Run to a fixed point it resolves exactly the same variables
as the peeling decoder: everything outside the largest stopping set inside
the erasure pattern.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..sampler.graph import TannerGraph
from .channel import ErasurePattern
from .peeling import Outcome

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BPResult:
    """
    Attributes:
        outcome: success iff every erasure was recovered
        iterations: Iterations that recovered at least one variable
        residual_erasures: Variables still erased at the end
    """

    outcome: Outcome
    iterations: int
    residual_erasures: int

    @property
    def succeeded(self) -> bool:
        return self.outcome is Outcome.SUCCESS


def bp_residual(graph: TannerGraph, pattern: ErasurePattern,
                max_iter: Optional[int] = None) -> tuple:
    """(residual erased mask, iterations) of erasure BP."""
    pattern.check_matches(graph)
    var_checks = graph.var_checks
    erased = pattern.mask.copy()
    iterations = 0
    while erased.any():
        if max_iter is not None and iterations >= max_iter:
            break
        degree = np.bincount(var_checks[erased].ravel(), minlength=graph.num_checks)
        single = degree == 1
        resolved = erased & single[var_checks].any(axis=1)
        if not resolved.any():
            break
        erased &= ~resolved
        iterations += 1
    return erased, iterations


def bp_decode(graph: TannerGraph, pattern: ErasurePattern,
              max_iter: Optional[int] = None) -> BPResult:
    """
    Decode ``pattern`` with erasure BP.

    Args:
        graph: Tanner graph
        pattern: Erased variables
        max_iter: Iteration cap; None runs to the fixed point

    Example:
        >>> bp_decode(graph, sample_erasures(graph, 0.0, seed=1)).iterations
        0
    """
    erased, iterations = bp_residual(graph, pattern, max_iter)
    left = int(np.count_nonzero(erased))
    outcome = Outcome.SUCCESS if left == 0 else Outcome.STALL
    logger.debug(f"BP finished: {outcome.value} after {iterations} iterations, {left} left")
    return BPResult(outcome=outcome, iterations=iterations, residual_erasures=left)
