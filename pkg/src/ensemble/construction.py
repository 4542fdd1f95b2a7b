"""
Code Construction
=================

Pick (L, M) for an SFC-LDPC ensemble so that its code length and design
rate land as close as possible to a target, typically a standard SC-LDPC
code the SFC code is meant to replace.

Search:
    For every L the code length is monotone in M, so the M giving the
    closest length is found by bisection (ties go to the smaller M). The
    resulting (L, M) pairs are then ranked lexicographically by
    (|rate error|, |length error|).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Union

from .params import EnsembleParams, Sizing, parse_alpha
from .profile import position_profile, section_size
from ..utils.exceptions import InfeasibleTargetError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_MAX_L = 256


@dataclass(frozen=True)
class ConstructionCandidate:
    """One (L, M) pair with its achieved length and design rate."""

    params: EnsembleParams
    code_length: int
    design_rate: Fraction
    rate_error: float
    length_error: int

    @property
    def sort_key(self):
        return (self.rate_error, self.length_error, self.params.L)

    def as_nearest(self) -> dict:
        return {
            "L": self.params.L,
            "M": self.params.M,
            "length": self.code_length,
            "rate": float(self.design_rate),
        }


def _code_length(params: EnsembleParams) -> int:
    return sum(section_size(params, i) for i in params.variable_positions)


def _closest_M(d_v: int, d_c: int, L: int, alpha: Fraction, target_length: int,
               sizing: Sizing) -> EnsembleParams:
    """M whose code length is closest to the target for a fixed L (ties: smaller M)."""
    def make(M: int) -> EnsembleParams:
        return EnsembleParams(d_v=d_v, d_c=d_c, L=L, alpha=alpha, M=M, sizing=sizing)

    smallest = make(1)
    if _code_length(smallest) >= target_length:
        return smallest

    # Largest M with length <= target
    lo, hi = 1, max(2, target_length)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _code_length(make(mid)) <= target_length:
            lo = mid
        else:
            hi = mid

    below, above = make(lo), make(lo + 1)
    if abs(_code_length(above) - target_length) < abs(target_length - _code_length(below)):
        return above
    return below


def iter_candidates(target_length: int, target_rate: Union[Fraction, float, str],
                    alpha: Union[Fraction, float, str], d_v: int, d_c: int,
                    sizing: Sizing = "exact",
                    max_L: int = DEFAULT_MAX_L) -> Iterator[ConstructionCandidate]:
    """Yield the best-length candidate for each L in [1, max_L]."""
    alpha = parse_alpha(alpha)
    rate = float(parse_alpha(target_rate))

    for L in range(1, max_L + 1):
        params = _closest_M(d_v, d_c, L, alpha, target_length, sizing)
        profile = position_profile(params)
        yield ConstructionCandidate(
            params=params,
            code_length=profile.code_length,
            design_rate=profile.design_rate,
            rate_error=abs(float(profile.design_rate) - rate),
            length_error=abs(profile.code_length - target_length),
        )
        # Once M=1 already overshoots, every larger L overshoots further.
        if params.M == 1 and profile.code_length > target_length:
            break


def solve_construction(target_length: int, target_rate: Union[Fraction, float, str],
                       alpha: Union[Fraction, float, str], d_v: int, d_c: int,
                       sizing: Sizing = "exact", max_L: int = DEFAULT_MAX_L,
                       rate_tolerance: Optional[float] = None,
                       length_tolerance: Optional[int] = None) -> EnsembleParams:
    """
    Find (L, M) whose code length and design rate are closest to the targets.

    Args:
        target_length: Desired code length N
        target_rate: Desired design rate (Fraction, float or "p/q"/decimal string)
        alpha: Growth factor, exact rational >= 1
        d_v, d_c: Degrees of the underlying regular ensemble
        sizing: Section sizing convention, see ``EnsembleParams``
        max_L: Largest half chain length to consider
        rate_tolerance: If given, reject results whose rate error exceeds it
        length_tolerance: If given, reject results whose length error exceeds it

    Returns:
        EnsembleParams of the best pair

    Raises:
        ValidationError: Malformed targets
        InfeasibleTargetError: No pair satisfies the targets (carries the nearest one)

    Example:
        >>> p = solve_construction(12750, "0.482", "1.11", 3, 6)
        >>> (p.L, p.M)
        (12, 260)
    """
    if target_length < 1:
        raise ValidationError("target length must be positive", field="target_length", value=target_length)
    if d_v < 2 or d_c < d_v:
        raise ValidationError("need d_c >= d_v >= 2", field="degrees", value=(d_v, d_c))
    alpha_exact = parse_alpha(alpha)
    if alpha_exact < 1:
        raise ValidationError("alpha must be >= 1", field="alpha", value=str(alpha))
    rate = float(parse_alpha(target_rate))
    if rate >= 1 - d_v / d_c:
        raise InfeasibleTargetError(
            f"Target rate {rate:.4f} is not below 1 - d_v/d_c = {1 - d_v / d_c:.4f}"
        )

    candidates: List[ConstructionCandidate] = list(
        iter_candidates(target_length, target_rate, alpha_exact, d_v, d_c, sizing, max_L)
    )
    best = min(candidates, key=lambda c: c.sort_key)

    if rate_tolerance is not None and best.rate_error > rate_tolerance:
        raise InfeasibleTargetError(
            f"No (L, M) reaches rate {rate:.4f} within {rate_tolerance}", nearest=best.as_nearest()
        )
    if length_tolerance is not None and best.length_error > length_tolerance:
        raise InfeasibleTargetError(
            f"No (L, M) reaches length {target_length} within {length_tolerance}",
            nearest=best.as_nearest(),
        )

    logger.info(f"Construction for N~{target_length}, R~{rate:.4f}, alpha={float(alpha_exact):g}: "
                f"L={best.params.L}, M={best.params.M}, N={best.code_length}, "
                f"R={float(best.design_rate):.4f}")
    return best.params
