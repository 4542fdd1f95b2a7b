"""
Campaign Statistics
===================

Error-rate estimates with honest uncertainty:

- wilson_interval: Wilson score interval of a binomial proportion
- rule_of_three: 95% upper bound when no event was observed
- CellStats: associative accumulator for one epsilon cell
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np
from scipy.stats import norm

CONFIDENCE = 0.95


def wilson_interval(successes: int, trials: int, confidence: float = CONFIDENCE) -> Tuple[float, float]:
    """
    Wilson score interval for ``successes`` out of ``trials``.

    Example:
        >>> lo, hi = wilson_interval(0, 100)
        >>> lo, round(hi, 4)
        (0.0, 0.037)
    """
    if trials <= 0:
        return 0.0, 1.0
    z = float(norm.ppf(0.5 + confidence / 2.0))
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * np.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    low = 0.0 if successes == 0 else max(0.0, float(centre - half))
    high = 1.0 if successes == trials else min(1.0, float(centre + half))
    return low, high


def rule_of_three(trials: int) -> float:
    """Approximate 95% upper bound 3/n on a rate with zero observed events."""
    return min(1.0, 3.0 / trials) if trials > 0 else 1.0


@dataclass
class CellStats:
    """
    Counts for one epsilon cell. ``merge`` is associative and commutative,
    so partial results from workers and checkpoints can be combined in any
    order.
    """

    words: int = 0
    word_errors: int = 0
    bits: int = 0
    bit_errors: int = 0
    iterations: int = 0
    mismatches: int = 0
    cross_checks: int = 0
    iteration_hist: Dict[int, int] = field(default_factory=dict)

    def add_word(self, n_bits: int, residual: int, iterations: int) -> None:
        self.words += 1
        self.word_errors += int(residual > 0)
        self.bits += n_bits
        self.bit_errors += residual
        self.iterations += iterations
        self.iteration_hist[iterations] = self.iteration_hist.get(iterations, 0) + 1

    def merge(self, other: "CellStats") -> "CellStats":
        hist = dict(self.iteration_hist)
        for k, v in other.iteration_hist.items():
            hist[k] = hist.get(k, 0) + v
        return CellStats(
            words=self.words + other.words,
            word_errors=self.word_errors + other.word_errors,
            bits=self.bits + other.bits,
            bit_errors=self.bit_errors + other.bit_errors,
            iterations=self.iterations + other.iterations,
            mismatches=self.mismatches + other.mismatches,
            cross_checks=self.cross_checks + other.cross_checks,
            iteration_hist=hist,
        )

    @property
    def wer(self) -> float:
        return self.word_errors / self.words if self.words else 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else 0.0

    @property
    def mean_iterations(self) -> float:
        return self.iterations / self.words if self.words else 0.0

    @property
    def wer_interval(self) -> Tuple[float, float]:
        return wilson_interval(self.word_errors, self.words)

    @property
    def wer_upper_bound(self) -> float:
        """Wilson upper end, or the rule-of-three bound for an error-free cell."""
        if self.word_errors == 0:
            return rule_of_three(self.words)
        return self.wer_interval[1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "words": self.words,
            "word_errors": self.word_errors,
            "bits": self.bits,
            "bit_errors": self.bit_errors,
            "iterations": self.iterations,
            "mismatches": self.mismatches,
            "cross_checks": self.cross_checks,
            "iteration_hist": {str(k): v for k, v in sorted(self.iteration_hist.items())},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CellStats":
        data = dict(data)
        data["iteration_hist"] = {int(k): int(v) for k, v in data.get("iteration_hist", {}).items()}
        return cls(**data)
