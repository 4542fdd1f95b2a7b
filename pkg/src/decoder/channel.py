"""
Binary Erasure Channel
======================

The all-zero codeword is sent over BEC(epsilon); only the set of erased
positions matters to the decoders.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from ..sampler.graph import TannerGraph
from ..utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


def channel_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


@dataclass(frozen=True, eq=False)
class ErasurePattern:
    """
    Erased variables of one channel realization.

    Attributes:
        mask: (n_var,) boolean, True where the variable is erased
        epsilon: Erasure probability used
        seed: Seed of the draw (None for hand-built patterns)
    """

    mask: np.ndarray
    epsilon: float
    seed: Optional[int] = None

    def __post_init__(self):
        mask = np.ascontiguousarray(self.mask, dtype=bool)
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @property
    def erased(self) -> frozenset:
        """Erased variable ids."""
        return frozenset(np.flatnonzero(self.mask).tolist())

    @property
    def num_erased(self) -> int:
        return int(np.count_nonzero(self.mask))

    def check_matches(self, graph: TannerGraph) -> None:
        if self.mask.shape[0] != graph.num_variables:
            raise ValidationError(
                f"pattern covers {self.mask.shape[0]} variables, graph has {graph.num_variables}",
                field="pattern",
            )

    @classmethod
    def from_ids(cls, graph: TannerGraph, ids: Iterable[int], epsilon: float = float("nan")) -> "ErasurePattern":
        mask = np.zeros(graph.num_variables, dtype=bool)
        mask[list(ids)] = True
        return cls(mask=mask, epsilon=epsilon)


def sample_erasures(graph: TannerGraph, epsilon: float, seed: int) -> ErasurePattern:
    """
    Erase every variable of ``graph`` independently with probability ``epsilon``.

    Raises:
        ValidationError: If epsilon is outside [0, 1]
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError("erasure probability must lie in [0, 1]", field="epsilon", value=epsilon)
    rng = channel_generator(seed)
    mask = rng.random(graph.num_variables) < epsilon
    return ErasurePattern(mask=mask, epsilon=epsilon, seed=seed)
