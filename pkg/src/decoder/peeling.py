"""
Peeling Decoder
===============

The peeling decoder over the BEC with residual-graph recording.

Initialization removes every known variable with its edges. Each step then
picks a degree-1 check uniformly at random, resolves the single erased
variable attached to it and removes that variable with all d_v of its
edges. The degree-1 checks are kept in an array with a position index so
that sampling and removal are O(1).

Recorded per sample time t:
    V[u]     erased variables at position u
    R[j, u]  edges attached to residual-degree-(j+1) checks at position u
with u running over the check positions [-L, L+d_v-1].
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional

import numpy as np

from ..sampler.graph import TannerGraph
from .channel import ErasurePattern, channel_generator

logger = logging.getLogger(__name__)


class Outcome(str, Enum):
    SUCCESS = "success"
    STALL = "stall"


@dataclass
class DecodeTrace:
    """
    Residual-graph time series of one decoding run.

    Attributes:
        times: (n_samples,) peeling step t of each sample
        V: (n_samples, n_pos) erased variables per position
        R: (n_samples, d_c, n_pos) edges on degree-j checks, j = 1..d_c
        outcome: success or stall
        stall_time: Step at which no degree-1 check was left (None on success)
        steps: Number of peeling steps performed
        residual: Erased variable ids left at the end (a stopping set)
        M: Base section size, for normalized time tau = t / M
    """

    times: np.ndarray
    V: np.ndarray
    R: np.ndarray
    outcome: Outcome
    stall_time: Optional[int]
    steps: int
    residual: np.ndarray
    M: int
    L: int = field(default=0, repr=False)

    @property
    def succeeded(self) -> bool:
        return self.outcome is Outcome.SUCCESS

    @property
    def tau(self) -> np.ndarray:
        return self.times / self.M

    def r1(self, variable_positions_only: bool = True) -> np.ndarray:
        """Degree-1 edge mass R_1(t)/M summed over positions."""
        R1 = self.R[:, 0, :]
        if variable_positions_only:
            R1 = R1[:, : 2 * self.L + 1]
        return R1.sum(axis=1) / self.M

    def v_total(self) -> np.ndarray:
        return self.V.sum(axis=1)


class PeelingDecoder:
    """
    Peeling decoder bound to one graph.

    The graph's adjacency is built once and shared across decodes.
    """

    def __init__(self, graph: TannerGraph):
        self.graph = graph
        self.params = graph.params
        indptr, indices = graph.check_adjacency
        self._indptr = indptr.tolist()
        self._indices = indices.tolist()
        self._var_checks = graph.var_checks.tolist()
        self._var_pos = (graph.var_positions + self.params.L).tolist()
        self._check_pos = (graph.check_positions + self.params.L).tolist()

    def decode(self, pattern: ErasurePattern, seed: int, stride: Optional[int] = None,
               record: bool = True, sample_times: Optional[Iterable[int]] = None) -> DecodeTrace:
        """
        Run the peeling decoder on ``pattern``.

        Args:
            pattern: Erased variables
            seed: Seed of the degree-1 check choices
            stride: Record every ``stride`` steps (default ceil(M/100); 1 = every step)
            record: If False, only the first and last samples are kept
            sample_times: Record exactly at these steps (plus 0 and the end)
                instead of every ``stride`` steps
        """
        pattern.check_matches(self.graph)
        p = self.params
        d_c = p.d_c
        n_pos = p.num_check_positions
        stride = stride or max(1, math.ceil(p.M / 100))
        rng = channel_generator(seed)

        erased = pattern.mask.copy()
        degree = np.bincount(self.graph.var_checks[erased].ravel(),
                             minlength=self.graph.num_checks).tolist()

        V = np.bincount(np.asarray(self._var_pos)[erased], minlength=n_pos).astype(np.int64)
        N = np.zeros((d_c + 1, n_pos), dtype=np.int64)
        np.add.at(N, (np.asarray(degree), np.asarray(self._check_pos)), 1)

        ones: List[int] = [c for c, d in enumerate(degree) if d == 1]
        slot = {c: k for k, c in enumerate(ones)}

        times: List[int] = []
        V_samples: List[np.ndarray] = []
        R_samples: List[np.ndarray] = []
        weights = np.arange(1, d_c + 1)[:, None]
        probes = None if sample_times is None else frozenset(int(s) for s in sample_times)

        def sample(t: int) -> None:
            times.append(t)
            V_samples.append(V.copy())
            R_samples.append(N[1:] * weights)

        sample(0)
        remaining = int(V.sum())
        t = 0
        while remaining and ones:
            k = int(rng.integers(len(ones)))
            c = ones[k]
            v = next(x for x in self._indices[self._indptr[c]:self._indptr[c + 1]] if erased[x])

            erased[v] = False
            V[self._var_pos[v]] -= 1
            remaining -= 1
            for c2 in self._var_checks[v]:
                d = degree[c2]
                pos = self._check_pos[c2]
                N[d, pos] -= 1
                N[d - 1, pos] += 1
                degree[c2] = d - 1
                if d == 1:
                    last = ones.pop()
                    if last != c2:
                        idx = slot[c2]
                        ones[idx] = last
                        slot[last] = idx
                    del slot[c2]
                elif d == 2:
                    slot[c2] = len(ones)
                    ones.append(c2)
            t += 1
            if probes is not None:
                if t in probes:
                    sample(t)
            elif record and t % stride == 0:
                sample(t)

        if times[-1] != t:
            sample(t)

        outcome = Outcome.SUCCESS if remaining == 0 else Outcome.STALL
        trace = DecodeTrace(
            times=np.asarray(times, dtype=np.int64),
            V=np.stack(V_samples),
            R=np.stack(R_samples),
            outcome=outcome,
            stall_time=None if outcome is Outcome.SUCCESS else t,
            steps=t,
            residual=np.flatnonzero(erased),
            M=p.M,
            L=p.L,
        )
        logger.debug(f"Peeling finished: {outcome.value} after {t} steps, "
                     f"{trace.residual.shape[0]} residual variables")
        return trace


def peel(graph: TannerGraph, pattern: ErasurePattern, seed: int = 0,
         stride: Optional[int] = None, record: bool = True,
         sample_times: Optional[Iterable[int]] = None) -> DecodeTrace:
    """Convenience wrapper around ``PeelingDecoder(graph).decode``."""
    return PeelingDecoder(graph).decode(pattern, seed, stride=stride, record=record,
                                        sample_times=sample_times)


def stopping_set(trace: DecodeTrace) -> frozenset:
    """Variables left after a stall; empty after a success."""
    return frozenset(trace.residual.tolist())
