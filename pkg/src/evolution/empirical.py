"""
Empirical Moments
=================

Monte-Carlo estimate of the residual-graph moments that the evolution
equations predict. Every trial samples a fresh graph and channel
realization, runs the peeling decoder and reads the state at fixed probe
times; the sample mean and the M-scaled sample covariance (divisor
trials - 1) are then comparable with the mean and covariance trajectories.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy import stats

from ..decoder.channel import sample_erasures
from ..decoder.peeling import PeelingDecoder
from ..ensemble.params import EnsembleParams
from ..sampler.sampling import sample_graph, spawn_seeds
from ..utils.exceptions import ValidationError
from .initial import ege_initial

logger = logging.getLogger(__name__)


@dataclass
class EmpiricalMoments:
    """
    Attributes:
        params: Ensemble at the simulated section size M
        epsilon: Channel erasure probability
        taus: (n_probe,) normalized probe times
        mean: (n_probe, n_pos, d_c + 1) sample mean of the normalized state
        mean_se: Standard error of ``mean``
        r1: (trials, n_probe) per-trial sum of r_1 over u in [-L, L]
        covariance: (n_probe, D, D) M-scaled sample covariance, if requested
        successes: Trials that decoded every erasure
    """

    params: EnsembleParams
    epsilon: float
    taus: np.ndarray
    mean: np.ndarray
    mean_se: np.ndarray
    r1: np.ndarray
    covariance: Optional[np.ndarray]
    successes: int

    @property
    def trials(self) -> int:
        return self.r1.shape[0]

    @property
    def delta1(self) -> np.ndarray:
        """M * sample variance of r1 at every probe."""
        return self.params.M * self.r1.var(axis=0, ddof=1)

    def normality_pvalue(self, probe: int) -> float:
        """D'Agostino-Pearson p-value of the standardized r1 samples at ``probe``."""
        x = self.r1[:, probe]
        sd = x.std(ddof=1)
        if sd == 0.0:
            return 0.0
        return float(stats.normaltest((x - x.mean()) / sd).pvalue)


def _trial(params: EnsembleParams, eps: float, seed: int, steps: Sequence[int]) -> tuple:
    graph_seed, channel_seed, peel_seed = spawn_seeds(seed, 3)
    graph = sample_graph(params, graph_seed)
    pattern = sample_erasures(graph, eps, channel_seed)
    trace = PeelingDecoder(graph).decode(pattern, peel_seed, sample_times=steps)

    d_c = params.d_c
    idx = np.searchsorted(trace.times, np.asarray(steps), side="right") - 1
    states = np.zeros((len(steps), params.num_check_positions, d_c + 1))
    states[:, :, :d_c] = np.transpose(trace.R[idx], (0, 2, 1))
    states[:, :, d_c] = trace.V[idx]
    return states / params.M, trace.succeeded


def default_probes(params: EnsembleParams, eps: float, count: int = 20) -> np.ndarray:
    """Evenly spaced probe times up to 90% of the initial variable mass."""
    v0 = float(ege_initial(params, eps).v.sum())
    return np.linspace(0.0, 0.9 * v0, count)


def empirical_moments(params: EnsembleParams, eps: float, trials: int, seed: int = 0,
                      taus: Optional[Sequence[float]] = None, workers: int = 1,
                      full_covariance: bool = False) -> EmpiricalMoments:
    """
    Estimate residual-graph moments by peeling ``trials`` sampled codes.

    Args:
        params: Ensemble; ``params.M`` is the simulated section size
        eps: Channel erasure probability
        trials: Independent (graph, channel, decoder) realizations, at least 2
        seed: Root seed
        taus: Normalized probe times (default ``default_probes``)
        workers: joblib worker processes
        full_covariance: Also keep the full M-scaled covariance per probe
    """
    if trials < 2:
        raise ValidationError("need at least two trials for a covariance", field="trials", value=trials)
    probes = np.asarray(default_probes(params, eps) if taus is None else taus, dtype=float)
    steps = [int(round(t * params.M)) for t in probes]
    seeds = spawn_seeds(seed, trials)

    logger.info(f"Empirical moments of {params.label()} M={params.M} at eps={eps}: "
                f"{trials} trials on {workers} worker(s)")
    results = Parallel(n_jobs=workers)(
        delayed(_trial)(params, eps, s, steps) for s in seeds
    )
    samples = np.stack([r[0] for r in results])  # (trials, n_probe, n_pos, d_c+1)
    successes = sum(1 for r in results if r[1])

    mean = samples.mean(axis=0)
    mean_se = samples.std(axis=0, ddof=1) / np.sqrt(trials)
    r1 = samples[:, :, : 2 * params.L + 1, 0].sum(axis=2)

    covariance = None
    if full_covariance:
        flat = samples.reshape(trials, len(probes), -1)
        centered = flat - flat.mean(axis=0)
        covariance = params.M * np.einsum("tpi,tpj->pij", centered, centered) / (trials - 1)

    return EmpiricalMoments(
        params=params, epsilon=eps, taus=np.asarray(steps) / params.M,
        mean=mean, mean_se=mean_se, r1=r1,
        covariance=covariance, successes=successes,
    )
