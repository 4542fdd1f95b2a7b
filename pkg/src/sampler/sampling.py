"""
Graph Sampling
==============

Draws one Tanner graph from an SFC-LDPC ensemble.

At each check position i the sockets arriving from positions i, i-1, ...,
i-d_v+1 (variables and dummies alike) are matched to the check-side
sockets by a uniform random permutation. Each position draws from its own
Philox substream spawned from the graph seed, so positions can be sampled
in any order and the graph is a pure function of (params, seed). Dummy
nodes and their edges are dropped at the end.
"""

import logging
from typing import Dict, List

import numpy as np

from ..ensemble.params import EnsembleParams
from ..ensemble.profile import PositionProfile, position_profile
from .graph import TannerGraph

logger = logging.getLogger(__name__)

DUMMY = -1


def position_generators(seed: int, count: int) -> List[np.random.Generator]:
    """Independent counter-based generators, one per check position."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def _check_layout(profile: PositionProfile):
    """Check positions and capacities in id order; the remainder check comes last."""
    p = profile.params
    positions: List[np.ndarray] = []
    capacities: List[np.ndarray] = []
    first_id: Dict[int, int] = {}
    next_id = 0
    for i in p.check_positions:
        count = profile.check_count(i)
        first_id[i] = next_id
        cap = np.full(count, p.d_c, dtype=np.int64)
        cap[-1] = profile.remainder_degree(i)
        positions.append(np.full(count, i, dtype=np.int64))
        capacities.append(cap)
        next_id += count
    return np.concatenate(positions), np.concatenate(capacities), first_id


def sample_graph(params: EnsembleParams, seed: int) -> TannerGraph:
    """
    Sample a Tanner graph of the ensemble (construction steps 1-4) and
    shorten the dummy nodes.

    Args:
        params: Ensemble parameters
        seed: Non-negative 64-bit seed

    Returns:
        TannerGraph; identical (params, seed) give identical graphs

    Example:
        >>> g = sample_graph(EnsembleParams(dv=3, dc=6, L=2, alpha=2, M=4), seed=1)
        >>> g.num_variables
        40
    """
    profile = position_profile(params)
    d_v, L = params.d_v, params.L

    var_positions = np.repeat(
        np.arange(-L, L + 1, dtype=np.int64),
        [profile.variable_count(i) for i in params.variable_positions],
    )
    var_offset = {i: int(np.searchsorted(var_positions, i)) for i in params.variable_positions}

    check_positions, check_capacity, first_check = _check_layout(profile)
    var_checks = np.full((var_positions.shape[0], d_v), -1, dtype=np.int64)

    generators = position_generators(seed, params.num_check_positions)
    for k, i in enumerate(params.check_positions):
        count = profile.check_count(i)
        ids = np.arange(first_check[i], first_check[i] + count)
        check_sockets = np.repeat(ids, check_capacity[ids])

        owners = []
        for j in range(d_v):
            src = i - j
            if src in var_offset:
                start = var_offset[src]
                owners.append(np.arange(start, start + profile.variable_count(src), dtype=np.int64))
            else:
                owners.append(np.full(profile.dummy_count(src), DUMMY, dtype=np.int64))

        incoming = sum(o.shape[0] for o in owners)
        assert incoming == check_sockets.shape[0], f"socket mismatch at position {i}"

        matched = generators[k].permutation(check_sockets)
        offset = 0
        for j, own in enumerate(owners):
            block = matched[offset:offset + own.shape[0]]
            real = own != DUMMY
            var_checks[own[real], j] = block[real]
            offset += own.shape[0]

    graph = TannerGraph(
        params=params,
        var_positions=var_positions,
        var_checks=var_checks,
        check_positions=check_positions,
        check_capacity=check_capacity,
    )
    graph.validate()
    logger.debug(f"Sampled {params.label()} M={params.M} seed={seed}: "
                 f"{graph.num_variables} variables, {graph.num_checks} checks")
    return graph


def spawn_seeds(seed: int, count: int) -> List[int]:
    """Derive ``count`` independent 63-bit seeds from one root seed."""
    states = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    return [int(s >> np.uint64(1)) for s in states]
