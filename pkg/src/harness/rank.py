"""
GF(2) Rank
==========

Rank of a sampled parity-check matrix over GF(2), giving the true rate
1 - rank(H)/N next to the design rate 1 - #checks/N. Rows are bit-packed
with numpy and eliminated column by column.
"""

import logging

import numpy as np
from scipy import sparse

from ..sampler.graph import TannerGraph

logger = logging.getLogger(__name__)


def gf2_rank(matrix) -> int:
    """Rank over GF(2) of a dense or scipy.sparse 0/1 matrix."""
    if sparse.issparse(matrix):
        matrix = matrix.toarray()
    dense = (np.asarray(matrix) % 2).astype(bool)
    m, n = dense.shape
    rows = np.packbits(dense, axis=1)
    rank = 0
    for col in range(n):
        if rank == m:
            break
        byte, mask = col >> 3, np.uint8(0x80 >> (col & 7))
        hits = np.flatnonzero(rows[rank:, byte] & mask)
        if hits.size == 0:
            continue
        pivot = rank + int(hits[0])
        if pivot != rank:
            rows[[rank, pivot]] = rows[[pivot, rank]]
        below = rank + 1 + np.flatnonzero(rows[rank + 1:, byte] & mask)
        rows[below] ^= rows[rank]
        rank += 1
    return rank


def rank_rate(graph: TannerGraph) -> float:
    """1 - rank(H)/N of one sampled code."""
    H = graph.parity_check_matrix()
    rank = gf2_rank(H)
    rate = 1.0 - rank / graph.num_variables
    logger.debug(f"GF(2) rank {rank} of {graph.num_checks} checks; rate {rate:.5f}")
    return rate
