"""
Initial Conditions
==================

Closed-form state of the residual graph right after the channel has
removed the known variables:

- ege_initial: expected normalized state (v_hat, r_hat) at tau = 0
- ce_initial: scaled covariance matrix delta at tau = 0

Variable/check cross-covariances come in two variants. ``printed`` is the
product form the reference tables were computed with; ``derived`` is the
covariance of an erased-variable indicator with the degree indicator of the
check behind one of its edges, which vanishes when epsilon is 0 or 1.
"""

import logging
from typing import Literal

import numpy as np

from ..ensemble.law import binomial_matrix, connection_law
from ..ensemble.params import EnsembleParams
from ..utils.exceptions import ValidationError
from .state import CovarianceState, MeanState, state_shape

logger = logging.getLogger(__name__)

CrossTerm = Literal["printed", "derived"]


def _check_epsilon(eps: float) -> None:
    if not 0.0 <= eps <= 1.0:
        raise ValidationError("erasure probability must lie in [0, 1]", field="epsilon", value=eps)


def _variable_weights(params: EnsembleParams) -> np.ndarray:
    """alpha^(L-|u|) on [-L, L], 0 on the right-hand dummy positions."""
    w = np.zeros(params.num_check_positions)
    for u in params.variable_positions:
        w[params.position_index(u)] = params.weight(u)
    return w


def ege_initial(params: EnsembleParams, eps: float) -> MeanState:
    """
    r_hat(j, u) = j / d_c * mass(u) * p_init(j, u, eps)
    v_hat(u)    = eps * alpha^(L-|u|) on [-L, L], 0 elsewhere
    """
    _check_epsilon(eps)
    law = connection_law(params)
    d_c = params.d_c
    p = law.p_init_table(eps)

    values = np.zeros(state_shape(params))
    j = np.arange(1, d_c + 1)
    values[:, :d_c] = j[None, :] / d_c * law.mass[:, None] * p[:, 1:]
    values[:, d_c] = eps * _variable_weights(params)
    return MeanState(params=params, values=values, tau=0.0)


def _share_tables(params: EnsembleParams, eps: float) -> tuple:
    """
    For a check reached through an edge from a variable:

        A1[k, j] = P(j erased neighbours | that variable erased)
        A0[k, j] = P(j erased neighbours | that variable known)

    for j in [1, d_c] (column j-1).
    """
    law = connection_law(params)
    d_c = params.d_c
    B = binomial_matrix(d_c, eps)
    shifted = law.rho_prime_table[:, 1:]  # column n = m - 1
    A1 = shifted @ B[:d_c, 0:d_c]
    A0 = shifted @ B[:d_c, 1:d_c + 1]
    return A1, A0


def ce_initial(params: EnsembleParams, eps: float, cross_term: CrossTerm = "printed") -> CovarianceState:
    """
    Scaled initial covariance delta(j, u; z, x) = M * Cov(R_ju/M, R_zx/M).

    Check/check entries use the shared-variable law for positions fewer than
    d_v apart. Variable/variable entries are diagonal. Variable/check entries
    follow ``cross_term``.

    Raises:
        ValidationError: On an unknown cross_term or epsilon outside [0, 1]
    """
    _check_epsilon(eps)
    if cross_term not in ("printed", "derived"):
        raise ValidationError("unknown cross-term variant", field="cross_term", value=cross_term)

    law = connection_law(params)
    d_v, d_c, L = params.d_v, params.d_c, params.L
    n_pos = params.num_check_positions
    width = d_c + 1
    p = law.p_init_table(eps)[:, 1:]  # p[k, j-1]
    A1, A0 = _share_tables(params, eps)
    j = np.arange(1, d_c + 1)
    jz = np.outer(j, j)

    delta = np.zeros((n_pos, width, n_pos, width))

    # same position, check/check
    for k in range(n_pos):
        pk = p[k]
        block = -jz * np.outer(pk, pk)
        block[np.diag_indices(d_c)] = j ** 2 * pk * (1.0 - pk)
        delta[k, :d_c, k, :d_c] = law.mass[k] / d_c * block

    # nearby positions, check/check (u < x)
    for ku in range(n_pos):
        u = ku - L
        for kx in range(ku + 1, min(ku + d_v, n_pos)):
            x = kx - L
            shared = law.window_real_mass(x - d_v + 1, u)
            if shared == 0.0:
                continue
            p_share = eps * np.outer(A1[ku], A1[kx]) + (1.0 - eps) * np.outer(A0[ku], A0[kx])
            block = jz * shared * (p_share - np.outer(p[ku], p[kx]))
            delta[ku, :d_c, kx, :d_c] = block
            delta[kx, :d_c, ku, :d_c] = block.T

    weights = _variable_weights(params)
    # variable/variable
    for k in range(2 * L + 1):
        delta[k, d_c, k, d_c] = weights[k] * eps * (1.0 - eps)

    # variable/check
    for ku in range(2 * L + 1):
        if cross_term == "printed":
            offsets = range(1, d_v)
        else:
            offsets = range(0, d_v)
        for off in offsets:
            kx = ku + off
            if kx >= n_pos:
                break
            if cross_term == "printed":
                row = j * (eps * A1[kx]) * (eps * p[kx])
            else:
                row = weights[ku] * j * eps * (1.0 - eps) * (A1[kx] - A0[kx])
            delta[ku, d_c, kx, :d_c] = row
            delta[kx, :d_c, ku, d_c] = row

    matrix = delta.reshape(n_pos * width, n_pos * width)
    logger.debug(f"CE initial for {params.label()} at eps={eps}: trace={np.trace(matrix):.6g}")
    return CovarianceState(params=params, matrix=matrix, tau=0.0)
