"""
Peeling Drift
=============

Expected one-step change of the normalized residual-graph state and the
second moment of that change.

One peeling step picks a degree-1 check at position u with probability

    a_u = r_{1,u} / sum_w r_{1,w}

and resolves a variable at p in [u-d_v+1, u] with probability

    b_{p|u} = v_p / sum_{p' in [u-d_v+1, u]} v_{p'}.

The variable's d_v edges are deleted, one at each position w in
[p, p+d_v-1]. The edge at w = u belongs to the resolved check; every other
edge hits a degree-j check at w with probability pi_{j,w} = r_{j,w} / sum_m r_{m,w}.

Every function accepts arrays with leading batch dimensions and complex
dtype so that the Jacobian can be taken by complex-step differentiation.
Branching only ever looks at the real part.
"""

import logging
from typing import Tuple

import numpy as np

from ..ensemble.params import EnsembleParams

logger = logging.getLogger(__name__)

_TINY = 1e-300


def _safe_divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """num / den where Re(den) > 0, 0 elsewhere."""
    ok = den.real > _TINY
    return np.where(ok, num / np.where(ok, den, 1.0), 0.0)


def _window_back(x: np.ndarray, width: int) -> np.ndarray:
    """out[..., k] = sum_{i=0}^{width-1} x[..., k-i] (terms with k-i < 0 dropped)."""
    out = x.copy()
    for i in range(1, width):
        out[..., i:] += x[..., :-i]
    return out


def _window_forward(x: np.ndarray, width: int) -> np.ndarray:
    """out[..., k] = sum_{i=0}^{width-1} x[..., k+i] (terms past the end dropped)."""
    out = x.copy()
    for i in range(1, width):
        out[..., :-i] += x[..., i:]
    return out


def _rates(X: np.ndarray, d_v: int, d_c: int) -> Tuple[np.ndarray, ...]:
    """(a, q, h, pi, stalled) for states X of shape (..., n_pos, d_c + 1)."""
    r = X[..., :d_c]
    v = X[..., d_c]
    r1 = r[..., 0]
    total = r1.sum(axis=-1, keepdims=True)
    stalled = total.real[..., 0] <= _TINY

    a = _safe_divide(r1, total)
    window = _window_back(v, d_v)
    q = v * _window_forward(_safe_divide(a, window), d_v)
    e = _window_back(q, d_v)
    h = e - a
    pi = _safe_divide(r, r.sum(axis=-1, keepdims=True))
    return a, q, h, pi, stalled


def _edge_jump_mean(pi: np.ndarray, d_c: int) -> np.ndarray:
    """E[xi_w] over the r coordinates: -j pi_j + j pi_{j+1}."""
    j = np.arange(1, d_c + 1)
    out = -j * pi
    out[..., :-1] += j[:-1] * pi[..., 1:]
    return out


def drift_array(X: np.ndarray, d_v: int, d_c: int) -> np.ndarray:
    """
    Drift dX/dtau for states of shape (..., n_pos, d_c + 1).

    A stalled state (no degree-1 mass) has zero drift.
    """
    a, q, h, pi, stalled = _rates(X, d_v, d_c)
    out = np.zeros_like(X)
    out[..., d_c] = -q
    out[..., :d_c] = h[..., None] * _edge_jump_mean(pi, d_c)
    out[..., 0] -= a
    if stalled.ndim == 0:
        if stalled:
            out[...] = 0.0
    elif stalled.any():
        out[stalled] = 0.0
    return out


def drift(params: EnsembleParams, X: np.ndarray) -> np.ndarray:
    """
    Drift of one state (n_pos, d_c + 1).

    Away from a stall, sum(dv) = -1 and sum(dr) = -d_v.
    """
    return drift_array(X, params.d_v, params.d_c)


def jacobian(params: EnsembleParams, X: np.ndarray, step: float = 1e-20) -> np.ndarray:
    """
    Jacobian of the drift with respect to the flattened state, by batched
    complex-step differentiation: J[:, i] = Im(f(X + i h e_i)) / h.
    """
    D = X.size
    batch = np.broadcast_to(X.reshape(-1), (D, D)).astype(complex)
    batch = batch + 1j * step * np.eye(D)
    f = drift_array(batch.reshape((D,) + X.shape), params.d_v, params.d_c)
    return (f.reshape(D, D).imag / step).T


def jump_covariance(params: EnsembleParams, X: np.ndarray) -> np.ndarray:
    """
    Covariance of the integer state jump of a single peeling step,

        Gamma = sum_{u,p} w_up mu_up mu_up^T + sum_w h_w C_w - m m^T

    where mu_up is the expected jump given the (check, variable) choice,
    C_w the covariance of one random edge deletion at w and m the drift.
    """
    d_v, d_c = params.d_v, params.d_c
    n_pos, width = X.shape
    D = X.size
    a, q, h, pi, stalled = _rates(X, d_v, d_c)
    if stalled:
        return np.zeros((D, D))

    v = X[:, d_c]
    window = _window_back(v, d_v)
    ratio = _safe_divide(a, window)
    mean_xi = np.zeros((n_pos, width))
    mean_xi[:, :d_c] = _edge_jump_mean(pi, d_c)

    rows = []
    probs = []
    for k in range(n_pos):
        for i in range(d_v):
            kp = k - i
            if kp < 0:
                break
            w = ratio[k] * v[kp]
            if w <= 0.0:
                continue
            mu = np.zeros((n_pos, width))
            mu[kp:kp + d_v] = mean_xi[kp:kp + d_v]
            mu[k] -= mean_xi[k]
            mu[kp, d_c] -= 1.0
            mu[k, 0] -= 1.0
            rows.append(mu.reshape(-1))
            probs.append(w)

    gamma = np.zeros((D, D))
    if rows:
        U = np.asarray(rows)
        gamma += (U.T * np.asarray(probs)) @ U

    j = np.arange(1, d_c + 1)
    jumps = -np.diag(j).astype(float)
    jumps[np.arange(1, d_c), np.arange(0, d_c - 1)] = j[1:] - 1
    for k in range(n_pos):
        if h[k] <= 0.0:
            continue
        e = pi[k] @ jumps
        C = (jumps.T * pi[k]) @ jumps - np.outer(e, e)
        sl = slice(k * width, k * width + d_c)
        gamma[sl, sl] += h[k] * C

    m = drift_array(X, d_v, d_c).reshape(-1)
    gamma -= np.outer(m, m)
    return 0.5 * (gamma + gamma.T)
