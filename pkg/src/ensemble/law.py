"""
Connection Law
==============

Closed-form connection probabilities of an SFC-LDPC ensemble: the fraction
s(i) of check-side sockets at position i that land on real (non-dummy)
variables, the check degree distribution after shortening rho(m, i), its
edge-perspective variant rho'(m, i), and the post-channel degree
distribution p_init(j, i, eps).

These formulas drop the ceilings of the construction (section masses are
alpha^(L-|k|), not ceil(alpha^(L-|k|) M)/M); the discrepancy is O(1/M).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import binom

from .params import EnsembleParams

logger = logging.getLogger(__name__)


def binomial_matrix(n_max: int, eps: float) -> np.ndarray:
    """
    B[m, j] = C(m, j) eps^j (1-eps)^(m-j) for 0 <= j <= m <= n_max, else 0.
    """
    m = np.arange(n_max + 1)[:, None]
    j = np.arange(n_max + 1)[None, :]
    return np.where(j <= m, binom.pmf(j, m, eps), 0.0)


@dataclass(frozen=True, eq=False)
class ConnectionLaw:
    """
    Per-position probabilities, stored as arrays indexed by
    ``params.position_index(i)`` over the check positions [-L, L+d_v-1].

    Attributes:
        params: Ensemble the law belongs to
        mass: Sum_{j=0}^{d_v-1} alpha^(L-|i-j|); edge mass arriving at i
        real_mass: Same sum restricted to real variable positions [-L, L]
        s_values: real_mass / mass
        rho_table: rho_table[k, m] = rho(m, i) for m in [0, d_c]
        rho_prime_table: rho_prime_table[k, m] = rho'(m, i) for m in [1, d_c]
            (column 0 is always 0)
    """

    params: EnsembleParams
    mass: np.ndarray
    real_mass: np.ndarray
    s_values: np.ndarray
    rho_table: np.ndarray
    rho_prime_table: np.ndarray

    def _k(self, i: int) -> int:
        k = self.params.position_index(i)
        if not 0 <= k < self.params.num_check_positions:
            raise IndexError(f"position {i} outside check range {self.params.check_positions}")
        return k

    def s(self, i: int) -> float:
        return float(self.s_values[self._k(i)])

    def rho(self, m: int, i: int) -> float:
        if not 0 <= m <= self.params.d_c:
            return 0.0
        return float(self.rho_table[self._k(i), m])

    def rho_prime(self, m: int, i: int) -> float:
        if not 1 <= m <= self.params.d_c:
            return 0.0
        return float(self.rho_prime_table[self._k(i), m])

    def p_init_table(self, eps: float) -> np.ndarray:
        """
        p[k, j]: probability that a check at position index k has j erased
        neighbours after channel initialization, j in [0, d_c].
        """
        return self.rho_table @ binomial_matrix(self.params.d_c, eps)

    def p_init(self, j: int, i: int, eps: float) -> float:
        if not 0 <= j <= self.params.d_c:
            return 0.0
        return float(self.p_init_table(eps)[self._k(i), j])

    def edge_to_position(self, i: int, j: int) -> float:
        """
        Probability that a socket of a check at ``i`` lands on a node
        (variable or dummy) at position ``i - j``.
        """
        return self.params.weight(i - j) / float(self.mass[self._k(i)])

    def window_real_mass(self, low: int, high: int) -> float:
        """Sum of alpha^(L-|k|) over k in [max(-L, low), min(L, high)]; 0 if empty."""
        p = self.params
        lo, hi = max(-p.L, low), min(p.L, high)
        if lo > hi:
            return 0.0
        return float(sum(p.weight(k) for k in range(lo, hi + 1)))


@lru_cache(maxsize=64)
def connection_law(params: EnsembleParams) -> ConnectionLaw:
    """
    Evaluate the connection law of an ensemble.

    Example:
        >>> law = connection_law(EnsembleParams(dv=3, dc=6, L=1, alpha=2, M=1))
        >>> round(law.s(2), 6)
        0.857143
    """
    d_v, d_c, L = params.d_v, params.d_c, params.L
    positions = np.array(list(params.check_positions))

    weights = {k: params.weight(k) for k in range(-L - d_v + 1, L + d_v)}
    mass = np.array([sum(weights[i - j] for j in range(d_v)) for i in positions])
    real_mass = np.array([
        sum(weights[k] for k in range(max(-L, i - d_v + 1), min(L, i) + 1))
        for i in positions
    ])
    s_values = real_mass / mass

    interior = np.array([params.is_interior(int(i)) for i in positions])
    m = np.arange(d_c + 1)

    rho_table = binom.pmf(m[None, :], d_c, s_values[:, None])
    rho_table[interior] = 0.0
    rho_table[interior, d_c] = 1.0

    rho_prime_table = np.zeros_like(rho_table)
    rho_prime_table[:, 1:] = binom.pmf(m[None, 1:] - 1, d_c - 1, s_values[:, None])
    rho_prime_table[interior] = 0.0
    rho_prime_table[interior, d_c] = 1.0

    logger.debug(f"Connection law for {params.label()}: min s={s_values.min():.6f}")
    return ConnectionLaw(
        params=params,
        mass=mass,
        real_mass=real_mass,
        s_values=s_values,
        rho_table=rho_table,
        rho_prime_table=rho_prime_table,
    )
