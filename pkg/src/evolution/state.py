"""
Evolution State Types
=====================

Normalized residual-graph state of the peeling decoder and its second
moments.

A mean state is stored as an array X of shape (n_pos, d_c + 1) over the
check positions u in [-L, L+d_v-1]:

    X[k, j-1] = r_{j,u}   for j in [1, d_c]
    X[k, d_c] = v_u

with k = u + L. Flattened row-major this is the covariance coordinate
order index(j, u) = k * (d_c + 1) + (j - 1), where j = d_c + 1 denotes v_u.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..ensemble.params import EnsembleParams


def state_shape(params: EnsembleParams) -> tuple:
    return params.num_check_positions, params.d_c + 1


def coordinate(params: EnsembleParams, j: int, u: int) -> int:
    """Flat coordinate of r_{j,u} (j <= d_c) or v_u (j = d_c + 1)."""
    if not 1 <= j <= params.d_c + 1:
        raise IndexError(f"degree index {j} outside [1, {params.d_c + 1}]")
    k = params.position_index(u)
    if not 0 <= k < params.num_check_positions:
        raise IndexError(f"position {u} outside the check range")
    return k * (params.d_c + 1) + (j - 1)


def r1_coordinates(params: EnsembleParams) -> np.ndarray:
    """Flat coordinates of r_{1,u} for u in [-L, L]."""
    return np.arange(2 * params.L + 1) * (params.d_c + 1)


@dataclass(frozen=True, eq=False)
class MeanState:
    """Normalized expected state (v_hat, r_hat) at time tau."""

    params: EnsembleParams
    values: np.ndarray
    tau: float = 0.0

    def v_hat(self, u: int) -> float:
        return float(self.values[self.params.position_index(u), self.params.d_c])

    def r_hat(self, j: int, u: int) -> float:
        if not 1 <= j <= self.params.d_c:
            raise IndexError(f"degree {j} outside [1, {self.params.d_c}]")
        return float(self.values[self.params.position_index(u), j - 1])

    @property
    def v(self) -> np.ndarray:
        return self.values[:, self.params.d_c]

    @property
    def r(self) -> np.ndarray:
        """(n_pos, d_c) edge masses."""
        return self.values[:, : self.params.d_c]

    @property
    def r1(self) -> float:
        """Sum of r_hat(1, u) over u in [-L, L]."""
        return float(self.values[: 2 * self.params.L + 1, 0].sum())

    @property
    def r1_all(self) -> float:
        """Degree-1 edge mass over every check position."""
        return float(self.values[:, 0].sum())

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)


@dataclass(frozen=True, eq=False)
class CovarianceState:
    """Scaled covariance matrix delta over all (j, u) coordinates."""

    params: EnsembleParams
    matrix: np.ndarray
    tau: float = 0.0

    def delta(self, j: int, u: int, z: int, x: int) -> float:
        return float(self.matrix[coordinate(self.params, j, u), coordinate(self.params, z, x)])

    @property
    def delta1(self) -> float:
        """Sum of delta(1, u; 1, x) over u, x in [-L, L]."""
        idx = r1_coordinates(self.params)
        return float(self.matrix[np.ix_(idx, idx)].sum())


@dataclass
class MeanTrajectory:
    """
    EGE solution.

    Attributes:
        params, epsilon, step: What was solved and with which RK4 step
        taus: (n,) integration grid
        states: (n, n_pos, d_c + 1) mean states on the grid
        r1: (n,) sum of r_hat(1, u) over u in [-L, L]
        completed: r1 stayed positive until the variable mass was exhausted
        tau_star, r1_star: Refined interior local minimum of r1, if any
        flat: r1 shows a flat critical phase instead of a strict minimum
        stall_tau: Time at which the degree-1 mass ran out (if not completed)
    """

    params: EnsembleParams
    epsilon: float
    step: float
    taus: np.ndarray
    states: np.ndarray
    r1: np.ndarray
    completed: bool
    tau_star: Optional[float] = None
    r1_star: Optional[float] = None
    flat: bool = False
    stall_tau: Optional[float] = None
    halvings: int = 0

    @property
    def has_minimum(self) -> bool:
        return self.tau_star is not None

    def state_at(self, index: int) -> MeanState:
        return MeanState(self.params, self.states[index], float(self.taus[index]))

    def r1_at(self, tau: float) -> float:
        return float(np.interp(tau, self.taus, self.r1))

    def summary(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "step": self.step,
            "completed": self.completed,
            "tau_star": self.tau_star,
            "r1_star": self.r1_star,
            "flat": self.flat,
            "stall_tau": self.stall_tau,
            "halvings": self.halvings,
        }


@dataclass
class CovTrajectory:
    """
    CE solution along a mean trajectory.

    Attributes:
        taus: (n,) grid (the RK4 grid of the mean trajectory, possibly cut short)
        delta1: (n,) delta_1(tau)
        delta1_star: delta_1 at the mean trajectory's tau_star, if any
        final: Covariance matrix at the last grid point
        projections: Times a negative diagonal had to be projected to 0
        max_asymmetry: Largest |delta - delta^T| entry seen after any Euler step
    """

    params: EnsembleParams
    epsilon: float
    taus: np.ndarray
    delta1: np.ndarray
    delta1_star: Optional[float]
    final: CovarianceState
    projections: int = 0
    max_asymmetry: float = 0.0
    snapshots: dict = field(default_factory=dict, repr=False)

    def delta1_at(self, tau: float) -> float:
        return float(np.interp(tau, self.taus, self.delta1))
