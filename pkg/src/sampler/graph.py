"""
Tanner Graph
============

Array-backed, immutable Tanner graph of one sampled SFC-LDPC code after
dummy shortening.

Storage:
    var_positions[v]       position of variable v, in [-L, L]
    var_checks[v, j]       check attached to socket j of v; it sits at
                           position var_positions[v] + j
    check_positions[c]     position of check c, in [-L, L+d_v-1]
    check_capacity[c]      d_c, or r_i for the single remainder check

Variables and checks are numbered position-major, so ids are stable for a
given (params, seed).
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, Tuple

import numpy as np
from scipy.sparse import csr_matrix

from ..ensemble.params import EnsembleParams
from ..utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=np.int64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TannerGraph:
    """
    One sampled Tanner graph.

    Attributes:
        params: Ensemble the graph was drawn from
        var_positions: (n_var,) positions of the variable nodes
        var_checks: (n_var, d_v) check ids, socket-ordered
        check_positions: (n_check,) positions of the check nodes
        check_capacity: (n_check,) degree before shortening
        girth_conditioned: Whether short cycles were removed
        max_removed_cycle: Longest cycle length removed (0 if not conditioned)
    """

    params: EnsembleParams
    var_positions: np.ndarray
    var_checks: np.ndarray
    check_positions: np.ndarray
    check_capacity: np.ndarray
    girth_conditioned: bool = False
    max_removed_cycle: int = 0

    def __post_init__(self):
        object.__setattr__(self, "var_positions", _frozen(self.var_positions))
        object.__setattr__(self, "var_checks", _frozen(self.var_checks).reshape(-1, self.params.d_v))
        object.__setattr__(self, "check_positions", _frozen(self.check_positions))
        object.__setattr__(self, "check_capacity", _frozen(self.check_capacity))

    # ------------------------------------------------------------------
    # Sizes
    # ------------------------------------------------------------------

    @property
    def num_variables(self) -> int:
        return int(self.var_positions.shape[0])

    @property
    def num_checks(self) -> int:
        return int(self.check_positions.shape[0])

    @property
    def num_edges(self) -> int:
        return int(self.var_checks.size)

    # ------------------------------------------------------------------
    # Listings
    # ------------------------------------------------------------------

    @property
    def variables(self) -> List[Tuple[int, int]]:
        """(id, position) for every variable."""
        return list(enumerate(self.var_positions.tolist()))

    @property
    def checks(self) -> List[Tuple[int, int, int]]:
        """(id, position, capacity) for every check."""
        return [(c, p, cap) for c, (p, cap) in
                enumerate(zip(self.check_positions.tolist(), self.check_capacity.tolist()))]

    def edges(self) -> Iterator[Tuple[int, int, int]]:
        """Yield (variable id, check id, socket j) for every edge."""
        for v, row in enumerate(self.var_checks.tolist()):
            for j, c in enumerate(row):
                yield v, c, j

    # ------------------------------------------------------------------
    # Derived structure
    # ------------------------------------------------------------------

    @cached_property
    def check_degrees(self) -> np.ndarray:
        return np.bincount(self.var_checks.ravel(), minlength=self.num_checks)

    @cached_property
    def check_adjacency(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        CSR-style (indptr, indices): the variables of check c are
        indices[indptr[c]:indptr[c+1]], sorted ascending.
        """
        flat = self.var_checks.ravel()
        order = np.lexsort((np.repeat(np.arange(self.num_variables), self.params.d_v), flat))
        indices = np.repeat(np.arange(self.num_variables), self.params.d_v)[order]
        indptr = np.zeros(self.num_checks + 1, dtype=np.int64)
        np.cumsum(self.check_degrees, out=indptr[1:])
        return indptr, indices

    def check_neighbors(self, c: int) -> np.ndarray:
        indptr, indices = self.check_adjacency
        return indices[indptr[c]:indptr[c + 1]]

    def edge_positions(self) -> np.ndarray:
        """(n_var, d_v) check position reached by every socket."""
        return self.check_positions[self.var_checks]

    def parity_check_matrix(self) -> csr_matrix:
        """Sparse H with rows = checks and columns = variables."""
        rows = self.var_checks.ravel()
        cols = np.repeat(np.arange(self.num_variables), self.params.d_v)
        data = np.ones(rows.shape[0], dtype=np.uint8)
        return csr_matrix((data, (rows, cols)), shape=(self.num_checks, self.num_variables))

    def position_counts(self) -> Tuple[np.ndarray, np.ndarray]:
        """Variables per position over [-L, L] and checks per position over [-L, L+d_v-1]."""
        p = self.params
        variables = np.bincount(self.var_positions + p.L, minlength=2 * p.L + 1)
        checks = np.bincount(self.check_positions + p.L, minlength=p.num_check_positions)
        return variables, checks

    # ------------------------------------------------------------------
    # Checks
    # ------------------------------------------------------------------

    def validate(self) -> None:
        """
        Check the structural invariants of a sampled graph.

        Raises:
            ValidationError: If any invariant is violated
        """
        d_v = self.params.d_v
        if self.var_checks.shape != (self.num_variables, d_v):
            raise ValidationError(f"expected {d_v} sockets per variable", field="var_checks",
                                  value=self.var_checks.shape)
        expected = self.var_positions[:, None] + np.arange(d_v)[None, :]
        if not np.array_equal(self.edge_positions(), expected):
            raise ValidationError("socket j must land at position i + j", field="var_checks")
        if np.any(self.check_degrees > self.check_capacity):
            raise ValidationError("check degree exceeds capacity", field="check_capacity")
        # One edge per variable per check position rules out parallel edges.
        if not np.all(np.diff(np.sort(self.var_checks, axis=1), axis=1) > 0):
            raise ValidationError("parallel edge", field="var_checks")

    def with_var_checks(self, var_checks: np.ndarray, girth_conditioned: bool,
                        max_removed_cycle: int) -> "TannerGraph":
        return TannerGraph(
            params=self.params,
            var_positions=self.var_positions,
            var_checks=var_checks,
            check_positions=self.check_positions,
            check_capacity=self.check_capacity,
            girth_conditioned=girth_conditioned,
            max_removed_cycle=max_removed_cycle,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TannerGraph):
            return NotImplemented
        return (
            self.params == other.params
            and self.girth_conditioned == other.girth_conditioned
            and self.max_removed_cycle == other.max_removed_cycle
            and np.array_equal(self.var_positions, other.var_positions)
            and np.array_equal(self.var_checks, other.var_checks)
            and np.array_equal(self.check_positions, other.check_positions)
            and np.array_equal(self.check_capacity, other.check_capacity)
        )

    __hash__ = None  # type: ignore[assignment]

    def summary(self) -> dict:
        degrees = self.check_degrees
        return {
            "ensemble": self.params.label(),
            "M": self.params.M,
            "variables": self.num_variables,
            "checks": self.num_checks,
            "edges": self.num_edges,
            "empty_checks": int(np.count_nonzero(degrees == 0)),
            "girth_conditioned": self.girth_conditioned,
        }
