"""
Position Profile
================

Exact node bookkeeping of an SFC-LDPC ensemble (construction steps 1-3):
how many variable, dummy and check nodes sit at each position, and the
degree r_i of the single leftover check that equalizes edge counts.

All counts are integers. With ``sizing='exact'`` the section sizes
ceil(alpha^(L-|i|) M) are evaluated in rational arithmetic, so they are
bit-exact for any rational alpha.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, TextIO, Union

from .params import EnsembleParams
from ..utils.exceptions import CapacityError

logger = logging.getLogger(__name__)

# Counts must fit into int64 node-id arrays.
MAX_SECTION_BITS = 62


def _check_capacity(params: EnsembleParams) -> None:
    """Reject ensembles whose largest section would not fit in int64."""
    bits = params.L * math.log2(params.alpha) + math.log2(params.M)
    if bits >= MAX_SECTION_BITS:
        raise CapacityError(
            f"Section size alpha^L * M too large for {params.label()} with M={params.M}",
            required_bits=bits,
            limit=1 << MAX_SECTION_BITS,
        )


def section_size(params: EnsembleParams, i: int) -> int:
    """
    Number of nodes (variable or dummy) at position ``i``: ceil(alpha^(L-|i|) M).
    """
    exponent = params.L - abs(i)
    if params.sizing == "float64":
        return math.ceil(params.alpha_float ** exponent * params.M)
    return math.ceil(params.alpha ** exponent * params.M)


@dataclass(frozen=True)
class PositionProfile:
    """
    Node counts per position plus derived code length and design rate.

    The count dictionaries are keyed by position. ``check_count`` and
    ``remainder_degree`` cover [-L, L+d_v-1]; ``variable_count`` covers
    [-L, L]; ``dummy_count`` covers the dummy positions.
    """

    params: EnsembleParams
    variable_counts: Dict[int, int]
    dummy_counts: Dict[int, int]
    check_counts: Dict[int, int]
    remainder_degrees: Dict[int, int]
    incoming_edges: Dict[int, int] = field(repr=False)

    def variable_count(self, i: int) -> int:
        return self.variable_counts[i]

    def dummy_count(self, i: int) -> int:
        return self.dummy_counts[i]

    def node_count(self, i: int) -> int:
        """Variable or dummy count at any position of [-L-d_v+1, L+d_v-1]."""
        if i in self.variable_counts:
            return self.variable_counts[i]
        return self.dummy_counts[i]

    def check_count(self, i: int) -> int:
        return self.check_counts[i]

    def remainder_degree(self, i: int) -> int:
        return self.remainder_degrees[i]

    @property
    def code_length(self) -> int:
        """N: total number of (non-dummy) variable nodes."""
        return sum(self.variable_counts.values())

    @property
    def total_checks(self) -> int:
        return sum(self.check_counts.values())

    @property
    def design_rate(self) -> Fraction:
        """1 - (#check nodes)/(#variable nodes), no rank correction."""
        return 1 - Fraction(self.total_checks, self.code_length)

    @property
    def total_edges(self) -> int:
        """Edges after shortening: d_v per surviving variable."""
        return self.params.d_v * self.code_length

    def expected_empty_checks(self, i: int) -> float:
        """
        Expected number of checks at position ``i`` whose every socket lands
        on a dummy, (1 - s(i))^d_c * check_count(i).
        """
        from .law import connection_law
        s = connection_law(self.params).s(i)
        return (1.0 - s) ** self.params.d_c * self.check_counts[i]

    def effective_rate(self) -> float:
        """Design rate counting only checks expected to keep at least one edge."""
        empty = sum(self.expected_empty_checks(i) for i in self.params.check_positions)
        return 1.0 - (self.total_checks - empty) / self.code_length

    def rows(self) -> List[dict]:
        """One record per position for tabular dumps."""
        from .law import connection_law
        law = connection_law(self.params)
        p = self.params
        records = []
        for i in range(-p.L - p.d_v + 1, p.L + p.d_v):
            is_check = i in self.check_counts
            records.append({
                "position": i,
                "variable_count": self.variable_counts.get(i, 0),
                "dummy_count": self.dummy_counts.get(i, 0),
                "check_count": self.check_counts.get(i, 0),
                "r_i": self.remainder_degrees.get(i, ""),
                "incoming_edges": self.incoming_edges.get(i, ""),
                "s": f"{law.s(i):.12f}" if is_check else "",
                "expected_empty_checks": f"{self.expected_empty_checks(i):.6f}" if is_check else "",
            })
        return records

    def to_csv(self, target: Optional[Union[str, Path, TextIO]] = None) -> str:
        """
        Dump the profile as CSV. Returns the CSV text and, when ``target`` is
        given, also writes it there.
        """
        buffer = io.StringIO()
        records = self.rows()
        writer = csv.DictWriter(buffer, fieldnames=list(records[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
        buffer.write(f"# code_length,{self.code_length}\n")
        buffer.write(f"# design_rate,{float(self.design_rate):.12f}\n")
        text = buffer.getvalue()

        if isinstance(target, (str, Path)):
            Path(target).write_text(text, encoding="utf-8")
        elif target is not None:
            target.write(text)
        return text


def position_profile(params: EnsembleParams) -> PositionProfile:
    """
    Compute exact node counts for an ensemble (construction steps 1-3).

    Raises:
        CapacityError: If alpha^L * M does not fit the node-id arrays

    Example:
        >>> p = EnsembleParams(dv=3, dc=6, L=2, alpha=2, M=4)
        >>> [position_profile(p).variable_count(i) for i in range(-2, 3)]
        [4, 8, 16, 8, 4]
    """
    _check_capacity(params)
    d_v, d_c, L = params.d_v, params.d_c, params.L

    variable_counts = {i: section_size(params, i) for i in params.variable_positions}
    dummy_counts = {i: section_size(params, i) for i in params.dummy_positions}
    nodes = {**variable_counts, **dummy_counts}

    check_counts: Dict[int, int] = {}
    remainder: Dict[int, int] = {}
    incoming: Dict[int, int] = {}
    for i in params.check_positions:
        edges = sum(nodes[i - j] for j in range(d_v))
        count = -(-edges // d_c)
        incoming[i] = edges
        check_counts[i] = count
        remainder[i] = edges - d_c * (count - 1)

    profile = PositionProfile(
        params=params,
        variable_counts=variable_counts,
        dummy_counts=dummy_counts,
        check_counts=check_counts,
        remainder_degrees=remainder,
        incoming_edges=incoming,
    )
    logger.debug(f"Profile {params.label()} M={params.M}: N={profile.code_length}, "
                 f"checks={profile.total_checks}, L={L}")
    return profile
