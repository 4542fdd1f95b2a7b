"""
Table Reproduction
==================

Recompute every published table cell the toolkit can produce and diff it
against the published value.

Key Components:
- TableReproducer: template-method base; subclasses yield cells, the base
  checks tolerances and builds the report
- TableRegistry / register_table: decorator-based lookup by table id
- reproduce_tables: run one or more tables, optionally raising
  ToleranceFailure on any failed cell

Tolerances:
    threshold   +-5e-4 absolute
    gamma       +-2% relative
    delta1*     +-5% relative
    steepness   +-3% relative
    length      exact
    rate        reported only
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Tuple, Type

from ..ensemble.construction import solve_construction
from ..ensemble.params import EnsembleParams
from ..ensemble.profile import position_profile
from ..ensemble.reference import reference_ensemble
from ..predict.report import PredictionReport, characterize_ensemble
from ..sampler.sampling import sample_graph, spawn_seeds
from ..utils.config import SolverSettings
from ..utils.exceptions import ToleranceFailure, ValidationError
from .rank import rank_rate

logger = logging.getLogger(__name__)

THRESHOLD_TOL = 5e-4
GAMMA_TOL = 0.02
DELTA1_TOL = 0.05
STEEPNESS_TOL = 0.03


@dataclass
class Cell:
    """
    One compared table cell.

    ``kind`` is 'abs', 'rel', 'exact' or 'info'; info cells never fail.
    """

    row: str
    column: str
    published: object
    computed: object
    kind: str = "info"
    tolerance: float = 0.0

    @property
    def passed(self) -> Optional[bool]:
        if self.kind == "info" or self.published is None:
            return None
        if self.kind == "exact":
            return self.published == self.computed
        diff = abs(float(self.computed) - float(self.published))
        if self.kind == "rel":
            diff /= abs(float(self.published))
        return diff <= self.tolerance + 1e-12

    def describe(self) -> str:
        return f"{self.row}/{self.column}: published {self.published}, computed {self.computed}"

    def to_dict(self) -> Dict[str, object]:
        return {
            "row": self.row,
            "column": self.column,
            "published": self.published,
            "computed": self.computed,
            "kind": self.kind,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class TableReport:
    table: str
    cells: List[Cell] = field(default_factory=list)

    @property
    def failures(self) -> List[Cell]:
        return [c for c in self.cells if c.passed is False]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, object]:
        return {"table": self.table, "passed": self.passed, "cells": [c.to_dict() for c in self.cells]}


class TableReproducer(ABC):
    """
    Base class of one table.

    Subclasses implement ``cells``; ``reproduce`` collects them into a
    report and logs failures.
    """

    table_id: str = ""

    def __init__(self, settings: Optional[SolverSettings] = None, rank_samples: int = 0):
        self.settings = settings or SolverSettings.from_defaults()
        self.rank_samples = rank_samples
        self._reports: Dict[Tuple, PredictionReport] = {}

    @abstractmethod
    def cells(self) -> Iterator[Cell]:
        """Yield the compared cells of this table."""

    def reproduce(self) -> TableReport:
        report = TableReport(table=self.table_id)
        for cell in self.cells():
            report.cells.append(cell)
            if cell.passed is False:
                logger.warning(f"Table {self.table_id}: {cell.describe()} outside tolerance")
        logger.info(f"Table {self.table_id}: {len(report.cells)} cells, {len(report.failures)} failed")
        return report

    # Shared helpers

    def characterize(self, params: EnsembleParams) -> PredictionReport:
        """Evolution parameters, cached per (d_v, d_c, L, alpha); M does not enter them."""
        key = (params.d_v, params.d_c, params.L, params.alpha)
        if key not in self._reports:
            self._reports[key] = characterize_ensemble(params, eps_grid=[], settings=self.settings)
        return self._reports[key]

    def evolution_cells(self, name: str) -> Iterator[Cell]:
        ref = reference_ensemble(name)
        rep = self.characterize(ref.params)
        yield Cell(name, "eps_bp", ref.eps_bp, round(rep.eps_bp, 5), "abs", THRESHOLD_TOL)
        yield Cell(name, "gamma", ref.gamma, round(rep.gamma, 4), "rel", GAMMA_TOL)
        yield Cell(name, "delta1_star", ref.delta1_star, round(rep.delta1_star, 4), "rel", DELTA1_TOL)
        yield Cell(name, "steepness", ref.steepness, round(rep.steepness, 4), "rel", STEEPNESS_TOL)

    def length_cells(self, name: str) -> Iterator[Cell]:
        ref = reference_ensemble(name)
        profile = position_profile(ref.params)
        yield Cell(name, "length", ref.length, profile.code_length, "exact")
        yield Cell(name, "design_rate", ref.rate, round(float(profile.design_rate), 5))
        yield Cell(name, "effective_rate", ref.rate, round(profile.effective_rate(), 5))
        if self.rank_samples:
            rates = [rank_rate(sample_graph(ref.params, s)) for s in spawn_seeds(0, self.rank_samples)]
            yield Cell(name, "rank_rate", ref.rate, round(sum(rates) / len(rates), 5))


class TableRegistry:
    """Table id -> reproducer class."""

    def __init__(self):
        self._tables: Dict[str, Type[TableReproducer]] = {}

    def register(self, table_id: str, cls: Type[TableReproducer]) -> None:
        key = table_id.upper()
        if key in self._tables:
            logger.warning(f"Overriding reproducer for table {key}")
        cls.table_id = key
        self._tables[key] = cls

    def get(self, table_id: str) -> Type[TableReproducer]:
        key = str(table_id).upper()
        if key not in self._tables:
            raise ValidationError(f"unknown table (known: {', '.join(self.ids())})",
                                  field="table", value=table_id)
        return self._tables[key]

    def ids(self) -> List[str]:
        return sorted(self._tables)


_registry = TableRegistry()


def get_table_registry() -> TableRegistry:
    return _registry


def register_table(table_id: str) -> Callable[[Type[TableReproducer]], Type[TableReproducer]]:
    """
    Class decorator registering a reproducer.

    Example:
        @register_table("II")
        class LengthTable(TableReproducer):
            ...
    """
    def decorator(cls: Type[TableReproducer]) -> Type[TableReproducer]:
        _registry.register(table_id, cls)
        return cls
    return decorator


@register_table("I")
class AlphaSweepTable(TableReproducer):
    """(3, 6, 20, alpha) for alpha in 1.05 .. 1.20, plus both orderings."""

    rows = ("T1.05", "T1.10", "T1.15", "T1.20")

    def cells(self) -> Iterator[Cell]:
        for name in self.rows:
            yield from self.evolution_cells(name)
        reports = [self.characterize(reference_ensemble(n).params) for n in self.rows]
        thresholds = [r.eps_bp for r in reports]
        steepness = [r.steepness for r in reports]
        yield Cell("alpha sweep", "eps_bp decreasing", True,
                   all(a > b for a, b in zip(thresholds, thresholds[1:])), "exact")
        yield Cell("alpha sweep", "steepness increasing", True,
                   all(a < b for a, b in zip(steepness, steepness[1:])), "exact")


@register_table("II")
class ExperimentEnsembleTable(TableReproducer):
    """Lengths and rates of the experiment ensembles."""

    rows = ("A1", "A2", "A3", "A4", "B1", "C1")

    def cells(self) -> Iterator[Cell]:
        for name in self.rows:
            yield from self.length_cells(name)


@register_table("III")
class WaterfallParameterTable(TableReproducer):
    """Threshold, gamma, delta1* and steepness of the experiment ensembles."""

    rows = ("A1", "A2", "A3", "A4", "B1", "C1")

    def cells(self) -> Iterator[Cell]:
        for name in self.rows:
            yield from self.evolution_cells(name)


@register_table("IV")
class ConstructionTable(TableReproducer):
    """SC target and the SFC ensemble constructed to match it."""

    def cells(self) -> Iterator[Cell]:
        yield from self.length_cells("SC-target")
        yield from self.length_cells("SFC-built")
        target = reference_ensemble("SC-target")
        built = reference_ensemble("SFC-built")
        found = solve_construction(target.length, target.rate, built.params.alpha,
                                   d_v=built.params.d_v, d_c=built.params.d_c)
        yield Cell("construction", "L", built.params.L, found.L, "exact")
        yield Cell("construction", "M", built.params.M, found.M, "exact")
        yield Cell("construction", "length", built.length, position_profile(found).code_length, "exact")


def reproduce_tables(which: Iterable[str], settings: Optional[SolverSettings] = None,
                     strict: bool = False, rank_samples: int = 0) -> List[TableReport]:
    """
    Reproduce the requested tables.

    Raises:
        ValidationError: On an unknown table id
        ToleranceFailure: If ``strict`` and some cell is outside tolerance
    """
    reports = []
    for table_id in which:
        cls = _registry.get(table_id)
        report = cls(settings=settings, rank_samples=rank_samples).reproduce()
        reports.append(report)
        if strict and report.failures:
            raise ToleranceFailure(report.table, [c.describe() for c in report.failures])
    return reports
