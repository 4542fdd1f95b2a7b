"""
Waterfall Campaign
==================

Monte-Carlo block and bit error rates of sampled codes over BEC(eps).

Work is split by code: one unit samples a graph (girth-conditioned when
configured) and decodes ``codewords`` erasure patterns on it at every
epsilon. The same codes are used across the epsilon grid. Units are
distributed over a joblib pool, each finished unit is checkpointed as JSON
in ``<run_dir>/checkpoints`` and a resumed run skips the units already on
disk. All seeds derive from ``config.seed``, so the campaign is a function
of its configuration.

Run directory layout:
    config.yaml         configuration snapshot
    checkpoints/        one JSON file per finished code
    results.csv         one row per epsilon
    summary.json        aggregated results and provenance
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import yaml
from joblib import Parallel, delayed

from ..decoder.bp import bp_residual
from ..decoder.channel import sample_erasures
from ..decoder.peeling import PeelingDecoder
from ..ensemble.reference import REFERENCE_ENSEMBLES, reference_ensemble
from ..predict.report import characterize_ensemble
from ..predict.waterfall import waterfall_estimate
from ..sampler.girth import condition_girth
from ..sampler.sampling import sample_graph
from ..utils.config import ExperimentConfig
from ..utils.exceptions import ConfigurationError, handle_sfc_error
from .statistics import CellStats

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int], None]


def unit_seed(*keys: int) -> int:
    """63-bit seed derived from a tuple of non-negative integers."""
    state = np.random.SeedSequence(list(keys)).generate_state(1, dtype=np.uint64)[0]
    return int(state >> np.uint64(1))


def run_code(config: ExperimentConfig, code: int, cross_checks: int = 1) -> Dict[str, Any]:
    """
    Sample code ``code`` and decode all of its erasure patterns.

    The first ``cross_checks`` patterns per epsilon are also peeled and the
    outcomes compared with BP.
    """
    graph = sample_graph(config.ensemble, unit_seed(config.seed, code))
    if config.girth_condition:
        graph = condition_girth(graph, config.max_removed_cycle, seed=unit_seed(config.seed, code, 1))
    peeler = PeelingDecoder(graph) if cross_checks else None
    n = graph.num_variables

    cells: Dict[str, Any] = {}
    for i, eps in enumerate(config.epsilons):
        stats = CellStats()
        for w in range(config.codewords):
            pattern = sample_erasures(graph, eps, unit_seed(config.seed, code, 2, i, w))
            residual, iterations = bp_residual(graph, pattern)
            left = int(np.count_nonzero(residual))
            stats.add_word(n, left, iterations)
            if w < cross_checks:
                trace = peeler.decode(pattern, unit_seed(config.seed, code, 3, i, w), record=False)
                stats.cross_checks += 1
                if trace.succeeded != (left == 0):
                    stats.mismatches += 1
                    logger.warning(f"Peeling and BP disagree on code {code}, eps={eps}, word {w}")
        cells[f"{eps:.6f}"] = stats.to_dict()
    return {"code": code, "num_variables": n, "num_checks": graph.num_checks, "cells": cells}


@dataclass
class CellResult:
    """Aggregated statistics of one epsilon."""

    epsilon: float
    stats: CellStats
    predicted: Optional[float] = None

    def row(self) -> Dict[str, Any]:
        lo, hi = self.stats.wer_interval
        return {
            "epsilon": f"{self.epsilon:.6f}",
            "words": self.stats.words,
            "word_errors": self.stats.word_errors,
            "wer": f"{self.stats.wer:.6e}",
            "wer_low": f"{lo:.6e}",
            "wer_high": f"{hi:.6e}",
            "wer_upper_bound": f"{self.stats.wer_upper_bound:.6e}",
            "ber": f"{self.stats.ber:.6e}",
            "mean_iterations": f"{self.stats.mean_iterations:.4f}",
            "mismatches": self.stats.mismatches,
            "predicted": "" if self.predicted is None else f"{self.predicted:.6e}",
        }


@dataclass
class ResultTable:
    """Per-epsilon results of a campaign."""

    config: ExperimentConfig
    cells: List[CellResult] = field(default_factory=list)
    codes_done: int = 0
    num_variables: Optional[int] = None

    @property
    def epsilons(self) -> List[float]:
        return [c.epsilon for c in self.cells]

    @property
    def wer(self) -> List[float]:
        return [c.stats.wer for c in self.cells]

    def cell(self, eps: float) -> CellResult:
        for c in self.cells:
            if abs(c.epsilon - eps) < 1e-9:
                return c
        raise KeyError(eps)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_config(),
            "codes_done": self.codes_done,
            "num_variables": self.num_variables,
            "cells": [dict(c.row(), **{"stats": c.stats.to_dict()}) for c in self.cells],
        }

    def write(self, run_dir: Path) -> None:
        run_dir.mkdir(parents=True, exist_ok=True)
        rows = [c.row() for c in self.cells]
        with open(run_dir / "results.csv", "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        (run_dir / "summary.json").write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


def _checkpoint_path(run_dir: Path, code: int) -> Path:
    return run_dir / "checkpoints" / f"code_{code:05d}.json"


def _prepare_run_dir(config: ExperimentConfig, resume: bool) -> Path:
    run_dir = config.run_dir
    snapshot = run_dir / "config.yaml"
    current = config.to_config()
    current.pop("workers", None)
    if snapshot.exists() and resume:
        stored = yaml.safe_load(snapshot.read_text()) or {}
        stored.pop("workers", None)
        if stored != current:
            raise ConfigurationError("configuration differs from the run being resumed",
                                     config_file=str(snapshot))
    (run_dir / "checkpoints").mkdir(parents=True, exist_ok=True)
    if not resume:
        for old in (run_dir / "checkpoints").glob("code_*.json"):
            old.unlink()
    snapshot.write_text(yaml.safe_dump(current, sort_keys=True))
    return run_dir


def _predictions(config: ExperimentConfig) -> Dict[float, float]:
    if not config.predict:
        return {}
    if config.reference:
        ref = reference_ensemble(config.reference)
    else:
        ref = next((r for r in REFERENCE_ENSEMBLES.values()
                    if r.params == config.ensemble and r.gamma is not None), None)
    if ref is None or ref.gamma is None or ref.delta1_star is None:
        report = characterize_ensemble(config.ensemble, eps_grid=config.epsilons)
        eps_bp, gamma, delta1 = report.eps_bp, report.gamma, report.delta1_star
    else:
        eps_bp, gamma, delta1 = ref.eps_bp, ref.gamma, ref.delta1_star
    return {eps: waterfall_estimate(config.ensemble.M, eps, eps_bp, gamma, delta1)
            for eps in config.epsilons}


@handle_sfc_error
def run_waterfall(config: ExperimentConfig, resume: bool = False,
                  progress: Optional[ProgressCallback] = None,
                  cross_checks: int = 1) -> ResultTable:
    """
    Run (or resume) a waterfall campaign and write its outputs.

    Args:
        config: Sampling plan
        resume: Reuse checkpoints of a previous run with the same configuration
        progress: Called as progress(done, total) after each finished code
        cross_checks: Patterns per (code, epsilon) also decoded by peeling

    Raises:
        ConfigurationError: If ``resume`` meets a different configuration
    """
    run_dir = _prepare_run_dir(config, resume)
    done: Dict[int, Dict[str, Any]] = {}
    for path in sorted((run_dir / "checkpoints").glob("code_*.json")):
        record = json.loads(path.read_text())
        done[int(record["code"])] = record
    todo = [c for c in range(config.codes) if c not in done]
    logger.info(f"Campaign '{config.name}': {len(done)} code(s) from checkpoints, "
                f"{len(todo)} to run on {config.workers} worker(s)")
    if progress:
        progress(len(done), config.codes)

    if todo:
        results = Parallel(n_jobs=config.workers, return_as="generator")(
            delayed(run_code)(config, c, cross_checks) for c in todo
        )
        for record in results:
            _checkpoint_path(run_dir, record["code"]).write_text(json.dumps(record, sort_keys=True))
            done[record["code"]] = record
            if progress:
                progress(len(done), config.codes)

    predicted = _predictions(config)
    table = ResultTable(config=config, codes_done=len(done))
    for eps in config.epsilons:
        key = f"{eps:.6f}"
        stats = CellStats()
        for code in sorted(done):
            stats = stats.merge(CellStats.from_dict(done[code]["cells"][key]))
        table.cells.append(CellResult(epsilon=eps, stats=stats, predicted=predicted.get(eps)))
        logger.info(f"eps={eps:.4f}: WER {stats.wer:.3e} ({stats.word_errors}/{stats.words}), "
                    f"mean iterations {stats.mean_iterations:.1f}")
    if done:
        table.num_variables = next(iter(done.values()))["num_variables"]
    table.write(run_dir)
    return table
