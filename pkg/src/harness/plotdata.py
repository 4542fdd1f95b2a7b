"""
Plot Data
=========

Figure data as CSV files plus a ``schema.json`` describing their columns.
Nothing is drawn here.

Inputs in a run directory:
    results.csv, summary.json   written by run_waterfall
    evolution_<eps>.csv         written by write_evolution_csv (evolve command)

Outputs in ``<run_dir>/plot_data``:
    error_rates.csv   epsilon, wer, wer_low, wer_high, ber, mean_iterations, predicted
    r1_tau.csv        tau, then one r1 column per epsilon
    delta1_tau.csv    tau, then one delta1 column per epsilon (when CE was solved)
"""

import csv
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from ..evolution.state import CovTrajectory, MeanTrajectory
from ..utils.exceptions import MissingArtifactError, handle_sfc_error

logger = logging.getLogger(__name__)

WATERFALL_ARTIFACTS = ("results.csv", "summary.json")
EVOLUTION_PATTERN = "evolution_*.csv"

SCHEMA = {
    "error_rates.csv": {
        "epsilon": "channel erasure probability",
        "wer": "simulated word (block) error rate",
        "wer_low": "lower end of the 95% Wilson interval",
        "wer_high": "upper end of the 95% Wilson interval (rule of three when no errors)",
        "ber": "simulated bit error rate",
        "mean_iterations": "average BP iterations per word",
        "predicted": "waterfall estimate (empty when not computed)",
    },
    "r1_tau.csv": {
        "tau": "normalized decoding time t/M",
        "r1@<eps>": "expected degree-1 edge mass summed over u in [-L, L]",
    },
    "delta1_tau.csv": {
        "tau": "normalized decoding time t/M",
        "delta1@<eps>": "scaled variance of the degree-1 edge mass",
    },
}


def _fmt(x: float) -> str:
    return f"{x:.8e}"


@handle_sfc_error
def write_evolution_csv(path: Union[str, Path], mean: MeanTrajectory,
                        cov: Optional[CovTrajectory] = None) -> Path:
    """tau, r1 (and delta1 when given) on the mean trajectory's grid."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    delta1 = None
    if cov is not None:
        delta1 = np.interp(mean.taus, cov.taus, cov.delta1, right=np.nan)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["tau", "r1"] + (["delta1"] if cov is not None else []))
        for i, tau in enumerate(mean.taus):
            row = [_fmt(tau), _fmt(mean.r1[i])]
            if delta1 is not None:
                row.append("" if np.isnan(delta1[i]) else _fmt(delta1[i]))
            writer.writerow(row)
    return path


def evolution_filename(eps: float) -> str:
    return f"evolution_{eps:.4f}.csv"


def _read_csv(path: Path) -> List[Dict[str, str]]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def _merge_series(files: List[Path], column: str) -> Optional[List[List[str]]]:
    """Outer-join the ``column`` series of several evolution files on tau."""
    series = {}
    for path in files:
        eps = path.stem.split("_", 1)[1]
        rows = _read_csv(path)
        if not rows or column not in rows[0]:
            continue
        series[eps] = {r["tau"]: r[column] for r in rows}
    if not series:
        return None
    taus = sorted({t for s in series.values() for t in s}, key=float)
    labels = sorted(series, key=float)
    table = [["tau"] + [f"{column}@{e}" for e in labels]]
    for t in taus:
        table.append([t] + [series[e].get(t, "") for e in labels])
    return table


def _write_rows(path: Path, rows: List[List[str]]) -> None:
    with open(path, "w", newline="") as f:
        csv.writer(f).writerows(rows)


@handle_sfc_error
def emit_plot_data(run_dir: Union[str, Path], out_dir: Optional[Union[str, Path]] = None) -> List[Path]:
    """
    Write every figure file the run directory has inputs for.

    Returns:
        Paths written, schema.json last

    Raises:
        MissingArtifactError: If no figure can be built, or a waterfall run is
            only partially present
    """
    run_dir = Path(run_dir)
    out = Path(out_dir) if out_dir is not None else run_dir / "plot_data"
    present = {name for name in WATERFALL_ARTIFACTS if (run_dir / name).exists()}
    evolution_files = sorted(run_dir.glob(EVOLUTION_PATTERN)) if run_dir.is_dir() else []

    if not present and not evolution_files:
        raise MissingArtifactError(str(run_dir), list(WATERFALL_ARTIFACTS) + [EVOLUTION_PATTERN])
    if present and len(present) < len(WATERFALL_ARTIFACTS):
        raise MissingArtifactError(str(run_dir), set(WATERFALL_ARTIFACTS) - present)

    out.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []

    if present:
        rows = _read_csv(run_dir / "results.csv")
        columns = list(SCHEMA["error_rates.csv"])
        table = [columns]
        for r in rows:
            high = r["wer_upper_bound"] if int(r["word_errors"]) == 0 else r["wer_high"]
            table.append([r["epsilon"], r["wer"], r["wer_low"], high, r["ber"],
                          r["mean_iterations"], r.get("predicted", "")])
        path = out / "error_rates.csv"
        _write_rows(path, table)
        written.append(path)

    for name, column in (("r1_tau.csv", "r1"), ("delta1_tau.csv", "delta1")):
        table = _merge_series(evolution_files, column)
        if table is not None:
            path = out / name
            _write_rows(path, table)
            written.append(path)

    schema_path = out / "schema.json"
    used = {p.name: SCHEMA[p.name] for p in written}
    schema_path.write_text(json.dumps(used, indent=2, sort_keys=True) + "\n")
    written.append(schema_path)
    logger.info(f"Wrote {len(written)} plot-data file(s) to {out}")
    return written
