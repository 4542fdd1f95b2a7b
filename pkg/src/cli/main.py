"""
Command Line Interface for the SFC-LDPC Toolkit
===============================================

One click group with a subcommand per stage of the pipeline:

    profile     position profile of an ensemble (table or CSV)
    design      choose (L, M) for a target length and rate
    construct   sample a Tanner graph, optionally girth-conditioned
    simulate    peel/BP-decode erasure patterns on a stored graph
    evolve      solve EGE (and CE) at one epsilon, optional Monte-Carlo oracle
    predict     threshold, gamma, delta1(tau*) and the predicted waterfall
    reproduce   recompute published tables with pass/fail per cell
    run         Monte-Carlo waterfall campaign with checkpoints
    plot-data   figure data from a run directory
    compare     SC target vs constructed SFC ensemble

Exit codes: 0 success, 1 runtime or input error, 2 tolerance failure.
"""

import csv
import json
import logging
import sys
from pathlib import Path
from typing import List

import click

try:
    from rich.console import Console
    from rich.progress import Progress
    from rich.table import Table
    RICH_AVAILABLE = True
    console = Console()
except ImportError:
    RICH_AVAILABLE = False
    console = None

from ..decoder import PeelingDecoder, bp_decode, sample_erasures
from ..ensemble import position_profile, solve_construction
from ..evolution import bp_threshold, empirical_moments, gamma_measurement, solve_ce, solve_ege
from ..harness import (
    compare_sc_sfc,
    emit_plot_data,
    evolution_filename,
    reproduce_tables,
    run_waterfall,
    write_evolution_csv,
)
from ..harness.tables import get_table_registry
from ..predict import characterize_ensemble
from ..sampler import condition_girth, load_graph, sample_graph, save_graph, spawn_seeds, write_alist
from ..utils.config import SolverSettings, load_defaults, load_ensemble, load_experiment
from ..utils.exceptions import SFCError, ToleranceFailure, ValidationError

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_TOLERANCE = 2


def setup_logging(verbose: bool = False):
    """Setup logging configuration."""
    level = logging.DEBUG if verbose else logging.INFO
    fmt = load_defaults().get("logging", {}).get(
        "format", "%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    logging.basicConfig(level=level, format=fmt)


def _say(message: str) -> None:
    if RICH_AVAILABLE:
        console.print(message)
    else:
        click.echo(click.unstyle(message))


def _fail(e: Exception) -> None:
    code = EXIT_TOLERANCE if isinstance(e, ToleranceFailure) else EXIT_ERROR
    _say(f"[red]Error: {e}[/red]")
    sys.exit(code)


def _table(title: str, columns: List[str], rows: List[List[str]]) -> None:
    if RICH_AVAILABLE:
        table = Table(title=title)
        for col in columns:
            table.add_column(col)
        for row in rows:
            table.add_row(*[str(x) for x in row])
        console.print(table)
    else:
        click.echo(title)
        click.echo("  ".join(columns))
        for row in rows:
            click.echo("  ".join(str(x) for x in row))


def _parse_grid(spec: str) -> List[float]:
    """'a:b:step' -> [a, a+step, ..., <= b]."""
    try:
        a, b, step = (float(x) for x in spec.split(":"))
    except ValueError as e:
        raise ValidationError("epsilon grid must look like a:b:step", field="eps-grid",
                              value=spec, original_error=e) from e
    if step <= 0 or b < a:
        raise ValidationError("epsilon grid needs step > 0 and b >= a", field="eps-grid", value=spec)
    count = int((b - a) / step + 1e-9) + 1
    return [round(a + i * step, 10) for i in range(count)]


def _parse_empirical(spec: str) -> dict:
    """'M=2000,trials=500' -> {'M': 2000, 'trials': 500}."""
    out = {}
    for part in filter(None, spec.split(",")):
        key, _, value = part.partition("=")
        if key.strip() not in ("M", "trials", "seed", "workers"):
            raise ValidationError("unknown empirical option", field="empirical", value=key)
        try:
            out[key.strip()] = int(value)
        except ValueError as e:
            raise ValidationError("empirical option values must be integers", field=key.strip(),
                                  value=value, original_error=e) from e
    if "M" not in out or "trials" not in out:
        raise ValidationError("empirical options need M= and trials=", field="empirical", value=spec)
    return out


@click.group()
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose output')
@click.pass_context
def cli(ctx, verbose):
    """
    SFC-LDPC Toolkit - construct, decode, analyse and predict
    spatially "Mt. Fuji" coupled LDPC ensembles over the BEC.
    """
    ctx.ensure_object(dict)
    ctx.obj['verbose'] = verbose
    setup_logging(verbose)


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True), help='Ensemble file')
@click.option('--csv', 'csv_path', type=click.Path(), help='Write the profile as CSV instead of a table')
def profile(config_path, csv_path):
    """Show the position profile of an ensemble."""
    try:
        params = load_ensemble(config_path)
        prof = position_profile(params)
        if csv_path:
            prof.to_csv(csv_path)
            _say(f"[green]Profile written to {csv_path}[/green]")
            return
        rows = [[r["position"], r["variable_count"], r["check_count"], r["r_i"],
                 f"{float(r['s']):.4f}" if r["s"] else ""] for r in prof.rows()]
        _table(f"{params.label()} M={params.M}", ["u", "variables", "checks", "r", "s"], rows)
        _say(f"N = {prof.code_length}, design rate = {float(prof.design_rate):.5f}, "
             f"effective rate = {prof.effective_rate():.5f}")
    except SFCError as e:
        _fail(e)


@cli.command()
@click.option('--length', type=int, required=True, help='Target code length')
@click.option('--rate', required=True, help='Target design rate (decimal or p/q)')
@click.option('--alpha', required=True, help='Growth factor (decimal or p/q)')
@click.option('--dv', type=int, default=3, show_default=True)
@click.option('--dc', type=int, default=6, show_default=True)
@click.option('--sizing', type=click.Choice(['exact', 'float64']), default='exact', show_default=True)
def design(length, rate, alpha, dv, dc, sizing):
    """Choose (L, M) closest to a target length and rate."""
    try:
        params = solve_construction(length, rate, alpha, d_v=dv, d_c=dc, sizing=sizing)
        prof = position_profile(params)
        _table("Construction", ["L", "M", "length", "design rate"],
               [[params.L, params.M, prof.code_length, f"{float(prof.design_rate):.5f}"]])
    except SFCError as e:
        _fail(e)


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True), help='Ensemble file')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--girth-condition', is_flag=True, help='Remove short cycles after sampling')
@click.option('--max-cycle', type=int, default=6, show_default=True, help='Longest cycle length removed')
@click.option('--out', 'out_path', required=True, type=click.Path(), help='Graph file to write')
@click.option('--alist', 'alist_path', type=click.Path(), help='Also write the parity-check matrix as alist')
def construct(config_path, seed, girth_condition, max_cycle, out_path, alist_path):
    """Sample a Tanner graph from an ensemble."""
    try:
        params = load_ensemble(config_path)
        graph = sample_graph(params, seed)
        if girth_condition:
            graph = condition_girth(graph, max_cycle, seed=seed)
        save_graph(graph, out_path)
        if alist_path:
            write_alist(graph, alist_path)
        summary = graph.summary()
        _say(f"[green]Wrote {out_path}[/green]: {summary['variables']} variables, "
             f"{summary['checks']} checks, {summary['edges']} edges")
    except SFCError as e:
        _fail(e)


@cli.command()
@click.option('--graph', 'graph_path', required=True, type=click.Path(exists=True))
@click.option('--epsilon', type=float, required=True)
@click.option('--trials', type=int, default=100, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--record-trace', is_flag=True, help='Write one residual-graph trace CSV per trial')
@click.option('--out', 'out_path', type=click.Path(), default='outcomes.csv', show_default=True)
def simulate(graph_path, epsilon, trials, seed, record_trace, out_path):
    """Decode erasure patterns on a stored graph with peeling and BP."""
    try:
        graph = load_graph(graph_path)
        decoder = PeelingDecoder(graph)
        out = Path(out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        failures = 0
        with open(out, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["trial", "erased", "outcome", "peel_steps", "residual",
                             "bp_iterations", "bp_agrees"])
            for trial, s in enumerate(spawn_seeds(seed, trials)):
                channel_seed, peel_seed = spawn_seeds(s, 2)
                pattern = sample_erasures(graph, epsilon, channel_seed)
                trace = decoder.decode(pattern, peel_seed, record=record_trace)
                bp = bp_decode(graph, pattern)
                failures += int(not trace.succeeded)
                writer.writerow([trial, pattern.num_erased, trace.outcome.value, trace.steps,
                                 trace.residual.shape[0], bp.iterations,
                                 int(bp.succeeded == trace.succeeded)])
                if record_trace:
                    _write_trace(out.parent / f"trace_{trial:05d}.csv", trace)
        _say(f"[green]{trials} trials[/green], {failures} word error(s); outcomes in {out}")
    except SFCError as e:
        _fail(e)


def _write_trace(path: Path, trace) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["t", "tau", "v_total", "r1"])
        r1 = trace.r1()
        for i, t in enumerate(trace.times):
            writer.writerow([int(t), f"{t / trace.M:.6f}", int(trace.V[i].sum()), f"{r1[i]:.6e}"])


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True), help='Ensemble file')
@click.option('--epsilon', type=float, required=True)
@click.option('--ce', is_flag=True, help='Also solve the covariance evolution')
@click.option('--empirical', help='Monte-Carlo oracle, e.g. "M=2000,trials=500"')
@click.option('--threshold', is_flag=True, help='Also bisect for eps_bp and measure gamma')
@click.option('--step', type=float, help='RK4 step (default step_scale * alpha^L)')
@click.option('--out', 'out_dir', type=click.Path(), default='.', show_default=True)
def evolve(config_path, epsilon, ce, empirical, threshold, step, out_dir):
    """Solve the expected graph evolution at one epsilon."""
    try:
        params = load_ensemble(config_path)
        settings = SolverSettings.from_defaults()
        mean = solve_ege(params, epsilon, step=step, settings=settings)
        cov = solve_ce(params, epsilon, mean=mean, settings=settings) if ce else None
        out = Path(out_dir)
        csv_path = write_evolution_csv(out / evolution_filename(epsilon), mean, cov)

        summary = dict(mean.summary())
        summary["ensemble"] = params.to_config()
        if cov is not None:
            summary["delta1_star"] = cov.delta1_star
        if threshold:
            eps_bp = bp_threshold(params, settings=settings, step=step)
            gm = gamma_measurement(params, eps_bp, settings=settings, step=step)
            summary.update({"eps_bp": eps_bp, "gamma": gm.gamma})
        if empirical:
            opts = _parse_empirical(empirical)
            sim = params.with_updates(M=opts["M"])
            moments = empirical_moments(sim, epsilon, opts["trials"], seed=opts.get("seed", 0),
                                        workers=opts.get("workers", 1))
            model = [mean.r1_at(t) for t in moments.taus]
            se = moments.r1.std(axis=0, ddof=1) / moments.trials ** 0.5
            summary["empirical"] = {
                "taus": moments.taus.tolist(),
                "r1_mean": moments.r1.mean(axis=0).tolist(),
                "r1_se": se.tolist(),
                "r1_model": model,
                "delta1": moments.delta1.tolist(),
                "successes": moments.successes,
            }
        json_path = out / f"summary_{epsilon:.4f}.json"
        json_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        _say(f"[green]tau*={summary['tau_star']}[/green] r1*={summary['r1_star']} "
             f"completed={summary['completed']}; wrote {csv_path} and {json_path}")
    except SFCError as e:
        _fail(e)


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True), help='Ensemble file')
@click.option('--eps-grid', help='Curve grid a:b:step (default 0.40 to eps_bp + 0.01)')
@click.option('--eps-bp', type=float, help='Known threshold; skips the bisection')
@click.option('--out', 'out_path', type=click.Path(), default='report.json', show_default=True)
def predict(config_path, eps_grid, eps_bp, out_path):
    """Characterize an ensemble and predict its waterfall."""
    try:
        params = load_ensemble(config_path)
        grid = _parse_grid(eps_grid) if eps_grid else None
        report = characterize_ensemble(params, eps_grid=grid, eps_bp=eps_bp)
        out = Path(out_path)
        report.save(out, out.with_suffix(".csv"))
        _table(params.label(), ["eps_bp", "gamma", "delta1*", "gamma/sqrt(delta1*)"],
               [[f"{report.eps_bp:.4f}", f"{report.gamma:.3f}", f"{report.delta1_star:.3f}",
                 f"{report.steepness:.3f}"]])
        _say(f"[green]Report written to {out}[/green]")
    except SFCError as e:
        _fail(e)


@cli.command()
@click.option('--table', 'tables', multiple=True, required=True,
              type=click.Choice(['I', 'II', 'III', 'IV'], case_sensitive=False))
@click.option('--rank-samples', type=int, default=0, show_default=True,
              help='Sampled codes per ensemble for the GF(2) rank rate')
@click.option('--out', 'out_path', type=click.Path(), help='Write the diff as JSON')
def reproduce(tables, rank_samples, out_path):
    """Recompute published tables and diff them against the published values."""
    try:
        reports = reproduce_tables(tables, rank_samples=rank_samples)
        for report in reports:
            rows = [[c.row, c.column, c.published, c.computed,
                     {True: "pass", False: "FAIL", None: "-"}[c.passed]] for c in report.cells]
            _table(f"Table {report.table}", ["row", "column", "published", "computed", "check"], rows)
        if out_path:
            Path(out_path).write_text(json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
        failed = [r for r in reports if not r.passed]
        if failed:
            raise ToleranceFailure(failed[0].table, [c.describe() for r in failed for c in r.failures])
        _say("[green]All checked cells within tolerance[/green]")
    except SFCError as e:
        _fail(e)


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True), help='Experiment file')
@click.option('--workers', type=int, help='Worker processes (overrides the file)')
@click.option('--resume', is_flag=True, help='Continue from checkpoints')
@click.option('--plot-data', 'plot', is_flag=True, help='Emit figure data when done')
def run(config_path, workers, resume, plot):
    """Run a Monte-Carlo waterfall campaign."""
    try:
        config = load_experiment(config_path, workers=workers)
        if RICH_AVAILABLE and load_defaults().get("cli", {}).get("progress_bar", True):
            with Progress(console=console) as bar:
                task = bar.add_task(f"[cyan]{config.name}", total=config.codes)
                table = run_waterfall(config, resume=resume,
                                      progress=lambda done, total: bar.update(task, completed=done))
        else:
            table = run_waterfall(config, resume=resume)
        rows = []
        for cell in table.cells:
            lo, hi = cell.stats.wer_interval
            rows.append([f"{cell.epsilon:.4f}", f"{cell.stats.wer:.3e}", f"[{lo:.2e}, {hi:.2e}]",
                         f"{cell.stats.ber:.3e}", f"{cell.stats.mean_iterations:.1f}",
                         "" if cell.predicted is None else f"{cell.predicted:.3e}"])
        _table(config.name, ["eps", "WER", "95% CI", "BER", "iterations", "predicted"], rows)
        if plot:
            emit_plot_data(config.run_dir)
        _say(f"[green]Results in {config.run_dir}[/green]")
    except SFCError as e:
        _fail(e)


@cli.command('plot-data')
@click.option('--run-dir', required=True, type=click.Path())
@click.option('--out', 'out_dir', type=click.Path(), help='Output directory (default <run-dir>/plot_data)')
def plot_data(run_dir, out_dir):
    """Write figure data files for a run directory."""
    try:
        for path in emit_plot_data(run_dir, out_dir):
            _say(f"  {path}")
    except SFCError as e:
        _fail(e)


@cli.command()
@click.option('--sc', 'sc_path', required=True, type=click.Path(exists=True), help='SC ensemble file')
@click.option('--sfc', 'sfc_path', required=True, type=click.Path(exists=True), help='SFC ensemble file')
@click.option('--eps-grid', required=True, help='Channel grid a:b:step')
@click.option('--codes', type=int, default=100, show_default=True)
@click.option('--codewords', type=int, default=100, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--workers', type=int, default=1, show_default=True)
def compare(sc_path, sfc_path, eps_grid, codes, codewords, seed, workers):
    """Simulate an SC target and an SFC ensemble side by side."""
    try:
        result = compare_sc_sfc(load_ensemble(sc_path), load_ensemble(sfc_path), _parse_grid(eps_grid),
                                codes=codes, codewords=codewords, seed=seed, workers=workers)
        rows = [[f"{r['epsilon']:.4f}", f"{r['sc_wer']:.3e}", f"{r['sfc_wer']:.3e}",
                 f"{r['sc_iterations']:.1f}", f"{r['sfc_iterations']:.1f}"] for r in result.rows()]
        _table("SC vs SFC", ["eps", "SC WER", "SFC WER", "SC iter", "SFC iter"], rows)
    except SFCError as e:
        _fail(e)


@cli.command('tables')
def list_tables():
    """List the reproducible tables."""
    _say(", ".join(get_table_registry().ids()))


def main():
    """Main entry point for the CLI."""
    cli()


if __name__ == '__main__':
    main()
