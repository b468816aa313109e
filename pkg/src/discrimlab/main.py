#!/usr/bin/env python3
"""
discrimlab - Discriminability, noncontextual bounds and CHSH certification
Main entry point with Typer CLI
"""
from pathlib import Path
from typing import Any, Dict, Optional

import typer

from . import __version__
from .config import RunConfig
from .errors import DiscrimLabError
from .experiments import Report, run
from .export import emit
from .ui import (
    console,
    print_error, print_success, print_info,
    print_progress, print_report, print_summary,
)

app = typer.Typer(
    name="discrimlab",
    help="Operational discriminability, PNC bounds and CHSH certification",
    add_completion=False
)

# Exit codes
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


def execute(command: str, config: Optional[Path], overrides: Dict[str, Any]) -> Report:
    """Build the RunConfig (defaults < config file < flags), run it and emit the report"""
    try:
        cfg = RunConfig.load(str(config)) if config else RunConfig()
        cfg = cfg.merged({"command": command, **overrides}).validate()

        with print_progress(f"Running {command}") as progress:
            progress.add_task(command, total=None)
            report = run(cfg)

        if cfg.output_path:
            emit(report, cfg.format, cfg.output_path)
            print_success(f"Wrote {len(report.rows)} row(s) to {cfg.output_path}")
        else:
            print_report(report.command, report.columns, report.rows)
    except DiscrimLabError as e:
        print_error(e)
        raise typer.Exit(EXIT_ERROR)

    print_summary(report.passed, report.failures, len(report.rows))
    if not report.passed:
        raise typer.Exit(EXIT_CHECK_FAILED)
    return report


ConfigOption = typer.Option(None, "--config", help="key = value config file; flags override it")
SeedOption = typer.Option(None, "--seed", help="RNG seed (default 0)")
OutOption = typer.Option(None, "--out", help="Write the report to this path")
FormatOption = typer.Option(None, "--format", help="Report format: csv or json")
WorkersOption = typer.Option(None, "--workers", help="Concurrent rows / grid chunks")
TimingsOption = typer.Option(None, "--timings/--no-timings", help="Add a runtime column")


@app.command()
def discrim(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    samples: Optional[int] = typer.Option(None, "--samples", help="Simulated runs per experiment"),
    out: Optional[str] = OutOption,
    format: Optional[str] = FormatOption,
    eta1: Optional[float] = typer.Option(None, "--eta1", help="Prior of the first state"),
    gamma2: Optional[float] = typer.Option(None, "--gamma2", help="|<psi|phi>|^2; omit to sweep [0, 1]"),
    points: Optional[int] = typer.Option(None, "--points", help="Sweep points"),
    workers: Optional[int] = WorkersOption,
    timings: Optional[bool] = TimingsOption,
):
    """Closed-form vs game-score discriminability, exact and sampled"""
    execute("discrim", config, dict(
        seed=seed, samples=samples, output_path=out, format=format,
        eta1=eta1, gamma2=gamma2, points=points, workers=workers, timings=timings,
    ))


@app.command("ontic-bound")
def ontic_bound(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    format: Optional[str] = FormatOption,
    q: Optional[float] = typer.Option(None, "--q", help="Off-diagonal pass probability of the response"),
    c: Optional[float] = typer.Option(None, "--c", help="Confusability; omit to sweep [0, 1/2]"),
    eta1: Optional[float] = typer.Option(None, "--eta1", help="Prior of the first state (q* check)"),
    gamma2: Optional[float] = typer.Option(None, "--gamma2", help="Overlap; switches to the q* check"),
    points: Optional[int] = typer.Option(None, "--points", help="Sweep points"),
    workers: Optional[int] = WorkersOption,
    timings: Optional[bool] = TimingsOption,
):
    """Direct bound, its quantum saturation and the q* threshold"""
    execute("ontic-bound", config, dict(
        seed=seed, output_path=out, format=format, q=q, c=c,
        eta1=eta1, gamma2=gamma2, points=points, workers=workers, timings=timings,
    ))


@app.command("ontic-search")
def ontic_search(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    format: Optional[str] = FormatOption,
    q: Optional[float] = typer.Option(None, "--q", help="Off-diagonal pass probability of the response"),
    c: Optional[float] = typer.Option(None, "--c", help="Confusability; omit to sweep [0, 1]"),
    eta1: Optional[float] = typer.Option(None, "--eta1", help="Prior of the first state"),
    sharp: Optional[bool] = typer.Option(None, "--sharp/--no-sharp", help="Impose the sharp single-copy test"),
    resolution: Optional[int] = typer.Option(None, "--resolution", help="Grid points per parameter"),
    points: Optional[int] = typer.Option(None, "--points", help="Sweep points over c"),
    n_states: Optional[int] = typer.Option(None, "--n-states", help="Ontic states; >2 runs the exploratory search"),
    budget: Optional[int] = typer.Option(None, "--budget", help="Objective evaluations for the n-state search"),
    workers: Optional[int] = WorkersOption,
    timings: Optional[bool] = TimingsOption,
):
    """Numerical search for the noncontextual maximum"""
    execute("ontic-search", config, dict(
        seed=seed, output_path=out, format=format, q=q, c=c, eta1=eta1,
        sharp=sharp, resolution=resolution, points=points, n_states=n_states,
        budget=budget, workers=workers, timings=timings,
    ))


@app.command("bell-verify")
def bell_verify(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    samples: Optional[int] = typer.Option(None, "--samples", help="Simulated SWAP tests per estimate"),
    out: Optional[str] = OutOption,
    format: Optional[str] = FormatOption,
    theta: Optional[float] = typer.Option(None, "--theta", help="cos(theta)|00> + sin(theta)|11>; omit for |Phi+>"),
    workers: Optional[int] = WorkersOption,
    timings: Optional[bool] = TimingsOption,
):
    """Separation bound against the optimized CHSH value for one state"""
    execute("bell-verify", config, dict(
        seed=seed, samples=samples, output_path=out, format=format,
        theta=theta, workers=workers, timings=timings,
    ))


@app.command("bell-sweep")
def bell_sweep(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    samples: Optional[int] = typer.Option(None, "--samples", help="Simulated SWAP tests per estimate"),
    out: Optional[str] = OutOption,
    format: Optional[str] = FormatOption,
    sweep: Optional[str] = typer.Option(None, "--sweep", help="theta, threshold or random"),
    points: Optional[int] = typer.Option(None, "--points", help="Sweep points"),
    workers: Optional[int] = WorkersOption,
    timings: Optional[bool] = TimingsOption,
):
    """CHSH certification over a family of scenarios"""
    execute("bell-sweep", config, dict(
        seed=seed, samples=samples, output_path=out, format=format,
        sweep=sweep, points=points, workers=workers, timings=timings,
    ))


@app.command()
def sample(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    samples: Optional[int] = typer.Option(None, "--samples", help="Simulated runs per experiment"),
    out: Optional[str] = OutOption,
    format: Optional[str] = FormatOption,
    eta1: Optional[float] = typer.Option(None, "--eta1", help="Prior of the first state"),
    gamma2: Optional[float] = typer.Option(None, "--gamma2", help="|<psi|phi>|^2 (default 1/2)"),
    runs: Optional[int] = typer.Option(None, "--runs", help="Seeded repetitions"),
    workers: Optional[int] = WorkersOption,
    timings: Optional[bool] = TimingsOption,
):
    """Monte Carlo soundness of the sampled game statistics"""
    execute("sample", config, dict(
        seed=seed, samples=samples, output_path=out, format=format,
        eta1=eta1, gamma2=gamma2, runs=runs, workers=workers, timings=timings,
    ))


@app.command()
def version():
    """Show version info"""
    console.print(f"[bold cyan]discrimlab[/bold cyan] v{__version__}")
    print_info("Commands: discrim, ontic-bound, ontic-search, bell-verify, bell-sweep, sample")


def main():
    """Entry point"""
    app()


if __name__ == "__main__":
    main()
