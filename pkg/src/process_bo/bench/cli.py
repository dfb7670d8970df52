import json
import os

import click

from .. import configure_logging
from ..config import Config, set_n_jobs
from ..exceptions import ProcessBOError
from ..problems import PROBLEMS, export_problems
from .harness import DEFAULT_PIS, DEFAULT_TIMING_SIZES, RunConfig, compare, pi_sweep, run_monte_carlo, timing_probe
from .output import write_results


def _float_list(ctx, param, value: str) -> list[float]:
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma separated numbers, got {value}") from None


def _int_list(ctx, param, value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma separated integers, got {value}") from None


@click.group()
@click.option("--log-level", default=None, help="Logging level, defaults to PROCESS_BO_LOG_LEVEL")
@click.option("--jobs", type=int, default=None, help="Parallel repetitions, defaults to PROCESS_BO_N_JOBS")
def bench(log_level, jobs):
    """Monte Carlo studies on the benchmark problems"""
    configure_logging(log_level)
    if jobs is not None:
        set_n_jobs(jobs)


@bench.command()
@click.option("--problem", type=click.Choice(sorted(PROBLEMS)), default="p1")
@click.option("--acq", type=click.Choice(["alg1", "eic", "both"]), default="both")
@click.option("--pi", type=float, default=0.6, show_default=True)
@click.option("--tau", type=float, default=0.0, show_default=True, help="Constraint noise level, 0 for noiseless")
@click.option("--reps", type=int, default=100, show_default=True, help="Repetitions in noiseless mode")
@click.option("--inits", type=int, default=20, show_default=True, help="Initializations in noisy mode")
@click.option("--noise-reps", type=int, default=5, show_default=True, help="Noise realizations per initialization")
@click.option("--max-iter", type=int, default=100, show_default=True)
@click.option("--grid", type=int, default=20000, show_default=True)
@click.option("--restarts", type=int, default=2, show_default=True, help="Hyperparameter restarts per fit")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def run(problem, acq, pi, tau, reps, inits, noise_reps, max_iter, grid, restarts, seed, out):
    """Compare the switching acquisition with EI_C on one problem"""
    try:
        config = RunConfig(
            problem=problem,
            pi=pi,
            tau=tau,
            repetitions=reps,
            initializations=inits,
            noise_realizations=noise_reps,
            max_iterations=max_iter,
            grid_count=grid,
            gp_restarts=restarts,
            seed=Config.RANDOM_SEED if seed is None else seed,
        )
        if acq == "both":
            results = compare(config)
        else:
            results = {acq: run_monte_carlo(config.replace(acquisition=acq))}
    except (ProcessBOError, ValueError) as err:
        raise click.ClickException(str(err)) from err
    write_results(out, results, {"config": config.to_dict()})
    for label, metrics in results.items():
        click.echo(
            f"{label}: {metrics.mean_required_iterations:.1f} required iterations, "
            f"{100 * metrics.feasible_fraction:.0f}% feasible samples"
        )


@bench.command("sweep-pi")
@click.option("--problem", type=click.Choice(sorted(PROBLEMS)), default="p3")
@click.option("--pis", callback=_float_list, default=",".join(f"{pi:g}" for pi in DEFAULT_PIS), show_default=True)
@click.option("--reps", type=int, default=100, show_default=True)
@click.option("--max-iter", type=int, default=100, show_default=True)
@click.option("--grid", type=int, default=20000, show_default=True)
@click.option("--restarts", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def sweep_pi(problem, pis, reps, max_iter, grid, restarts, seed, out):
    """Noiseless study over several confidence thresholds, with the EI_C reference"""
    try:
        config = RunConfig(
            problem=problem,
            repetitions=reps,
            max_iterations=max_iter,
            grid_count=grid,
            gp_restarts=restarts,
            seed=Config.RANDOM_SEED if seed is None else seed,
        )
        results = pi_sweep(config, pis)
    except (ProcessBOError, ValueError) as err:
        raise click.ClickException(str(err)) from err
    write_results(out, results, {"config": config.to_dict(), "pis": pis})
    for label, metrics in results.items():
        click.echo(
            f"pi={label}: {metrics.mean_required_iterations:.1f} required iterations, "
            f"{100 * metrics.feasible_fraction:.0f}% feasible samples"
        )


@bench.command()
@click.option("--problem", type=click.Choice(sorted(PROBLEMS)), default="p1")
@click.option("--grid", type=int, default=20000, show_default=True)
@click.option(
    "--sizes", callback=_int_list, default=",".join(str(s) for s in DEFAULT_TIMING_SIZES), show_default=True
)
@click.option("--repeats", type=int, default=5, show_default=True)
def timing(problem, grid, sizes, repeats):
    """Median wall-clock time of one full iteration"""
    try:
        timings = timing_probe(problem, sizes, grid_count=grid, repeats=repeats)
    except (ProcessBOError, ValueError) as err:
        raise click.ClickException(str(err)) from err
    for size, seconds in timings.items():
        click.echo(f"{size:>5} points: {1e3 * seconds:8.1f} ms")


@bench.command()
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the definitions to this file")
def problems(out):
    """Print the benchmark problem definitions as JSON"""
    if out is not None and os.path.dirname(out):
        os.makedirs(os.path.dirname(out), exist_ok=True)
    click.echo(json.dumps(export_problems(out), indent=2))
