import json
from typing import Optional

import click
import pandas as pd

from .. import configure_logging
from ..config import Config
from ..exceptions import ProcessBOError
from .session import (
    campaign_abandon,
    campaign_calibrate,
    campaign_init,
    campaign_record,
    campaign_status,
    campaign_suggest,
    format_summary,
    load_session,
    status_summary,
)
from .studies import STUDIES


def _numbers(ctx, param, value: Optional[str]) -> Optional[list[float]]:
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma separated numbers, got {value}") from None


def _rows(ctx, param, value: Optional[str]) -> Optional[list[list[float]]]:
    """`a,b;c,d` is two rows of two values"""
    if value is None:
        return None
    rows = [_numbers(ctx, param, row) for row in value.split(";") if row.strip()]
    if len({len(row) for row in rows}) > 1:
        raise click.BadParameter(f"every row needs the same number of values, got {value}")
    return rows


def read_measurement_csv(path: str, status_name: Optional[str]) -> tuple[list[list[float]], Optional[list[float]]]:
    """Measurements from a CSV file, one row per pending candidate

    An optional header row names the columns; a column named after the status input (or `v`) holds measured status
    values, every other column is a constraint measurement in the order of the config.
    """
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        return [], None
    except pd.errors.ParserError as err:
        raise click.BadParameter(f"{path}: {err}") from None
    if pd.to_numeric(frame.iloc[0].dropna(), errors="coerce").isna().any():
        frame.columns = [str(h).strip() for h in frame.iloc[0]]
        frame = frame.iloc[1:]
    try:
        frame = frame.astype(float)
    except ValueError as err:
        raise click.BadParameter(f"{path}: {err}") from None
    for name in (status_name, "v"):
        if name and name in frame.columns:
            return frame.drop(columns=name).to_numpy().tolist(), frame[name].tolist()
    return frame.to_numpy().tolist(), None


def _fail(err: Exception):
    raise click.ClickException(str(err)) from err


@click.group()
@click.option(
    "--session",
    "session_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="Session file, defaults to PROCESS_BO_SESSION",
)
@click.option("--log-level", default=None, help="Logging level, defaults to PROCESS_BO_LOG_LEVEL")
@click.pass_context
def campaign(ctx, session_path, log_level):
    """Human-in-the-loop optimization campaigns"""
    configure_logging(log_level)
    ctx.obj = session_path or Config.SESSION_PATH


@campaign.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--force", is_flag=True, help="Overwrite an existing session")
@click.pass_obj
def init(session_path, config_path, force):
    """Start a campaign from a JSON config file"""
    try:
        state = campaign_init(config_path, session_path, force)
    except (ProcessBOError, OSError) as err:
        _fail(err)
    click.echo(f"Created {session_path} with {len(state.dataset)} initial experiment(s)")


@campaign.command()
@click.option("--baseline", callback=_numbers, required=True, help="Controllable inputs of the baseline experiment")
@click.option("--measured", type=float, required=True, help="Status measured on the baseline this session")
@click.option("--measurements", callback=_numbers, default=None, help="Constraint measurements of the baseline")
@click.option("--allow-outside", is_flag=True, help="Accept a baseline outside the initial experiments")
@click.pass_obj
def calibrate(session_path, baseline, measured, measurements, allow_outside):
    """Measure the session offset of the status input"""
    try:
        state = campaign_calibrate(session_path, baseline, measured, measurements, allow_outside)
    except ProcessBOError as err:
        _fail(err)
    click.echo(f"Session offset {state.offset.delta:+.6g} (predicted {state.offset.predicted:.6g})")


@campaign.command()
@click.option("-n", "--batch-size", type=int, default=None, help="Experiments in this batch")
@click.option("--pi", type=float, default=None, help="New confidence threshold, kept for later batches")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def suggest(session_path, batch_size, pi, as_json):
    """Propose the next batch of experiments"""
    try:
        state, batch = campaign_suggest(session_path, batch_size, pi)
    except ProcessBOError as err:
        _fail(err)
    if as_json:
        click.echo(json.dumps(batch.to_dict(), indent=2))
        return
    names = state.config.header()[: state.config.n_dims]
    frame = pd.DataFrame(
        [[s.candidate_id, *s.inputs, s.cost, round(s.fp, 4), str(s.branch)] for s in batch.selections],
        columns=["id", *names, "cost", "fp", "branch"],
    )
    click.echo(frame.to_csv(index=False), nl=False)


@campaign.command()
@click.option("--csv", "csv_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--values", callback=_rows, default=None, help="Rows separated by ';', values by ','")
@click.option("--status", callback=_numbers, default=None, help="Measured status of each experiment")
@click.pass_obj
def record(session_path, csv_path, values, status):
    """Record the measurements of the pending batch"""
    if (csv_path is None) == (values is None):
        raise click.UsageError("Give the measurements with exactly one of --csv and --values")
    try:
        if csv_path is not None:
            config = load_session(session_path).config
            values, file_status = read_measurement_csv(
                csv_path, None if config.status is None else config.status.name
            )
            status = status if status is not None else file_status
        _, report = campaign_record(session_path, values, status)
    except ProcessBOError as err:
        _fail(err)
    click.echo(f"Recorded {report['recorded']} experiment(s)")
    if report["incumbent"] is not None:
        click.echo(f"Incumbent cost {report['incumbent']['best_feasible_cost']:.6g}")
    click.echo("Stopping is recommended" if report["terminate"] else "Continue optimizing")


@campaign.command()
@click.pass_obj
def abandon(session_path):
    """Discard the pending batch"""
    try:
        campaign_abandon(session_path)
    except ProcessBOError as err:
        _fail(err)
    click.echo("Pending batch abandoned")


@campaign.command()
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def status(session_path, as_json):
    """Summarize the campaign without changing it"""
    try:
        summary = campaign_status(session_path)
    except ProcessBOError as err:
        _fail(err)
    click.echo(json.dumps(summary, indent=2) if as_json else format_summary(summary))


@campaign.command()
@click.argument("name", type=click.Choice(sorted(STUDIES)))
@click.option("--seed", type=int, default=None)
@click.option("--max-batches", type=int, default=None)
@click.option("--keep-session", is_flag=True, help="Persist the simulated campaign to the session file")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the report as JSON")
@click.pass_obj
def study(session_path, name, seed, max_batches, keep_session, out):
    """Simulate a campaign on a synthetic process"""
    try:
        report = STUDIES[name](
            seed=seed, session_path=session_path if keep_session else None, max_batches=max_batches
        )
    except ProcessBOError as err:
        _fail(err)
    document = report.to_dict()
    if out is not None:
        with open(out, "w", encoding="utf-8") as f:
            json.dump(document, f, indent=2)
    click.echo(format_summary(status_summary(report.state)))
    click.echo(f"Batches: {report.batches} ({'terminated' if report.terminated else 'batch cap reached'})")
    for phase, mean in document["mean_fp"].items():
        if mean is not None:
            click.echo(f"Mean FP of the suggestions ({phase}): {mean:.3f}")
