"""Writers for benchmark results. Figures are regenerated from these files outside the package."""

from __future__ import annotations

import json
import os
from collections import defaultdict
from typing import Mapping, Optional

import pandas as pd

from .harness import AggregateMetrics


def write_metrics(path: str, results: Mapping[str, AggregateMetrics], extra: Optional[dict] = None) -> None:
    document = {"results": {label: metrics.to_dict() for label, metrics in results.items()}}
    if extra:
        document.update(extra)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2)


def write_table(path: str, results: Mapping[str, AggregateMetrics]) -> None:
    """Comparison table: one row per metric, one column per result label"""
    table = pd.DataFrame(
        {
            label: {
                "required_iterations": metrics.mean_required_iterations,
                "feasible_fraction": metrics.feasible_fraction,
                "feasible_fraction_with_init": metrics.feasible_fraction_with_init,
            }
            for label, metrics in results.items()
        },
        index=["required_iterations", "feasible_fraction", "feasible_fraction_with_init"],
    )
    table.to_csv(path, index_label="metric")


def write_traces(directory: str, results: Mapping[str, AggregateMetrics]) -> list[str]:
    """One JSON-lines file per repetition, holding the records of every result in that repetition

    Returns:
        list[str]: the files written
    """
    os.makedirs(directory, exist_ok=True)
    by_repetition = defaultdict(list)
    for label, metrics in results.items():
        for trace in metrics.traces:
            by_repetition[trace.repetition].extend(
                {"label": label, **record} for record in trace.to_records()
            )
    paths = []
    for repetition in sorted(by_repetition):
        path = os.path.join(directory, f"rep_{repetition:04d}.jsonl")
        with open(path, "w", encoding="utf-8") as f:
            for record in by_repetition[repetition]:
                f.write(json.dumps(record) + "\n")
        paths.append(path)
    return paths


def carry_forward(series: list[Optional[float]], length: int) -> list[Optional[float]]:
    """Pad a convergence series to `length` entries by repeating its last value"""
    if not series:
        return [None] * length
    return list(series) + [series[-1]] * (length - len(series))


def write_convergence(path: str, results: Mapping[str, AggregateMetrics]) -> None:
    """Long-format convergence series: per-repetition rows plus a `mean` row per iteration.

    A missing value means no feasible sample had been found yet; the mean at an iteration is taken over the
    repetitions that have one.
    """
    frames = []
    for label, metrics in results.items():
        length = max((len(s) for s in metrics.series), default=0)
        series = pd.DataFrame(
            [carry_forward(s, length) for s in metrics.series],
            index=[trace.repetition for trace in metrics.traces],
            columns=range(length),
            dtype=float,
        )
        series.loc["mean"] = series.mean(axis=0, skipna=True)
        long = series.rename_axis(index="repetition").reset_index().melt(
            id_vars="repetition", var_name="iteration", value_name="best_feasible_cost"
        )
        frames.append(long.assign(label=label))
    columns = ["label", "repetition", "iteration", "best_feasible_cost"]
    table = pd.concat(frames, ignore_index=True)[columns] if frames else pd.DataFrame(columns=columns)
    table.to_csv(path, index=False)


def write_results(directory: str, results: Mapping[str, AggregateMetrics], extra: Optional[dict] = None) -> None:
    os.makedirs(directory, exist_ok=True)
    write_metrics(os.path.join(directory, "metrics.json"), results, extra)
    write_table(os.path.join(directory, "table.csv"), results)
    write_traces(os.path.join(directory, "traces"), results)
    write_convergence(os.path.join(directory, "convergence.csv"), results)
