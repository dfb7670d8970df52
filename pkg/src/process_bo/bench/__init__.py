"""Monte Carlo benchmark harness: repeated runs, aggregated metrics, pi sweeps and timing"""

from .harness import (
    AggregateMetrics,
    IterationRecord,
    RunConfig,
    RunTrace,
    StopReason,
    aggregate,
    compare,
    pi_sweep,
    run_monte_carlo,
    run_single,
    timing_probe,
)

__all__ = [
    "AggregateMetrics",
    "IterationRecord",
    "RunConfig",
    "RunTrace",
    "StopReason",
    "aggregate",
    "compare",
    "pi_sweep",
    "run_monte_carlo",
    "run_single",
    "timing_probe",
]
