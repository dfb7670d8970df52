"""Constrained batch Bayesian optimization for processes whose cost is known and whose quality constraints are not.

The package is laid out as follows:
    - `gp`, exact Gaussian process models of the constraints
    - `acquisition`, improvement, feasibility probability and the FIP/HFI switching rule
    - `batch`, fantasy-based batch proposals and the termination rule
    - `calibration`, candidates contextualized by a drifting status measurement
    - `problems` and `bench`, the benchmark problems and the Monte Carlo harness
    - `campaign`, persistent human-in-the-loop optimization sessions
"""

import logging
from typing import Optional

from .config import Config

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: Optional[str] = None) -> None:
    """Send the package's log records to stderr. Calling it again only changes the level."""
    logger = logging.getLogger(__name__)
    logger.setLevel((level or Config.LOG_LEVEL).upper())
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)


__all__ = ["Config", "configure_logging"]
