"""Human-in-the-loop campaigns: a persistent session suggests batches of experiments and records their measurements.

The synthetic processes in `oracle` stand in for the physical experiments in studies and tests.
"""

from .objectives import OBJECTIVES, build_objective
from .oracle import PRESETS, SyntheticProcessOracle, aps_like, fdm_like, preset_config
from .session import (
    CampaignConfig,
    InputSpec,
    SessionState,
    abandon,
    calibrate,
    campaign_abandon,
    campaign_calibrate,
    campaign_init,
    campaign_record,
    campaign_status,
    campaign_suggest,
    format_summary,
    load_session,
    new_session,
    record,
    replay_dataset,
    save_session,
    status_summary,
    suggest,
)
from .studies import STUDIES, StudyReport, aps_study, fdm_study

__all__ = [
    "OBJECTIVES",
    "build_objective",
    "PRESETS",
    "SyntheticProcessOracle",
    "aps_like",
    "fdm_like",
    "preset_config",
    "CampaignConfig",
    "InputSpec",
    "SessionState",
    "abandon",
    "calibrate",
    "campaign_abandon",
    "campaign_calibrate",
    "campaign_init",
    "campaign_record",
    "campaign_status",
    "campaign_suggest",
    "format_summary",
    "load_session",
    "new_session",
    "record",
    "replay_dataset",
    "save_session",
    "status_summary",
    "suggest",
    "STUDIES",
    "StudyReport",
    "aps_study",
    "fdm_study",
]
