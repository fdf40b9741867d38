"""Evaluation harness: policies, episode runner, metrics, file formats, plots."""

from .episodes import EpisodeLog, StepRecord, run_episode
from .metrics import Metrics, Report, ReportCell, aggregate, compare, success, trajectory_length
from .policies import (
    AgentPolicy,
    DwaPolicy,
    RandomPolicy,
    StandStillPolicy,
    StraightToGoalPolicy,
)

__all__ = [
    "AgentPolicy",
    "DwaPolicy",
    "EpisodeLog",
    "Metrics",
    "RandomPolicy",
    "Report",
    "ReportCell",
    "StandStillPolicy",
    "StepRecord",
    "StraightToGoalPolicy",
    "aggregate",
    "compare",
    "run_episode",
    "success",
    "trajectory_length",
]
