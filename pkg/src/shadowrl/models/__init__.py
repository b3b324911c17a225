"""Data models for configuration, scenarios and reports."""

from shadowrl.models.config import (
    AgentConfig,
    DecisionMode,
    EnvConfig,
    ExperimentConfig,
    HarnessConfig,
    ModeKind,
    RewardMode,
)
from shadowrl.models.reports import ComparisonRow, EpisodeRow, EvalReport, MetricRow
from shadowrl.models.scenario import Scenario, ScenarioFormatError

__all__ = [
    'AgentConfig',
    'DecisionMode',
    'EnvConfig',
    'ExperimentConfig',
    'HarnessConfig',
    'ModeKind',
    'RewardMode',
    'ComparisonRow',
    'EpisodeRow',
    'EvalReport',
    'MetricRow',
    'Scenario',
    'ScenarioFormatError',
]
