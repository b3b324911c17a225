"""CSV and text output for training and evaluation runs."""

import csv
import logging
from pathlib import Path
from typing import List, Sequence, Union

from shadowrl.models.reports import EpisodeRow, EvalReport, MetricRow

logger = logging.getLogger(__name__)

METRIC_COLUMNS = [
    'env_steps',
    'seed',
    'mean_return',
    'success_rate',
    'agent_action_fraction',
    'mean_episode_length',
]

EPISODE_COLUMNS = [
    'episode',
    'env_steps',
    't_train',
    'return',
    'baseline_return',
    'agent_action_fraction',
]

AGGREGATE_COLUMNS = [
    'env_steps',
    'n_seeds',
    'mean_return_mean',
    'mean_return_std',
    'success_rate_mean',
    'agent_action_fraction_mean',
    'mean_episode_length_mean',
]

EVAL_COLUMNS = [
    'env_steps',
    'mean_return',
    'return_std_across_seeds',
    'success_rate',
    'agent_action_fraction',
    'mean_episode_length',
    'switch_back_fraction',
]


def _write_rows(path: Union[str, Path], header: List[str], rows: List[list]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
    logger.debug(f"Wrote {len(rows)} rows to {path}")
    return path


def write_metrics_csv(path: Union[str, Path], rows: Sequence[MetricRow]) -> Path:
    return _write_rows(
        path,
        METRIC_COLUMNS,
        [[getattr(row, column) for column in METRIC_COLUMNS] for row in rows],
    )


def write_episodes_csv(path: Union[str, Path], rows: Sequence[EpisodeRow]) -> Path:
    return _write_rows(
        path,
        EPISODE_COLUMNS,
        [
            [r.episode, r.env_steps, r.t_train, r.episode_return, r.baseline_return, r.agent_action_fraction]
            for r in rows
        ],
    )


def write_aggregate_csv(path: Union[str, Path], reports: Sequence[EvalReport], n_seeds: int) -> Path:
    """One row per evaluation point; std is taken over per-seed mean returns."""
    return _write_rows(
        path,
        AGGREGATE_COLUMNS,
        [
            [
                r.env_steps,
                n_seeds,
                r.mean_return,
                r.return_std_across_seeds,
                r.success_rate,
                r.agent_action_fraction,
                r.mean_episode_length,
            ]
            for r in reports
        ],
    )


def write_eval_csv(path: Union[str, Path], report: EvalReport) -> Path:
    return _write_rows(path, EVAL_COLUMNS, [[getattr(report, column) for column in EVAL_COLUMNS]])


def build_summary(title: str, report: EvalReport, cumulative_regret: float = None) -> str:
    """Plain text summary block for a final evaluation."""
    width = 60
    lines = [
        "=" * width,
        title.upper().center(width),
        "=" * width,
        "",
        f"  Env steps:      {report.env_steps}",
        f"  Mean return:    {report.mean_return:.2f} (std across seeds {report.return_std_across_seeds:.2f})",
        f"  Success rate:   {report.success_rate:.3f}",
        f"  Agent actions:  {report.agent_action_fraction:.3f}",
        f"  Episode length: {report.mean_episode_length:.1f}",
        f"  Switch-backs:   {report.switch_back_fraction:.3f}",
    ]
    if cumulative_regret is not None:
        lines.append(f"  Training regret vs baseline: {cumulative_regret:.1f}")
    return "\n".join(lines)
