"""Experiment harness: test sets, training, evaluation and heatmaps."""

from shadowrl.harness.evaluator import aggregate_reports, compare, evaluate, rollout
from shadowrl.harness.heatmap import HeatmapError, find_blocking_scenario, heatmap
from shadowrl.harness.testset import build_test_set, load_test_set, save_test_set
from shadowrl.harness.trainer import TrainResult, aggregate_results, train_all, train_one

__all__ = [
    'aggregate_reports',
    'compare',
    'evaluate',
    'rollout',
    'HeatmapError',
    'find_blocking_scenario',
    'heatmap',
    'build_test_set',
    'load_test_set',
    'save_test_set',
    'TrainResult',
    'aggregate_results',
    'train_all',
    'train_one',
]
