"""Frozen evaluation scenario sets.

A test set is a plain text file with one scenario record per line. Lines
starting with # are comments.
"""

import logging
from pathlib import Path
from typing import List, Union

import numpy as np

from shadowrl.env import sample_scenario
from shadowrl.models.scenario import Scenario, ScenarioFormatError

logger = logging.getLogger(__name__)


def build_test_set(seed: int, n: int, obstacle_probability: float = 0.95) -> List[Scenario]:
    """Sample `n` scenarios from a generator dedicated to the test set."""
    if n < 1:
        raise ValueError(f"Test set size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    scenarios = [sample_scenario(rng, obstacle_probability) for _ in range(n)]
    blocked = sum(s.has_obstacle for s in scenarios)
    logger.info(f"Built test set: seed={seed}, n={n}, with obstacle={blocked}")
    return scenarios


def save_test_set(path: Union[str, Path], scenarios: List[Scenario]) -> Path:
    """Write scenarios one record per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        for scenario in scenarios:
            f.write(scenario.to_record() + '\n')
    return path


def load_test_set(path: Union[str, Path]) -> List[Scenario]:
    """Read a test set written by `save_test_set`.

    Raises:
        ScenarioFormatError: On a malformed record or an empty file.
    """
    path = Path(path)
    scenarios = []
    with open(path, 'r') as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            try:
                scenarios.append(Scenario.from_record(line))
            except ScenarioFormatError as e:
                raise ScenarioFormatError(f"{path}:{lineno}: {e}") from e
    if not scenarios:
        raise ScenarioFormatError(f"{path} contains no scenarios")
    return scenarios
