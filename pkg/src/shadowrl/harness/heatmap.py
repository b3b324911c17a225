"""Decision-criterion maps of a q_compare critic.

For every cell of a regular grid over the arena the agent is placed at the
cell center, and the ratio Q(s, a_agent) / Q(s, a_baseline) is recorded.
The baseline acts wherever the ratio is at most 1.
"""

import logging
import math
from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np

from shadowrl.agent.ddpg import DdpgAgent
from shadowrl.baseline import baseline_action
from shadowrl.env import make_observation
from shadowrl.errors import ShadowRLError
from shadowrl.geometry import Point2, Segment2, segments_intersect
from shadowrl.models.config import ModeKind
from shadowrl.models.scenario import ARENA_HI, ARENA_LO, Scenario

logger = logging.getLogger(__name__)

# Denominators below this magnitude yield a NaN cell.
MIN_DENOMINATOR = 1e-9


class HeatmapError(ShadowRLError):
    """Raised when a heatmap is requested for an unsuitable checkpoint or scenario."""
    pass


def cell_centers(resolution: int) -> np.ndarray:
    """Centers of `resolution` equal cells spanning the arena along one axis."""
    if resolution < 1:
        raise HeatmapError(f"resolution must be >= 1, got {resolution}")
    width = (ARENA_HI - ARENA_LO) / resolution
    return ARENA_LO + (np.arange(resolution) + 0.5) * width


def heatmap(
    agent: DdpgAgent,
    scenario: Scenario,
    resolution: int,
    mode: Union[ModeKind, str] = ModeKind.Q_COMPARE,
) -> np.ndarray:
    """Ratio grid of shape (resolution, resolution); row i is the i-th y cell.

    Raises:
        HeatmapError: If the checkpoint was not trained in q_compare mode.
    """
    if ModeKind(mode) != ModeKind.Q_COMPARE or agent.action_dim != 2:
        raise HeatmapError(
            f"Heatmaps need a q_compare checkpoint, got mode={ModeKind(mode).value} "
            f"with action width {agent.action_dim}"
        )

    centers = cell_centers(resolution)
    obs = np.array([
        make_observation(Point2(float(x), float(y)), scenario.goal, scenario.obstacle)
        for y in centers
        for x in centers
    ])
    q_agent = agent.q_value(obs, agent.select_action(obs))
    q_base = agent.q_value(obs, baseline_action(obs))

    ratio = np.full(len(obs), np.nan)
    valid = np.abs(q_base) >= MIN_DENOMINATOR
    ratio[valid] = q_agent[valid] / q_base[valid]
    flagged = int(np.count_nonzero(~valid))
    if flagged:
        logger.warning(f"{flagged} of {len(obs)} heatmap cells have a near-zero denominator")
    return ratio.reshape(resolution, resolution)


def find_blocking_scenario(test_set: Sequence[Scenario]) -> Tuple[int, Scenario]:
    """First scenario whose obstacle crosses the straight start-goal path."""
    for i, scenario in enumerate(test_set):
        if scenario.obstacle is None:
            continue
        if segments_intersect(Segment2(scenario.start, scenario.goal), scenario.obstacle):
            return i, scenario
    raise HeatmapError("No scenario in the test set has an obstacle blocking the straight path")


def format_heatmap(grid: np.ndarray, scenario: Scenario) -> str:
    """Header `resolution scenario_record`, then one line of ratios per row."""
    resolution = grid.shape[0]
    lines = [f"{resolution} {scenario.to_record()}"]
    for row in grid:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_heatmap(path: Union[str, Path], grid: np.ndarray, scenario: Scenario) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        f.write(format_heatmap(grid, scenario))
    return path


def write_pgm(path: Union[str, Path], grid: np.ndarray) -> Path:
    """Binary graymap; NaN cells are black, the rest scaled to 1..255.

    The image top row is the highest y cell.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    finite = np.isfinite(grid)
    pixels = np.zeros(grid.shape, dtype=np.uint8)
    if finite.any():
        lo, hi = float(grid[finite].min()), float(grid[finite].max())
        span = hi - lo
        scaled = np.full(grid.shape, 255.0)
        if span > 0 and not math.isinf(span):
            scaled = 1.0 + 254.0 * (grid - lo) / span
        pixels[finite] = np.rint(scaled[finite]).astype(np.uint8)

    height, width = grid.shape
    with open(path, 'wb') as f:
        f.write(f"P5\n{width} {height}\n255\n".encode('ascii'))
        f.write(pixels[::-1].tobytes())
    return path
