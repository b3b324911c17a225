"""Tests for Q-ratio heatmaps."""

import logging
import math

import numpy as np
import pytest

from shadowrl.agent.ddpg import DdpgAgent
from shadowrl.geometry import Point2, Segment2
from shadowrl.harness.heatmap import (
    HeatmapError,
    cell_centers,
    find_blocking_scenario,
    format_heatmap,
    heatmap,
    write_heatmap,
    write_pgm,
)
from shadowrl.models.config import AgentConfig, ModeKind
from shadowrl.models.scenario import Scenario

FREE = Scenario(start=Point2(1.0, 1.0), goal=Point2(9.9, 5.0))
BLOCKED = Scenario(
    start=Point2(1.0, 5.0),
    goal=Point2(9.0, 5.0),
    obstacle=Segment2(Point2(5.0, 2.0), Point2(5.0, 8.0)),
)


def zeroed_agent(action_dim: int = 2) -> DdpgAgent:
    agent = DdpgAgent(8, action_dim, AgentConfig(hidden_sizes=(4,)), np.random.default_rng(0))
    for p in agent.actor.parameters() + agent.critic.parameters():
        p[...] = 0.0
    return agent


class TestCellCenters:
    """Test cases for cell_centers."""

    def test_centers(self):
        """Centers sit in the middle of equal cells."""
        np.testing.assert_allclose(cell_centers(2), [2.5, 7.5])
        np.testing.assert_allclose(cell_centers(4), [1.25, 3.75, 6.25, 8.75])

    def test_invalid(self):
        """Resolution must be positive."""
        with pytest.raises(HeatmapError):
            cell_centers(0)


class TestHeatmap:
    """Test cases for heatmap."""

    def test_shape(self):
        """Resolution 2 gives four cells."""
        agent = zeroed_agent()
        agent.critic.biases[-1][:] = 2.0
        grid = heatmap(agent, FREE, 2)
        assert grid.shape == (2, 2)
        np.testing.assert_array_equal(grid, np.ones((2, 2)))

    def test_rows_follow_y(self):
        """Row i holds the i-th y cell."""
        agent = zeroed_agent()
        # Q = agent_y + a0; the actor proposes (0, 0), the baseline moves +x.
        agent.critic.weights[0][1, 0] = 1.0
        agent.critic.biases[0][0] = 10.0
        agent.critic.weights[0][8, 1] = 1.0
        agent.critic.biases[0][1] = 10.0
        agent.critic.weights[1][0, 0] = 1.0
        agent.critic.weights[1][1, 0] = 1.0
        agent.critic.biases[1][0] = -20.0
        grid = heatmap(agent, FREE, 2)
        np.testing.assert_allclose(grid[0], [2.5 / 3.5] * 2)
        np.testing.assert_allclose(grid[1], [7.5 / 8.5] * 2)

    def test_zero_denominator(self, caplog):
        """Near-zero baseline values give NaN cells and a warning."""
        with caplog.at_level(logging.WARNING, logger="shadowrl.harness.heatmap"):
            grid = heatmap(zeroed_agent(), FREE, 3)
        assert np.all(np.isnan(grid))
        assert "near-zero denominator" in caplog.text

    def test_requires_q_compare(self):
        """Other modes and decision-width actors are rejected."""
        with pytest.raises(HeatmapError):
            heatmap(zeroed_agent(), FREE, 2, mode=ModeKind.AGENT_ONLY)
        with pytest.raises(HeatmapError):
            heatmap(zeroed_agent(3), FREE, 2, mode="q_compare")


class TestBlockingScenario:
    """Test cases for find_blocking_scenario."""

    def test_first_blocked(self):
        """The first scenario whose obstacle crosses the straight path is returned."""
        index, scenario = find_blocking_scenario([FREE, BLOCKED, BLOCKED])
        assert index == 1
        assert scenario == BLOCKED

    def test_none_blocked(self):
        """A set without blocking obstacles is an error."""
        with pytest.raises(HeatmapError):
            find_blocking_scenario([FREE])


class TestHeatmapFiles:
    """Test cases for the heatmap text and image writers."""

    def test_text_format(self, tmp_path):
        """Header with resolution and scenario record, then one row per line."""
        grid = np.array([[0.5, float("nan")], [1.0, 2.0]])
        path = write_heatmap(tmp_path / "map.txt", grid, BLOCKED)
        lines = path.read_text().splitlines()
        assert lines[0] == f"2 {BLOCKED.to_record()}"
        assert lines[1] == "0.5 nan"
        assert [float(v) for v in lines[2].split()] == [1.0, 2.0]
        assert format_heatmap(grid, BLOCKED) == path.read_text()

    def test_pgm(self, tmp_path):
        """NaN is black, values scale to 1..255 and the top row is the highest y."""
        grid = np.array([[1.0, 2.0], [math.nan, 3.0]])
        data = write_pgm(tmp_path / "map.pgm", grid).read_bytes()
        header = b"P5\n2 2\n255\n"
        assert data.startswith(header)
        assert data[len(header):] == bytes([0, 255, 1, 128])

    def test_pgm_constant_grid(self, tmp_path):
        """A constant grid is drawn white."""
        data = write_pgm(tmp_path / "map.pgm", np.full((1, 3), 0.7)).read_bytes()
        assert data.endswith(bytes([255, 255, 255]))
