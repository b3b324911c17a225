"""Scripted baseline controller.

Moves straight at the goal with the largest useful step per coordinate. It
is optimal whenever the obstacle does not block the straight path, and gets
stuck behind the obstacle otherwise.
"""

from dataclasses import dataclass

import numpy as np

from shadowrl.env import OBS_DIM, ReachAvoidEnv
from shadowrl.models.scenario import Scenario


def baseline_action(obs: np.ndarray) -> np.ndarray:
    """Componentwise clamp of (goal - agent) into [-1, 1].

    Deltas smaller than one are returned exactly, so the agent lands on the
    goal coordinate instead of overshooting.
    """
    obs = np.asarray(obs, dtype=np.float64)
    delta = obs[..., 2:4] - obs[..., 0:2]
    return np.clip(delta, -1.0, 1.0)


class BaselinePolicy:
    """Stateless, deterministic baseline policy."""

    obs_dim = OBS_DIM

    def __call__(self, obs: np.ndarray) -> np.ndarray:
        return baseline_action(obs)


@dataclass(frozen=True)
class BaselineRollout:
    """Outcome of running the baseline alone on a scenario."""
    episode_return: float
    length: int
    reached: bool


def run_baseline_episode(env: ReachAvoidEnv, scenario: Scenario) -> BaselineRollout:
    """Roll the baseline out on `scenario` until termination or truncation."""
    obs = env.reset_to(scenario)
    total = 0.0
    while True:
        result = env.step(baseline_action(obs))
        total += result.reward
        obs = result.observation
        if result.terminated or result.truncated:
            return BaselineRollout(total, env.t, result.terminated)
