"""The reach-avoid environment.

An agent moves in a 10 x 10 arena towards a goal on the right half, possibly
blocked by a single obstacle segment. A move whose swept path touches the
obstacle is rejected and the agent keeps its position. Episodes end when the
agent is within epsilon of the goal (terminated) or at the horizon
(truncated).

Usage:
    from shadowrl.env import ReachAvoidEnv, sample_scenario

    env = ReachAvoidEnv(EnvConfig(epsilon=0.5))
    obs = env.reset_to(sample_scenario(rng))
    result = env.step(np.array([1.0, 0.0]))
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, NamedTuple, Optional

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from shadowrl.errors import ShadowRLError
from shadowrl.geometry import (
    Point2,
    Segment2,
    clamp_to_arena,
    distance,
    point_segment_distance,
    segments_intersect,
)
from shadowrl.models.config import EnvConfig, RewardMode
from shadowrl.models.scenario import (
    ARENA_HI,
    ARENA_LO,
    ARENA_MID,
    NO_OBSTACLE_SENTINEL,
    Scenario,
)

logger = logging.getLogger(__name__)

OBS_DIM = 8
ACTION_DIM = 2

# Obstacle sampler. These ranges are a benchmark definition chosen so the
# obstacle often blocks the straight start-goal path.
OBSTACLE_CENTER_X = (3.0, 7.0)
OBSTACLE_CENTER_Y = (1.0, 9.0)
OBSTACLE_LENGTH = (2.0, 5.0)

START_CLEARANCE = 1e-6


class EnvError(ShadowRLError):
    """Raised for contract violations when driving the environment."""
    pass


class EpisodeFinishedError(EnvError):
    """Raised when stepping an episode that already terminated or truncated."""
    pass


@dataclass(frozen=True)
class Observation:
    """Structured view of the flat 8-component observation.

    Order: agent, goal, obstacle endpoint p, obstacle endpoint q. Missing
    obstacles use the (-1, -1) sentinel for both endpoints.
    """
    agent: Point2
    goal: Point2
    obs_p: Point2
    obs_q: Point2

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.agent.x, self.agent.y, self.goal.x, self.goal.y,
             self.obs_p.x, self.obs_p.y, self.obs_q.x, self.obs_q.y],
            dtype=np.float64,
        )


def make_observation(agent: Point2, goal: Point2, obstacle: Optional[Segment2]) -> np.ndarray:
    """Flatten agent, goal and obstacle into the 8-vector fed to policies."""
    if obstacle is None:
        sentinel = Point2(NO_OBSTACLE_SENTINEL, NO_OBSTACLE_SENTINEL)
        return Observation(agent, goal, sentinel, sentinel).as_array()
    return Observation(agent, goal, obstacle.p, obstacle.q).as_array()


def sample_scenario(rng: np.random.Generator, obstacle_probability: float = 0.95) -> Scenario:
    """Draw a random scenario; deterministic given the generator state.

    The goal is uniform on the right half, the obstacle (present with
    `obstacle_probability`) has a uniform center, orientation and length with
    endpoints clamped to the arena, and the start is uniform on the left half
    away from the obstacle.
    """
    goal = Point2(ARENA_HI - rng.uniform(0.0, ARENA_MID), rng.uniform(ARENA_LO, ARENA_HI))

    obstacle = None
    if rng.random() < obstacle_probability:
        cx = rng.uniform(*OBSTACLE_CENTER_X)
        cy = rng.uniform(*OBSTACLE_CENTER_Y)
        angle = rng.uniform(0.0, math.pi)
        half = 0.5 * rng.uniform(*OBSTACLE_LENGTH)
        dx, dy = half * math.cos(angle), half * math.sin(angle)
        obstacle = Segment2(
            clamp_to_arena(Point2(cx - dx, cy - dy), ARENA_LO, ARENA_HI),
            clamp_to_arena(Point2(cx + dx, cy + dy), ARENA_LO, ARENA_HI),
        )

    while True:
        start = Point2(rng.uniform(ARENA_LO, ARENA_MID), rng.uniform(ARENA_LO, ARENA_HI))
        if obstacle is None or point_segment_distance(start, obstacle) >= START_CLEARANCE:
            break

    return Scenario(start=start, goal=goal, obstacle=obstacle)


def reward_sparse(reached: bool, config: Optional[EnvConfig] = None) -> float:
    """Goal bonus on the reaching step, step penalty otherwise."""
    config = config or EnvConfig()
    return config.goal_bonus if reached else -config.step_penalty


def reward_dense(
    reached: bool,
    collided: bool,
    dist_prev: float,
    dist_now: float,
    config: Optional[EnvConfig] = None,
) -> float:
    """Goal bonus plus distance progress, collision and step penalties."""
    config = config or EnvConfig()
    reward = config.distance_coeff * (dist_prev - dist_now) - config.step_penalty
    if reached:
        reward += config.goal_bonus
    if collided:
        reward -= config.collision_penalty
    return reward


class StepResult(NamedTuple):
    """Outcome of one environment step.

    Unpacks like a gymnasium step tuple; `collided` is also in `info`.
    """
    observation: np.ndarray
    reward: float
    terminated: bool
    truncated: bool
    info: Dict[str, Any]

    @property
    def collided(self) -> bool:
        return bool(self.info["collided"])


class ReachAvoidEnv(gym.Env):
    """Continuous 2D reach-avoid task with an optional segment obstacle.

    Args:
        config: Environment parameters. Defaults to `EnvConfig()`.

    Attributes:
        scenario: The active scenario, None before the first reset.
        position: Current agent position.
        t: Steps taken in the current episode.
    """

    metadata = {"render_modes": []}

    def __init__(self, config: Optional[EnvConfig] = None):
        self.config = config or EnvConfig()
        self.action_space = spaces.Box(low=-1.0, high=1.0, shape=(ACTION_DIM,), dtype=np.float64)
        self.observation_space = spaces.Box(
            low=NO_OBSTACLE_SENTINEL, high=ARENA_HI, shape=(OBS_DIM,), dtype=np.float64
        )
        self.scenario: Optional[Scenario] = None
        self.position: Optional[Point2] = None
        self.t = 0
        self._done = False

    def reset(self, *, seed: Optional[int] = None, options: Optional[Dict[str, Any]] = None):
        """Start an episode, gymnasium style.

        Uses `options["scenario"]` when given, otherwise samples one from the
        environment's own generator.
        """
        super().reset(seed=seed)
        scenario = (options or {}).get("scenario")
        if scenario is None:
            scenario = sample_scenario(self.np_random, self.config.obstacle_probability)
        obs = self.reset_to(scenario)
        return obs, {"scenario": scenario, "distance": distance(scenario.start, scenario.goal)}

    def reset_to(self, scenario: Scenario) -> np.ndarray:
        """Start an episode on a given scenario and return the initial observation."""
        self.scenario = scenario
        self.position = scenario.start
        self.t = 0
        self._done = False
        return self._observe()

    def _observe(self) -> np.ndarray:
        return make_observation(self.position, self.scenario.goal, self.scenario.obstacle)

    def step(self, action) -> StepResult:
        """Apply a bounded displacement.

        Raises:
            EnvError: If called before reset or with a malformed action.
            EpisodeFinishedError: If the episode already ended.
        """
        if self.scenario is None:
            raise EnvError("reset() must be called before step()")
        if self._done:
            raise EpisodeFinishedError(
                f"Episode already finished at t={self.t}; call reset() first"
            )

        a = np.asarray(action, dtype=np.float64)
        if a.shape != (ACTION_DIM,):
            raise EnvError(f"Action must have shape ({ACTION_DIM},), got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise EnvError(f"Action must be finite, got {a}")
        a = np.clip(a, -1.0, 1.0)

        current = self.position
        goal = self.scenario.goal
        obstacle = self.scenario.obstacle
        candidate = clamp_to_arena(
            Point2(current.x + float(a[0]), current.y + float(a[1])), ARENA_LO, ARENA_HI
        )

        collided = False
        if obstacle is not None and candidate != current:
            if segments_intersect(Segment2(current, candidate), obstacle):
                collided = True
                candidate = current

        dist_prev = distance(current, goal)
        dist_now = distance(candidate, goal)
        terminated = dist_now <= self.config.epsilon

        if self.config.reward_mode == RewardMode.DENSE:
            reward = reward_dense(terminated, collided, dist_prev, dist_now, self.config)
        else:
            reward = reward_sparse(terminated, self.config)

        self.position = candidate
        self.t += 1
        truncated = self.t >= self.config.horizon and not terminated
        self._done = terminated or truncated

        if collided:
            logger.debug(f"Collision at t={self.t}, position held at ({current.x:.3f}, {current.y:.3f})")

        info = {"collided": collided, "distance": dist_now, "t": self.t}
        return StepResult(self._observe(), float(reward), terminated, truncated, info)
