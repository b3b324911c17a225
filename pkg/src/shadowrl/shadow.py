"""Combined policy: per-step control authority between agent and baseline.

At every step both the agent and the baseline propose an action and exactly
one of them is executed. Which one depends on the decision mode:

- agent_decision: the actor emits a third decision component d; the agent
  acts when (d + 1) / 2 > eta.
- q_compare: the agent acts when the critic rates its action strictly higher
  than the baseline's.
- agent_only / baseline_only: fixed chooser.

During training each episode starts with a randomized baseline-only prefix
of t_train steps in which nothing is recorded. The replay buffer always
receives the action that was actually executed.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from shadowrl.agent.ddpg import DdpgAgent
from shadowrl.agent.replay_buffer import ReplayBuffer, Transition
from shadowrl.baseline import BaselinePolicy
from shadowrl.errors import ShadowRLError
from shadowrl.models.config import DecisionMode, ModeKind

logger = logging.getLogger(__name__)

BaselineFn = Callable[[np.ndarray], np.ndarray]

# Raw decision component stored for prefix steps; maps to 0.
PREFIX_DECISION = -1.0


class ModeMismatchError(ShadowRLError):
    """Raised when the agent's action width does not fit the decision mode."""
    pass


@dataclass(frozen=True)
class StepDecision:
    """Outcome of one control-authority decision.

    Attributes:
        executed_action: 2-vector sent to the environment.
        stored_action: Action written to the replay buffer; its first two
            components equal executed_action.
        chose_agent: Whether the agent's proposal was executed.
        agent_proposal: Agent output (2 or 3 components), None when the agent
            was not queried.
        baseline_proposal: Baseline output.
        in_prefix: Step belongs to the baseline-only training prefix.
        q_agent: Critic value of the agent proposal (q_compare only).
        q_baseline: Critic value of the baseline proposal (q_compare only).
    """
    executed_action: np.ndarray
    stored_action: np.ndarray
    chose_agent: bool
    agent_proposal: Optional[np.ndarray]
    baseline_proposal: np.ndarray
    in_prefix: bool = False
    q_agent: Optional[float] = None
    q_baseline: Optional[float] = None


@dataclass(frozen=True)
class EpisodeSchedule:
    """Baseline-only prefix length of one episode."""
    t_train: int = 0

    def __post_init__(self):
        if self.t_train < 0:
            raise ValueError(f"t_train must be non-negative, got {self.t_train}")

    def in_prefix(self, t: int) -> bool:
        return t < self.t_train


def sample_t_train(rng: np.random.Generator, horizon: int) -> int:
    """Uniform integer in {0, ..., horizon - 1}."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    return int(rng.integers(0, horizon))


def schedule_for(mode: DecisionMode, rng: np.random.Generator, horizon: int) -> EpisodeSchedule:
    """Training schedule for a mode; modes without baseline guidance start at 0."""
    if not mode.uses_schedule:
        return EpisodeSchedule(0)
    return EpisodeSchedule(sample_t_train(rng, horizon))


def map_decision(d: float) -> float:
    """Map a tanh-range decision component onto [0, 1]."""
    return (d + 1.0) / 2.0


def check_agent(mode: DecisionMode, agent: Optional[DdpgAgent]) -> None:
    """Raise ModeMismatchError if `agent` cannot serve `mode`."""
    if not mode.uses_agent:
        return
    if agent is None:
        raise ModeMismatchError(f"Mode {mode.kind.value} requires an agent")
    if agent.action_dim != mode.agent_action_dim:
        raise ModeMismatchError(
            f"Mode {mode.kind.value} needs actor output width {mode.agent_action_dim}, "
            f"agent has {agent.action_dim}"
        )


def decide(
    mode: DecisionMode,
    obs: np.ndarray,
    agent: Optional[DdpgAgent],
    baseline: BaselineFn,
    t: int,
    schedule: Optional[EpisodeSchedule] = None,
    explore: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> StepDecision:
    """Choose which proposal to execute at step `t`.

    Raises:
        ModeMismatchError: If the agent's action width does not match the mode.
    """
    check_agent(mode, agent)
    schedule = schedule or EpisodeSchedule(0)
    base = np.asarray(baseline(obs), dtype=np.float64)

    if schedule.in_prefix(t) or mode.kind == ModeKind.BASELINE_ONLY:
        stored = base
        if mode.kind == ModeKind.AGENT_DECISION:
            stored = np.append(base, PREFIX_DECISION)
        return StepDecision(
            executed_action=base,
            stored_action=stored,
            chose_agent=False,
            agent_proposal=None,
            baseline_proposal=base,
            in_prefix=schedule.in_prefix(t),
        )

    proposal = agent.select_action(obs, explore=explore, rng=rng)

    if mode.kind == ModeKind.AGENT_ONLY:
        return StepDecision(proposal, proposal, True, proposal, base)

    if mode.kind == ModeKind.AGENT_DECISION:
        d = float(proposal[2])
        chose = map_decision(d) > mode.eta
        executed = proposal[:2] if chose else base
        return StepDecision(executed, np.append(executed, d), chose, proposal, base)

    q_agent = agent.q_value(obs, proposal)
    q_base = agent.q_value(obs, base)
    # Ties go to the baseline.
    chose = q_agent > q_base
    executed = proposal if chose else base
    return StepDecision(executed, executed, chose, proposal, base, q_agent=q_agent, q_baseline=q_base)


def shaped_reward(
    r: float,
    mode: DecisionMode,
    a_agent: Optional[np.ndarray],
    a_base: np.ndarray,
) -> float:
    """Learning reward with the action-distance penalty in regularized agent_decision mode."""
    if mode.kind != ModeKind.AGENT_DECISION or mode.reg_lambda <= 0 or a_agent is None:
        return r
    gap = np.asarray(a_agent, dtype=np.float64)[:2] - np.asarray(a_base, dtype=np.float64)
    return r - mode.reg_lambda * float(np.linalg.norm(gap))


def record_transition(
    decision: StepDecision,
    obs: np.ndarray,
    reward: float,
    next_obs: np.ndarray,
    terminal: bool,
    buffer: ReplayBuffer,
    mode: DecisionMode,
) -> bool:
    """Push the executed transition unless the step is in the prefix.

    Returns:
        True if a transition was stored.
    """
    if decision.in_prefix:
        return False
    learn_reward = shaped_reward(reward, mode, decision.agent_proposal, decision.baseline_proposal)
    buffer.push(
        Transition(
            state=np.asarray(obs, dtype=np.float64),
            action=decision.stored_action,
            reward=learn_reward,
            next_state=np.asarray(next_obs, dtype=np.float64),
            terminal=terminal,
        )
    )
    return True


class CombinedPolicy:
    """A decision mode bound to an agent and a baseline.

    Args:
        mode: Control-authority mechanism.
        agent: Learner; may be None for baseline_only.
        baseline: Baseline callable. Defaults to `BaselinePolicy()`.
    """

    def __init__(
        self,
        mode: DecisionMode,
        agent: Optional[DdpgAgent] = None,
        baseline: Optional[BaselineFn] = None,
    ):
        check_agent(mode, agent)
        self.mode = mode
        self.agent = agent
        self.baseline = baseline or BaselinePolicy()

    def act(
        self,
        obs: np.ndarray,
        t: int,
        schedule: Optional[EpisodeSchedule] = None,
        explore: bool = False,
        rng: Optional[np.random.Generator] = None,
    ) -> StepDecision:
        return decide(self.mode, obs, self.agent, self.baseline, t, schedule, explore, rng)

    def snapshot(self) -> "CombinedPolicy":
        """Copy with frozen agent networks, for evaluation."""
        agent = self.agent.snapshot() if self.agent is not None else None
        return CombinedPolicy(self.mode, agent, self.baseline)
