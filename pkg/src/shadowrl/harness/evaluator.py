"""Greedy evaluation of combined policies on a frozen test set."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from shadowrl.env import ReachAvoidEnv
from shadowrl.models.config import EnvConfig
from shadowrl.models.reports import ComparisonRow, EvalReport
from shadowrl.models.scenario import Scenario
from shadowrl.shadow import CombinedPolicy

logger = logging.getLogger(__name__)


@dataclass
class EpisodeOutcome:
    """Raw result of one greedy rollout.

    Attributes:
        episode_return: Sum of unshaped environment rewards.
        length: Steps taken.
        reached: Whether the goal was reached.
        authority: Per-step flags, True where the agent acted.
    """
    episode_return: float = 0.0
    length: int = 0
    reached: bool = False
    authority: List[bool] = field(default_factory=list)

    @property
    def agent_steps(self) -> int:
        return sum(self.authority)

    @property
    def switches_back(self) -> bool:
        """Whether control went agent -> baseline -> agent at some point."""
        seen_agent = handed_back = False
        for chose_agent in self.authority:
            if chose_agent and handed_back:
                return True
            if chose_agent:
                seen_agent = True
            elif seen_agent:
                handed_back = True
        return False


def rollout(env: ReachAvoidEnv, policy: CombinedPolicy, scenario: Scenario) -> EpisodeOutcome:
    """Run one episode with no exploration noise and no baseline prefix."""
    outcome = EpisodeOutcome()
    obs = env.reset_to(scenario)
    while True:
        decision = policy.act(obs, env.t)
        result = env.step(decision.executed_action)
        outcome.episode_return += result.reward
        outcome.authority.append(decision.chose_agent)
        obs = result.observation
        if result.terminated or result.truncated:
            outcome.length = env.t
            outcome.reached = result.terminated
            return outcome


def evaluate(
    policy: CombinedPolicy,
    test_set: Sequence[Scenario],
    env_config: Optional[EnvConfig] = None,
    env_steps: int = 0,
) -> EvalReport:
    """Roll the policy out greedily on every scenario of the test set.

    Returns are raw environment returns; reward shaping used during
    training never enters a report.
    """
    if not test_set:
        raise ValueError("Cannot evaluate on an empty test set")
    env = ReachAvoidEnv(env_config)
    outcomes = [rollout(env, policy, scenario) for scenario in test_set]

    total_steps = sum(o.length for o in outcomes)
    report = EvalReport(
        mean_return=float(np.mean([o.episode_return for o in outcomes])),
        success_rate=sum(o.reached for o in outcomes) / len(outcomes),
        agent_action_fraction=sum(o.agent_steps for o in outcomes) / total_steps,
        mean_episode_length=total_steps / len(outcomes),
        switch_back_fraction=sum(o.switches_back for o in outcomes) / len(outcomes),
        env_steps=env_steps,
        returns=[o.episode_return for o in outcomes],
    )
    logger.debug(
        f"Evaluated {policy.mode.kind.value} on {len(outcomes)} scenarios: "
        f"return={report.mean_return:.2f} success={report.success_rate:.2f}"
    )
    return report


def aggregate_reports(reports: Sequence[EvalReport]) -> EvalReport:
    """Combine per-seed reports taken at the same training step.

    Means are averaged across seeds and `return_std_across_seeds` is the
    population standard deviation of the per-seed mean returns.
    """
    if not reports:
        raise ValueError("Cannot aggregate an empty list of reports")
    steps = {r.env_steps for r in reports}
    if len(steps) != 1:
        raise ValueError(f"Reports come from different training steps: {sorted(steps)}")

    means = np.array([r.mean_return for r in reports])
    returns: List[float] = []
    lengths = {len(r.returns) for r in reports}
    if len(lengths) == 1 and reports[0].returns:
        returns = np.mean([r.returns for r in reports], axis=0).tolist()

    return EvalReport(
        mean_return=float(means.mean()),
        return_std_across_seeds=float(means.std()),
        success_rate=float(np.mean([r.success_rate for r in reports])),
        agent_action_fraction=float(np.mean([r.agent_action_fraction for r in reports])),
        mean_episode_length=float(np.mean([r.mean_episode_length for r in reports])),
        switch_back_fraction=float(np.mean([r.switch_back_fraction for r in reports])),
        env_steps=steps.pop(),
        returns=returns,
    )


def compare(
    policy_a: CombinedPolicy,
    policy_b: CombinedPolicy,
    test_set: Sequence[Scenario],
    env_config: Optional[EnvConfig] = None,
) -> List[ComparisonRow]:
    """Paired greedy rollouts of two policies on every test scenario."""
    env = ReachAvoidEnv(env_config)
    rows = []
    for i, scenario in enumerate(test_set):
        a = rollout(env, policy_a, scenario)
        b = rollout(env, policy_b, scenario)
        rows.append(ComparisonRow(index=i, return_a=a.episode_return, return_b=b.episode_return))
    return rows
