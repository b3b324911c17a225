"""Pydantic models for evaluation and training reports."""

from typing import List

from pydantic import BaseModel, ConfigDict, Field


class EvalReport(BaseModel):
    """Greedy evaluation of a combined policy on a frozen test set.

    Attributes:
        mean_return: Mean raw (unshaped) episode return.
        return_std_across_seeds: Std of per-seed mean returns; 0 for one seed.
        success_rate: Fraction of scenarios where the goal was reached.
        agent_action_fraction: Agent-chosen steps over all steps.
        mean_episode_length: Mean number of steps per episode.
        switch_back_fraction: Episodes where control went agent, baseline,
            then agent again.
        env_steps: Training environment steps at evaluation time.
        returns: Per-scenario raw returns, in test-set order.
    """
    model_config = ConfigDict(frozen=True)

    mean_return: float = Field(..., description="Mean episode return")
    return_std_across_seeds: float = Field(0.0, ge=0, description="Std across seeds")
    success_rate: float = Field(..., ge=0, le=1, description="Goal-reach fraction")
    agent_action_fraction: float = Field(..., ge=0, le=1, description="Agent step fraction")
    mean_episode_length: float = Field(..., ge=0, description="Mean episode length")
    switch_back_fraction: float = Field(0.0, ge=0, le=1, description="Episodes handing control back")
    env_steps: int = Field(0, ge=0, description="Training steps at evaluation")
    returns: List[float] = Field(default_factory=list, description="Per-scenario returns")


class MetricRow(BaseModel):
    """One evaluation point of one seed, as written to the metrics CSV."""
    model_config = ConfigDict(frozen=True)

    env_steps: int
    seed: int
    mean_return: float
    success_rate: float
    agent_action_fraction: float
    mean_episode_length: float


class EpisodeRow(BaseModel):
    """One training episode, with the baseline's return on the same scenario.

    Attributes:
        episode: Episode index within the run.
        env_steps: Environment steps after the episode ended.
        t_train: Length of the baseline-only prefix.
        episode_return: Raw return of the training rollout.
        baseline_return: Raw return of the baseline alone on the scenario.
        agent_action_fraction: Agent-chosen steps over episode steps.
    """
    model_config = ConfigDict(frozen=True)

    episode: int
    env_steps: int
    t_train: int
    episode_return: float
    baseline_return: float
    agent_action_fraction: float

    @property
    def regret(self) -> float:
        """Shortfall relative to the baseline on this scenario."""
        return self.baseline_return - self.episode_return


class ComparisonRow(BaseModel):
    """Paired per-scenario returns of two policies."""
    model_config = ConfigDict(frozen=True)

    index: int
    return_a: float
    return_b: float

    @property
    def delta(self) -> float:
        return self.return_b - self.return_a
