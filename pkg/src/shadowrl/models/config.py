"""Pydantic configuration models for environments, agents and experiments.

Every model forbids extra keys so a typo in a config file fails loudly
instead of silently falling back to a default.
"""

from enum import Enum
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class RewardMode(str, Enum):
    """Reward structure of the reach-avoid task."""
    SPARSE = "sparse"
    DENSE = "dense"


class ModeKind(str, Enum):
    """Control-authority mechanism of the combined policy."""
    AGENT_DECISION = "agent_decision"
    Q_COMPARE = "q_compare"
    AGENT_ONLY = "agent_only"
    BASELINE_ONLY = "baseline_only"


def _split_csv(value):
    """Accept `1, 2, 3` strings from flat config files as lists."""
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return value


class EnvConfig(BaseModel):
    """Reach-avoid environment parameters.

    Attributes:
        epsilon: Goal radius.
        horizon: Maximum episode length.
        reward_mode: Sparse (goal only) or dense (goal, distance, collision).
        obstacle_probability: Probability a sampled scenario has an obstacle.
        goal_bonus: Reward emitted on the goal-reaching step.
        step_penalty: Per-step penalty.
        collision_penalty: Dense-mode penalty for a rejected move.
        distance_coeff: Dense-mode weight of the distance progress term.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    epsilon: float = Field(0.5, gt=0, description="Goal radius")
    horizon: int = Field(100, ge=1, description="Episode horizon")
    reward_mode: RewardMode = Field(RewardMode.SPARSE, description="sparse or dense")
    obstacle_probability: float = Field(0.95, ge=0, le=1, description="Obstacle frequency")
    goal_bonus: float = Field(500.0, description="Goal reward")
    step_penalty: float = Field(1.0, description="Per-step penalty")
    collision_penalty: float = Field(2.0, description="Dense collision penalty")
    distance_coeff: float = Field(2.0, description="Dense distance-progress weight")


class AgentConfig(BaseModel):
    """DDPG learner hyperparameters.

    Attributes:
        hidden_sizes: Hidden layer widths shared by actor and critic.
        actor_lr: Actor learning rate.
        critic_lr: Critic learning rate.
        gamma: Discount factor for bootstrapped targets.
        tau: Soft target update rate.
        batch_size: Transitions per update.
        buffer_capacity: Replay buffer capacity.
        exploration_std: Std of the Gaussian exploration noise.
        warmup_steps: Environment steps collected before the first update.
        adam_beta1: First-moment decay rate.
        adam_beta2: Second-moment decay rate.
        adam_eps: Numerical stability constant.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    hidden_sizes: Tuple[int, ...] = Field((256, 256), description="Hidden layer widths")
    actor_lr: float = Field(1e-3, gt=0, description="Actor learning rate")
    critic_lr: float = Field(1e-3, gt=0, description="Critic learning rate")
    gamma: float = Field(0.99, ge=0, le=1, description="Discount factor")
    tau: float = Field(0.005, ge=0, le=1, description="Soft update rate")
    batch_size: int = Field(256, ge=1, description="Batch size")
    buffer_capacity: int = Field(100_000, ge=1, description="Replay capacity")
    exploration_std: float = Field(0.1, ge=0, description="Exploration noise std")
    warmup_steps: int = Field(1000, ge=0, description="Pure collection steps")
    adam_beta1: float = Field(0.9, ge=0, lt=1, description="Adam beta1")
    adam_beta2: float = Field(0.999, ge=0, lt=1, description="Adam beta2")
    adam_eps: float = Field(1e-8, gt=0, description="Adam epsilon")

    @field_validator("hidden_sizes", mode="before")
    @classmethod
    def _parse_hidden_sizes(cls, value):
        return _split_csv(value)

    @field_validator("hidden_sizes")
    @classmethod
    def _check_hidden_sizes(cls, value):
        if any(width < 1 for width in value):
            raise ValueError("hidden layer widths must be positive")
        return value


class DecisionMode(BaseModel):
    """Which control-authority mechanism the combined policy uses.

    Attributes:
        kind: agent_decision, q_compare, agent_only or baseline_only.
        eta: Decision threshold on the mapped decision component.
        reg_lambda: Strength of the action-distance reward penalty.
    """
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    kind: ModeKind = Field(ModeKind.Q_COMPARE, alias="mode", description="Mechanism")
    eta: float = Field(0.5, ge=0, le=1, description="Agent-decision threshold")
    reg_lambda: float = Field(0.0, ge=0, alias="lambda", description="Regularization strength")

    @property
    def agent_action_dim(self) -> int:
        """Actor output width this mode requires."""
        return 3 if self.kind == ModeKind.AGENT_DECISION else 2

    @property
    def uses_agent(self) -> bool:
        return self.kind != ModeKind.BASELINE_ONLY

    @property
    def uses_schedule(self) -> bool:
        """Whether episodes start with a randomized baseline-only prefix."""
        return self.kind in (ModeKind.AGENT_DECISION, ModeKind.Q_COMPARE)


class HarnessConfig(BaseModel):
    """Training and evaluation protocol.

    Attributes:
        total_env_steps: Environment steps per training run.
        eval_every: Evaluation period in environment steps.
        n_eval_scenarios: Size of the frozen test set.
        seeds: Training seeds.
        test_set_seed: Seed of the dedicated test-set stream.
        workers: Parallel seed workers.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    total_env_steps: int = Field(200_000, ge=1, description="Steps per run")
    eval_every: int = Field(10_000, ge=1, description="Eval period")
    n_eval_scenarios: int = Field(100, ge=1, description="Test-set size")
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4], description="Seeds")
    test_set_seed: int = Field(7, description="Test-set seed")
    workers: int = Field(1, ge=1, description="Parallel seed workers")

    @field_validator("seeds", mode="before")
    @classmethod
    def _parse_seeds(cls, value):
        return _split_csv(value)

    @model_validator(mode="after")
    def _check_protocol(self) -> "HarnessConfig":
        if not self.seeds:
            raise ValueError("seeds must not be empty")
        if self.total_env_steps % self.eval_every != 0:
            raise ValueError(
                f"eval_every ({self.eval_every}) must divide "
                f"total_env_steps ({self.total_env_steps})"
            )
        return self


class ExperimentConfig(BaseModel):
    """Fully resolved experiment configuration."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    env: EnvConfig = Field(default_factory=EnvConfig)
    agent: AgentConfig = Field(default_factory=AgentConfig)
    shadow: DecisionMode = Field(default_factory=DecisionMode)
    harness: HarnessConfig = Field(default_factory=HarnessConfig)
