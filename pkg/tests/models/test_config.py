"""Tests for the configuration models."""

import pytest
from pydantic import ValidationError

from shadowrl.models.config import (
    AgentConfig,
    DecisionMode,
    EnvConfig,
    ExperimentConfig,
    HarnessConfig,
    ModeKind,
    RewardMode,
)


class TestEnvConfig:
    """Test cases for EnvConfig."""

    def test_defaults(self):
        """Defaults match the benchmark constants."""
        c = EnvConfig()
        assert c.epsilon == 0.5
        assert c.horizon == 100
        assert c.reward_mode == RewardMode.SPARSE
        assert c.obstacle_probability == 0.95
        assert (c.goal_bonus, c.step_penalty, c.collision_penalty, c.distance_coeff) == (500, 1, 2, 2)

    def test_rejects_unknown_keys(self):
        """Typos fail instead of being ignored."""
        with pytest.raises(ValidationError):
            EnvConfig(epsilonn=0.1)

    def test_rejects_nonpositive_epsilon(self):
        """epsilon must be positive."""
        with pytest.raises(ValidationError):
            EnvConfig(epsilon=0)


class TestAgentConfig:
    """Test cases for AgentConfig."""

    def test_hidden_sizes_from_text(self):
        """Comma-separated widths are parsed."""
        assert AgentConfig(hidden_sizes="64, 32").hidden_sizes == (64, 32)

    def test_rejects_zero_width(self):
        """Hidden widths must be positive."""
        with pytest.raises(ValidationError):
            AgentConfig(hidden_sizes=(64, 0))

    def test_tau_range(self):
        """tau must lie in [0, 1]."""
        with pytest.raises(ValidationError):
            AgentConfig(tau=1.5)


class TestDecisionMode:
    """Test cases for DecisionMode."""

    def test_aliases(self):
        """File keys `mode` and `lambda` populate the fields."""
        mode = DecisionMode.model_validate({"mode": "agent_decision", "lambda": "0.1"})
        assert mode.kind == ModeKind.AGENT_DECISION
        assert mode.reg_lambda == 0.1

    def test_field_names_accepted(self):
        """Python field names work too."""
        assert DecisionMode(kind=ModeKind.AGENT_ONLY).kind == ModeKind.AGENT_ONLY

    @pytest.mark.parametrize("kind,width,schedule,agent", [
        (ModeKind.AGENT_DECISION, 3, True, True),
        (ModeKind.Q_COMPARE, 2, True, True),
        (ModeKind.AGENT_ONLY, 2, False, True),
        (ModeKind.BASELINE_ONLY, 2, False, False),
    ])
    def test_mode_properties(self, kind, width, schedule, agent):
        """Actor width, schedule use and agent use per mode."""
        mode = DecisionMode(kind=kind)
        assert mode.agent_action_dim == width
        assert mode.uses_schedule == schedule
        assert mode.uses_agent == agent

    def test_eta_range(self):
        """eta must lie in [0, 1]."""
        with pytest.raises(ValidationError):
            DecisionMode(eta=1.2)


class TestHarnessConfig:
    """Test cases for HarnessConfig."""

    def test_defaults(self):
        """Five seeds, 200k steps, test set of 100 with seed 7."""
        c = HarnessConfig()
        assert c.seeds == [0, 1, 2, 3, 4]
        assert c.total_env_steps == 200_000
        assert c.n_eval_scenarios == 100
        assert c.test_set_seed == 7

    def test_seeds_from_text(self):
        """Comma-separated seeds are parsed."""
        assert HarnessConfig(seeds="3, 4").seeds == [3, 4]

    def test_empty_seeds_rejected(self):
        """At least one seed is required."""
        with pytest.raises(ValidationError):
            HarnessConfig(seeds=[])

    def test_eval_every_must_divide(self):
        """eval_every must divide total_env_steps."""
        with pytest.raises(ValidationError, match="must divide"):
            HarnessConfig(total_env_steps=1000, eval_every=300)


class TestExperimentConfig:
    """Test cases for ExperimentConfig."""

    def test_nested_from_dict(self):
        """Sections validate into their models."""
        c = ExperimentConfig.model_validate({
            "env": {"reward_mode": "dense"},
            "shadow": {"mode": "q_compare"},
        })
        assert c.env.reward_mode == RewardMode.DENSE
        assert c.shadow.kind == ModeKind.Q_COMPARE

    def test_unknown_section_rejected(self):
        """Unknown sections fail validation."""
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"trainer": {}})
