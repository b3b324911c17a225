"""Tests for the DDPG learner."""

import numpy as np
import pytest

from shadowrl.agent.ddpg import DdpgAgent, EmptyBatchError
from shadowrl.agent.nn import CheckpointError, MlpNet, ShapeMismatchError, save_checkpoint
from shadowrl.agent.replay_buffer import Transition, TransitionBatch
from shadowrl.models.config import AgentConfig


def small_agent(seed=0, obs_dim=8, action_dim=2, **overrides) -> DdpgAgent:
    config = AgentConfig(hidden_sizes=(16, 16), **overrides)
    return DdpgAgent(obs_dim, action_dim, config, np.random.default_rng(seed))


def random_batch(rng, n=32, obs_dim=8, action_dim=2, reward=None) -> TransitionBatch:
    return TransitionBatch(
        states=rng.normal(size=(n, obs_dim)),
        actions=rng.uniform(-1, 1, size=(n, action_dim)),
        rewards=rng.normal(size=n) if reward is None else np.full(n, float(reward)),
        next_states=rng.normal(size=(n, obs_dim)),
        terminals=np.zeros(n),
    )


class TestSelectAction:
    """Test cases for DdpgAgent.select_action."""

    def test_greedy_equals_actor(self):
        """Without exploration the action is the actor output."""
        agent = small_agent()
        obs = np.random.default_rng(1).normal(size=8)
        np.testing.assert_array_equal(agent.select_action(obs), agent.actor.forward(obs))

    def test_zero_noise_equals_actor(self):
        """Exploration with zero std is greedy."""
        agent = small_agent(exploration_std=0.0)
        obs = np.ones(8)
        action = agent.select_action(obs, explore=True, rng=np.random.default_rng(0))
        np.testing.assert_array_equal(action, agent.actor.forward(obs))

    def test_large_noise_clamped(self):
        """Noisy actions are clamped to [-1, 1]."""
        agent = small_agent(exploration_std=100.0)
        rng = np.random.default_rng(2)
        actions = np.array([agent.select_action(np.ones(8), explore=True, rng=rng) for _ in range(50)])
        assert np.all(np.abs(actions) <= 1.0)
        assert np.any(np.abs(actions) == 1.0)

    def test_exploration_needs_rng(self):
        """Exploring without a generator is an error."""
        with pytest.raises(ValueError):
            small_agent().select_action(np.ones(8), explore=True)


class TestQValue:
    """Test cases for DdpgAgent.q_value."""

    def test_deterministic_and_finite(self):
        """Equal inputs give equal finite outputs."""
        agent = small_agent()
        obs, action = np.ones(8), np.array([0.2, -0.4])
        q = agent.q_value(obs, action)
        assert isinstance(q, float) and np.isfinite(q)
        assert agent.q_value(obs, action) == q

    def test_batched(self):
        """A batch of pairs gives one value per row."""
        agent = small_agent()
        rng = np.random.default_rng(3)
        q = agent.q_value(rng.normal(size=(5, 8)), rng.uniform(-1, 1, size=(5, 2)))
        assert q.shape == (5,)

    def test_action_width_mismatch(self):
        """Wrong action width raises ShapeMismatchError."""
        with pytest.raises(ShapeMismatchError):
            small_agent().q_value(np.ones(8), np.zeros(3))

    def test_fits_constant_target(self):
        """With gamma 0 the critic regresses onto a constant reward."""
        agent = small_agent(gamma=0.0)
        batch = random_batch(np.random.default_rng(4), reward=1.0)
        for _ in range(3000):
            agent.update(batch)
        q = agent.q_value(batch.states, batch.actions)
        assert np.max(np.abs(q - 1.0)) < 1e-2


class TestUpdate:
    """Test cases for DdpgAgent.update."""

    def test_terminal_target_is_reward(self):
        """Terminal transitions never bootstrap."""
        agent = small_agent()
        batch = random_batch(np.random.default_rng(5))
        batch.terminals[:] = 1.0
        np.testing.assert_array_equal(agent.td_targets(batch), batch.rewards)

    def test_gamma_zero_target_is_reward(self):
        """gamma 0 gives y = r."""
        agent = small_agent(gamma=0.0)
        batch = random_batch(np.random.default_rng(6))
        np.testing.assert_array_equal(agent.td_targets(batch), batch.rewards)

    def test_bootstrap_uses_targets(self):
        """Non-terminal targets use the target networks."""
        agent = small_agent(gamma=0.5)
        batch = random_batch(np.random.default_rng(7), n=4)
        next_q = agent.critic_target.forward(
            np.concatenate([batch.next_states, agent.actor_target.forward(batch.next_states)], axis=1)
        )[:, 0]
        np.testing.assert_allclose(agent.td_targets(batch), batch.rewards + 0.5 * next_q)

    def test_empty_batch(self):
        """An empty batch raises EmptyBatchError."""
        agent = small_agent()
        with pytest.raises(EmptyBatchError):
            agent.update([])
        with pytest.raises(EmptyBatchError):
            agent.update(random_batch(np.random.default_rng(0), n=0))

    def test_accepts_transition_list(self):
        """A list of transitions is accepted and unpacks into two floats."""
        agent = small_agent()
        transitions = [
            Transition(np.ones(8), np.array([0.1, 0.2]), 1.0, np.zeros(8), False),
            Transition(np.zeros(8), np.array([-0.3, 0.4]), -1.0, np.ones(8), True),
        ]
        critic_loss, actor_objective = agent.update(transitions)
        assert critic_loss >= 0.0
        assert np.isfinite(actor_objective)

    def test_critic_loss_decreases_on_fixed_batch(self):
        """Repeated updates on one batch drive the critic loss down."""
        agent = small_agent(gamma=0.5)
        batch = random_batch(np.random.default_rng(8))
        losses = [agent.update(batch).critic_loss for _ in range(100)]
        assert all(loss >= 0 for loss in losses)
        assert losses[-1] < losses[0]

    def test_target_moves_by_tau(self):
        """Targets move exactly tau of the way towards the updated sources."""
        agent = small_agent(tau=0.1)
        before = [p.copy() for p in agent.critic_target.parameters()]
        agent.update(random_batch(np.random.default_rng(9)))
        for old, new, src in zip(before, agent.critic_target.parameters(), agent.critic.parameters()):
            np.testing.assert_allclose(np.abs(new - old), 0.1 * np.abs(src - old), rtol=1e-9, atol=1e-15)

    def test_targets_keep_architecture(self):
        """Targets mirror their sources."""
        agent = small_agent(action_dim=3)
        assert agent.actor_target.architecture == agent.actor.architecture
        assert agent.critic_target.architecture == agent.critic.architecture
        assert agent.critic.input_dim == 11

    def test_decision_width_update(self):
        """Three-wide stored actions train the three-wide critic."""
        agent = small_agent(action_dim=3)
        stats = agent.update(random_batch(np.random.default_rng(10), action_dim=3))
        assert np.isfinite(stats.critic_loss)

    def test_chain_mdp_matches_value_iteration(self):
        """Two-state chain: A -(1)-> B -(2)-> end gives Q(A) = 2.8, Q(B) = 2 at gamma 0.9."""
        agent = DdpgAgent(
            2, 1, AgentConfig(hidden_sizes=(32, 32), gamma=0.9, tau=0.05), np.random.default_rng(12)
        )
        state_a, state_b, end = np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([0.0, 0.0])
        n = 32
        actions = np.linspace(-1.0, 1.0, n)[:, None]
        batch = TransitionBatch(
            states=np.array([state_a] * n + [state_b] * n),
            actions=np.concatenate([actions, actions]),
            rewards=np.array([1.0] * n + [2.0] * n),
            next_states=np.array([state_b] * n + [end] * n),
            terminals=np.array([0.0] * n + [1.0] * n),
        )

        # Value iteration on the tabular chain; actions do not matter.
        q_a = q_b = 0.0
        for _ in range(100):
            q_a, q_b = 1.0 + 0.9 * q_b, 2.0

        for _ in range(5000):
            agent.update(batch)

        learned_a = agent.q_value(np.tile(state_a, (n, 1)), actions)
        learned_b = agent.q_value(np.tile(state_b, (n, 1)), actions)
        assert q_a == pytest.approx(2.8)
        assert np.max(np.abs(learned_a - q_a)) < 0.05
        assert np.max(np.abs(learned_b - q_b)) < 0.05


class TestSnapshotAndCheckpoint:
    """Test cases for snapshot, save and load."""

    def test_snapshot_is_independent(self):
        """Updating the learner leaves a snapshot untouched."""
        agent = small_agent()
        snap = agent.snapshot()
        obs, action = np.ones(8), np.zeros(2)
        q_before = snap.q_value(obs, action)
        agent.update(random_batch(np.random.default_rng(13)))
        assert snap.q_value(obs, action) == q_before
        assert agent.q_value(obs, action) != q_before

    def test_save_load_roundtrip(self, tmp_path):
        """A loaded agent reproduces actions and values bit-exactly."""
        agent = small_agent(action_dim=3)
        agent.update(random_batch(np.random.default_rng(14), action_dim=3))
        agent.save(tmp_path / "agent.npz", metadata={"mode": "agent_decision"})

        loaded, meta = DdpgAgent.load(tmp_path / "agent.npz")
        assert meta["mode"] == "agent_decision"
        assert loaded.config == agent.config
        assert loaded.action_dim == 3
        assert loaded.updates == 1
        obs = np.random.default_rng(15).normal(size=8)
        assert loaded.select_action(obs).tobytes() == agent.select_action(obs).tobytes()
        action = np.array([0.1, 0.2, 0.3])
        assert loaded.q_value(obs, action) == agent.q_value(obs, action)

    def test_load_rejects_plain_network_file(self, tmp_path):
        """Checkpoints without agent networks are rejected."""
        path = save_checkpoint(tmp_path / "net.npz", {"actor": MlpNet([8, 2])})
        with pytest.raises(CheckpointError):
            DdpgAgent.load(path)
