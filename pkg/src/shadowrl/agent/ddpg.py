"""Off-policy actor-critic learner (DDPG).

The actor maps observations to actions in [-1, 1]; the critic maps
(observation, action) pairs to Q-values. Both have soft-updated target
copies used for the bootstrapped critic target.

Usage:
    agent = DdpgAgent(obs_dim=8, action_dim=2, config=AgentConfig(), rng=rng)
    action = agent.select_action(obs, explore=True, rng=noise_rng)
    stats = agent.update(buffer.sample(replay_rng, agent.config.batch_size))
"""

import logging
from pathlib import Path
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from shadowrl.agent.nn import (
    AdamOptimizer,
    CheckpointError,
    MlpNet,
    ShapeMismatchError,
    load_checkpoint,
    save_checkpoint,
    soft_update,
)
from shadowrl.agent.replay_buffer import Transition, TransitionBatch
from shadowrl.errors import ShadowRLError
from shadowrl.models.config import AgentConfig

logger = logging.getLogger(__name__)


class EmptyBatchError(ShadowRLError):
    """Raised when an update is requested on an empty batch."""
    pass


class UpdateStats(NamedTuple):
    """Losses of one learner update; unpacks as (critic_loss, actor_objective)."""
    critic_loss: float
    actor_objective: float


class DdpgAgent:
    """Actor, critic, their targets and optimizers.

    Args:
        obs_dim: Observation width.
        action_dim: Actor output width (3 when the agent also emits a decision).
        config: Learner hyperparameters.
        rng: Generator used for network initialization.
    """

    def __init__(
        self,
        obs_dim: int,
        action_dim: int,
        config: Optional[AgentConfig] = None,
        rng: Optional[np.random.Generator] = None,
    ):
        self.config = config or AgentConfig()
        self.obs_dim = obs_dim
        self.action_dim = action_dim
        rng = rng if rng is not None else np.random.default_rng()

        hidden = list(self.config.hidden_sizes)
        self.actor = MlpNet([obs_dim, *hidden, action_dim], "tanh", rng=rng)
        self.critic = MlpNet([obs_dim + action_dim, *hidden, 1], "identity", rng=rng)
        self.actor_target = self.actor.copy()
        self.critic_target = self.critic.copy()
        self._init_optimizers()
        self.updates = 0

    def _init_optimizers(self) -> None:
        c = self.config
        self.actor_optimizer = AdamOptimizer(
            self.actor.parameters(), c.actor_lr, c.adam_beta1, c.adam_beta2, c.adam_eps
        )
        self.critic_optimizer = AdamOptimizer(
            self.critic.parameters(), c.critic_lr, c.adam_beta1, c.adam_beta2, c.adam_eps
        )

    @property
    def gamma(self) -> float:
        return self.config.gamma

    @property
    def tau(self) -> float:
        return self.config.tau

    def select_action(
        self,
        obs: np.ndarray,
        explore: bool = False,
        rng: Optional[np.random.Generator] = None,
    ) -> np.ndarray:
        """Actor output, plus Gaussian noise when exploring, clipped to [-1, 1]."""
        action = self.actor.forward(obs)
        std = self.config.exploration_std
        if explore and std > 0:
            if rng is None:
                raise ValueError("An rng is required for exploration noise")
            action = action + rng.normal(0.0, std, size=action.shape)
        return np.clip(action, -1.0, 1.0)

    def _critic_input(self, obs: np.ndarray, action: np.ndarray) -> np.ndarray:
        obs = np.asarray(obs, dtype=np.float64)
        action = np.asarray(action, dtype=np.float64)
        if action.shape[-1] != self.action_dim:
            raise ShapeMismatchError(
                f"Critic expects actions of width {self.action_dim}, got {action.shape[-1]}"
            )
        return np.concatenate([obs, action], axis=-1)

    def q_value(self, obs: np.ndarray, action: np.ndarray) -> Union[float, np.ndarray]:
        """Critic value of (obs, action); a float for one pair, an array for a batch."""
        q = self.critic.forward(self._critic_input(obs, action))
        if q.ndim == 1:
            return float(q[0])
        return q[:, 0]

    def td_targets(self, batch: TransitionBatch) -> np.ndarray:
        """Bootstrapped critic targets; terminal transitions do not bootstrap."""
        next_actions = self.actor_target.forward(batch.next_states)
        q_next = self.critic_target.forward(self._critic_input(batch.next_states, next_actions))[:, 0]
        return batch.rewards + self.gamma * (1.0 - batch.terminals) * q_next

    def update(self, batch: Union[TransitionBatch, Sequence[Transition]]) -> UpdateStats:
        """One critic step on the TD target, one actor ascent step, then soft updates.

        Raises:
            EmptyBatchError: If the batch holds no transitions.
        """
        if not isinstance(batch, TransitionBatch):
            if len(batch) == 0:
                raise EmptyBatchError("Cannot update on an empty batch")
            batch = TransitionBatch.from_transitions(batch)
        n = len(batch)
        if n == 0:
            raise EmptyBatchError("Cannot update on an empty batch")

        targets = self.td_targets(batch)

        q, cache = self.critic.forward_cached(self._critic_input(batch.states, batch.actions))
        diff = q[:, 0] - targets
        critic_loss = float(np.mean(diff ** 2))
        grads = self.critic.backward(cache, (2.0 / n) * diff[:, np.newaxis])
        self.critic_optimizer.step(grads.as_list())

        actions, actor_cache = self.actor.forward_cached(batch.states)
        q_pi, q_cache = self.critic.forward_cached(self._critic_input(batch.states, actions))
        actor_objective = float(np.mean(q_pi))
        critic_grads = self.critic.backward(q_cache, np.full((n, 1), 1.0 / n))
        dq_da = critic_grads.input[:, self.obs_dim:]
        actor_grads = self.actor.backward(actor_cache, -dq_da)
        self.actor_optimizer.step(actor_grads.as_list())

        soft_update(self.critic_target, self.critic, self.tau)
        soft_update(self.actor_target, self.actor, self.tau)
        self.updates += 1

        if self.updates % 1000 == 0:
            logger.debug(
                f"Update {self.updates}: critic_loss={critic_loss:.4f} actor_objective={actor_objective:.4f}"
            )
        return UpdateStats(critic_loss, actor_objective)

    def snapshot(self) -> "DdpgAgent":
        """Independent copy of the networks for read-only evaluation."""
        clone = DdpgAgent.__new__(DdpgAgent)
        clone.config = self.config
        clone.obs_dim = self.obs_dim
        clone.action_dim = self.action_dim
        clone.actor = self.actor.copy()
        clone.critic = self.critic.copy()
        clone.actor_target = self.actor_target.copy()
        clone.critic_target = self.critic_target.copy()
        clone._init_optimizers()
        clone.updates = self.updates
        return clone

    def save(self, path: Path, metadata: Optional[dict] = None) -> Path:
        """Write all four networks plus a config echo to a checkpoint file."""
        meta = dict(metadata or {})
        meta["agent"] = self.config.model_dump(mode="json")
        meta["obs_dim"] = self.obs_dim
        meta["action_dim"] = self.action_dim
        meta["updates"] = self.updates
        return save_checkpoint(
            path,
            {
                "actor": self.actor,
                "critic": self.critic,
                "actor_target": self.actor_target,
                "critic_target": self.critic_target,
            },
            meta,
        )

    @classmethod
    def load(cls, path: Path) -> Tuple["DdpgAgent", dict]:
        """Restore an agent and the metadata stored with it.

        Raises:
            CheckpointError: If the file lacks agent networks or metadata.
        """
        networks, meta = load_checkpoint(path)
        missing = {"actor", "critic", "actor_target", "critic_target"} - set(networks)
        if missing or "agent" not in meta:
            raise CheckpointError(f"{path} is not an agent checkpoint (missing {sorted(missing) or 'agent config'})")

        agent = cls.__new__(cls)
        agent.config = AgentConfig.model_validate(meta["agent"])
        agent.obs_dim = int(meta["obs_dim"])
        agent.action_dim = int(meta["action_dim"])
        agent.actor = networks["actor"]
        agent.critic = networks["critic"]
        agent.actor_target = networks["actor_target"]
        agent.critic_target = networks["critic_target"]
        agent._init_optimizers()
        agent.updates = int(meta.get("updates", 0))
        return agent, meta
