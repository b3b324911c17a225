"""FIFO replay buffer of single-step transitions.

Transitions are kept in preallocated ring arrays so uniform sampling of a
batch is a single fancy-indexing operation.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, List, Sequence

import numpy as np

from shadowrl.errors import ShadowRLError

logger = logging.getLogger(__name__)


class BufferUnderfilledError(ShadowRLError):
    """Raised when sampling more transitions than the buffer holds."""
    pass


@dataclass(frozen=True)
class Transition:
    """One stored step.

    Attributes:
        state: Observation before the step.
        action: Stored action (executed action, plus the raw decision
            component in agent-decision mode).
        reward: Reward used for learning (shaped if regularized).
        next_state: Observation after the step.
        terminal: True only for goal-reach termination, not truncation.
    """
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray
    terminal: bool

    def __post_init__(self):
        action = np.asarray(self.action, dtype=np.float64)
        if np.any(np.abs(action) > 1.0):
            raise ValueError(f"Stored action components must lie in [-1, 1], got {action}")


@dataclass
class TransitionBatch:
    """Column-wise batch of transitions."""
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    terminals: np.ndarray

    def __len__(self) -> int:
        return len(self.rewards)

    @classmethod
    def from_transitions(cls, transitions: Sequence[Transition]) -> "TransitionBatch":
        return cls(
            states=np.array([t.state for t in transitions], dtype=np.float64),
            actions=np.array([t.action for t in transitions], dtype=np.float64),
            rewards=np.array([t.reward for t in transitions], dtype=np.float64),
            next_states=np.array([t.next_state for t in transitions], dtype=np.float64),
            terminals=np.array([t.terminal for t in transitions], dtype=np.float64),
        )


@dataclass
class ReplayStats:
    """Counters for buffer monitoring."""
    pushed: int = 0
    evicted: int = 0
    sampled_batches: int = 0


class ReplayBuffer:
    """Fixed-capacity FIFO buffer with uniform sampling with replacement.

    Args:
        capacity: Maximum number of transitions; the oldest is evicted first.
        obs_dim: Observation width.
        action_dim: Stored action width.
    """

    def __init__(self, capacity: int, obs_dim: int, action_dim: int):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.obs_dim = obs_dim
        self.action_dim = action_dim
        self._states = np.zeros((capacity, obs_dim))
        self._actions = np.zeros((capacity, action_dim))
        self._rewards = np.zeros(capacity)
        self._next_states = np.zeros((capacity, obs_dim))
        self._terminals = np.zeros(capacity)
        self._next = 0
        self._size = 0
        self._stats = ReplayStats()

    def __len__(self) -> int:
        return self._size

    @property
    def stats(self) -> ReplayStats:
        return ReplayStats(**vars(self._stats))

    def push(self, transition: Transition) -> None:
        action = np.asarray(transition.action, dtype=np.float64)
        if action.shape != (self.action_dim,):
            raise ValueError(f"Expected stored action of width {self.action_dim}, got {action.shape}")

        if self._size == self.capacity:
            self._stats.evicted += 1
        i = self._next
        self._states[i] = transition.state
        self._actions[i] = action
        self._rewards[i] = transition.reward
        self._next_states[i] = transition.next_state
        self._terminals[i] = float(transition.terminal)
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)
        self._stats.pushed += 1

    def sample(self, rng: np.random.Generator, batch_size: int) -> TransitionBatch:
        """Uniform sample with replacement; deterministic given the generator state.

        Raises:
            BufferUnderfilledError: If fewer than batch_size transitions are stored.
        """
        if self._size < batch_size:
            raise BufferUnderfilledError(
                f"Cannot sample {batch_size} transitions from a buffer holding {self._size}"
            )
        # Slot indices; insertion order does not matter for uniform sampling.
        idx = rng.integers(0, self._size, size=batch_size)
        self._stats.sampled_batches += 1
        return TransitionBatch(
            states=self._states[idx],
            actions=self._actions[idx],
            rewards=self._rewards[idx],
            next_states=self._next_states[idx],
            terminals=self._terminals[idx],
        )

    def _order(self) -> np.ndarray:
        """Slot indices from oldest to newest."""
        start = self._next if self._size == self.capacity else 0
        return (start + np.arange(self._size)) % self.capacity

    def __iter__(self) -> Iterator[Transition]:
        for i in self._order():
            yield Transition(
                state=self._states[i].copy(),
                action=self._actions[i].copy(),
                reward=float(self._rewards[i]),
                next_state=self._next_states[i].copy(),
                terminal=bool(self._terminals[i]),
            )

    def transitions(self) -> List[Transition]:
        """All stored transitions, oldest first."""
        return list(self)
