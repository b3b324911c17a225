"""Learner components: network core, replay buffer and DDPG agent."""

from shadowrl.agent.ddpg import DdpgAgent, EmptyBatchError, UpdateStats
from shadowrl.agent.nn import (
    AdamOptimizer,
    CheckpointError,
    MlpNet,
    ShapeMismatchError,
    soft_update,
)
from shadowrl.agent.replay_buffer import (
    BufferUnderfilledError,
    ReplayBuffer,
    Transition,
    TransitionBatch,
)

__all__ = [
    'DdpgAgent',
    'EmptyBatchError',
    'UpdateStats',
    'AdamOptimizer',
    'CheckpointError',
    'MlpNet',
    'ShapeMismatchError',
    'soft_update',
    'BufferUnderfilledError',
    'ReplayBuffer',
    'Transition',
    'TransitionBatch',
]
