"""Multi-seed training loops.

Each seed owns its environment, learner and random streams, so seeds can
run in worker processes and still produce the same results as a sequential
run.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from shadowrl.agent.ddpg import DdpgAgent
from shadowrl.agent.replay_buffer import ReplayBuffer, ReplayStats
from shadowrl.baseline import run_baseline_episode
from shadowrl.env import OBS_DIM, ReachAvoidEnv, sample_scenario
from shadowrl.models.config import ExperimentConfig
from shadowrl.models.reports import EpisodeRow, EvalReport, MetricRow
from shadowrl.models.scenario import Scenario
from shadowrl.harness.evaluator import aggregate_reports, evaluate
from shadowrl.shadow import CombinedPolicy, record_transition, schedule_for

logger = logging.getLogger(__name__)

STREAMS = ('init', 'scenario', 'schedule', 'noise', 'replay')


@dataclass
class SeedStreams:
    """Independent generators derived from one run seed."""
    init: np.random.Generator
    scenario: np.random.Generator
    schedule: np.random.Generator
    noise: np.random.Generator
    replay: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "SeedStreams":
        children = np.random.SeedSequence(seed).spawn(len(STREAMS))
        return cls(*(np.random.default_rng(child) for child in children))


@dataclass
class TrainResult:
    """Everything one seed produced."""
    seed: int
    reports: List[EvalReport] = field(default_factory=list)
    episodes: List[EpisodeRow] = field(default_factory=list)
    agent: Optional[DdpgAgent] = None
    replay: Optional[ReplayStats] = None

    @property
    def metrics(self) -> List[MetricRow]:
        return [
            MetricRow(
                env_steps=r.env_steps,
                seed=self.seed,
                mean_return=r.mean_return,
                success_rate=r.success_rate,
                agent_action_fraction=r.agent_action_fraction,
                mean_episode_length=r.mean_episode_length,
            )
            for r in self.reports
        ]

    @property
    def cumulative_regret(self) -> float:
        """Total training-time shortfall relative to the baseline."""
        return float(sum(e.regret for e in self.episodes))

    @property
    def final_report(self) -> Optional[EvalReport]:
        return self.reports[-1] if self.reports else None


def train_one(config: ExperimentConfig, seed: int, test_set: Sequence[Scenario]) -> TrainResult:
    """Train one seed and evaluate it every `eval_every` environment steps.

    The learner is updated once per environment step once `warmup_steps`
    steps have been taken and the buffer holds a full batch.
    """
    mode = config.shadow
    harness = config.harness
    streams = SeedStreams.from_seed(seed)

    agent = None
    buffer = None
    if mode.uses_agent:
        agent = DdpgAgent(OBS_DIM, mode.agent_action_dim, config.agent, streams.init)
        buffer = ReplayBuffer(config.agent.buffer_capacity, OBS_DIM, mode.agent_action_dim)
    policy = CombinedPolicy(mode, agent)

    env = ReachAvoidEnv(config.env)
    baseline_env = ReachAvoidEnv(config.env)
    result = TrainResult(seed=seed, agent=agent)
    batch_size = config.agent.batch_size

    logger.info(
        f"Seed {seed}: training {mode.kind.value} for {harness.total_env_steps} steps "
        f"({config.env.reward_mode.value} reward, epsilon={config.env.epsilon})"
    )

    steps = 0
    episode = 0
    while steps < harness.total_env_steps:
        scenario = sample_scenario(streams.scenario, config.env.obstacle_probability)
        schedule = schedule_for(mode, streams.schedule, config.env.horizon)
        obs = env.reset_to(scenario)
        episode_return = 0.0
        agent_steps = 0

        while True:
            decision = policy.act(obs, env.t, schedule, explore=True, rng=streams.noise)
            step = env.step(decision.executed_action)
            steps += 1
            episode_return += step.reward
            agent_steps += decision.chose_agent

            if agent is not None:
                record_transition(
                    decision, obs, step.reward, step.observation, step.terminated, buffer, mode
                )
                if steps >= config.agent.warmup_steps and len(buffer) >= batch_size:
                    agent.update(buffer.sample(streams.replay, batch_size))
            obs = step.observation

            if steps % harness.eval_every == 0:
                report = evaluate(policy, test_set, config.env, env_steps=steps)
                result.reports.append(report)
                logger.info(
                    f"Seed {seed} @ {steps}: return={report.mean_return:.2f} "
                    f"success={report.success_rate:.2f} agent={report.agent_action_fraction:.2f}"
                )

            if step.terminated or step.truncated or steps >= harness.total_env_steps:
                break

        baseline = run_baseline_episode(baseline_env, scenario)
        result.episodes.append(
            EpisodeRow(
                episode=episode,
                env_steps=steps,
                t_train=schedule.t_train,
                episode_return=episode_return,
                baseline_return=baseline.episode_return,
                agent_action_fraction=agent_steps / env.t,
            )
        )
        episode += 1

    if buffer is not None:
        result.replay = buffer.stats
        logger.info(
            f"Seed {seed}: replay pushed={result.replay.pushed} evicted={result.replay.evicted} "
            f"batches={result.replay.sampled_batches}"
        )
    logger.info(
        f"Seed {seed}: {episode} episodes, cumulative regret vs baseline {result.cumulative_regret:.1f}"
    )
    return result


def _train_seed(args) -> TrainResult:
    config, seed, test_set = args
    return train_one(config, seed, test_set)


def train_all(
    config: ExperimentConfig,
    test_set: Sequence[Scenario],
    workers: Optional[int] = None,
) -> List[TrainResult]:
    """Train every configured seed, in worker processes when `workers > 1`.

    Results are returned in seed order.
    """
    seeds = list(config.harness.seeds)
    workers = workers or config.harness.workers
    jobs = [(config, seed, list(test_set)) for seed in seeds]

    if workers <= 1 or len(seeds) == 1:
        return [_train_seed(job) for job in jobs]

    logger.info(f"Training {len(seeds)} seeds on {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_train_seed, jobs))


def aggregate_results(results: Sequence[TrainResult]) -> List[EvalReport]:
    """Per-evaluation-point aggregate across seeds."""
    if not results:
        return []
    n_points = min(len(r.reports) for r in results)
    return [aggregate_reports([r.reports[i] for r in results]) for i in range(n_points)]
