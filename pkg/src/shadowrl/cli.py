"""CLI entry point for shadow-mode training experiments."""

import functools
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import click
import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table
from rich import box

from shadowrl.agent.ddpg import DdpgAgent
from shadowrl.errors import ShadowRLError
from shadowrl.harness.evaluator import compare as compare_policies
from shadowrl.harness.evaluator import evaluate
from shadowrl.harness.heatmap import find_blocking_scenario, heatmap as build_heatmap, write_heatmap, write_pgm
from shadowrl.harness.testset import build_test_set, load_test_set, save_test_set
from shadowrl.harness.trainer import aggregate_results, train_all
from shadowrl.models.config import DecisionMode, ExperimentConfig, ModeKind
from shadowrl.models.scenario import Scenario
from shadowrl.report import (
    build_summary,
    write_aggregate_csv,
    write_episodes_csv,
    write_eval_csv,
    write_metrics_csv,
)
from shadowrl.shadow import CombinedPolicy
from shadowrl.utils.config_loader import ConfigError, dump_config, load_config, loads_config

logger = logging.getLogger(__name__)

BASELINE_KEYWORD = 'baseline_only'

console = Console()
err_console = Console(stderr=True)


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )
    logging.getLogger('shadowrl').setLevel(logging.DEBUG if verbose else logging.INFO)


def _handle_errors(func):
    """Map config problems to usage errors (exit 2) and other failures to exit 1."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigError as e:
            raise click.UsageError(str(e))
        except (ShadowRLError, OSError) as e:
            raise click.ClickException(str(e))
    return wrapper


def _resolve_config(config_path: Optional[str], overrides: Sequence[str], echo: Optional[str] = None) -> ExperimentConfig:
    """Config from a file and overrides, else the echo stored in a checkpoint, else defaults."""
    if config_path is None and echo is not None:
        return loads_config(echo, overrides)
    return load_config(config_path, overrides)


def _test_set(testset: Optional[str], config: ExperimentConfig) -> List[Scenario]:
    if testset is not None:
        return load_test_set(testset)
    return build_test_set(
        config.harness.test_set_seed,
        config.harness.n_eval_scenarios,
        config.env.obstacle_probability,
    )


def _load_checkpoint(path: str) -> Tuple[DdpgAgent, dict]:
    agent, meta = DdpgAgent.load(Path(path))
    logger.info(f"Loaded checkpoint {path} (mode={meta.get('mode')}, updates={agent.updates})")
    return agent, meta


@click.group()
@click.option('--verbose', '-v', is_flag=True, help='Log per-update detail')
def cli(verbose: bool):
    """Shadow-mode reinforcement learning on a reach-avoid benchmark."""
    _setup_logging(verbose)


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True, dir_okay=False), help='Experiment config file')
@click.option('--set', 'overrides', multiple=True, help='Override a config key (section.key=value)')
@click.option('--seeds', type=click.IntRange(min=1), default=None, help='Train seeds 0..N-1')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), default=None, help='Output directory')
@click.option('--testset', type=click.Path(exists=True, dir_okay=False), default=None, help='Frozen test set file')
@click.option('--workers', type=click.IntRange(min=1), default=None, help='Parallel seed workers')
@_handle_errors
def train(config_path: str, overrides: Tuple[str, ...], seeds: Optional[int], out_dir: Optional[str],
          testset: Optional[str], workers: Optional[int]):
    """Train all seeds of an experiment and write metrics and checkpoints.

    Example:
        shadowrl train --config configs/fig4_qcompare_sparse.cfg --seeds 5 --out runs/qc
    """
    overrides = list(overrides)
    if seeds is not None:
        overrides.append("harness.seeds=" + ",".join(str(s) for s in range(seeds)))
    if workers is not None:
        overrides.append(f"harness.workers={workers}")
    config = load_config(config_path, overrides)

    out = Path(out_dir) if out_dir else Path('runs') / Path(config_path).stem
    out.mkdir(parents=True, exist_ok=True)
    echo = dump_config(config)
    (out / 'config.cfg').write_text(echo)
    test_set = _test_set(testset, config)
    save_test_set(out / 'testset.txt', test_set)

    console.print(f"[bold]Training {config.shadow.kind.value} on {len(config.harness.seeds)} seeds...[/bold]")
    console.print(f"  Steps: {config.harness.total_env_steps} | Eval every: {config.harness.eval_every} | Test set: {len(test_set)}")
    console.print()

    results = train_all(config, test_set)

    table = Table(title="Final Evaluation", show_header=True, header_style="bold", box=box.SIMPLE)
    table.add_column("Seed", style="cyan")
    table.add_column("Return", justify="right")
    table.add_column("Success", justify="right")
    table.add_column("Agent share", justify="right")
    table.add_column("Regret", justify="right", style="dim")

    for result in results:
        k = result.seed
        write_metrics_csv(out / f'metrics_seed{k}.csv', result.metrics)
        write_episodes_csv(out / f'episodes_seed{k}.csv', result.episodes)
        if result.agent is not None:
            result.agent.save(
                out / f'checkpoint_seed{k}.npz',
                metadata={
                    'seed': k,
                    'mode': config.shadow.kind.value,
                    'env_steps': config.harness.total_env_steps,
                    'config': echo,
                },
            )
        final = result.final_report
        table.add_row(
            str(k),
            f"{final.mean_return:.2f}",
            f"{final.success_rate:.2f}",
            f"{final.agent_action_fraction:.2f}",
            f"{result.cumulative_regret:.0f}",
        )

    aggregate = aggregate_results(results)
    write_aggregate_csv(out / 'metrics_aggregate.csv', aggregate, len(results))

    console.print(table)
    if aggregate:
        regret = float(np.mean([r.cumulative_regret for r in results]))
        console.print(build_summary("Across seeds", aggregate[-1], regret))
    console.print(f"[green]✓[/green] Results written to {out}")


@cli.command('eval')
@click.option('--checkpoint', required=True, type=click.Path(exists=True, dir_okay=False), help='Agent checkpoint')
@click.option('--testset', type=click.Path(exists=True, dir_okay=False), default=None, help='Frozen test set file')
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Config file (defaults to the checkpoint echo)')
@click.option('--set', 'overrides', multiple=True, help='Override a config key (section.key=value)')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), default=None, help='Directory for eval.csv (defaults to the checkpoint directory)')
@_handle_errors
def eval_command(checkpoint: str, testset: Optional[str], config_path: Optional[str],
                 overrides: Tuple[str, ...], out_dir: Optional[str]):
    """Evaluate a checkpoint greedily on a test set."""
    agent, meta = _load_checkpoint(checkpoint)
    config = _resolve_config(config_path, overrides, meta.get('config'))
    policy = CombinedPolicy(config.shadow, agent)
    test_set = _test_set(testset, config)

    report = evaluate(policy, test_set, config.env, env_steps=int(meta.get('env_steps', 0)))
    console.print(build_summary(f"Eval {config.shadow.kind.value}", report))

    out = Path(out_dir) if out_dir else Path(checkpoint).parent
    path = write_eval_csv(out / 'eval.csv', report)
    console.print(f"[green]✓[/green] Report written to {path}")


@cli.command()
@click.option('--checkpoint', required=True, type=click.Path(exists=True, dir_okay=False), help='q_compare checkpoint')
@click.option('--testset', type=click.Path(exists=True, dir_okay=False), default=None, help='Frozen test set file')
@click.option('--index', type=click.IntRange(min=0), default=None,
              help='Scenario index (defaults to the first blocked scenario)')
@click.option('--resolution', type=click.IntRange(min=1), default=50, help='Cells per axis')
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False), help='Heatmap text file')
@click.option('--pgm', 'pgm_path', type=click.Path(dir_okay=False), default=None, help='Also write a graymap image')
@_handle_errors
def heatmap(checkpoint: str, testset: Optional[str], index: Optional[int], resolution: int,
            out_path: str, pgm_path: Optional[str]):
    """Write the Q-ratio decision map of a q_compare checkpoint."""
    agent, meta = _load_checkpoint(checkpoint)
    config = _resolve_config(None, (), meta.get('config'))
    test_set = _test_set(testset, config)

    if index is None:
        index, scenario = find_blocking_scenario(test_set)
    elif index >= len(test_set):
        raise click.UsageError(f"--index {index} is out of range for a test set of {len(test_set)}")
    else:
        scenario = test_set[index]

    grid = build_heatmap(agent, scenario, resolution, meta.get('mode', config.shadow.kind.value))
    write_heatmap(out_path, grid, scenario)
    if pgm_path:
        write_pgm(pgm_path, grid)

    above = float(np.mean(grid[np.isfinite(grid)] > 1.0)) if np.isfinite(grid).any() else 0.0
    console.print(f"[green]✓[/green] Heatmap of scenario {index} written to {out_path}")
    console.print(f"  Agent preferred in {above:.1%} of cells")


@cli.command('make-testset')
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), default=None, help='Experiment config file')
@click.option('--seed', type=int, default=None, help='Test-set seed (defaults to harness.test_set_seed)')
@click.option('--n', 'n', type=click.IntRange(min=1), default=None, help='Number of scenarios')
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False), help='Output file')
@_handle_errors
def make_testset(config_path: Optional[str], seed: Optional[int], n: Optional[int], out_path: str):
    """Freeze a test set of scenarios to a file."""
    config = load_config(config_path)
    seed = config.harness.test_set_seed if seed is None else seed
    n = config.harness.n_eval_scenarios if n is None else n
    scenarios = build_test_set(seed, n, config.env.obstacle_probability)
    save_test_set(out_path, scenarios)
    blocked = sum(s.has_obstacle for s in scenarios)
    console.print(f"[green]✓[/green] {n} scenarios ({blocked} with obstacle) written to {out_path}")


def _policy_from_spec(spec: str) -> Tuple[CombinedPolicy, Optional[str]]:
    """A checkpoint path or the baseline keyword, plus the config echo if any."""
    if spec == BASELINE_KEYWORD:
        return CombinedPolicy(DecisionMode(kind=ModeKind.BASELINE_ONLY)), None
    if not Path(spec).is_file():
        raise click.UsageError(f"{spec!r} is neither a checkpoint file nor {BASELINE_KEYWORD!r}")
    agent, meta = _load_checkpoint(spec)
    echo = meta.get('config')
    config = loads_config(echo) if echo else ExperimentConfig()
    return CombinedPolicy(config.shadow, agent), echo


@cli.command()
@click.argument('a')
@click.argument('b')
@click.option('--testset', type=click.Path(exists=True, dir_okay=False), default=None, help='Frozen test set file')
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Config for the environment and test set')
@_handle_errors
def compare(a: str, b: str, testset: Optional[str], config_path: Optional[str]):
    """Paired evaluation of two policies; A and B are checkpoints or 'baseline_only'."""
    policy_a, echo_a = _policy_from_spec(a)
    policy_b, echo_b = _policy_from_spec(b)
    config = _resolve_config(config_path, (), echo_a or echo_b)
    test_set = _test_set(testset, config)

    rows = compare_policies(policy_a, policy_b, test_set, config.env)

    table = Table(title=f"{a} vs {b}", show_header=True, header_style="bold", box=box.SIMPLE)
    table.add_column("#", style="cyan", justify="right")
    table.add_column("Return A", justify="right")
    table.add_column("Return B", justify="right")
    table.add_column("Delta", justify="right")
    for row in rows:
        style = "green" if row.delta > 0 else ("red" if row.delta < 0 else "dim")
        table.add_row(
            str(row.index),
            f"{row.return_a:.2f}",
            f"{row.return_b:.2f}",
            f"[{style}]{row.delta:+.2f}[/{style}]",
        )
    console.print(table)

    mean_delta = float(np.mean([row.delta for row in rows]))
    better = sum(row.delta > 0 for row in rows)
    worse = sum(row.delta < 0 for row in rows)
    console.print(f"Mean delta (B - A): [bold]{mean_delta:+.3f}[/bold] | B better on {better}, worse on {worse}")


if __name__ == '__main__':
    cli()
