"""Tests for the command-line interface."""

import csv
import shutil
from pathlib import Path

import pytest
from click.testing import CliRunner

from shadowrl.cli import cli
from shadowrl.harness.testset import load_test_set
from shadowrl.models.reports import MetricRow

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"

TINY = [
    "--set", "harness.total_env_steps=40",
    "--set", "harness.eval_every=20",
    "--set", "harness.n_eval_scenarios=3",
    "--set", "env.horizon=10",
    "--set", "agent.hidden_sizes=8",
    "--set", "agent.batch_size=4",
    "--set", "agent.warmup_steps=8",
]


@pytest.fixture(scope="module")
def trained_run(tmp_path_factory):
    """A two-seed q_compare run on a tiny budget."""
    out = tmp_path_factory.mktemp("run")
    result = CliRunner().invoke(
        cli,
        ["train", "--config", str(CONFIG_DIR / "fig4_qcompare_sparse.cfg"), *TINY, "--seeds", "2", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    return out


class TestMakeTestset:
    """Test cases for the make-testset command."""

    def test_writes_scenarios(self, tmp_path):
        """The requested number of scenarios is written."""
        out = tmp_path / "set.txt"
        result = CliRunner().invoke(cli, ["make-testset", "--seed", "3", "--n", "5", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert len(load_test_set(out)) == 5

    def test_reproducible(self, tmp_path):
        """The same seed writes the same file."""
        runner = CliRunner()
        for name in ("a.txt", "b.txt"):
            runner.invoke(cli, ["make-testset", "--seed", "3", "--n", "5", "--out", str(tmp_path / name)])
        assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()


class TestTrain:
    """Test cases for the train command."""

    def test_outputs(self, trained_run):
        """Config echo, test set, per-seed logs, checkpoints and the aggregate are written."""
        for name in (
            "config.cfg",
            "testset.txt",
            "metrics_aggregate.csv",
            "metrics_seed0.csv",
            "metrics_seed1.csv",
            "episodes_seed0.csv",
            "checkpoint_seed0.npz",
            "checkpoint_seed1.npz",
        ):
            assert (trained_run / name).is_file(), name
        assert len(load_test_set(trained_run / "testset.txt")) == 3

    def test_metrics_rows(self, trained_run):
        """One metrics row per evaluation point."""
        with open(trained_run / "metrics_seed1.csv", newline="") as f:
            rows = [MetricRow.model_validate(row) for row in csv.DictReader(f)]
        assert [row.env_steps for row in rows] == [20, 40]
        assert all(row.seed == 1 for row in rows)

    def test_config_echo_overrides(self, trained_run):
        """The echoed config carries the command-line overrides."""
        echo = (trained_run / "config.cfg").read_text()
        assert "total_env_steps = 40" in echo
        assert "mode = q_compare" in echo

    def test_unknown_override(self, tmp_path):
        """An unknown key is a usage error."""
        result = CliRunner().invoke(
            cli,
            ["train", "--config", str(CONFIG_DIR / "fig4_qcompare_sparse.cfg"), "--set", "agent.nope=1", "--out", str(tmp_path)],
        )
        assert result.exit_code == 2
        assert "Unknown config key" in result.output

    def test_missing_config(self, tmp_path):
        """A missing config file is a usage error."""
        result = CliRunner().invoke(cli, ["train", "--config", str(tmp_path / "nope.cfg")])
        assert result.exit_code == 2


class TestEval:
    """Test cases for the eval command."""

    def test_eval_checkpoint(self, trained_run, tmp_path):
        """A checkpoint evaluates on the frozen set and writes eval.csv."""
        result = CliRunner().invoke(
            cli,
            [
                "eval",
                "--checkpoint", str(trained_run / "checkpoint_seed0.npz"),
                "--testset", str(trained_run / "testset.txt"),
                "--out", str(tmp_path),
            ],
        )
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "eval.csv").read_text().splitlines()
        assert lines[0].startswith("env_steps,mean_return")
        assert lines[1].startswith("40,")
        assert lines[0].endswith(",switch_back_fraction")

    def test_eval_csv_defaults_to_checkpoint_dir(self, trained_run, tmp_path):
        """Without --out the report lands next to the checkpoint."""
        checkpoint = shutil.copy(trained_run / "checkpoint_seed1.npz", tmp_path)
        result = CliRunner().invoke(
            cli,
            ["eval", "--checkpoint", str(checkpoint), "--testset", str(trained_run / "testset.txt")],
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "eval.csv").is_file()

    def test_mode_mismatch(self, trained_run):
        """A q_compare checkpoint cannot run in agent_decision mode."""
        result = CliRunner().invoke(
            cli,
            [
                "eval",
                "--checkpoint", str(trained_run / "checkpoint_seed0.npz"),
                "--testset", str(trained_run / "testset.txt"),
                "--set", "shadow.mode=agent_decision",
            ],
        )
        assert result.exit_code == 1
        assert "actor output width" in result.output

    def test_not_a_checkpoint(self, tmp_path):
        """A non-checkpoint file fails cleanly."""
        bogus = tmp_path / "bogus.npz"
        bogus.write_text("not a checkpoint")
        result = CliRunner().invoke(cli, ["eval", "--checkpoint", str(bogus)])
        assert result.exit_code == 1


class TestHeatmap:
    """Test cases for the heatmap command."""

    def test_writes_map_and_image(self, trained_run, tmp_path):
        """Text map and graymap are written for a chosen scenario."""
        out, pgm = tmp_path / "map.txt", tmp_path / "map.pgm"
        result = CliRunner().invoke(
            cli,
            [
                "heatmap",
                "--checkpoint", str(trained_run / "checkpoint_seed0.npz"),
                "--testset", str(trained_run / "testset.txt"),
                "--index", "0",
                "--resolution", "4",
                "--out", str(out),
                "--pgm", str(pgm),
            ],
        )
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0].startswith("4 ")
        assert len(lines) == 5
        assert pgm.read_bytes().startswith(b"P5\n4 4\n255\n")

    def test_index_out_of_range(self, trained_run, tmp_path):
        """An index past the test set is a usage error."""
        result = CliRunner().invoke(
            cli,
            [
                "heatmap",
                "--checkpoint", str(trained_run / "checkpoint_seed0.npz"),
                "--testset", str(trained_run / "testset.txt"),
                "--index", "99",
                "--out", str(tmp_path / "map.txt"),
            ],
        )
        assert result.exit_code == 2


class TestCompare:
    """Test cases for the compare command."""

    def test_baseline_against_itself(self, trained_run):
        """Comparing the baseline with itself gives zero mean delta."""
        result = CliRunner().invoke(
            cli,
            ["compare", "baseline_only", "baseline_only", "--testset", str(trained_run / "testset.txt")],
        )
        assert result.exit_code == 0, result.output
        assert "+0.000" in result.output

    def test_checkpoint_against_baseline(self, trained_run):
        """A checkpoint can be paired with the baseline."""
        result = CliRunner().invoke(
            cli,
            [
                "compare",
                str(trained_run / "checkpoint_seed0.npz"),
                "baseline_only",
                "--testset", str(trained_run / "testset.txt"),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "Mean delta" in result.output

    def test_unknown_policy(self):
        """Neither a file nor the baseline keyword is a usage error."""
        result = CliRunner().invoke(cli, ["compare", "nowhere.npz", "baseline_only"])
        assert result.exit_code == 2
