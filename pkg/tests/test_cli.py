"""Tests for the command-line interface."""

import json
import re
import socket
import threading
import zlib
from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner

from evoact import cli as cli_module
from evoact.cli import cli
from evoact.config import EvolutionConfig
from evoact.distrib import Shutdown, encode
from evoact.evolve import evolve
from evoact.graph import ActivationGraph, to_text
from evoact.output import read_csv, write_history

TINY_TRAINING = """
train:
  layer_widths: [2, 4, 2]
  batch_size: 16
  dataset:
    kind: blobs
    sizes: {train: 40, val: 20, test: 20}
  schedule:
    milestones: [2]
    total_epochs: 3
rerank:
  top_n: 2
  runs: 1
  keep: 2
cross_eval:
  seeds: 1
"""

TOY_SEARCH = """
evolution:
  P: 8
  S: 4
  C: 60
  V: 0.5
  seed: 2
rerank:
  top_n: 4
  runs: 2
  keep: 3
"""


def mock_fitness(graph: ActivationGraph, *args) -> float:
    return (zlib.crc32(to_text(graph).encode()) % 1000) / 1000


@pytest.fixture(autouse=True)
def isolated(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path))
    monkeypatch.delenv("EVOACT_OUTPUT_DIR", raising=False)


@pytest.fixture
def mocked_training(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(cli_module, "fitness_compressed", mock_fitness)
    monkeypatch.setattr(cli_module, "fitness_full", mock_fitness)


def write_config(tmp_path: Path, text: str, name: str = "run.yaml") -> Path:
    path = tmp_path / name
    path.write_text(text)
    return path


def invoke(*args: str):
    return CliRunner().invoke(cli, list(args), catch_exceptions=False)


class TestSpaceCount:
    """Tests for the space-count command."""

    def test_total_line(self) -> None:
        result = invoke("space-count")
        assert result.exit_code == 0
        assert "Total: 10,170,042,948,450" in result.output
        assert "7 node(s): 10,015,741,690,785" in result.output

    def test_json(self) -> None:
        result = invoke("space-count", "--json", "--max-nodes", "3")
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["total"] == 108 + 5_832 + 427_923

    def test_arrangement_check_reports_discrepancy(self) -> None:
        result = invoke("space-count", "--check-arrangements")
        assert result.exit_code == 0
        assert result.output.count("DIFFERS") == 1

    def test_save_refuses_overwrite(self, tmp_path: Path) -> None:
        out = str(tmp_path / "out")
        assert invoke("-o", out, "space-count", "--save").exit_code == 0
        saved = (tmp_path / "out" / "census.txt").read_text()
        assert saved.startswith("# evoact_version:")
        assert json.loads((tmp_path / "out" / "census.json").read_text())["total"] == 10_170_042_948_450

        assert invoke("-o", out, "space-count", "--save").exit_code == 6
        assert invoke("-o", out, "--overwrite", "space-count", "--save").exit_code == 0

    def test_bad_arrangements_file(self, tmp_path: Path) -> None:
        path = write_config(tmp_path, '"3;4": 5\n', "arrangements.yaml")
        assert invoke("space-count", "--arrangements-file", str(path)).exit_code == 3


class TestEvalFn:
    """Tests for eval-fn."""

    def test_relu_at_negative_point(self) -> None:
        result = invoke("eval-fn", "relu(x)", "--at", "-2")
        assert result.exit_code == 0
        assert re.search(r"-2[^\d.-]+0[^\d.-]+0\b", result.output)

    def test_parameters(self) -> None:
        result = invoke("eval-fn", "mul(x, sigmoid(p0(x)))", "--at", "1", "--param", "2")
        assert result.exit_code == 0
        assert "0.880797078" in result.output

    def test_wrong_parameter_count(self) -> None:
        assert invoke("eval-fn", "p0(tanh(x))", "--param", "1", "--param", "2").exit_code == 2

    def test_parse_error(self) -> None:
        result = invoke("eval-fn", "frobnicate(x)", "--at", "1")
        assert result.exit_code == 4
        assert "unknown operator" in result.output


class TestConstructions:
    """Tests for indicator and compile-piecewise."""

    def test_left_indicator(self) -> None:
        result = invoke("indicator", "left", "--b", "2", "--at", "1", "3")
        assert result.exit_code == 0
        assert "values: 1 0" in result.output
        assert "expr: " in result.output

    def test_point_indicator_with_negative_points(self) -> None:
        result = invoke("indicator", "point", "--a", "0.5", "--at", "0.5", "-0.5")
        assert result.exit_code == 0
        assert "values: 1 0" in result.output

    def test_empty_interval_is_usage_error(self) -> None:
        assert invoke("indicator", "open_interval", "--a", "1", "--b", "1").exit_code == 2

    def test_compile_relu(self, tmp_path: Path) -> None:
        path = write_config(
            tmp_path,
            "breakpoints: [0]\nvalues: [0]\npieces:\n  - coefficients: [0]\n  - coefficients: [0, 1]\n",
            "relu.yaml",
        )
        result = invoke("compile-piecewise", str(path), "--at", "-1", "0", "2.5")
        assert result.exit_code == 0
        assert "values: 0 0 2.5" in result.output

    def test_compile_invalid(self, tmp_path: Path) -> None:
        path = write_config(tmp_path, "breakpoints: [0]\npieces:\n  - coefficients: [1]\n", "bad.yaml")
        assert invoke("compile-piecewise", str(path)).exit_code == 3


class TestBaselines:
    """Tests for the baselines command."""

    def test_listing(self) -> None:
        result = invoke("baselines")
        assert result.exit_code == 0
        for name in ("relu", "selu", "prelu", "pau", "splash", "apl"):
            assert name in result.output

    def test_evaluate(self) -> None:
        result = invoke("baselines", "selu", "--at", "1")
        assert result.exit_code == 0
        assert "1.050700987" in result.output

    def test_unknown(self) -> None:
        result = invoke("baselines", "sine")
        assert result.exit_code == 2
        assert "Valid names" in result.output


class TestConfigErrors:
    """Configuration problems exit with code 3."""

    def test_missing_file(self, tmp_path: Path) -> None:
        assert invoke("-c", str(tmp_path / "missing.yaml"), "space-count").exit_code == 3

    def test_unknown_key(self, tmp_path: Path) -> None:
        path = write_config(tmp_path, "evolution:\n  population: 8\n")
        assert invoke("-c", str(path), "space-count").exit_code == 3

    def test_cross_field_rule(self, tmp_path: Path) -> None:
        path = write_config(tmp_path, "evolution:\n  P: 8\n  S: 16\n  C: 60\n")
        assert invoke("-c", str(path), "space-count").exit_code == 3

    def test_override_breaks_rule(self, tmp_path: Path, mocked_training: None) -> None:
        path = write_config(tmp_path, TOY_SEARCH)
        assert invoke("-c", str(path), "-o", str(tmp_path / "out"), "search", "--budget", "4").exit_code == 3


class TestSearch:
    """Tests for search with a mocked fitness function."""

    def run(self, tmp_path: Path, *extra: str, out: str = "out"):
        path = write_config(tmp_path, TOY_SEARCH)
        return invoke("-c", str(path), "-o", str(tmp_path / out), *extra, "search")

    def test_toy_search(self, tmp_path: Path, mocked_training: None) -> None:
        result = self.run(tmp_path)
        assert result.exit_code == 0
        out = tmp_path / "out"
        lines = (out / "history.jsonl").read_text().splitlines()
        assert len(lines) == 60
        assert [json.loads(line)["seq"] for line in lines] == list(range(60))

        meta = yaml.safe_load((out / "history.meta.yaml").read_text())
        assert meta["population_size"] == 8
        assert meta["config"]["evolution"]["budget"] == 60

        progress = read_csv(out / "progress.csv")
        assert len(progress) == 60
        assert progress["best_so_far"].is_monotonic_increasing

        ranked = read_csv(out / "rerank.csv")
        assert len(ranked) == 3
        assert list(ranked["rank"]) == [1, 2, 3]
        assert "Top functions after reranking" in (out / "report.txt").read_text()

    def test_refuses_to_overwrite(self, tmp_path: Path, mocked_training: None) -> None:
        assert self.run(tmp_path).exit_code == 0
        first = (tmp_path / "out" / "history.jsonl").read_bytes()
        result = self.run(tmp_path)
        assert result.exit_code == 6
        assert "--overwrite" in result.output

        assert self.run(tmp_path, "--overwrite").exit_code == 0
        assert (tmp_path / "out" / "history.jsonl").read_bytes() == first

    def test_random_search_mode(self, tmp_path: Path, mocked_training: None) -> None:
        path = write_config(tmp_path, TOY_SEARCH)
        result = invoke("-c", str(path), "-o", str(tmp_path / "out"), "search", "--mode", "random-search")
        assert result.exit_code == 0
        meta = yaml.safe_load((tmp_path / "out" / "history.meta.yaml").read_text())
        assert meta["evolution"]["population_size"] == 1
        assert meta["evolution"]["sample_size"] == 1
        assert meta["evolution"]["threshold"] == 0.0

    def test_no_params(self, tmp_path: Path, mocked_training: None) -> None:
        path = write_config(tmp_path, TOY_SEARCH)
        result = invoke("-c", str(path), "-o", str(tmp_path / "out"), "search", "--no-params")
        assert result.exit_code == 0
        records = [json.loads(line) for line in (tmp_path / "out" / "history.jsonl").read_text().splitlines()]
        assert all(record["k"] == 0 for record in records)

    def test_rerank_existing_history(self, tmp_path: Path, mocked_training: None) -> None:
        assert self.run(tmp_path).exit_code == 0
        history = tmp_path / "out" / "history.jsonl"
        result = invoke("-o", str(tmp_path / "again"), "rerank", str(history), "--keep", "2", "--runs", "1")
        assert result.exit_code == 0
        assert len(read_csv(tmp_path / "again" / "rerank.csv")) == 2


class TestStudies:
    """Commands that really train, on a tiny configuration."""

    def config(self, tmp_path: Path) -> Path:
        return write_config(tmp_path, TINY_TRAINING, "tiny.yaml")

    def test_train_fn(self, tmp_path: Path) -> None:
        result = invoke("-c", str(self.config(tmp_path)), "-o", str(tmp_path / "out"), "train-fn", "p0(tanh(x))")
        assert result.exit_code == 0
        curves = read_csv(tmp_path / "out" / "train_curves.csv")
        assert list(curves.columns) == ["epoch", "lr", "train_loss", "train_acc", "val_acc"]
        assert list(curves["epoch"]) == [0, 1, 2]
        trajectory = read_csv(tmp_path / "out" / "train_trajectory.csv")
        assert list(trajectory.columns) == ["epoch", "param_index", "layer", "mean_value"]
        assert len(trajectory) == 6
        assert sorted(set(trajectory["layer"].astype(str))) == ["0", "all"]

    def test_train_fn_strip_params(self, tmp_path: Path) -> None:
        args = ["-c", str(self.config(tmp_path)), "-o", str(tmp_path / "out")]
        result = invoke(*args, "train-fn", "p0(tanh(x))", "--strip-params", "--prefix", "stripped")
        assert result.exit_code == 0
        assert len(read_csv(tmp_path / "out" / "stripped_trajectory.csv")) == 0

    def test_train_fn_baseline(self, tmp_path: Path) -> None:
        args = ["-c", str(self.config(tmp_path)), "-o", str(tmp_path / "out")]
        assert invoke(*args, "train-fn", "prelu", "--baseline").exit_code == 0
        assert invoke(*args, "train-fn", "prelu", "--baseline", "--prefix", "other", "--scaled").exit_code == 0

    def test_cross_eval(self, tmp_path: Path) -> None:
        args = ["-c", str(self.config(tmp_path)), "-o", str(tmp_path / "out")]
        result = invoke(*args, "cross-eval", "relu(x)", "p0(tanh(x))")
        assert result.exit_code == 0
        frame = read_csv(tmp_path / "out" / "cross_eval.csv")
        assert len(frame) == 4
        assert set(frame["spec"]) == {"base", "wider_x2"}
        assert "General" in result.output

    def test_sample(self, tmp_path: Path) -> None:
        args = ["-c", str(self.config(tmp_path)), "-o", str(tmp_path / "out")]
        result = invoke(*args, "sample", "--n", "3", "--seed", "1")
        assert result.exit_code == 0
        frame = read_csv(tmp_path / "out" / "sample.csv")
        assert list(frame["index"]) == [0, 1, 2]

    def test_benchmark(self, tmp_path: Path) -> None:
        args = ["-c", str(self.config(tmp_path)), "-o", str(tmp_path / "out")]
        result = invoke(*args, "benchmark", "selu", "--expr", "p0(tanh(x))", "--seeds", "2")
        assert result.exit_code == 0
        frame = read_csv(tmp_path / "out" / "benchmark.csv")
        assert list(frame["name"]) == ["relu", "selu", "p0(tanh(x))"]
        assert frame.loc[0, "runs"] == 2


class TestCompareRuns:
    """Tests for compare-runs."""

    def test_two_runs(self, tmp_path: Path) -> None:
        for name, seed in (("a", 1), ("b", 2)):
            config = EvolutionConfig(population_size=8, sample_size=4, budget=40, threshold=0.3, seed=seed)
            write_history(tmp_path / name / "history.jsonl", evolve(config, mock_fitness))
        result = invoke(
            "-o",
            str(tmp_path / "out"),
            "compare-runs",
            str(tmp_path / "a" / "history.jsonl"),
            str(tmp_path / "b" / "history.jsonl"),
            "--reference",
            "0.5",
        )
        assert result.exit_code == 0
        summaries = read_csv(tmp_path / "out" / "runs.csv")
        assert list(summaries["name"]) == ["a", "b"]
        assert list(summaries["evaluations"]) == [40, 40]
        progress = read_csv(tmp_path / "out" / "runs_progress.csv")
        assert len(progress) == 80


class TestWork:
    """Tests for the work command."""

    def test_unreachable_coordinator(self, tmp_path: Path) -> None:
        path = write_config(tmp_path, "distrib:\n  connect_retries: 0\n  backoff_seconds: 0.01\n")
        result = invoke("-c", str(path), "work", "--coordinator", "127.0.0.1:1")
        assert result.exit_code == 7

    def test_bad_address(self) -> None:
        assert invoke("work", "--coordinator", "nowhere").exit_code == 2

    def test_rejected_worker_exits_with_protocol_code(self, tmp_path: Path) -> None:
        server = socket.create_server(("127.0.0.1", 0))
        server.settimeout(1.0)
        port = server.getsockname()[1]
        connections = []

        def reject_everyone() -> None:
            while True:
                try:
                    conn, _ = server.accept()
                except OSError:
                    return
                with conn:
                    conn.makefile("rb").readline()
                    conn.sendall(encode(Shutdown(reason="protocol version 0 rejected, 1 required", rejected=True)))
                connections.append(conn)

        thread = threading.Thread(target=reject_everyone, daemon=True)
        thread.start()
        path = write_config(tmp_path, "distrib:\n  connect_retries: 3\n  backoff_seconds: 0.01\n")
        try:
            result = invoke("-c", str(path), "work", "--coordinator", f"127.0.0.1:{port}")
            thread.join(timeout=5)
        finally:
            server.close()
        assert result.exit_code == 7
        assert len(connections) == 1
