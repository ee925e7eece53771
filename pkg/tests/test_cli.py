"""Command-line behaviors: training, benchmarking, CV, trace scoring."""

from __future__ import annotations

import json

import numpy as np
import pytest

from conftest import synth_steps, write_csv
from ldstree.cli import main, primal_at_horizons, read_trace_csv, write_trace_csv


@pytest.fixture
def toy_csv(tmp_path):
    # separable at depth 1 on feature 0
    path = tmp_path / "toy.csv"
    rows = "\n".join(f"{v},{9 - v},{int(v > 3)}" for v in range(8))
    path.write_text(rows + "\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def noisy_csv(tmp_path):
    X, y = synth_steps(seed=3, n=60, p=3, flip=0.2)
    path = tmp_path / "noisy.csv"
    write_csv(path, X.round(0), y)  # coarse grid keeps proofs quick
    return str(path)


class TestTrain:
    def test_greedy_depth_zero_writes_single_leaf(self, toy_csv, tmp_path, capsys):
        out_tree = tmp_path / "tree.json"
        code = main(
            ["train", "--data", toy_csv, "--depth", "0", "--mode", "greedy",
             "--out-tree", str(out_tree)]
        )
        assert code == 0
        obj = json.loads(out_tree.read_text())
        assert set(obj["root"]) == {"leaf"}

    def test_solver_rejects_depth_zero(self, toy_csv, capsys):
        assert main(["train", "--data", toy_csv, "--depth", "0"]) == 2

    def test_greedy_writes_tree_and_trace(self, toy_csv, tmp_path, capsys):
        out_tree = tmp_path / "tree.json"
        out_trace = tmp_path / "trace.csv"
        code = main(
            ["train", "--data", toy_csv, "--depth", "1", "--mode", "greedy",
             "--out-tree", str(out_tree), "--out-trace", str(out_trace)]
        )
        assert code == 0
        obj = json.loads(out_tree.read_text())
        assert obj["depth_limit"] == 1
        assert "split" in obj["root"]
        rows = read_trace_csv(str(out_trace))
        assert len(rows) == 1

    def test_solver_run_reaches_zero_and_proves_it(self, toy_csv, tmp_path, capsys):
        out_trace = tmp_path / "trace.csv"
        code = main(
            ["train", "--data", toy_csv, "--depth", "1", "--out-trace", str(out_trace)]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "final_score=0" in out
        assert "optimal_proven=True" in out
        rows = read_trace_csv(str(out_trace))
        assert rows[-1][1] == 0
        scores = [s for _, s in rows]
        assert scores == sorted(scores, reverse=True)
        assert len(set(scores)) == len(scores)

    def test_missing_dataset_is_usage_error(self, capsys):
        code = main(["train", "--data", "/nope/missing.csv", "--depth", "2"])
        assert code == 2
        assert "no such file" in capsys.readouterr().err

    def test_greedy_rejects_solver_flags(self, toy_csv, capsys):
        code = main(
            ["train", "--data", toy_csv, "--depth", "1", "--mode", "greedy",
             "--schedule", "linear"]
        )
        assert code == 2
        assert "does not apply" in capsys.readouterr().err

    def test_reruns_are_deterministic(self, noisy_csv, tmp_path, capsys):
        traces = []
        for name in ("a.csv", "b.csv"):
            out_trace = tmp_path / name
            assert main(
                ["train", "--data", noisy_csv, "--depth", "3",
                 "--out-trace", str(out_trace)]
            ) == 0
            traces.append([s for _, s in read_trace_csv(str(out_trace))])
        assert traces[0] == traces[1]


class TestPrimalCommand:
    def test_worked_example(self, tmp_path, capsys):
        trace = tmp_path / "trace.csv"
        write_trace_csv(str(trace), [(0, 2.0, 10, 0, 0), (1, 6.0, 5, 1, 0)])
        code = main(["primal", "--trace", str(trace), "--x-opt", "5", "--horizon", "10"])
        assert code == 0
        out = capsys.readouterr().out
        assert "primal_integral=4.000000" in out
        assert "normalized_percent=40.0000" in out

    def test_empty_trace_integrates_to_horizon(self, tmp_path, capsys):
        trace = tmp_path / "trace.csv"
        write_trace_csv(str(trace), [])
        assert main(["primal", "--trace", str(trace), "--x-opt", "0", "--horizon", "7.5"]) == 0
        assert "primal_integral=7.500000" in capsys.readouterr().out

    def test_reference_above_best_score_fails(self, tmp_path, capsys):
        trace = tmp_path / "trace.csv"
        write_trace_csv(str(trace), [(0, 1.0, 4, 0, 0)])
        code = main(["primal", "--trace", str(trace), "--x-opt", "9", "--horizon", "10"])
        assert code == 1

    def test_malformed_trace_fails(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("elapsed,score\n1,2\n", encoding="utf-8")
        assert main(["primal", "--trace", str(bad), "--x-opt", "0", "--horizon", "1"]) == 1


class TestPrefixSemantics:
    def test_smaller_horizon_uses_only_earlier_incumbents(self):
        rows = [(0.5, 10), (6.0, 5)]
        reports = primal_at_horizons(rows, x_opt=5, horizons=[5.0, 15.0])
        assert reports[5.0].primal_integral == pytest.approx(0.5 + 0.5 * 4.5)
        assert reports[15.0].primal_integral == pytest.approx(0.5 + 0.5 * 5.5)


class TestBench:
    def test_compares_methods_and_writes_report(self, noisy_csv, tmp_path, capsys):
        report = tmp_path / "report.csv"
        code = main(
            ["bench", "--data", noisy_csv, "--depth", "2",
             "--mode", "ca-contree", "--mode", "dfs-full", "--mode", "greedy",
             "--time-limit", "20", "--horizons", "2,20",
             "--out-report", str(report)]
        )
        assert code == 0
        text = report.read_text()
        lines = text.strip().splitlines()
        assert lines[0].startswith("dataset,method,horizon_s")
        assert len(lines) == 1 + 3 * 2
        out = capsys.readouterr().out
        assert "x_opt=" in out

        # greedy's single early incumbent makes its normalized value flat
        import csv as _csv

        rows = list(_csv.DictReader(text.splitlines()))
        greedy = {float(r["horizon_s"]): float(r["normalized_percent"])
                  for r in rows if r["method"] == "greedy"}
        values = list(greedy.values())
        assert values[0] == pytest.approx(values[1], abs=1.0)

    def test_requires_time_limit(self, noisy_csv, capsys):
        code = main(["bench", "--data", noisy_csv, "--depth", "2"])
        assert code == 2


class TestCv:
    def test_deterministic_fold_accuracies(self, noisy_csv, capsys):
        outputs = []
        for _ in range(2):
            assert main(
                ["cv", "--data", noisy_csv, "--depth", "2", "--folds", "3",
                 "--seed", "11", "--time-limit", "10"]
            ) == 0
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]
        assert "mean_test_accuracy=" in outputs[0]

    def test_fold_count_validated(self, noisy_csv, capsys):
        assert main(
            ["cv", "--data", noisy_csv, "--depth", "2", "--folds", "100"]
        ) == 2

    def test_greedy_cv_runs(self, noisy_csv, capsys):
        assert main(
            ["cv", "--data", noisy_csv, "--depth", "2", "--folds", "3",
             "--mode", "greedy"]
        ) == 0
        out = capsys.readouterr().out
        assert out.count("fold ") == 3
