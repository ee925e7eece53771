"""Command-line frontend: train, benchmark, cross-validate, score traces.

Exit codes: 0 success, 1 runtime failure, 2 usage error.  Trace files are
CSV with header ``iter,elapsed_ms,score,feat_disc,split_disc`` (one row per
incumbent); trees are written as JSON in the schema of :mod:`ldstree.tree`.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import metrics, tree as tree_mod
from .dataset import DataError, Dataset, Subset, load_csv
from .heuristics import greedy_tree
from .solver import Budget, SearchConfig, solve

MODES = ("ca-contree", "dfs-full", "greedy")

TRACE_HEADER = ["iter", "elapsed_ms", "score", "feat_disc", "split_disc"]


class UsageError(Exception):
    pass


# --------------------------------------------------------------- running


def run_learner(
    data: Dataset | Subset,
    mode: str,
    depth: int,
    time_limit: float | None,
    schedule: str = "diagonal",
    pruning: str = "paper",
    cache: bool = True,
):
    """Train one model; returns (scored_tree, trace_rows, optimal_proven, elapsed).

    Trace rows are (iteration, elapsed_seconds, score, feat_disc, split_disc).
    """
    t0 = time.perf_counter()
    if mode == "greedy":
        root = data.root_subset() if isinstance(data, Dataset) else data
        scored = greedy_tree(root, depth)
        elapsed = time.perf_counter() - t0
        return scored, [(0, elapsed, scored.score, 0, 0)], False, elapsed
    config = SearchConfig(
        depth=depth,
        time_limit=time_limit,
        schedule=schedule,
        pruning_mode=pruning,
        cache_enabled=cache,
        full_budget_start=(mode == "dfs-full"),
    )
    result = solve(data, config)
    elapsed = time.perf_counter() - t0
    rows = [
        (inc.iteration, inc.elapsed, inc.score, inc.budgets.feat_disc, inc.budgets.split_disc)
        for inc in result.trace
    ]
    return result.best, rows, result.optimal_proven, elapsed


def write_trace_csv(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for iteration, elapsed, score, fd, sd in rows:
            writer.writerow([iteration, f"{elapsed * 1000.0:.3f}", score, fd, sd])


def read_trace_csv(path) -> list[tuple[float, int]]:
    """(elapsed_seconds, score) pairs from a trace file."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != TRACE_HEADER:
            raise DataError(f"{path}: not a trace file (bad header)")
        out = []
        for row in reader:
            if len(row) != len(TRACE_HEADER):
                raise DataError(f"{path}: malformed trace row {row!r}")
            out.append((float(row[1]) / 1000.0, int(row[2])))
    return out


def primal_at_horizons(
    rows: list[tuple[float, int]], x_opt: int, horizons: list[float]
) -> dict[float, metrics.PrimalReport]:
    """Primal reports for several horizons from one trace, by prefix truncation."""
    out = {}
    for horizon in horizons:
        prefix = tuple((t, s) for t, s in rows if t <= horizon)
        out[horizon] = metrics.primal_integral(
            metrics.Trace(prefix, horizon, x_opt)
        )
    return out


# ------------------------------------------------------------ subcommands


def cmd_train(args) -> int:
    dataset = _load(args.data)
    scored, rows, optimal, elapsed = run_learner(
        dataset,
        args.mode,
        args.depth,
        args.time_limit,
        schedule=args.schedule,
        pruning=args.pruning,
        cache=args.cache,
    )
    print(
        f"final_score={scored.score} elapsed={elapsed:.3f}s "
        f"optimal_proven={optimal} mode={args.mode} depth={args.depth}"
    )
    if args.out_tree:
        with open(args.out_tree, "w", encoding="utf-8") as fh:
            fh.write(tree_mod.to_json(scored.tree, args.depth, dataset.label_names))
        print(f"tree written to {args.out_tree}")
    if args.out_trace:
        write_trace_csv(args.out_trace, rows)
        print(f"trace written to {args.out_trace}")
    return 0


def _bench_worker(task):
    data_path, mode, depth, time_limit, schedule, pruning, cache = task
    dataset = load_csv(data_path)
    scored, rows, optimal, _ = run_learner(
        dataset, mode, depth, time_limit, schedule=schedule, pruning=pruning, cache=cache
    )
    return {
        "data": data_path,
        "mode": mode,
        "rows": [(t, s) for _, t, s, _, _ in rows],
        "final_score": scored.score,
        "optimal_proven": optimal,
    }


def cmd_bench(args) -> int:
    horizons = args.horizons or [args.time_limit]
    if args.time_limit is None:
        raise UsageError("bench requires --time-limit")
    tasks = [
        (path, mode, args.depth, args.time_limit, args.schedule, args.pruning, args.cache)
        for path in args.data
        for mode in args.mode
    ]
    for path in args.data:
        _require_file(path)
    results = list(_pmap(_bench_worker, tasks, args.jobs))

    table_rows = []
    by_dataset: dict[str, list[dict]] = {}
    for res in results:
        by_dataset.setdefault(res["data"], []).append(res)
    for path, runs in by_dataset.items():
        x_opt = min(r["final_score"] for r in runs)
        print(f"\ndataset={path} x_opt={x_opt} (best over compared methods)")
        header = "method".ljust(12) + "".join(f"{h:>10.0f}s" for h in horizons)
        print(header)
        for r in runs:
            reports = primal_at_horizons(r["rows"], x_opt, horizons)
            cells = "".join(f"{reports[h].normalized_percent:>11.2f}" for h in horizons)
            print(r["mode"].ljust(12) + cells)
            for h in horizons:
                table_rows.append(
                    {
                        "dataset": path,
                        "method": r["mode"],
                        "horizon_s": h,
                        "primal_integral": reports[h].primal_integral,
                        "normalized_percent": reports[h].normalized_percent,
                        "final_score": r["final_score"],
                        "optimal_proven": r["optimal_proven"],
                        "x_opt": x_opt,
                    }
                )
    if args.out_report:
        with open(args.out_report, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(table_rows[0].keys()))
            writer.writeheader()
            writer.writerows(table_rows)
        print(f"\nreport written to {args.out_report}")
    return 0


def _cv_worker(task):
    data_path, k, seed, fold, mode, depth, time_limit, schedule, pruning, cache = task
    dataset = load_csv(data_path)
    train, test = metrics.kfold_split(dataset, k, seed)[fold]
    scored, _, _, _ = run_learner(
        train, mode, depth, time_limit, schedule=schedule, pruning=pruning, cache=cache
    )
    return fold, scored.score, metrics.accuracy(scored.tree, test)


def cmd_cv(args) -> int:
    _require_file(args.data)
    dataset = load_csv(args.data)  # validates early; workers re-read
    if args.folds > dataset.n_instances:
        raise UsageError(f"--folds {args.folds} exceeds dataset size")
    tasks = [
        (
            args.data,
            args.folds,
            args.seed,
            fold,
            args.mode,
            args.depth,
            args.time_limit,
            args.schedule,
            args.pruning,
            args.cache,
        )
        for fold in range(args.folds)
    ]
    accuracies = []
    for fold, train_score, acc in sorted(_pmap(_cv_worker, tasks, args.jobs)):
        accuracies.append(acc)
        print(f"fold {fold + 1}/{args.folds}: train_score={train_score} test_accuracy={acc:.4f}")
    print(f"mean_test_accuracy={sum(accuracies) / len(accuracies):.4f}")
    return 0


def cmd_primal(args) -> int:
    _require_file(args.trace)
    rows = read_trace_csv(args.trace)
    report = metrics.primal_integral(
        metrics.Trace(tuple((t, s) for t, s in rows if t <= args.horizon), args.horizon, args.x_opt)
    )
    print(f"primal_integral={report.primal_integral:.6f}")
    print(f"avg_quality={report.avg_quality:.6f}")
    print(f"normalized_percent={report.normalized_percent:.4f}")
    return 0


# ---------------------------------------------------------------- helpers


def _pmap(fn, tasks, jobs):
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _load(path) -> Dataset:
    _require_file(path)
    return load_csv(path)


def _require_file(path) -> None:
    if not os.path.isfile(path):
        raise UsageError(f"no such file: {path}")


def _str_bool(text: str) -> bool:
    if text in ("on", "true", "1"):
        return True
    if text in ("off", "false", "0"):
        return False
    raise argparse.ArgumentTypeError(f"expected on|off, got {text!r}")


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _add_common(p, multi_mode=False):
    p.add_argument("--depth", type=int, required=True, help="maximum tree depth")
    if multi_mode:
        p.add_argument("--mode", action="append", choices=MODES, default=None, help="repeatable")
    else:
        p.add_argument("--mode", choices=MODES, default="ca-contree")
    p.add_argument("--time-limit", type=_positive_float, default=None, metavar="SECONDS")
    p.add_argument("--schedule", choices=("linear", "exponential", "diagonal"), default=None)
    p.add_argument("--pruning", choices=("paper", "conservative"), default=None)
    p.add_argument("--cache", type=_str_bool, default=None, metavar="{on,off}")
    p.add_argument("--seed", type=int, default=0)


def _resolve_solver_flags(args) -> None:
    """Fill solver-flag defaults; reject solver flags on greedy-only runs."""
    modes = args.mode if isinstance(args.mode, list) else [args.mode]
    greedy_only = all(m == "greedy" for m in modes)
    if greedy_only:
        for flag in ("schedule", "pruning", "cache"):
            if getattr(args, flag) is not None:
                raise UsageError(f"--{flag} does not apply to greedy mode")
    if args.depth < 0 or (args.depth < 1 and not greedy_only):
        raise UsageError(f"--depth {args.depth} is not valid for mode {'/'.join(modes)}")
    if args.schedule is None:
        args.schedule = "diagonal"
    if args.pruning is None:
        args.pruning = "paper"
    if args.cache is None:
        args.cache = True


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ldstree",
        description="Anytime exact depth-limited decision trees on numeric features.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit one tree and write tree/trace files")
    p.add_argument("--data", required=True)
    _add_common(p)
    p.add_argument("--out-tree", default=None, metavar="PATH")
    p.add_argument("--out-trace", default=None, metavar="PATH")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bench", help="compare methods by normalized primal integral")
    p.add_argument("--data", action="append", required=True, help="repeatable")
    _add_common(p, multi_mode=True)
    p.add_argument("--horizons", type=lambda s: [float(x) for x in s.split(",")], default=None)
    p.add_argument("--out-report", default=None, metavar="PATH")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("cv", help="k-fold cross-validated test accuracy")
    p.add_argument("--data", required=True)
    _add_common(p)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("primal", help="primal-integral report from a trace CSV")
    p.add_argument("--trace", required=True)
    p.add_argument("--x-opt", type=int, required=True)
    p.add_argument("--horizon", type=_positive_float, required=True)
    p.set_defaults(func=cmd_primal)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bench" and args.mode is None:
            args.mode = ["ca-contree"]
        if args.command in ("train", "bench", "cv"):
            _resolve_solver_flags(args)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
