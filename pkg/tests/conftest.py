"""Shared fixtures: random instance generator and synthetic benchmark files."""

from __future__ import annotations

import numpy as np
import pytest

from ldstree import Dataset


def random_instance(seed: int, max_n: int = 40, max_unique: int = 8):
    """A small random classification instance (X, y, n_classes).

    Features draw from small value alphabets (1..max_unique uniques, so
    constant features occur); labels mix threshold structure with noise to
    keep the optima nontrivial.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, max_n + 1))
    p = int(rng.integers(1, 4))
    X = np.empty((n, p))
    for f in range(p):
        u = int(rng.integers(1, max_unique + 1))
        pool = np.round(rng.normal(0.0, 10.0, size=24), 2)
        vals = rng.choice(pool, size=u, replace=False)
        X[:, f] = rng.choice(vals, size=n)
    n_classes = int(rng.integers(2, 4))
    y = rng.integers(0, n_classes, size=n)
    if rng.random() < 0.7:
        f = int(rng.integers(0, p))
        rule = (X[:, f] <= np.median(X[:, f])).astype(int)
        if p >= 2 and rng.random() < 0.5:
            f2 = int(rng.integers(0, p))
            rule = (rule.astype(bool) ^ (X[:, f2] <= np.median(X[:, f2]))).astype(int)
        keep_noise = rng.random(n) < 0.2
        y = np.where(keep_noise, y, rule % n_classes)
    _, y = np.unique(y, return_inverse=True)
    return X, y.astype(np.int64), int(y.max()) + 1


def make_dataset(X, y) -> Dataset:
    return Dataset.from_arrays(np.asarray(X, dtype=float), np.asarray(y))


def synth_blobs(seed: int, n: int, p: int, n_classes: int, spread: float = 2.2):
    """Gaussian class blobs with overlap plus uninformative noise features."""
    rng = np.random.default_rng(seed)
    informative = max(2, p - 2)
    centers = rng.normal(0.0, spread, size=(n_classes, informative))
    y = rng.integers(0, n_classes, size=n)
    X = np.empty((n, p))
    X[:, :informative] = centers[y] + rng.normal(0.0, 1.0, size=(n, informative))
    X[:, informative:] = rng.normal(0.0, 1.0, size=(n, p - informative))
    return np.round(X, 3), y.astype(np.int64)


def synth_steps(seed: int, n: int, p: int, flip: float = 0.12):
    """Piecewise threshold logic over two features with label noise."""
    rng = np.random.default_rng(seed)
    X = np.round(rng.uniform(0.0, 10.0, size=(n, p)), 3)
    y = ((X[:, 0] > 3.4).astype(int) + (X[:, 1 % p] > 6.1).astype(int)) % 2
    noise = rng.random(n) < flip
    y = np.where(noise, 1 - y, y)
    return X, y.astype(np.int64)


def synth_rings(seed: int, n: int, p: int, flip: float = 0.08):
    """Radial two-class structure; axis-aligned splits need depth to track it."""
    rng = np.random.default_rng(seed)
    X = np.round(rng.normal(0.0, 1.2, size=(n, p)), 3)
    radius = np.sqrt((X[:, :2] ** 2).sum(axis=1))
    y = (radius > 1.25).astype(int)
    noise = rng.random(n) < flip
    y = np.where(noise, 1 - y, y)
    return X, y.astype(np.int64)


def write_csv(path, X, y) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row, label in zip(X, y):
            fh.write(",".join(repr(float(v)) for v in row) + f",{int(label)}\n")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "skipped"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call" and outcome != "skipped":
                continue
            if "test_acceptance" in report.nodeid:
                name = report.nodeid.split("::")[-1]
                lines.append((name, outcome.upper()))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, outcome in sorted(set(lines)):
            terminalreporter.write_line(f"{outcome:7s} {name}")


@pytest.fixture(scope="session")
def bench_csvs(tmp_path_factory):
    """Three deterministic desk-scale CSV datasets for benchmark runs."""
    root = tmp_path_factory.mktemp("benchdata")
    files = {}
    for name, (X, y) in {
        "blobs": synth_blobs(seed=7, n=900, p=6, n_classes=3),
        "steps": synth_steps(seed=11, n=1000, p=5),
        "rings": synth_rings(seed=13, n=800, p=5),
    }.items():
        path = root / f"{name}.csv"
        write_csv(path, X, y)
        files[name] = str(path)
    return files
