"""Anytime-quality and generalization measurement.

The primal gap of an incumbent with score s against a reference optimum x is
0 when s = x and (s - x) / s otherwise; the primal function p(t) is 1 until
the first incumbent and then the gap of the current incumbent, and its
integral over a horizon summarises how good a solution one can expect when
interrupting at a random time.  Smaller is better.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, Subset
from .tree import DecisionTree, misclassification


def primal_gap(score: int, x_opt: int) -> float:
    """Relative gap in [0, 1]; 0/0 is defined as 0 (score 0 forces x_opt 0)."""
    if x_opt < 0 or score < x_opt:
        raise ValueError(f"inconsistent reference: score={score}, x_opt={x_opt}")
    if score == x_opt:
        return 0.0
    return (score - x_opt) / score


@dataclass(frozen=True)
class Trace:
    """Timestamped incumbent scores over a horizon, with a reference optimum.

    ``incumbents`` is a list of (elapsed seconds, score); times must be
    nondecreasing, scores strictly decreasing, and the reference must not
    exceed any score.
    """

    incumbents: tuple[tuple[float, int], ...]
    horizon: float
    reference: int

    def __post_init__(self):
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        prev_t, prev_s = -0.0, None
        for t, s in self.incumbents:
            if t < prev_t:
                raise ValueError("incumbent times must be nondecreasing")
            if prev_s is not None and s >= prev_s:
                raise ValueError("incumbent scores must be strictly decreasing")
            if s < self.reference:
                raise ValueError(f"score {s} below reference {self.reference}")
            prev_t, prev_s = t, s


@dataclass(frozen=True)
class PrimalReport:
    primal_integral: float
    avg_quality: float
    normalized_percent: float


def primal_integral(trace: Trace) -> PrimalReport:
    """Exact integral of the step function p(t) over [0, horizon]."""
    horizon = trace.horizon
    total = 0.0
    t_prev = 0.0
    gap_prev = 1.0
    for t, score in trace.incumbents:
        if t > horizon:
            break
        total += gap_prev * (t - t_prev)
        t_prev = t
        gap_prev = primal_gap(score, trace.reference)
    total += gap_prev * (horizon - t_prev)
    return PrimalReport(total, total / horizon, 100.0 * total / horizon)


def accuracy(tree: DecisionTree, subset: Subset) -> float:
    """Fraction of subset instances the tree labels correctly."""
    if subset.size == 0:
        raise ValueError("accuracy on empty subset")
    return 1.0 - misclassification(tree, subset) / subset.size


def kfold_split(dataset: Dataset, k: int, seed: int) -> list[tuple[Subset, Subset]]:
    """Seeded shuffle into k near-equal folds; returns (train, test) pairs."""
    n = dataset.n_instances
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > n:
        raise ValueError(f"k={k} exceeds dataset size {n}")
    perm = np.random.default_rng(seed).permutation(n)
    pairs = []
    for chunk in np.array_split(perm, k):
        test = np.sort(chunk)
        mask = np.ones(n, dtype=bool)
        mask[test] = False
        train = np.flatnonzero(mask)
        pairs.append(
            (Subset.from_indices(dataset, train), Subset.from_indices(dataset, test))
        )
    return pairs
