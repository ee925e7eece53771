"""Split-ordering heuristics and the greedy top-down baseline learner.

A single sorted scan per (subset, feature) produces, for every candidate
threshold, the prefix class counts on the left side.  From those counts we
derive both the weighted Gini gain used to rank features and thresholds and
the misclassification cost of a stump, so the same scan backs the search
heuristics, the exact depth-1 solver and the greedy baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Subset
from .tree import Leaf, ScoredTree, Split, leaf_best


def gini_impurity(counts) -> float:
    """1 - sum((c/N)^2); counts must sum to N >= 1."""
    counts = np.asarray(counts, dtype=np.float64)
    n = counts.sum()
    if n <= 0:
        raise ValueError("gini_impurity of an empty distribution")
    return float(1.0 - (counts / n) @ (counts / n))


@dataclass(frozen=True)
class FeatureScan:
    """Per-threshold statistics for one feature over one subset.

    thresholds[i] sits between consecutive unique values; ``left_counts[i]``
    are the class counts of instances routed left at that threshold.
    ``group_sizes`` holds the instance count of each unique value, so the
    number of instances strictly between thresholds i < j is
    ``group_sizes[i+1] + ... + group_sizes[j]``.
    ``order`` ranks threshold indices by descending gain (ties: lower index).
    """

    feature: int
    thresholds: np.ndarray
    left_counts: np.ndarray
    left_sizes: np.ndarray
    total_counts: np.ndarray
    group_sizes: np.ndarray
    gains: np.ndarray
    errors: np.ndarray
    order: np.ndarray

    @property
    def n_thresholds(self) -> int:
        return self.thresholds.size

    @property
    def best_gain(self) -> float:
        return float(self.gains[self.order[0]])

    def gap_counts(self) -> np.ndarray:
        """Instances strictly between consecutive thresholds (length m - 1)."""
        return self.group_sizes[1:-1]


def scan_feature(subset: Subset, f: int) -> FeatureScan | None:
    """Build the scan for feature f, or None when f is constant on subset."""
    row = subset.order[f]
    vals = subset.data.values[row, f]
    k = row.size
    lo, hi = vals[:-1], vals[1:]
    mids = (lo + hi) / 2.0
    keep = (lo < mids) & (mids < hi)
    bpos = np.flatnonzero(keep)  # split between positions bpos and bpos+1
    if bpos.size == 0:
        return None
    thresholds = mids[bpos]
    m = thresholds.size

    labs = subset.data.labels[row]
    c = subset.data.n_classes
    onehot = np.zeros((k, c), dtype=np.int64)
    onehot[np.arange(k), labs] = 1
    prefix = np.cumsum(onehot, axis=0)
    left_counts = prefix[bpos]
    total = prefix[-1]
    right_counts = total - left_counts
    left_n = bpos + 1
    right_n = k - left_n

    errors = (left_n - left_counts.max(axis=1)) + (right_n - right_counts.max(axis=1))

    def _gini(cnt, n):
        frac = cnt / n[:, None]
        return 1.0 - np.einsum("ij,ij->i", frac, frac)

    parent = gini_impurity(total)
    child = (left_n / k) * _gini(left_counts, left_n) + (right_n / k) * _gini(
        right_counts, right_n
    )
    gains = parent - child
    order = np.lexsort((np.arange(m), -gains))
    group_sizes = np.diff(np.concatenate(([0], left_n, [k])))
    return FeatureScan(
        feature=f,
        thresholds=thresholds,
        left_counts=left_counts,
        left_sizes=left_n,
        total_counts=total,
        group_sizes=group_sizes,
        gains=gains,
        errors=errors,
        order=order,
    )


def ranked_scans(subset: Subset) -> list[FeatureScan]:
    """Scans of all splittable features, best Gini gain first (ties: low index)."""
    scans = [s for f in range(subset.data.n_features) if (s := scan_feature(subset, f))]
    scans.sort(key=lambda s: (-s.best_gain, s.feature))
    return scans


def order_features(subset: Subset, depth: int | None = None) -> np.ndarray:
    """Permutation of all feature indices, best-first.

    Features whose split set is empty on this subset sort last, in index
    order.  ``depth`` is accepted for interface symmetry with the search but
    does not influence the Gini ranking.
    """
    del depth
    scans = ranked_scans(subset)
    splittable = [s.feature for s in scans]
    rest = [f for f in range(subset.data.n_features) if f not in set(splittable)]
    return np.array(splittable + rest, dtype=np.int64)


def order_splits(subset: Subset, f: int) -> np.ndarray:
    """Permutation of threshold indices of feature f, best gain first."""
    scan = scan_feature(subset, f)
    if scan is None:
        raise ValueError(f"feature {f} has no candidate splits on this subset")
    return scan.order


def _gain_ratio(scan: FeatureScan, k: int) -> np.ndarray:
    def entropy(cnt, n):
        frac = cnt / n[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(frac > 0, frac * np.log2(frac), 0.0)
        return -term.sum(axis=1)

    left_n = scan.left_sizes
    right_n = k - left_n
    right_counts = scan.total_counts - scan.left_counts
    parent = entropy(scan.total_counts[None, :], np.array([k]))[0]
    info = (
        parent
        - (left_n / k) * entropy(scan.left_counts, left_n)
        - (right_n / k) * entropy(right_counts, right_n)
    )
    pl, pr = left_n / k, right_n / k
    split_info = -(pl * np.log2(pl) + pr * np.log2(pr))
    return info / split_info


def greedy_tree(subset: Subset, depth: int, criterion: str = "gini") -> ScoredTree:
    """Classic top-down induction: best local split at each node, no lookahead.

    ``criterion`` is "gini" (weighted Gini gain) or "gain_ratio".  A node
    becomes a majority leaf when depth runs out, it is pure, or no feature
    can be split.
    """
    if criterion not in ("gini", "gain_ratio"):
        raise ValueError(f"unknown criterion {criterion!r}")
    tree, score = _greedy(subset, depth, criterion)
    return ScoredTree(tree, score)


def _greedy(subset: Subset, depth: int, criterion: str) -> tuple[Split | Leaf, int]:
    cost, label = leaf_best(subset)
    if depth == 0 or cost == 0:
        return Leaf(label), cost
    best = None  # (score_key, feature, threshold)
    for f in range(subset.data.n_features):
        scan = scan_feature(subset, f)
        if scan is None:
            continue
        vals = scan.gains if criterion == "gini" else _gain_ratio(scan, subset.size)
        w = int(np.lexsort((np.arange(vals.size), -vals))[0])
        key = (-float(vals[w]), f, w)
        if best is None or key < best[0]:
            best = (key, f, float(scan.thresholds[w]))
    if best is None:
        return Leaf(label), cost
    _, f, tau = best
    left, right = subset.partition(f, tau)
    ltree, lscore = _greedy(left, depth - 1, criterion)
    rtree, rscore = _greedy(right, depth - 1, criterion)
    return Split(f, tau, ltree, rtree), lscore + rscore
