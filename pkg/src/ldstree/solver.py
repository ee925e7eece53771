"""Anytime exact search for depth-limited decision trees on numeric features.

The engine repeats a depth-first search under two discrepancy budgets: one
limiting how far feature choices may deviate from the Gini ranking, one
limiting threshold choices, both consumed cumulatively along a root-to-leaf
path.  Budgets grow between iterations according to a schedule, so early
iterations stay near the heuristic descent and later ones widen out; an
iteration that finishes without ever hitting a budget limit proves
optimality.  Nodes whose remaining depth is two are finished by an exact
depth-2 subsolver, subproblem results are memoised by (instance set,
remaining depth), and neighbouring thresholds are pruned through a
similarity bound on the optima of overlapping instance sets.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .dataset import Dataset, Subset
from .heuristics import FeatureScan, ranked_scans, scan_feature
from .tree import DecisionTree, Leaf, ScoredTree, Split, leaf_best, misclassification

INF = math.inf

SCHEDULE_KINDS = ("linear", "exponential", "diagonal")
PRUNING_MODES = ("paper", "conservative")


class Budget(NamedTuple):
    """Nonnegative discrepancy allowances for feature and threshold choices."""

    feat_disc: int
    split_disc: int

    def dominates(self, other: "Budget") -> bool:
        return self.feat_disc >= other.feat_disc and self.split_disc >= other.split_disc


def next_budget(current: Budget, schedule: str) -> Budget:
    """Successor of a budget pair under the given schedule kind.

    linear bumps both, exponential doubles both (from at least 1), and
    diagonal sweeps pairs in nondecreasing order of their sum, feature budget
    falling within each anti-diagonal: (0,0), (1,0), (0,1), (2,0), (1,1), ...
    """
    a, b = current
    if schedule == "linear":
        return Budget(a + 1, b + 1)
    if schedule == "exponential":
        return Budget(max(1, 2 * a), max(1, 2 * b))
    if schedule == "diagonal":
        if a > 0:
            return Budget(a - 1, b + 1)
        return Budget(a + b + 1, 0)
    raise ValueError(f"unknown schedule {schedule!r}")


@dataclass
class Schedule:
    """A schedule kind plus its iteration state."""

    kind: str = "diagonal"
    current: Budget = Budget(0, 0)
    iteration: int = 0

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule {self.kind!r}")

    def advance(self) -> Budget:
        self.current = next_budget(self.current, self.kind)
        self.iteration += 1
        return self.current


def slb(theta_old: int, removed: int) -> int:
    """Lower bound on the optimum after removing ``removed`` instances.

    Every kept instance may become correct and every removed one was at worst
    an error, so the optimum can drop by at most the number of removals.
    """
    if theta_old < 0 or removed < 0:
        raise ValueError("slb arguments must be nonnegative")
    return max(0, theta_old - removed)


def neighborhood_prune(
    pruned: np.ndarray,
    w: int,
    theta_w: int,
    ub: float,
    mode: str,
    move_counts: np.ndarray,
    theta_exact: bool = True,
) -> bool:
    """Mark thresholds near w as pruned; returns True if any neighbour was.

    ``pruned`` is indexed by threshold index and updated in place;
    ``move_counts[j]`` is the number of instances strictly between thresholds
    j and j+1.  In "paper" mode all indices within max(1, theta_w - ub) of w
    are dropped.  In "conservative" mode a neighbour k is dropped only when
    the instances moved between w and k number fewer than theta_w - ub (so
    the similarity bound puts k's optimum above ub) and theta_w itself is an
    exact optimum; otherwise only w is marked visited.
    """
    m = pruned.size
    if mode == "paper":
        gap = theta_w - ub
        delta = 1 if gap < 1 else int(gap)
        lo = max(0, w - delta)
        hi = min(m, w + delta + 1)
        pruned[lo:hi] = True
        return hi - lo > 1
    if mode != "conservative":
        raise ValueError(f"unknown pruning mode {mode!r}")
    pruned[w] = True
    if not theta_exact or not np.isfinite(ub):
        return False
    margin = theta_w - ub
    any_neighbor = False
    moved = 0
    for k in range(w + 1, m):
        moved += int(move_counts[k - 1])
        if moved >= margin:
            break
        pruned[k] = True
        any_neighbor = True
    moved = 0
    for k in range(w - 1, -1, -1):
        moved += int(move_counts[k])
        if moved >= margin:
            break
        pruned[k] = True
        any_neighbor = True
    return any_neighbor


@dataclass
class CacheEntry:
    """Memoised result for one (instance set, remaining depth) subproblem.

    ``exact`` means the score is that subproblem's optimum (under the active
    pruning mode's guarantees), in which case the entry answers any request.
    Otherwise it answers requests whose budgets are componentwise no larger
    and whose upper bound is no larger than ``upper_bound_used``: such a
    request would have searched a subset of what this entry saw.
    """

    score: int
    tree: DecisionTree
    exact: bool
    exhausted: bool
    budgets: Budget
    upper_bound_used: float


class Cache:
    """Subproblem memo keyed by (instance-set digest, remaining depth)."""

    def __init__(self):
        self._entries: dict[tuple[bytes, int], CacheEntry] = {}
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._entries)

    def lookup(
        self, key: bytes, depth: int, requested: Budget | None, ub: float = INF
    ) -> CacheEntry | None:
        entry = self._entries.get((key, depth))
        if entry is None:
            self.misses += 1
            return None
        if entry.exact:
            self.hits += 1
            return entry
        if (
            requested is not None
            and entry.budgets.dominates(requested)
            and ub <= entry.upper_bound_used
        ):
            self.hits += 1
            return entry
        self.misses += 1
        return None

    def store(self, key: bytes, depth: int, entry: CacheEntry) -> None:
        slot = (key, depth)
        old = self._entries.get(slot)
        if old is None or self._dominates(entry, old):
            self._entries[slot] = entry

    @staticmethod
    def _dominates(new: CacheEntry, old: CacheEntry) -> bool:
        if new.exact != old.exact:
            return new.exact
        if new.exact:
            return new.score < old.score
        if new.budgets.dominates(old.budgets) and new.upper_bound_used >= old.upper_bound_used:
            return True
        return False


@dataclass
class SearchConfig:
    """Knobs for one search run.

    ``upper_bound_init`` must be a valid upper bound on the optimal score
    (or infinity); the optimality flag is only meaningful under that
    contract.  ``time_limit`` is in seconds, None meaning unlimited.
    ``full_budget_start`` begins at budgets large enough that the first
    iteration is already exhaustive (a plain heuristic-ordered DFS).
    """

    depth: int
    time_limit: float | None = None
    schedule: str = "diagonal"
    pruning_mode: str = "paper"
    cache_enabled: bool = True
    upper_bound_init: float = INF
    full_budget_start: bool = False
    audit_discrepancies: bool = False

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.schedule not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.pruning_mode not in PRUNING_MODES:
            raise ValueError(f"unknown pruning mode {self.pruning_mode!r}")


@dataclass(frozen=True)
class Incumbent:
    elapsed: float
    score: int
    budgets: Budget
    iteration: int


@dataclass
class SolveResult:
    best: ScoredTree
    optimal_proven: bool
    trace: list[Incumbent]
    iterations_completed: int
    nodes_expanded: int


class NodeResult(NamedTuple):
    score: int
    tree: DecisionTree
    exhausted: bool  # a budget limit cut off work somewhere beneath
    exact: bool      # score is provably the subproblem optimum


class _Timeout(Exception):
    pass


class Solver:
    """Single-threaded search over one dataset (or training subset).

    One instance owns one cache and one incumbent trace; run :meth:`solve`
    once.  The incumbent callback fires synchronously from the search and
    must not block.
    """

    def __init__(
        self,
        data: Dataset | Subset,
        config: SearchConfig,
        on_incumbent: Callable[[Incumbent], None] | None = None,
    ):
        self.root = data.root_subset() if isinstance(data, Dataset) else data
        if self.root.size == 0:
            raise ValueError("cannot train on an empty dataset")
        self.config = config
        self.on_incumbent = on_incumbent
        self.cache = Cache() if config.cache_enabled else None
        self.nodes_expanded = 0
        self.iterations_completed = 0
        # (feature discrepancies, split discrepancies, iteration budgets)
        # spent on the path to each evaluated split, when auditing is on
        self.audit: list[tuple[int, int, Budget]] = []
        self._best_score: float = INF
        self._best_tree: DecisionTree | None = None
        self._trace: list[Incumbent] = []
        self._t0 = 0.0
        self._deadline: float | None = None
        self._budgets = Budget(0, 0)
        self._iteration = 0

    # ------------------------------------------------------------------ run

    def solve(self) -> SolveResult:
        cfg = self.config
        self._t0 = time.perf_counter()
        if cfg.time_limit is not None:
            self._deadline = self._t0 + cfg.time_limit

        root = self.root
        leaf_cost, leaf_label = leaf_best(root)
        scans = ranked_scans(root)
        max_m = max((s.n_thresholds for s in scans), default=0)
        caps = Budget(
            cfg.depth * max(0, root.data.n_features - 1),
            cfg.depth * max(0, max_m - 1),
        )
        self._budgets = caps if cfg.full_budget_start else Budget(0, 0)
        self._record(leaf_cost, Leaf(leaf_label))

        optimal = leaf_cost == 0 or max_m == 0
        if not optimal:
            ub = cfg.upper_bound_init
            budgets = self._budgets
            ran: set[Budget] = set()
            try:
                while True:
                    effective = Budget(
                        min(budgets.feat_disc, caps.feat_disc),
                        min(budgets.split_disc, caps.split_disc),
                    )
                    if effective not in ran:
                        ran.add(effective)
                        self._budgets = effective
                        result = self.ct(
                            root,
                            cfg.depth,
                            ub,
                            effective.feat_disc,
                            effective.split_disc,
                            at_root=True,
                        )
                        self.iterations_completed += 1
                        self._iteration += 1
                        ub = min(ub, result.score)
                        if self._best_score == 0 or not result.exhausted:
                            optimal = True
                            break
                    budgets = next_budget(budgets, cfg.schedule)
            except _Timeout:
                optimal = False

        tree = self._best_tree
        assert tree is not None
        best = ScoredTree(tree, int(self._best_score))
        assert misclassification(tree, root) == best.score
        return SolveResult(
            best=best,
            optimal_proven=optimal,
            trace=list(self._trace),
            iterations_completed=self.iterations_completed,
            nodes_expanded=self.nodes_expanded,
        )

    # -------------------------------------------------------------- search

    def ct(
        self,
        subset: Subset,
        d: int,
        ub: float,
        feat_disc: int,
        split_disc: int,
        at_root: bool = False,
        _spent: tuple[int, int] = (0, 0),
    ) -> NodeResult:
        """Best tree of depth <= d on subset within the discrepancy budgets.

        Walks features in heuristic order; position ``it`` costs ``it``
        feature discrepancies, cutting off once the budget goes negative.
        """
        self._tick()
        leaf_cost, leaf_label = leaf_best(subset)
        if d == 0 or leaf_cost == 0:
            return NodeResult(leaf_cost, Leaf(leaf_label), False, True)

        requested = Budget(feat_disc, split_disc)
        ub_in = ub
        key = subset.key() if self.cache is not None else b""
        if self.cache is not None:
            entry = self.cache.lookup(key, d, requested, ub)
            if entry is not None:
                return NodeResult(entry.score, entry.tree, entry.exhausted, entry.exact)

        best_score: int = leaf_cost
        best_tree: DecisionTree = Leaf(leaf_label)
        exhausted = False
        floor = INF  # least ub under which a non-exact event occurred
        for it, scan in enumerate(ranked_scans(subset)):
            if feat_disc - it < 0:
                exhausted = True
                break
            result = self.branch(
                subset,
                d,
                scan.feature,
                ub,
                feat_disc - it,
                split_disc,
                at_root=at_root,
                _scan=scan,
                _leaf=(leaf_cost, leaf_label),
                _spent=(_spent[0] + it, _spent[1]),
            )
            exhausted = exhausted or result.exhausted
            if not result.exact:
                floor = min(floor, ub)
            if result.score < best_score:
                best_score, best_tree = result.score, result.tree
                ub = min(ub, result.score)
                if best_score == 0:
                    exhausted = False
                    break

        exact = best_score == 0 or (not exhausted and best_score <= floor)
        if self.cache is not None:
            self.cache.store(
                key,
                d,
                CacheEntry(best_score, best_tree, exact, exhausted, requested, ub_in),
            )
        return NodeResult(best_score, best_tree, exhausted, exact)

    def branch(
        self,
        subset: Subset,
        d: int,
        f: int,
        ub: float,
        feat_disc: int,
        split_disc: int,
        at_root: bool = False,
        _scan: FeatureScan | None = None,
        _leaf: tuple[int, int] | None = None,
        _spent: tuple[int, int] = (0, 0),
    ) -> NodeResult:
        """Best split of feature f on subset within the split budget.

        Thresholds are visited in heuristic order; position ``it`` costs
        ``it`` split discrepancies.  Remaining depth two dispatches to the
        exact depth-2 subsolver; after each evaluated split, nearby
        thresholds are pruned by the similarity bound.
        """
        self._tick()
        scan = _scan if _scan is not None else scan_feature(subset, f)
        if scan is None:
            raise ValueError(f"feature {f} has no candidate splits on this subset")
        leaf_cost, leaf_label = _leaf if _leaf is not None else leaf_best(subset)

        m = scan.n_thresholds
        order = scan.order
        pruned = np.zeros(m, dtype=bool)
        move_counts = scan.gap_counts()
        mode = self.config.pruning_mode

        best_score: int = leaf_cost
        best_tree: DecisionTree = Leaf(leaf_label)
        exhausted = False
        floor = INF
        for it in range(m):
            disc = split_disc - it
            if disc < 0:
                exhausted = True
                break
            w = int(order[it])
            if pruned[w]:
                continue
            self._tick()
            tau = float(scan.thresholds[w])
            if self.config.audit_discrepancies:
                self.audit.append((_spent[0], _spent[1] + it, self._budgets))
            if d == 2:
                score_l, tree_l, score_r, tree_r = self._d2split_at(subset, f, tau)
                children_exact = True
            else:
                left, right = subset.partition(f, tau)
                spent = (_spent[0], _spent[1] + it)
                res_l = self.ct(left, d - 1, ub, feat_disc, disc, _spent=spent)
                res_r = self.ct(right, d - 1, ub - res_l.score, feat_disc, disc, _spent=spent)
                exhausted = exhausted or res_l.exhausted or res_r.exhausted
                children_exact = res_l.exact and res_r.exact
                score_l, tree_l = res_l.score, res_l.tree
                score_r, tree_r = res_r.score, res_r.tree
            if not children_exact:
                floor = min(floor, ub)
            theta_w = score_l + score_r
            if theta_w < best_score:
                best_score = theta_w
                best_tree = Split(f, tau, tree_l, tree_r)
                ub = min(ub, theta_w)
                if at_root:
                    self._record(theta_w, best_tree)
                if best_score == 0:
                    exhausted = False
                    break
            if neighborhood_prune(pruned, w, theta_w, ub, mode, move_counts, children_exact):
                if mode == "conservative":
                    floor = min(floor, ub)

        exact = best_score == 0 or (not exhausted and best_score <= floor)
        return NodeResult(best_score, best_tree, exhausted, exact)

    # ------------------------------------------------------------- depth 2

    def d2split(self, subset: Subset, f: int, w: int) -> tuple[int, DecisionTree, int, DecisionTree]:
        """Exact optimal depth-1 subtrees on both sides of split (f, w).

        ``w`` indexes the subset's candidate thresholds for f.  Results do
        not depend on any budget.
        """
        thresholds = subset.split_candidates(f)
        return self._d2split_at(subset, f, float(thresholds[w]))

    def _d2split_at(self, subset: Subset, f: int, tau: float):
        left, right = subset.partition(f, tau)
        score_l, tree_l = self._best_depth1(left)
        score_r, tree_r = self._best_depth1(right)
        return score_l, tree_l, score_r, tree_r

    def _best_depth1(self, subset: Subset) -> tuple[int, DecisionTree]:
        """Exact best tree of depth <= 1: a leaf or the best single stump."""
        leaf_cost, leaf_label = leaf_best(subset)
        if leaf_cost == 0:
            return leaf_cost, Leaf(leaf_label)
        key = subset.key() if self.cache is not None else b""
        if self.cache is not None:
            entry = self.cache.lookup(key, 1, None)
            if entry is not None:
                return entry.score, entry.tree
        self._tick()
        best_err = leaf_cost
        best: tuple[int, int] | None = None  # (feature, threshold idx)
        for f in range(subset.data.n_features):
            scan = scan_feature(subset, f)
            if scan is None:
                continue
            w = int(np.argmin(scan.errors))
            err = int(scan.errors[w])
            if err < best_err:
                best_err = err
                best = (f, w)
        if best is None:
            tree: DecisionTree = Leaf(leaf_label)
        else:
            f, w = best
            scan = scan_feature(subset, f)
            assert scan is not None
            left_counts = scan.left_counts[w]
            right_counts = scan.total_counts - left_counts
            tree = Split(
                f,
                float(scan.thresholds[w]),
                Leaf(int(np.argmax(left_counts))),
                Leaf(int(np.argmax(right_counts))),
            )
        if self.cache is not None:
            self.cache.store(key, 1, CacheEntry(best_err, tree, True, False, Budget(0, 0), INF))
        return best_err, tree

    # ------------------------------------------------------------- helpers

    def _record(self, score: int, tree: DecisionTree) -> None:
        if score >= self._best_score:
            return
        self._best_score = score
        self._best_tree = tree
        inc = Incumbent(
            elapsed=time.perf_counter() - self._t0,
            score=int(score),
            budgets=self._budgets,
            iteration=self._iteration,
        )
        self._trace.append(inc)
        if self.on_incumbent is not None:
            self.on_incumbent(inc)

    def _tick(self) -> None:
        self.nodes_expanded += 1
        if self._deadline is not None and time.perf_counter() > self._deadline:
            raise _Timeout


def solve(
    data: Dataset | Subset,
    config: SearchConfig,
    on_incumbent: Callable[[Incumbent], None] | None = None,
) -> SolveResult:
    """Run one full anytime search; see :class:`Solver`."""
    return Solver(data, config, on_incumbent).solve()
