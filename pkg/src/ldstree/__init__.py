"""Anytime exact learning of depth-limited decision trees on numeric features."""

from .dataset import DataError, Dataset, Subset, load_csv
from .heuristics import gini_impurity, greedy_tree, order_features, order_splits
from .metrics import PrimalReport, Trace, accuracy, kfold_split, primal_gap, primal_integral
from .solver import (
    Budget,
    Cache,
    CacheEntry,
    Incumbent,
    Schedule,
    SearchConfig,
    SolveResult,
    Solver,
    neighborhood_prune,
    next_budget,
    slb,
    solve,
)
from .tree import (
    DecisionTree,
    Leaf,
    ScoredTree,
    Split,
    TreeFormatError,
    from_json,
    leaf_best,
    misclassification,
    predict,
    to_json,
    tree_depth,
)

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "Cache",
    "CacheEntry",
    "DataError",
    "Dataset",
    "DecisionTree",
    "Incumbent",
    "Leaf",
    "PrimalReport",
    "Schedule",
    "ScoredTree",
    "SearchConfig",
    "SolveResult",
    "Solver",
    "Split",
    "Subset",
    "Trace",
    "TreeFormatError",
    "accuracy",
    "from_json",
    "gini_impurity",
    "greedy_tree",
    "kfold_split",
    "leaf_best",
    "load_csv",
    "misclassification",
    "neighborhood_prune",
    "next_budget",
    "order_features",
    "order_splits",
    "predict",
    "primal_gap",
    "primal_integral",
    "slb",
    "solve",
    "to_json",
    "tree_depth",
]
