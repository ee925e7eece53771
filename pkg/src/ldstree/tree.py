"""Depth-limited binary decision trees: evaluation and JSON serialization.

Trees are immutable values: a node is either a :class:`Leaf` holding a class
id or a :class:`Split` holding (feature, threshold) and two subtrees.  An
instance routes left when its feature value is <= the threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import numpy as np

from .dataset import Subset


class TreeFormatError(ValueError):
    """Raised when tree JSON cannot be decoded."""


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "DecisionTree"
    right: "DecisionTree"


DecisionTree = Union[Leaf, Split]


@dataclass(frozen=True)
class ScoredTree:
    """A tree together with its training misclassification count."""

    tree: DecisionTree
    score: int


def tree_depth(tree: DecisionTree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(tree_depth(tree.left), tree_depth(tree.right))


def predict(tree: DecisionTree, x) -> int:
    """Class id of the leaf reached by x (ties on the threshold go left)."""
    node = tree
    while isinstance(node, Split):
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.label


def misclassification(tree: DecisionTree, subset: Subset) -> int:
    """Number of subset instances whose routed leaf label differs from y."""
    return _count_errors(tree, subset.data.values, subset.data.labels, subset.indices)


def _count_errors(tree, values, labels, idx) -> int:
    if idx.size == 0:
        return 0
    if isinstance(tree, Leaf):
        return int(np.count_nonzero(labels[idx] != tree.label))
    go_left = values[idx, tree.feature] <= tree.threshold
    return _count_errors(tree.left, values, labels, idx[go_left]) + _count_errors(
        tree.right, values, labels, idx[~go_left]
    )


def leaf_best(subset: Subset) -> tuple[int, int]:
    """(cost, label) of the best single leaf: majority class, lowest id on ties."""
    if subset.size == 0:
        raise ValueError("leaf_best on empty subset")
    counts = subset.class_counts()
    label = int(np.argmax(counts))
    return subset.size - int(counts[label]), label


def to_json(tree: DecisionTree, depth_limit: int, class_names=None) -> str:
    """Serialize to the wire schema: {"depth_limit": d, "root": node}.

    Leaf labels are written as the original label strings when
    ``class_names`` is given, otherwise as the decimal class id.
    """
    return json.dumps({"depth_limit": depth_limit, "root": _node_obj(tree, class_names)})


def _node_obj(tree, class_names):
    if isinstance(tree, Leaf):
        name = class_names[tree.label] if class_names is not None else str(tree.label)
        return {"leaf": {"label": name}}
    return {
        "split": {
            "feature": tree.feature,
            "threshold": tree.threshold,
            "left": _node_obj(tree.left, class_names),
            "right": _node_obj(tree.right, class_names),
        }
    }


def from_json(text: str, class_names=None) -> tuple[DecisionTree, int]:
    """Inverse of :func:`to_json`; returns (tree, depth_limit).

    Without ``class_names`` leaf labels must be decimal class ids.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TreeFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "root" not in obj or "depth_limit" not in obj:
        raise TreeFormatError("expected object with 'depth_limit' and 'root'")
    lookup = None
    if class_names is not None:
        lookup = {name: i for i, name in enumerate(class_names)}
    return _node_from_obj(obj["root"], lookup), int(obj["depth_limit"])


def _node_from_obj(obj, lookup):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise TreeFormatError(f"malformed node: {obj!r}")
    kind, body = next(iter(obj.items()))
    if kind == "leaf":
        if "label" not in body:
            raise TreeFormatError("leaf node missing 'label'")
        raw = body["label"]
        if lookup is not None:
            if raw not in lookup:
                raise TreeFormatError(f"unknown class label {raw!r}")
            return Leaf(lookup[raw])
        try:
            return Leaf(int(raw))
        except (TypeError, ValueError):
            raise TreeFormatError(
                f"label {raw!r} is not a class id; pass class_names to decode"
            ) from None
    if kind == "split":
        for key in ("feature", "threshold", "left", "right"):
            if key not in body:
                raise TreeFormatError(f"split node missing {key!r}")
        return Split(
            int(body["feature"]),
            float(body["threshold"]),
            _node_from_obj(body["left"], lookup),
            _node_from_obj(body["right"], lookup),
        )
    raise TreeFormatError(f"unknown node kind {kind!r}")
