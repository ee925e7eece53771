"""Tree evaluation, majority leaves, JSON round-trips."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_dataset, random_instance
from ldstree import (
    Leaf,
    Split,
    Subset,
    TreeFormatError,
    from_json,
    leaf_best,
    misclassification,
    predict,
    to_json,
    tree_depth,
)


@pytest.fixture
def stump():
    return Split(0, 1.5, Leaf(0), Leaf(1))


class TestPredict:
    def test_leaf_predicts_its_label(self):
        assert predict(Leaf(0), [123.0]) == 0

    def test_routing(self, stump):
        assert predict(stump, [1.0]) == 0
        assert predict(stump, [2.0]) == 1

    def test_boundary_goes_left(self, stump):
        assert predict(stump, [1.5]) == 0


class TestMisclassification:
    def test_majority_leaf(self):
        ds = make_dataset([[1.0], [2.0], [3.0]], [0, 0, 1])
        assert misclassification(Leaf(0), ds.root_subset()) == 1

    def test_perfect_tree(self, stump):
        ds = make_dataset([[1.0], [2.0]], [0, 1])
        assert misclassification(stump, ds.root_subset()) == 0

    def test_empty_subset(self):
        ds = make_dataset([[1.0]], [0])
        empty = Subset.from_indices(ds, np.array([], dtype=int))
        assert misclassification(Leaf(0), empty) == 0

    def test_additive_over_disjoint_subsets(self, stump):
        for seed in range(10):
            X, y, _ = random_instance(seed)
            ds = make_dataset(X, y)
            idx = np.arange(ds.n_instances)
            a = Subset.from_indices(ds, idx[: len(idx) // 2])
            b = Subset.from_indices(ds, idx[len(idx) // 2 :])
            whole = misclassification(stump, ds.root_subset())
            assert whole == misclassification(stump, a) + misclassification(stump, b)


class TestLeafBest:
    def test_majority(self):
        ds = make_dataset([[1.0], [2.0], [3.0]], [0, 0, 1])
        assert leaf_best(ds.root_subset()) == (1, 0)

    def test_pure(self):
        ds = make_dataset([[1.0], [2.0], [3.0]], [1, 1, 1])
        assert leaf_best(ds.root_subset()) == (0, 1)

    def test_tie_breaks_to_lowest_class_id(self):
        ds = make_dataset([[1.0], [2.0]], [0, 1])
        assert leaf_best(ds.root_subset()) == (1, 0)

    def test_cost_matches_counts(self):
        for seed in range(15):
            X, y, _ = random_instance(seed)
            root = make_dataset(X, y).root_subset()
            cost, label = leaf_best(root)
            counts = root.class_counts()
            assert cost == root.size - counts.max()
            assert counts[label] == counts.max()
            assert cost == misclassification(Leaf(label), root)


def _tree_strategy(depth=3, p=3):
    leaf = st.builds(Leaf, st.integers(0, 3))

    def extend(children):
        return st.builds(
            Split,
            st.integers(0, p - 1),
            st.floats(-100, 100, allow_nan=False),
            children,
            children,
        )

    return st.recursive(leaf, extend, max_leaves=2**depth)


class TestSerialization:
    def test_leaf_schema_uses_original_label(self):
        text = to_json(Leaf(0), 0, class_names=("cat", "dog"))
        assert '"leaf"' in text and '"cat"' in text
        tree, depth_limit = from_json(text, class_names=("cat", "dog"))
        assert tree == Leaf(0) and depth_limit == 0

    @settings(max_examples=60, deadline=None)
    @given(_tree_strategy())
    def test_round_trip_identity(self, tree):
        text = to_json(tree, 3)
        back, depth_limit = from_json(text)
        assert back == tree
        assert depth_limit == 3
        assert tree_depth(back) == tree_depth(tree)

    def test_truncated_json_rejected(self):
        with pytest.raises(TreeFormatError, match="invalid JSON"):
            from_json('{"depth_limit": 1, "root": {"leaf"')

    def test_unknown_node_kind_rejected(self):
        with pytest.raises(TreeFormatError, match="unknown node kind"):
            from_json('{"depth_limit": 1, "root": {"bud": {}}}')

    def test_missing_field_rejected(self):
        with pytest.raises(TreeFormatError, match="missing"):
            from_json('{"depth_limit": 1, "root": {"split": {"feature": 0}}}')

    def test_unknown_label_rejected(self):
        with pytest.raises(TreeFormatError, match="unknown class label"):
            from_json('{"depth_limit": 0, "root": {"leaf": {"label": "emu"}}}', ("cat",))

    def test_threshold_floats_round_trip_exactly(self):
        tree = Split(0, 0.1 + 0.2, Leaf(0), Leaf(1))
        back, _ = from_json(to_json(tree, 1))
        assert back.threshold == tree.threshold
