"""Numeric classification data: CSV loading, per-feature sorted views, subsets.

A :class:`Dataset` is an immutable matrix of finite feature values plus dense
integer class labels.  Search code never copies the matrix; it works on
:class:`Subset` objects, which are sorted index vectors into the dataset
together with per-feature value-sorted views.  Keeping the sorted views on
every subset makes threshold enumeration and impurity scans linear passes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Raised for malformed input files or inconsistent dataset contents."""


@dataclass(frozen=True)
class Dataset:
    """Immutable numeric feature matrix with dense integer labels.

    Fields:
        values: (n, p) float64 matrix, all entries finite.
        labels: (n,) int64 vector with ids in [0, n_classes).
        label_names: original label strings, indexed by id.
        sorted_order: (p, n) int64 matrix; row f is a stable argsort of
            column f of ``values``.
    """

    values: np.ndarray
    labels: np.ndarray
    label_names: tuple[str, ...]
    sorted_order: np.ndarray = field(repr=False)

    @classmethod
    def from_arrays(
        cls,
        values: np.ndarray,
        labels: np.ndarray,
        label_names: tuple[str, ...] | None = None,
    ) -> "Dataset":
        values = np.ascontiguousarray(values, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        if values.ndim != 2 or values.shape[1] < 1:
            raise DataError("values must be a 2-d matrix with at least one feature")
        if labels.shape != (values.shape[0],):
            raise DataError("labels length must match the number of rows")
        if values.size and not np.isfinite(values).all():
            raise DataError("non-finite feature value")
        if labels.size and labels.min() < 0:
            raise DataError("negative label id")
        n_classes = int(labels.max()) + 1 if labels.size else 0
        if label_names is None:
            label_names = tuple(str(c) for c in range(n_classes))
        if len(label_names) < n_classes:
            raise DataError("label_names must cover every label id")
        order = np.stack(
            [np.argsort(values[:, f], kind="stable") for f in range(values.shape[1])]
        ).astype(np.int64)
        return cls(values, labels, tuple(label_names), order)

    @property
    def n_instances(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.label_names)

    def root_subset(self) -> "Subset":
        return Subset(self, np.arange(self.n_instances, dtype=np.int64), self.sorted_order)


class Subset:
    """A set of instance indices over a dataset, with per-feature sorted views.

    ``indices`` is ascending (canonical), ``order`` is a (p, k) matrix whose
    row f lists the member indices sorted by feature f.  Instances with a
    feature value equal to a split threshold route left (``x_f <= tau``).
    """

    __slots__ = ("data", "indices", "order")

    def __init__(self, data: Dataset, indices: np.ndarray, order: np.ndarray):
        self.data = data
        self.indices = indices
        self.order = order

    @classmethod
    def from_indices(cls, data: Dataset, indices: np.ndarray) -> "Subset":
        indices = np.unique(np.asarray(indices, dtype=np.int64))
        if indices.size and (indices[0] < 0 or indices[-1] >= data.n_instances):
            raise DataError("subset index out of range")
        member = np.zeros(data.n_instances, dtype=bool)
        member[indices] = True
        order = np.stack([row[member[row]] for row in data.sorted_order])
        return cls(data, indices, order)

    @property
    def size(self) -> int:
        return self.indices.size

    def __len__(self) -> int:
        return self.indices.size

    def key(self) -> bytes:
        """Canonical digest of the member set: equal sets give equal keys."""
        return self.indices.tobytes()

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.data.labels[self.indices], minlength=self.data.n_classes)

    def split_candidates(self, f: int) -> np.ndarray:
        """Candidate thresholds for feature f: midpoints of consecutive uniques.

        Empty when the feature is constant on this subset.  Midpoints that
        collapse onto a neighbouring value under floating point are dropped
        so that every returned threshold strictly separates instances.
        """
        if self.size == 0:
            raise DataError("split_candidates on empty subset")
        vals = self.data.values[self.order[f], f]
        lo = vals[:-1]
        hi = vals[1:]
        mids = (lo + hi) / 2.0
        keep = (lo < mids) & (mids < hi)
        return mids[keep]

    def partition(self, f: int, tau: float) -> tuple["Subset", "Subset"]:
        """Split into (x_f <= tau, x_f > tau); both sides must be non-empty."""
        go_left = self.data.values[self.indices, f] <= tau
        left_idx = self.indices[go_left]
        right_idx = self.indices[~go_left]
        if left_idx.size == 0 or right_idx.size == 0:
            raise DataError(f"degenerate split on feature {f} at {tau!r}")
        left_rows = []
        right_rows = []
        for row in self.order:
            side = self.data.values[row, f] <= tau
            left_rows.append(row[side])
            right_rows.append(row[~side])
        left = Subset(self.data, left_idx, np.stack(left_rows))
        right = Subset(self.data, right_idx, np.stack(right_rows))
        return left, right


def load_csv(
    path,
    has_header: bool | None = None,
    label_column: int = -1,
) -> Dataset:
    """Load a comma-separated numeric dataset with one label column.

    All non-label cells must parse as finite floats.  Labels may be numbers
    or strings; either way they are mapped to dense ids in first-appearance
    order, with the original text kept for serialization.  ``has_header=None``
    sniffs the first row: it is treated as a header when any feature cell
    does not parse as a number.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise DataError(f"{path}: empty file")
    width = len(rows[0])
    if width < 2:
        raise DataError(f"{path}: need at least one feature column and one label column")
    label_col = label_column if label_column >= 0 else width + label_column
    if not 0 <= label_col < width:
        raise DataError(f"{path}: label column {label_column} out of range")

    def feature_cells(row):
        return [c for j, c in enumerate(row) if j != label_col]

    if has_header is None:
        has_header = not _all_numeric(feature_cells(rows[0]))
    body = rows[1:] if has_header else rows
    if not body:
        raise DataError(f"{path}: no data rows")

    n, p = len(body), width - 1
    values = np.empty((n, p), dtype=np.float64)
    label_ids = np.empty(n, dtype=np.int64)
    names: list[str] = []
    id_of: dict[str, int] = {}
    for i, row in enumerate(body):
        rownum = i + (2 if has_header else 1)
        if len(row) != width:
            raise DataError(f"{path}: row {rownum} has {len(row)} cells, expected {width}")
        col = 0
        for j, cell in enumerate(row):
            text = cell.strip()
            if j == label_col:
                if text not in id_of:
                    id_of[text] = len(names)
                    names.append(text)
                label_ids[i] = id_of[text]
                continue
            try:
                v = float(text)
            except ValueError:
                raise DataError(f"{path}: row {rownum}, column {j + 1}: not a number: {text!r}") from None
            if not np.isfinite(v):
                raise DataError(f"{path}: row {rownum}, column {j + 1}: non-finite value {text!r}")
            values[i, col] = v
            col += 1
    return Dataset.from_arrays(values, label_ids, tuple(names))


def _all_numeric(cells) -> bool:
    for cell in cells:
        try:
            float(cell.strip())
        except ValueError:
            return False
    return True
