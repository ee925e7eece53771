#!/usr/bin/env python3
"""Download the UCI datasets used by the benchmark examples into data/.

Requires network access and the ``ucimlrepo`` package::

    pip install ucimlrepo pandas
    python scripts/fetch_uci_datasets.py [data_dir]

Writes one CSV per dataset (features first, label in the last column), the
layout ``ldstree`` loads directly.  The slow acceptance check that compares
cross-validated accuracy on raisin runs only when data/raisin.csv exists.
"""

from __future__ import annotations

import sys
from pathlib import Path

# UCI ML Repository catalogue ids
DATASETS = {
    "raisin": 850,
    "banknote": 267,
    "wilt": 285,
}


def main() -> int:
    try:
        from ucimlrepo import fetch_ucirepo
    except ImportError:
        print("pip install ucimlrepo pandas   # then re-run", file=sys.stderr)
        return 1
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "data"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, uci_id in DATASETS.items():
        print(f"fetching {name} (uci id {uci_id})...")
        repo = fetch_ucirepo(id=uci_id)
        features = repo.data.features
        targets = repo.data.targets
        frame = features.copy()
        frame["__label__"] = targets.iloc[:, 0]
        path = out_dir / f"{name}.csv"
        frame.to_csv(path, index=False, header=False)
        print(f"  wrote {path} ({len(frame)} rows, {features.shape[1]} features)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
