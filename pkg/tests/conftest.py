import sys
from pathlib import Path

import numpy as np
import pytest

from aapso.dataset import Dataset

DATA_DIR = Path(__file__).resolve().parents[1] / "data"


def make_dataset(features, labels, names=None):
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = features[:, None]
    if names is None:
        names = [f"f{i}" for i in range(features.shape[1])]
    return Dataset(features, labels, names)


def brute_force_knn(train_x, train_y, query, k):
    """Independent oracle: plain Python distances, stable sort, majority vote,
    vote ties to the label met first in neighbour order."""
    dists = []
    for i, row in enumerate(train_x):
        dists.append((sum((a - b) ** 2 for a, b in zip(row, query)), i))
    dists.sort()
    labels = [train_y[i] for _, i in dists[:k]]
    counts = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    top = max(counts.values())
    return next(lab for lab in labels if counts[lab] == top)


def informative_dataset(n=200, n_informative=5, n_noise=20, seed=0):
    """Class is ``sum(informative) > n_informative / 2``; the remaining columns
    are independent uniform noise. Informative columns come first."""
    rng = np.random.default_rng(seed)
    informative = rng.random((n, n_informative))
    noise = rng.random((n, n_noise))
    labels = np.where(informative.sum(axis=1) > n_informative / 2, "pos", "neg")
    names = [f"inf{i}" for i in range(n_informative)] + [f"noise{i}" for i in range(n_noise)]
    return Dataset(np.hstack([informative, noise]), labels, names)


@pytest.fixture
def write_csv(tmp_path):
    def _write(text, name="data.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
