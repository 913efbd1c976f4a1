"""Brute-force k-nearest-neighbour classification and classification metrics."""
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DatasetError

DISTANCES = ("euclidean",)


@dataclass(frozen=True)
class KnnConfig:
    k: int = 5
    distance: str = "euclidean"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1 or self.k % 2 == 0:
            raise ValueError(f"k must be a positive odd integer, got {self.k}")
        if self.distance not in DISTANCES:
            raise ValueError(f"unsupported distance {self.distance!r}")


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    confusion: np.ndarray
    classes: tuple

    def as_dict(self):
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "classes": list(self.classes),
            "confusion": self.confusion.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["accuracy"], d["precision"], d["recall"], d["f1"],
            np.array(d["confusion"], dtype=int), tuple(d["classes"]),
        )


def encode_labels(labels, classes=None):
    """Map labels to integer codes over ``classes`` (sorted distinct labels by
    default). Returns ``(codes, classes)``."""
    labels = np.asarray(labels, dtype=object)
    if classes is None:
        classes = sorted(set(labels))
    lookup = {c: i for i, c in enumerate(classes)}
    return np.array([lookup[v] for v in labels], dtype=int), list(classes)


def sq_distances(train_x, query_x):
    """Squared euclidean distances, shape (n_queries, n_train)."""
    return cdist(query_x, train_x, "sqeuclidean")


def nearest_k(dist, k):
    """Indices of the ``k`` smallest entries per row, nearest first, equal
    distances ordered by column index. Same result as the first ``k`` columns
    of a stable argsort, without sorting whole rows."""
    kth = np.partition(dist, k - 1, axis=1)[:, k - 1 : k]
    below = dist < kth
    at = dist == kth
    room = k - below.sum(axis=1)
    chosen = below | at
    crowded = np.flatnonzero(at.sum(axis=1) > room)
    if crowded.size:
        sub = at[crowded]
        chosen[crowded] = below[crowded] | (sub & (np.cumsum(sub, axis=1) <= room[crowded, None]))
    cols = np.nonzero(chosen)[1].reshape(dist.shape[0], k)
    order = np.argsort(np.take_along_axis(dist, cols, axis=1), axis=1, kind="stable")
    return np.take_along_axis(cols, order, axis=1)


def vote(neighbor_codes, n_classes):
    """Majority label per row of ``neighbor_codes`` (columns ordered nearest
    first). Among tied labels the one whose first neighbor is nearest wins, which
    is the nearest neighbor's label whenever that label is tied."""
    q, k = neighbor_codes.shape
    counts = np.zeros((q, n_classes), dtype=int)
    np.add.at(counts, (np.repeat(np.arange(q), k), neighbor_codes.ravel()), 1)
    best = counts.max(axis=1, keepdims=True)
    is_best = np.take_along_axis(counts, neighbor_codes, axis=1) == best
    first = is_best.argmax(axis=1)
    return neighbor_codes[np.arange(q), first]


def classify_codes(train_x, train_codes, query_x, k, n_classes):
    """Array-level k-NN. Distance ties resolve to the lower training row."""
    if train_x.shape[1] != query_x.shape[1]:
        raise DatasetError(
            f"feature dimension mismatch: train {train_x.shape[1]}, queries {query_x.shape[1]}"
        )
    if k > train_x.shape[0]:
        raise ValueError(f"k={k} exceeds the {train_x.shape[0]} training rows")
    dist = sq_distances(train_x, query_x)
    nearest = nearest_k(dist, k)
    return vote(train_codes[nearest], n_classes)


def knn_classify(train, queries, config=KnnConfig()):
    """Predict a label for every row of ``queries`` from the ``train`` dataset."""
    codes, classes = encode_labels(train.labels)
    pred = classify_codes(train.features, codes, queries.features, config.k, len(classes))
    return np.array([classes[c] for c in pred], dtype=object)


def score(predicted, truth, positive_class=None):
    """Accuracy plus precision/recall/F1.

    With two classes the latter are computed for ``positive_class`` (default:
    the last of the sorted labels). With more classes they are macro averages
    over the labels present in either vector. Undefined ratios count as 0.
    """
    predicted = np.asarray(predicted, dtype=object)
    truth = np.asarray(truth, dtype=object)
    if predicted.shape != truth.shape:
        raise ValueError(f"length mismatch: {predicted.shape[0]} predictions, {truth.shape[0]} truths")
    if truth.size == 0:
        raise ValueError("cannot score empty vectors")
    classes = sorted(set(truth) | set(predicted))
    t, _ = encode_labels(truth, classes)
    p, _ = encode_labels(predicted, classes)
    confusion = np.zeros((len(classes), len(classes)), dtype=int)
    np.add.at(confusion, (t, p), 1)
    accuracy = float(np.trace(confusion) / confusion.sum())

    tp = np.diag(confusion).astype(float)
    pred_pos = confusion.sum(axis=0)
    true_pos = confusion.sum(axis=1)
    prec = np.divide(tp, pred_pos, out=np.zeros_like(tp), where=pred_pos > 0)
    rec = np.divide(tp, true_pos, out=np.zeros_like(tp), where=true_pos > 0)
    denom = prec + rec
    f1 = np.divide(2 * prec * rec, denom, out=np.zeros_like(tp), where=denom > 0)

    if len(classes) <= 2 and len(set(truth)) <= 2:
        if positive_class is None:
            positive_class = classes[-1]
        if positive_class not in classes:
            raise ValueError(f"positive class {positive_class!r} not among labels")
        i = classes.index(positive_class)
        precision, recall, f1_score = prec[i], rec[i], f1[i]
    else:
        precision, recall, f1_score = prec.mean(), rec.mean(), f1.mean()
    return Metrics(accuracy, float(precision), float(recall), float(f1_score), confusion, tuple(classes))
