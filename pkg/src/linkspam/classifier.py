"""Cost-sensitive decision tree and confusion-matrix metrics.

Labels are 1 for spam and 0 for non-spam throughout. Strings ``"spam"`` /
``"nonspam"`` and booleans are accepted wherever labels come in.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TextIO, Union

import numpy as np

from .errors import InvalidInputError

DEFAULT_COST_RATIOS = (1, 10, 20, 30, 50)
METRIC_NAMES = ("tpr", "fpr", "precision", "f1")


def to_binary(label) -> int | None:
    """Map a label to 1 (spam), 0 (non-spam) or None (unknown)."""
    if label is None:
        return None
    if isinstance(label, str):
        key = label.strip().lower().replace("-", "").replace("_", "")
        if key == "spam":
            return 1
        if key in ("nonspam", "ham", "normal"):
            return 0
        if key in ("", "unknown", "undecided"):
            return None
        raise InvalidInputError(f"unrecognized label {label!r}")
    if isinstance(label, (bool, np.bool_)):
        return int(label)
    if label in (0, 1):
        return int(label)
    raise InvalidInputError(f"labels must be binary, got {label!r}")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are the true label, columns the prediction.

    ``x`` non-spam/non-spam, ``y`` non-spam predicted spam,
    ``z`` spam predicted non-spam, ``w`` spam/spam.
    """

    x: int = 0
    y: int = 0
    z: int = 0
    w: int = 0

    def __post_init__(self):
        if min(self.x, self.y, self.z, self.w) < 0:
            raise InvalidInputError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.x + self.y + self.z + self.w

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.x + other.x, self.y + other.y, self.z + other.z, self.w + other.w)


@dataclass(frozen=True)
class Metrics:
    # None marks a ratio whose denominator is zero
    tpr: float | None
    fpr: float | None
    precision: float | None
    f1: float | None

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def _ratio(num, den):
    return num / den if den else None


def metrics(cm: ConfusionMatrix) -> Metrics:
    tpr = _ratio(cm.w, cm.z + cm.w)
    fpr = _ratio(cm.y, cm.y + cm.x)
    precision = _ratio(cm.w, cm.y + cm.w)
    f1 = None
    if tpr is not None and precision is not None:
        f1 = _ratio(2 * precision * tpr, precision + tpr)
    return Metrics(tpr, fpr, precision, f1)


def evaluate(predictions: Sequence, truth: Sequence) -> ConfusionMatrix:
    """Tally predictions against truth; instances with unknown truth are skipped."""
    if len(predictions) != len(truth):
        raise InvalidInputError(f"{len(predictions)} predictions vs {len(truth)} truth labels")
    x = y = z = w = 0
    for p, t in zip(predictions, truth):
        t = to_binary(t)
        if t is None:
            continue
        p = to_binary(p)
        if p is None:
            raise InvalidInputError("prediction missing for a labelled instance")
        if t == 0:
            if p == 0:
                x += 1
            else:
                y += 1
        elif p == 0:
            z += 1
        else:
            w += 1
    return ConfusionMatrix(x, y, z, w)


@dataclass(frozen=True)
class Leaf:
    label: int
    counts: tuple[int, int]  # (non-spam, spam)


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "Node"
    right: "Node"
    counts: tuple[int, int]


Node = Union[Leaf, Split]


@dataclass(frozen=True)
class CostTree:
    root: Node
    n_features: int
    cost_ratio: float
    max_depth: int
    min_leaf_size: int

    def depth(self) -> int:
        def walk(node):
            if isinstance(node, Leaf):
                return 0
            return 1 + max(walk(node.left), walk(node.right))
        return walk(self.root)

    def to_dict(self) -> dict:
        def enc(node):
            if isinstance(node, Leaf):
                return {"type": "leaf", "label": node.label, "counts": list(node.counts)}
            return {
                "type": "split",
                "feature": node.feature,
                "threshold": node.threshold,
                "counts": list(node.counts),
                "left": enc(node.left),
                "right": enc(node.right),
            }
        return {
            "n_features": self.n_features,
            "cost_ratio": self.cost_ratio,
            "max_depth": self.max_depth,
            "min_leaf_size": self.min_leaf_size,
            "root": enc(self.root),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "CostTree":
        def dec(node):
            if node["type"] == "leaf":
                return Leaf(int(node["label"]), tuple(node["counts"]))
            return Split(int(node["feature"]), float(node["threshold"]),
                         dec(node["left"]), dec(node["right"]), tuple(node["counts"]))
        return cls(dec(doc["root"]), int(doc["n_features"]), float(doc["cost_ratio"]),
                   int(doc["max_depth"]), int(doc["min_leaf_size"]))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _gini(w_neg: float, w_pos: float) -> float:
    total = w_neg + w_pos
    if total <= 0:
        return 0.0
    p = w_pos / total
    q = w_neg / total
    return 1.0 - p * p - q * q


def _leaf_label(w_neg: float, w_pos: float) -> int:
    return 1 if w_pos >= w_neg else 0


def _best_split(X, y, weights, min_leaf_size):
    n, n_feat = X.shape
    w_pos_total = float(weights[y == 1].sum())
    w_neg_total = float(weights[y == 0].sum())
    total = w_pos_total + w_neg_total
    parent = _gini(w_neg_total, w_pos_total)
    best = None  # (impurity, feature, threshold)
    for f in range(n_feat):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        pos = np.cumsum(np.where(y[order] == 1, weights[order], 0.0))
        neg = np.cumsum(np.where(y[order] == 0, weights[order], 0.0))
        for i in range(min_leaf_size - 1, n - min_leaf_size):
            if xs[i] == xs[i + 1]:
                continue
            wl_pos, wl_neg = float(pos[i]), float(neg[i])
            wr_pos, wr_neg = w_pos_total - wl_pos, w_neg_total - wl_neg
            wl, wr = wl_pos + wl_neg, wr_pos + wr_neg
            imp = (wl * _gini(wl_neg, wl_pos) + wr * _gini(wr_neg, wr_pos)) / total
            if best is None or imp < best[0]:
                best = (imp, f, (float(xs[i]) + float(xs[i + 1])) / 2.0)
    if best is None or not best[0] < parent - 1e-12:
        return None
    return best[1], best[2]


def train(
    X,
    y,
    cost_ratio: float = 1.0,
    max_depth: int = 8,
    min_leaf_size: int = 5,
) -> CostTree:
    """Grow a binary tree minimizing instance-weighted Gini impurity.

    Spam instances weigh ``cost_ratio``, non-spam instances weigh 1.
    Candidate thresholds are midpoints between consecutive distinct values
    and each child must keep at least ``min_leaf_size`` instances. A leaf
    predicts the heavier class; equal weight goes to spam.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] == 0:
        raise InvalidInputError("cannot train on empty data")
    labels = np.array([to_binary(v) for v in y], dtype=object)
    if len(labels) != X.shape[0]:
        raise InvalidInputError(f"{len(labels)} labels for {X.shape[0]} rows")
    if any(v is None for v in labels):
        raise InvalidInputError("labels must be binary spam/non-spam")
    labels = labels.astype(int)
    if cost_ratio < 1:
        raise InvalidInputError(f"cost_ratio must be >= 1, got {cost_ratio}")
    if max_depth < 0 or min_leaf_size < 1:
        raise InvalidInputError("max_depth must be >= 0 and min_leaf_size >= 1")
    weights = np.where(labels == 1, float(cost_ratio), 1.0)

    def grow(idx, depth):
        yy = labels[idx]
        counts = (int((yy == 0).sum()), int((yy == 1).sum()))
        leaf = Leaf(_leaf_label(float(counts[0]), cost_ratio * counts[1]), counts)
        if depth >= max_depth or 0 in counts or len(idx) < 2 * min_leaf_size:
            return leaf
        found = _best_split(X[idx], yy, weights[idx], min_leaf_size)
        if found is None:
            return leaf
        f, thr = found
        go_left = X[idx, f] <= thr
        return Split(f, thr, grow(idx[go_left], depth + 1), grow(idx[~go_left], depth + 1), counts)

    root = grow(np.arange(X.shape[0]), 0)
    return CostTree(root, X.shape[1], float(cost_ratio), max_depth, min_leaf_size)


def predict(tree: CostTree, vector) -> int:
    v = np.asarray(vector, dtype=float).ravel()
    if v.shape[0] != tree.n_features:
        raise InvalidInputError(f"expected {tree.n_features} features, got {v.shape[0]}")
    node = tree.root
    while isinstance(node, Split):
        node = node.left if v[node.feature] <= node.threshold else node.right
    return node.label


def predict_many(tree: CostTree, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.array([predict(tree, row) for row in X], dtype=int)


def stratified_folds(labels: Sequence[int], k: int, seed: int) -> np.ndarray:
    """Fold index per instance; each class is shuffled and dealt round-robin."""
    y = np.asarray(labels)
    rng = np.random.default_rng(seed)
    fold = np.empty(len(y), dtype=int)
    offset = 0
    for cls in (0, 1):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(len(idx))]
        fold[idx] = (np.arange(len(idx)) + offset) % k
        offset += len(idx)
    return fold


@dataclass(frozen=True)
class SweepRow:
    cost_ratio: float
    confusion: ConfusionMatrix
    metrics: Metrics


def cost_sweep(
    X,
    y,
    cost_ratios: Iterable[float] = DEFAULT_COST_RATIOS,
    folds: int = 5,
    seed: int = 0,
    max_depth: int = 8,
    min_leaf_size: int = 5,
) -> list[SweepRow]:
    """k-fold cross-validated confusion totals for each cost ratio, in order."""
    X = np.asarray(X, dtype=float)
    labels = np.array([to_binary(v) for v in y])
    if folds < 2:
        raise InvalidInputError(f"folds must be >= 2, got {folds}")
    if len(labels) < folds:
        raise InvalidInputError(f"{len(labels)} instances for {folds} folds")
    labels = labels.astype(int)
    fold = stratified_folds(labels, folds, seed)
    rows = []
    for ratio in cost_ratios:
        total = ConfusionMatrix()
        for k in range(folds):
            test = fold == k
            if not test.any():
                continue
            tree = train(X[~test], labels[~test], ratio, max_depth, min_leaf_size)
            total = total + evaluate(predict_many(tree, X[test]).tolist(), labels[test].tolist())
        rows.append(SweepRow(float(ratio), total, metrics(total)))
    return rows


def _fmt(v) -> str:
    return "" if v is None else f"{v:.6f}"


def _fmt_ratio(r: float) -> str:
    return str(int(r)) if float(r).is_integer() else repr(r)


def write_sweep_csv(rows: Sequence[SweepRow], stream: TextIO) -> None:
    """One column per cost ratio, one row per metric."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["metric", *(_fmt_ratio(r.cost_ratio) for r in rows)])
    for name in METRIC_NAMES:
        writer.writerow([name, *(_fmt(getattr(r.metrics, name)) for r in rows)])
