"""Gradient-boosted regression trees over the two pre-join uniqueness ratios.

Squared-error boosting, written out by hand:

* start from the mean training target;
* each stage fits a depth-limited regression tree to the current residuals
  using exhaustive variance-reduction splits (candidate thresholds are the
  midpoints between consecutive distinct feature values);
* leaves hold the residual mean, and predictions move by
  ``learning_rate * leaf``.

Training is fully deterministic: ties in split gain go to the lowest
feature index, then the lowest threshold.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import PersistenceError, TrainingError

FORMAT_VERSION = "joinguard-gbdt/1"
FEATURE_NAMES = ("u_a", "u_b")


@dataclass(frozen=True)
class Hyperparams:
    n_trees: int = 100
    max_depth: int = 3
    learning_rate: float = 0.1
    min_samples_leaf: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if not (0.0 < self.learning_rate <= 1.0):
            raise ValueError("learning_rate must lie in (0, 1]")


@dataclass
class Tree:
    """Flat pre-order node list.

    Internal nodes: ``{"feature", "threshold", "left", "right"}``;
    leaves: ``{"leaf"}``.  Rows with ``x[feature] <= threshold`` go left.
    """

    nodes: list = field(default_factory=list)

    def predict_one(self, x) -> float:
        node = self.nodes[0]
        while "leaf" not in node:
            child = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
            node = self.nodes[child]
        return node["leaf"]

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(len(X))
        for i, x in enumerate(X):
            out[i] = self.predict_one(x)
        return out

    def depth(self, index: int = 0) -> int:
        node = self.nodes[index]
        if "leaf" in node:
            return 0
        return 1 + max(self.depth(node["left"]), self.depth(node["right"]))


@dataclass
class GbdtModel:
    init_prediction: float
    learning_rate: float
    trees: list = field(default_factory=list)
    feature_names: tuple = FEATURE_NAMES
    hyperparams: dict | None = None
    version: str = FORMAT_VERSION

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def _check(self, X: np.ndarray):
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(
                f"expected {self.n_features} features {list(self.feature_names)}, got shape {X.shape}"
            )
        if not np.all(np.isfinite(X)):
            raise ValueError("features must be finite")

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        self._check(X)
        total = np.zeros(len(X))
        for tree in self.trees:
            total += tree.predict(X)
        return self.init_prediction + self.learning_rate * total

    def predict_one(self, features: Sequence[float]) -> float:
        return float(self.predict([list(features)])[0])

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "feature_names": list(self.feature_names),
            "init_prediction": self.init_prediction,
            "learning_rate": self.learning_rate,
            "hyperparams": self.hyperparams,
            "trees": [{"nodes": t.nodes} for t in self.trees],
        }


def _mean(values: np.ndarray) -> float:
    # Shifted by the first value so a constant vector averages to itself exactly.
    first = float(values[0])
    return first + math.fsum(float(v) - first for v in values) / len(values)


def _best_split(X, r, min_leaf):
    """Return (gain, feature, threshold) of the best split, or None."""
    n, n_features = X.shape
    total = r.sum()
    parent = total * total / n
    best = None
    for f in range(n_features):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        cs = np.cumsum(r[order])
        # candidate cut after position i (left = first i+1 rows)
        for i in range(min_leaf - 1, n - min_leaf):
            if xs[i] == xs[i + 1]:
                continue
            nl = i + 1
            nr = n - nl
            sl = cs[i]
            sr = total - sl
            gain = sl * sl / nl + sr * sr / nr - parent
            threshold = (xs[i] + xs[i + 1]) / 2.0
            if best is None or gain > best[0]:
                best = (gain, f, threshold)
    if best is None or not best[0] > 0.0:
        return None
    return best


def _fit_tree(X, r, max_depth, min_leaf) -> Tree:
    nodes = []

    def grow(idx, depth):
        pos = len(nodes)
        nodes.append(None)
        split = None
        if depth < max_depth and len(idx) >= 2 * min_leaf:
            split = _best_split(X[idx], r[idx], min_leaf)
        if split is None:
            nodes[pos] = {"leaf": _mean(r[idx])}
            return
        _, f, threshold = split
        go_left = X[idx, f] <= threshold
        node = {"feature": int(f), "threshold": float(threshold)}
        nodes[pos] = node
        node["left"] = len(nodes)
        grow(idx[go_left], depth + 1)
        node["right"] = len(nodes)
        grow(idx[~go_left], depth + 1)

    grow(np.arange(len(r)), 0)
    return Tree(nodes)


def _as_xy(corpus):
    if hasattr(corpus, "examples"):
        X = [ex.features for ex in corpus.examples]
        y = [ex.target for ex in corpus.examples]
    else:
        X, y = corpus
    X = np.asarray(X, dtype=float).reshape(len(X), -1) if len(X) else np.empty((0, 2))
    y = np.asarray(y, dtype=float)
    return X, y


def train(corpus, hp: Hyperparams = Hyperparams(), *, history: list | None = None) -> GbdtModel:
    """Fit a boosted ensemble to a LabeledCorpus (or an ``(X, y)`` pair).

    If ``history`` is a list, the training MSE after initialization and after
    every stage is appended to it.
    """
    X, y = _as_xy(corpus)
    if len(y) < 2:
        raise TrainingError("training needs at least 2 examples")
    if X.shape[1] != len(FEATURE_NAMES):
        raise TrainingError(f"expected features {list(FEATURE_NAMES)}, got {X.shape[1]} columns")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(X))):
        raise TrainingError("non-finite feature or target")

    init = _mean(y)
    pred = np.full(len(y), init)
    trees = []
    if history is not None:
        history.append(float(np.mean((y - pred) ** 2)))
    for _ in range(hp.n_trees):
        residual = y - pred
        tree = _fit_tree(X, residual, hp.max_depth, hp.min_samples_leaf)
        trees.append(tree)
        pred = pred + hp.learning_rate * tree.predict(X)
        if history is not None:
            history.append(float(np.mean((y - pred) ** 2)))
    return GbdtModel(init, hp.learning_rate, trees, FEATURE_NAMES, asdict(hp))


def baseline_constant(corpus) -> GbdtModel:
    """Zero-tree model that always predicts the mean training target."""
    _, y = _as_xy(corpus)
    if len(y) == 0:
        raise TrainingError("baseline needs a non-empty corpus")
    return GbdtModel(_mean(y), 1.0, [], FEATURE_NAMES, None)


def predict(model: GbdtModel, features: Sequence[float]) -> float:
    return model.predict_one(features)


def save_model(model: GbdtModel) -> bytes:
    return (json.dumps(model.to_dict(), sort_keys=True, indent=1) + "\n").encode("utf-8")


def _check_node(node, n_nodes, n_features):
    if not isinstance(node, dict):
        raise PersistenceError("tree node must be an object")
    if "leaf" in node:
        if not isinstance(node["leaf"], (int, float)) or not math.isfinite(node["leaf"]):
            raise PersistenceError("leaf value must be a finite number")
        return
    try:
        f, t, l, r = node["feature"], node["threshold"], node["left"], node["right"]
    except KeyError as exc:
        raise PersistenceError(f"internal node missing {exc.args[0]!r}") from None
    if not (isinstance(f, int) and 0 <= f < n_features):
        raise PersistenceError(f"feature index {f!r} out of range")
    if not (isinstance(l, int) and isinstance(r, int) and 0 < l < n_nodes and 0 < r < n_nodes):
        raise PersistenceError("child index out of range")
    if not isinstance(t, (int, float)):
        raise PersistenceError("threshold must be numeric")


def load_model(payload: bytes | str) -> GbdtModel:
    try:
        data = json.loads(payload)
    except (ValueError, UnicodeDecodeError) as exc:
        raise PersistenceError(f"malformed model payload: {exc}") from None
    if not isinstance(data, dict):
        raise PersistenceError("model payload must be a JSON object")
    if data.get("version") != FORMAT_VERSION:
        raise PersistenceError(
            f"unsupported model version {data.get('version')!r}, expected {FORMAT_VERSION!r}"
        )
    try:
        names = tuple(data["feature_names"])
        init = data["init_prediction"]
        lr = data["learning_rate"]
        raw_trees = data["trees"]
    except (KeyError, TypeError) as exc:
        raise PersistenceError(f"model payload missing field {exc}") from None
    if not all(isinstance(v, (int, float)) for v in (init, lr)):
        raise PersistenceError("init_prediction and learning_rate must be numbers")
    trees = []
    for raw in raw_trees:
        nodes = raw.get("nodes") if isinstance(raw, dict) else None
        if not nodes:
            raise PersistenceError("tree without nodes")
        for node in nodes:
            _check_node(node, len(nodes), len(names))
        trees.append(Tree(nodes))
    return GbdtModel(float(init), float(lr), trees, names, data.get("hyperparams"))
