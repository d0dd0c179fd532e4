"""Scoring predicted leakage signals against true ones."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .assess import DEFAULT_EPSILON, direction


def _pair(pred, true):
    p = np.asarray(pred, dtype=float).ravel()
    t = np.asarray(true, dtype=float).ravel()
    if len(p) != len(t):
        raise ValueError(f"length mismatch: {len(p)} predictions vs {len(t)} targets")
    if len(p) == 0:
        raise ValueError("nothing to evaluate")
    return p, t


def direction_accuracy(pred: Sequence[float], true: Sequence[float], epsilon: float = DEFAULT_EPSILON) -> float:
    """Share of predictions whose three-way direction matches the target's."""
    p, t = _pair(pred, true)
    hits = sum(direction(a, epsilon) == direction(b, epsilon) for a, b in zip(p, t))
    return hits / len(p)


def regression_metrics(pred: Sequence[float], true: Sequence[float]) -> dict:
    p, t = _pair(pred, true)
    err = p - t
    return {
        "mae": math.fsum(abs(e) for e in err) / len(err),
        "rmse": math.sqrt(math.fsum(e * e for e in err) / len(err)),
    }


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def rank_correlation(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman's rho: Pearson correlation of average ranks (ties share a rank)."""
    a, b = _pair(x, y)
    if len(a) < 3:
        raise ValueError("rank correlation needs at least 3 points")
    ra, rb = _average_ranks(a), _average_ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = math.sqrt(float(ra @ ra) * float(rb @ rb))
    if denom == 0.0:
        raise ValueError("rank correlation undefined for a constant input")
    return float(ra @ rb) / denom


@dataclass(frozen=True)
class EvalReport:
    n: int
    direction_accuracy: float
    baseline_direction_accuracy: float
    mae: float
    rmse: float
    spearman_pred_vs_signal: float | None
    spearman_u_vs_signal: float | None
    baseline_prediction: float
    epsilon: float = DEFAULT_EPSILON

    @property
    def beats_baseline(self) -> bool:
        return self.direction_accuracy > self.baseline_direction_accuracy

    def to_dict(self) -> dict:
        data = asdict(self)
        data["beats_baseline"] = self.beats_baseline
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _safe_rho(x, y):
    try:
        return rank_correlation(x, y)
    except ValueError:
        return None


def evaluate(model, corpus, baseline_prediction: float | None = None, epsilon: float = DEFAULT_EPSILON) -> EvalReport:
    """Score ``model`` on ``corpus``.

    The comparison floor predicts one constant for every pair; by default
    that is the model's own starting value (the mean training target).
    """
    X = np.asarray([ex.features for ex in corpus.examples], dtype=float)
    y = np.asarray([ex.target for ex in corpus.examples], dtype=float)
    if len(y) == 0:
        raise ValueError("nothing to evaluate")
    pred = model.predict(X)
    base = model.init_prediction if baseline_prediction is None else float(baseline_prediction)
    reg = regression_metrics(pred, y)
    return EvalReport(
        n=len(y),
        direction_accuracy=direction_accuracy(pred, y, epsilon),
        baseline_direction_accuracy=direction_accuracy(np.full(len(y), base), y, epsilon),
        mae=reg["mae"],
        rmse=reg["rmse"],
        spearman_pred_vs_signal=_safe_rho(pred, y),
        spearman_u_vs_signal=_safe_rho(X.max(axis=1), y),
        baseline_prediction=base,
        epsilon=epsilon,
    )
