"""Static PNG/SVG/PDF figures for the CLI reports (rendered headless)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .assess import DEFAULT_EPSILON, direction  # noqa: E402

_COLORS = {"Increase": "#c0392b", "Decrease": "#2471a3", "NoChange": "#7f8c8d"}


_STABLE_METADATA = {
    "png": {"Software": None},
    "svg": {"Date": None},
    "pdf": {"CreationDate": None, "ModDate": None},
}


def _save(fig, path):
    # drop timestamps so repeated renders are byte-identical
    suffix = str(path).rsplit(".", 1)[-1].lower()
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata=_STABLE_METADATA.get(suffix))
    plt.close(fig)


def plot_assessment(assessment, path) -> None:
    """Bars for U(A), U(B), U(AB) against the pre-join baseline."""
    labels = ["U(A)", "U(B)", "U(AB)"]
    values = [
        assessment.report_a.distinct_ratio,
        assessment.report_b.distinct_ratio,
        assessment.report_ab.distinct_ratio,
    ]
    fig, ax = plt.subplots(figsize=(5, 3.6))
    bars = ax.bar(labels, values, color=["#95a5a6", "#95a5a6", _COLORS[assessment.overall_direction.value]])
    ax.axhline(assessment.baseline, color="black", linestyle="--", linewidth=1, label=f"baseline ({assessment.baseline_mode})")
    for bar, v in zip(bars, values):
        ax.text(bar.get_x() + bar.get_width() / 2, v + 0.02, f"{v:.4f}", ha="center", fontsize=9)
    ax.set_ylim(0, 1.12)
    ax.set_ylabel("distinct ratio")
    ax.set_title(f"signal {assessment.signal:+.4f} ({assessment.overall_direction.value})")
    ax.legend(loc="upper left", fontsize=8)
    _save(fig, path)


def plot_evaluation(predicted, actual, path, epsilon: float = DEFAULT_EPSILON) -> None:
    """Predicted vs actual signal; misses in direction are drawn as crosses."""
    p = np.asarray(predicted, dtype=float)
    t = np.asarray(actual, dtype=float)
    hit = np.array([direction(a, epsilon) == direction(b, epsilon) for a, b in zip(p, t)], dtype=bool)
    fig, ax = plt.subplots(figsize=(4.8, 4.4))
    lo = float(min(p.min(), t.min(), -0.05)) - 0.05
    hi = float(max(p.max(), t.max(), 0.05)) + 0.05
    ax.plot([lo, hi], [lo, hi], color="0.6", linewidth=1)
    ax.axhline(0, color="0.85", linewidth=0.8)
    ax.axvline(0, color="0.85", linewidth=0.8)
    ax.scatter(t[hit], p[hit], s=14, color="#2471a3", label="direction correct")
    ax.scatter(t[~hit], p[~hit], s=22, marker="x", color="#c0392b", label="direction wrong")
    ax.set_xlim(lo, hi)
    ax.set_ylim(lo, hi)
    ax.set_xlabel("actual signal")
    ax.set_ylabel("predicted signal")
    ax.set_title(f"direction accuracy {hit.mean():.3f} (n={len(p)})")
    ax.legend(loc="upper left", fontsize=8)
    _save(fig, path)


def plot_corpus(corpus, path) -> None:
    """Training pairs in the (U(A), U(B)) plane, coloured by signal."""
    X = np.asarray([ex.features for ex in corpus.examples], dtype=float)
    y = np.asarray([ex.target for ex in corpus.examples], dtype=float)
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    lim = max(float(np.abs(y).max()), 1e-6)
    sc = ax.scatter(X[:, 0], X[:, 1], c=y, cmap="coolwarm", vmin=-lim, vmax=lim, s=12)
    fig.colorbar(sc, ax=ax, label="signal U(AB) - baseline")
    ax.set_xlim(0, 1.02)
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("U(A)")
    ax.set_ylabel("U(B)")
    ax.set_title(f"{len(y)} labeled pairs (seed {corpus.master_seed})")
    _save(fig, path)
