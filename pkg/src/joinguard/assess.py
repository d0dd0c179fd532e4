"""Pre-join vs post-join identifiability.

``assess_pair`` measures U(A) and U(B) on the source tables, performs the
join, measures U(AB) on every merged column, and reduces the three numbers
to a signed leakage signal::

    signal = U(AB) - baseline,   baseline = max(U(A), U(B))

A negative signal means the merged table is less distinctive than the
riskiest source.  Per-source directions (U(AB) vs U(A), U(AB) vs U(B)) are
reported separately because the effect is usually asymmetric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import AssessmentError
from .join import JoinSpec, join
from .metrics import DEFAULT_SMALL_GROUP_KS, UniquenessReport, uniqueness_report
from .tabular import Table

DEFAULT_EPSILON = 1e-9
BASELINE_MODES = ("max", "one")


class Direction(str, Enum):
    INCREASE = "Increase"
    DECREASE = "Decrease"
    NO_CHANGE = "NoChange"

    def __str__(self):
        return self.value


def direction(delta: float, epsilon: float = DEFAULT_EPSILON) -> Direction:
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if abs(delta) <= epsilon:
        return Direction.NO_CHANGE
    return Direction.INCREASE if delta > 0 else Direction.DECREASE


def _check_ratio(name, value):
    if not (0.0 < value <= 1.0):
        raise ValueError(f"{name} must lie in (0, 1], got {value!r}")


def baseline_value(u_a: float, u_b: float, mode: str = "max") -> float:
    if mode == "max":
        return max(u_a, u_b)
    if mode == "one":
        return 1.0
    raise ValueError(f"baseline mode must be one of {BASELINE_MODES}, got {mode!r}")


def leakage_signal(u_a: float, u_b: float, u_ab: float, baseline: str = "max") -> float:
    """U(AB) minus the pre-join baseline (``max(U(A), U(B))`` by default)."""
    _check_ratio("u_a", u_a)
    _check_ratio("u_b", u_b)
    _check_ratio("u_ab", u_ab)
    return u_ab - baseline_value(u_a, u_b, baseline)


@dataclass(frozen=True)
class LeakageAssessment:
    report_a: UniquenessReport
    report_b: UniquenessReport
    report_ab: UniquenessReport
    baseline: float
    baseline_mode: str
    signal: float
    overall_direction: Direction
    direction_a: Direction
    direction_b: Direction
    join_spec: JoinSpec
    epsilon: float

    def to_dict(self) -> dict:
        return {
            "report_a": self.report_a.to_dict(),
            "report_b": self.report_b.to_dict(),
            "report_ab": self.report_ab.to_dict(),
            "baseline": self.baseline,
            "baseline_mode": self.baseline_mode,
            "signal": self.signal,
            "overall_direction": self.overall_direction.value,
            "direction_a": self.direction_a.value,
            "direction_b": self.direction_b.value,
            "join_spec": self.join_spec.to_dict(),
            "epsilon": self.epsilon,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def assess_pair(
    a: Table,
    b: Table,
    spec: JoinSpec,
    attrs_a: Sequence[str] | None = None,
    attrs_b: Sequence[str] | None = None,
    *,
    baseline: str = "max",
    epsilon: float = DEFAULT_EPSILON,
    small_group_ks: Sequence[int] = DEFAULT_SMALL_GROUP_KS,
) -> LeakageAssessment:
    """Measure identifiability before and after joining ``a`` with ``b``.

    ``attrs_a``/``attrs_b`` default to every column of the respective
    table; the merged table is always measured over all of its columns.
    """
    baseline_value(1.0, 1.0, baseline)
    if a.n_rows == 0 or b.n_rows == 0:
        raise AssessmentError("empty input table")
    report_a = uniqueness_report(a, attrs_a, small_group_ks)
    report_b = uniqueness_report(b, attrs_b, small_group_ks)
    merged = join(a, b, spec)
    if merged.n_rows == 0:
        raise AssessmentError("empty join")
    report_ab = uniqueness_report(merged, None, small_group_ks)

    u_a, u_b, u_ab = report_a.distinct_ratio, report_b.distinct_ratio, report_ab.distinct_ratio
    base = baseline_value(u_a, u_b, baseline)
    signal = leakage_signal(u_a, u_b, u_ab, baseline)
    return LeakageAssessment(
        report_a=report_a,
        report_b=report_b,
        report_ab=report_ab,
        baseline=base,
        baseline_mode=baseline,
        signal=signal,
        overall_direction=direction(signal, epsilon),
        direction_a=direction(u_ab - u_a, epsilon),
        direction_b=direction(u_ab - u_b, epsilon),
        join_spec=spec,
        epsilon=epsilon,
    )
