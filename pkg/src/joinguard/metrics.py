"""Group statistics over an attribute set: uniqueness ratios, k-anonymity,
and small-group exposure.

Two readings of "unique" are reported side by side:

* ``distinct_ratio``  -- number of distinct attribute combinations / rows.
  This is the headline uniqueness ratio.
* ``singleton_ratio`` -- rows whose combination occurs exactly once / rows,
  the classic re-identification measure.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .errors import MetricError
from .tabular import Table, project

DEFAULT_SMALL_GROUP_KS = (2, 5)


@dataclass(frozen=True)
class GroupHistogram:
    groups: dict
    size_histogram: dict
    n_rows: int


@dataclass(frozen=True)
class UniquenessReport:
    attrs: tuple[str, ...]
    n_rows: int
    distinct_count: int
    singleton_count: int
    distinct_ratio: float
    singleton_ratio: float
    min_group_size: int
    small_group_fractions: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "attrs": list(self.attrs),
            "n_rows": self.n_rows,
            "distinct_count": self.distinct_count,
            "singleton_count": self.singleton_count,
            "distinct_ratio": self.distinct_ratio,
            "singleton_ratio": self.singleton_ratio,
            "min_group_size": self.min_group_size,
            "small_group_fractions": {
                str(k): v for k, v in sorted(self.small_group_fractions.items())
            },
            "interpretation": {
                "distinct_ratio": "distinct",
                "singleton_ratio": "singleton",
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "UniquenessReport":
        return cls(
            attrs=tuple(data["attrs"]),
            n_rows=data["n_rows"],
            distinct_count=data["distinct_count"],
            singleton_count=data["singleton_count"],
            distinct_ratio=data["distinct_ratio"],
            singleton_ratio=data["singleton_ratio"],
            min_group_size=data["min_group_size"],
            small_group_fractions={
                int(k): v for k, v in data["small_group_fractions"].items()
            },
        )


def _resolve_attrs(table: Table, attrs) -> list[str]:
    return list(table.column_names) if attrs is None else list(attrs)


def group_counts(table: Table, attrs: Sequence[str] | None = None) -> GroupHistogram:
    """Multiplicity of every projected tuple and the histogram of group sizes.

    ``attrs=None`` means all columns; ``attrs=[]`` collapses the table into a
    single group.
    """
    attrs = _resolve_attrs(table, attrs)
    tuples = project(table, attrs)
    if not tuples:
        raise MetricError("empty table")
    groups = Counter(tuples)
    sizes = Counter(groups.values())
    return GroupHistogram(dict(groups), dict(sorted(sizes.items())), len(tuples))


def _fraction_in_small_groups(hist: GroupHistogram, k: int) -> float:
    covered = sum(size * n for size, n in hist.size_histogram.items() if size <= k)
    return covered / hist.n_rows


def uniqueness_report(
    table: Table,
    attrs: Sequence[str] | None = None,
    small_group_ks: Sequence[int] = DEFAULT_SMALL_GROUP_KS,
) -> UniquenessReport:
    attrs = _resolve_attrs(table, attrs)
    for k in small_group_ks:
        _check_k(k)
    hist = group_counts(table, attrs)
    n = hist.n_rows
    distinct = len(hist.groups)
    singletons = hist.size_histogram.get(1, 0)
    return UniquenessReport(
        attrs=tuple(attrs),
        n_rows=n,
        distinct_count=distinct,
        singleton_count=singletons,
        distinct_ratio=distinct / n,
        singleton_ratio=singletons / n,
        min_group_size=min(hist.size_histogram),
        small_group_fractions={
            int(k): _fraction_in_small_groups(hist, k) for k in sorted(set(small_group_ks))
        },
    )


def uniqueness_ratio(table: Table, attrs: Sequence[str] | None = None) -> float:
    """Distinct combinations over row count for ``attrs`` (all columns by default)."""
    hist = group_counts(table, attrs)
    return len(hist.groups) / hist.n_rows


def k_anonymity(table: Table, attrs: Sequence[str] | None = None) -> int:
    return min(group_counts(table, attrs).size_histogram)


def _check_k(k):
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ValueError(f"small-group threshold must be an integer >= 1, got {k!r}")


def small_group_fraction(table: Table, attrs: Sequence[str] | None, k: int) -> float:
    """Fraction of rows that sit in groups of size <= k."""
    _check_k(k)
    return _fraction_in_small_groups(group_counts(table, attrs), k)
