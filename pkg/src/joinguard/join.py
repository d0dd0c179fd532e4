"""Equality joins on (possibly several) key columns.

The join is a classic build/probe hash join: the right table is bucketed by
key tuple, the left table probes it in row order.  Key cells that are
MISSING never match anything, following SQL NULL semantics.
"""

from __future__ import annotations

import os
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .errors import JoinError, JoinExplosionError
from .tabular import MISSING, ColumnSpec, Table

DEFAULT_MAX_OUTPUT_ROWS = 10_000_000
MAX_ROWS_ENV = "JOINGUARD_MAX_ROWS"
JOIN_KINDS = ("inner", "left", "right")


def default_max_rows() -> int:
    raw = os.environ.get(MAX_ROWS_ENV)
    if raw is None or not raw.strip():
        return DEFAULT_MAX_OUTPUT_ROWS
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{MAX_ROWS_ENV} must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError(f"{MAX_ROWS_ENV} must be >= 0")
    return value


@dataclass(frozen=True)
class JoinSpec:
    keys: tuple[tuple[str, str], ...]
    kind: str = "inner"
    max_output_rows: int = field(default_factory=default_max_rows)
    left_prefix: str = "a_"
    right_prefix: str = "b_"

    def __post_init__(self):
        keys = tuple((str(l), str(r)) for l, r in self.keys)
        if not keys:
            raise ValueError("join needs at least one key pair")
        lefts = [l for l, _ in keys]
        rights = [r for _, r in keys]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            raise ValueError("duplicate column among join keys")
        if self.kind not in JOIN_KINDS:
            raise ValueError(f"join kind must be one of {JOIN_KINDS}, got {self.kind!r}")
        if self.max_output_rows < 0:
            raise ValueError("max_output_rows must be >= 0")
        object.__setattr__(self, "keys", keys)

    @classmethod
    def on(cls, *names: str, **kwargs) -> "JoinSpec":
        """Spec joining same-named columns, e.g. ``JoinSpec.on("age", "gender")``."""
        return cls(tuple((n, n) for n in names), **kwargs)

    def mirrored(self) -> "JoinSpec":
        kind = {"left": "right", "right": "left"}.get(self.kind, self.kind)
        return JoinSpec(
            tuple((r, l) for l, r in self.keys),
            kind,
            self.max_output_rows,
            self.right_prefix,
            self.left_prefix,
        )

    def to_dict(self) -> dict:
        return {
            "keys": [[l, r] for l, r in self.keys],
            "kind": self.kind,
            "max_output_rows": self.max_output_rows,
            "left_prefix": self.left_prefix,
            "right_prefix": self.right_prefix,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "JoinSpec":
        return cls(
            tuple(tuple(k) for k in data["keys"]),
            data.get("kind", "inner"),
            data.get("max_output_rows", DEFAULT_MAX_OUTPUT_ROWS),
            data.get("left_prefix", "a_"),
            data.get("right_prefix", "b_"),
        )


def parse_keys(text: str) -> tuple[tuple[str, str], ...]:
    """Parse ``"age=age,gender=sex"``; a bare ``age`` means ``age=age``."""
    pairs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        left, sep, right = part.partition("=")
        left, right = left.strip(), right.strip()
        if not left or (sep and not right):
            raise ValueError(f"malformed key pair {part!r}")
        pairs.append((left, right if sep else left))
    if not pairs:
        raise ValueError("no join keys given")
    return tuple(pairs)


def _key_positions(a: Table, b: Table, spec: JoinSpec):
    return (
        [a.column_index(l) for l, _ in spec.keys],
        [b.column_index(r) for _, r in spec.keys],
    )


def _key_histogram(table: Table, positions) -> Counter:
    counts = Counter()
    for row in table.rows:
        key = tuple(row[i] for i in positions)
        if MISSING not in key:
            counts[key] += 1
    return counts


def estimate_join_cardinality(a: Table, b: Table, spec: JoinSpec) -> int:
    """Exact inner-join row count from key histograms, without materializing."""
    apos, bpos = _key_positions(a, b, spec)
    ha = _key_histogram(a, apos)
    hb = _key_histogram(b, bpos)
    if len(hb) < len(ha):
        ha, hb = hb, ha
    return sum(n * hb.get(key, 0) for key, n in ha.items())


def _output_size(a: Table, b: Table, spec: JoinSpec, apos, bpos) -> int:
    ha = _key_histogram(a, apos)
    hb = _key_histogram(b, bpos)
    inner = sum(n * hb.get(k, 0) for k, n in ha.items())
    if spec.kind == "left":
        return inner + (a.n_rows - sum(n for k, n in ha.items() if k in hb))
    if spec.kind == "right":
        return inner + (b.n_rows - sum(n for k, n in hb.items() if k in ha))
    return inner


def join(a: Table, b: Table, spec: JoinSpec) -> Table:
    """Join ``a`` and ``b`` on ``spec.keys``.

    Output columns are the key columns once (named after ``a``), then the
    non-key columns of ``a`` and ``b`` with their prefixes.  Rows follow
    ``a``'s order and, within a key group, ``b``'s order; a right join
    appends unmatched ``b`` rows last.
    """
    apos, bpos = _key_positions(a, b, spec)
    estimate = _output_size(a, b, spec, apos, bpos)
    if estimate > spec.max_output_rows:
        raise JoinExplosionError(estimate, spec.max_output_rows)

    akey = set(apos)
    bkey = set(bpos)
    a_rest = [i for i in range(len(a.columns)) if i not in akey]
    b_rest = [i for i in range(len(b.columns)) if i not in bkey]

    columns = [a.columns[i] for i in apos]
    columns += [ColumnSpec(spec.left_prefix + a.columns[i].name, a.columns[i].role) for i in a_rest]
    columns += [ColumnSpec(spec.right_prefix + b.columns[i].name, b.columns[i].role) for i in b_rest]
    names = [c.name for c in columns]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise JoinError(f"output column names collide after prefixing: {dupes}")

    buckets = defaultdict(list)
    for j, row in enumerate(b.rows):
        key = tuple(row[i] for i in bpos)
        if MISSING not in key:
            buckets[key].append(j)
    b_tails = [tuple(row[i] for i in b_rest) for row in b.rows]
    a_fill = (MISSING,) * len(a_rest)
    b_fill = (MISSING,) * len(b_rest)

    out = []
    matched_b = set() if spec.kind == "right" else None
    for row in a.rows:
        key = tuple(row[i] for i in apos)
        hits = buckets.get(key) if MISSING not in key else None
        if hits:
            head = key + tuple(row[i] for i in a_rest)
            out.extend(head + b_tails[j] for j in hits)
            if matched_b is not None:
                matched_b.update(hits)
        elif spec.kind == "left":
            out.append(key + tuple(row[i] for i in a_rest) + b_fill)
    if spec.kind == "right":
        for j, row in enumerate(b.rows):
            if j not in matched_b:
                out.append(tuple(row[i] for i in bpos) + a_fill + b_tails[j])

    label = f"{a.source_label or 'A'}+{b.source_label or 'B'}"
    return Table(tuple(columns), tuple(out), label)
