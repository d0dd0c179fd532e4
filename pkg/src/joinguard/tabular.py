"""Immutable tables of canonical cell tokens, plus CSV ingestion.

Cells are compared as canonical strings only; no type inference happens
anywhere.  A missing cell is the :data:`MISSING` sentinel, which groups
with other missing cells but never equals any string.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence, Union

from .errors import IngestError, UnknownColumnError

QUASI_IDENTIFIER = "quasi_identifier"
ATTRIBUTE = "attribute"
IDENTIFIER = "identifier"
ROLES = (QUASI_IDENTIFIER, ATTRIBUTE, IDENTIFIER)


class _MissingType:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Missing"

    def __reduce__(self):
        return (_MissingType, ())

    def __bool__(self):
        return False


MISSING = _MissingType()

Cell = Union[str, _MissingType]


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    role: str = ATTRIBUTE

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ValueError("column name must be a non-empty string")
        if self.role not in ROLES:
            raise ValueError(f"unknown column role {self.role!r}")


@dataclass(frozen=True)
class IngestOptions:
    delimiter: str = ","
    has_header: bool = True
    empty_is_missing: bool = True
    case_fold: bool = False
    drop_columns: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.delimiter) != 1 or self.delimiter in "\"\r\n":
            raise ValueError(f"invalid delimiter {self.delimiter!r}")
        object.__setattr__(self, "drop_columns", tuple(self.drop_columns))


@dataclass(frozen=True)
class Table:
    """A rectangular, immutable grid of cells with named columns."""

    columns: tuple[ColumnSpec, ...]
    rows: tuple[tuple[Cell, ...], ...]
    source_label: str = ""
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        columns = tuple(
            c if isinstance(c, ColumnSpec) else ColumnSpec(c) for c in self.columns
        )
        rows = tuple(tuple(r) for r in self.rows)
        index = {}
        for i, col in enumerate(columns):
            if col.name in index:
                raise IngestError(f"duplicate column name {col.name!r}")
            index[col.name] = i
        width = len(columns)
        for i, row in enumerate(rows):
            if len(row) != width:
                raise IngestError(
                    f"row {i} has {len(row)} cells, expected {width}"
                )
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_index", index)

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    def column_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownColumnError(name, self.source_label or "table") from None

    def with_roles(self, roles: dict[str, str]) -> "Table":
        """Return a copy with the given columns re-tagged."""
        for name in roles:
            self.column_index(name)
        cols = tuple(ColumnSpec(c.name, roles.get(c.name, c.role)) for c in self.columns)
        return Table(cols, self.rows, self.source_label)

    def drop(self, names: Iterable[str]) -> "Table":
        names = set(names)
        for name in names:
            self.column_index(name)
        keep = [i for i, c in enumerate(self.columns) if c.name not in names]
        cols = tuple(self.columns[i] for i in keep)
        rows = tuple(tuple(r[i] for i in keep) for r in self.rows)
        return Table(cols, rows, self.source_label)


def canonicalize_value(raw: str, options: IngestOptions = IngestOptions()) -> Cell:
    """Trim, optionally case-fold, and map empty strings to MISSING."""
    if raw is MISSING:
        return MISSING
    token = raw.strip()
    if not token and options.empty_is_missing:
        return MISSING
    if options.case_fold:
        token = token.casefold()
    return token


def load_table(
    source: Union[bytes, str, IO],
    options: IngestOptions = IngestOptions(),
    source_label: str = "",
) -> Table:
    """Parse RFC-4180 delimited UTF-8 text into a :class:`Table`.

    ``source`` may be raw bytes, a str, or a binary/text file object.
    Every column starts with role ``attribute``.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise IngestError(f"input is not valid UTF-8: {exc}") from None

    reader = csv.reader(io.StringIO(source, newline=""), delimiter=options.delimiter, strict=True)
    try:
        records = [r for r in reader if r]
    except csv.Error as exc:
        raise IngestError(f"malformed CSV: {exc}") from None

    if options.has_header:
        if not records:
            raise IngestError("empty input: header row expected")
        names = [h.strip() for h in records[0]]
        body = records[1:]
        first_data_row = 1
    else:
        width = len(records[0]) if records else 0
        names = [f"c{i}" for i in range(width)]
        body = records
        first_data_row = 0

    seen = set()
    for name in names:
        if not name:
            raise IngestError("empty column name in header")
        if name in seen:
            raise IngestError(f"duplicate column name {name!r}")
        seen.add(name)

    width = len(names)
    rows = []
    for offset, rec in enumerate(body):
        if len(rec) != width:
            raise IngestError(
                f"ragged row at row {first_data_row + offset}: "
                f"{len(rec)} fields, expected {width}"
            )
        rows.append(tuple(canonicalize_value(v, options) for v in rec))

    table = Table(tuple(ColumnSpec(n) for n in names), tuple(rows), source_label)
    if options.drop_columns:
        table = table.drop(options.drop_columns)
    return table


def dump_table(table: Table, delimiter: str = ",") -> str:
    """Serialize back to CSV text with a header; MISSING becomes an empty field."""
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(table.column_names)
    for row in table.rows:
        writer.writerow(["" if v is MISSING else v for v in row])
    return buf.getvalue()


def project(table: Table, attrs: Sequence[str]) -> list[tuple]:
    """Per-row tuples of the named columns, in row order.

    An empty attribute list yields one empty tuple per row.
    """
    idx = [table.column_index(a) for a in attrs]
    if not idx:
        return [()] * table.n_rows
    if idx == list(range(len(table.columns))):
        return list(table.rows)
    return [tuple(row[i] for i in idx) for row in table.rows]


def table_from_records(
    names: Sequence[str],
    records: Iterable[Sequence],
    source_label: str = "",
    roles: dict[str, str] | None = None,
) -> Table:
    """Build a table from already-tokenised Python values (stringified, trimmed)."""
    roles = roles or {}
    cols = tuple(ColumnSpec(n, roles.get(n, ATTRIBUTE)) for n in names)
    rows = tuple(
        tuple(MISSING if v is None or v is MISSING else canonicalize_value(str(v)) for v in r)
        for r in records
    )
    return Table(cols, rows, source_label)
