"""Loaders for two public health CSVs that share age and gender.

Neither file ships with the package.  The loaders only harmonise the join
keys so the two sources can be compared cell by cell:

* heart disease (1025 rows; ``sex`` coded 1/0) -> ``gender`` Male/Female;
* stroke (``id, gender, age, ...``; ages written as floats) -> whole-number
  ages lose their ``.0``.  Fractional infant ages are kept as-is and simply
  never match.

Harmonisation is a bijection on each column, so distinct counts over the
source columns are unchanged.
"""

from __future__ import annotations

from pathlib import Path

from .tabular import MISSING, IngestOptions, Table, load_table


def _rewrite(table: Table, column: str, fn, new_name: str | None = None) -> Table:
    idx = table.column_index(column)
    rows = tuple(
        row[:idx] + ((MISSING if row[idx] is MISSING else fn(row[idx])),) + row[idx + 1 :]
        for row in table.rows
    )
    columns = table.columns
    if new_name:
        columns = columns[:idx] + (type(columns[idx])(new_name, columns[idx].role),) + columns[idx + 1 :]
    return Table(columns, rows, table.source_label)


def _whole_age(token: str) -> str:
    try:
        value = float(token)
    except ValueError:
        return token
    return str(int(value)) if value.is_integer() else token


def load_heart(path, options: IngestOptions = IngestOptions()) -> Table:
    table = load_table(Path(path).read_bytes(), options, "heart")
    table = _rewrite(table, "sex", lambda v: {"1": "Male", "0": "Female"}.get(v, v), "gender")
    return _rewrite(table, "age", _whole_age)


def load_stroke(path, options: IngestOptions = IngestOptions()) -> Table:
    table = load_table(Path(path).read_bytes(), options, "stroke")
    return _rewrite(table, "age", _whole_age)
