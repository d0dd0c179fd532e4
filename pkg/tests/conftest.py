import json
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from joinguard.tabular import MISSING, table_from_records  # noqa: E402

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "src" / "joinguard" / "schemas"


def small_tables(max_rows=12, max_cols=4, alphabet=("x", "y", "z"), allow_missing=False, min_rows=1):
    cell = st.sampled_from(alphabet + ((MISSING,) if allow_missing else ()))

    @st.composite
    def build(draw):
        n_cols = draw(st.integers(1, max_cols))
        rows = draw(st.lists(st.tuples(*[cell] * n_cols), min_size=min_rows, max_size=max_rows))
        return table_from_records([f"c{i}" for i in range(n_cols)], rows)

    return build()


@pytest.fixture
def schema():
    def load(name):
        return json.loads((SCHEMA_DIR / f"{name}.json").read_text())

    return load


def rows_table(rows, names=("age", "gender"), label=""):
    return table_from_records(list(names), rows, label)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion."""

    def record(number, title, ok, detail):
        ACCEPTANCE_LINES.append((number, f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
