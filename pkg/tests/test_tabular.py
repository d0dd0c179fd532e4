import io
import pickle

import pytest
from hypothesis import given, strategies as st

from conftest import rows_table, small_tables
from joinguard.errors import IngestError, UnknownColumnError
from joinguard.tabular import (
    MISSING,
    ColumnSpec,
    IngestOptions,
    Table,
    canonicalize_value,
    dump_table,
    load_table,
    project,
)


def test_smallest_well_formed_input():
    t = load_table(b"age,gender\n30,M\n40,F")
    assert t.column_names == ("age", "gender")
    assert t.rows == (("30", "M"), ("40", "F"))
    assert all(c.role == "attribute" for c in t.columns)


def test_ragged_row_names_row_index():
    with pytest.raises(IngestError, match="row 2"):
        load_table(b"a,b\n1,2\n3")


def test_trimmed_rows_compare_equal():
    t = load_table(b"age,gender\n 30 ,M\n30,M")
    assert t.rows[0] == t.rows[1] == ("30", "M")


def test_empty_input_with_header_rejected():
    with pytest.raises(IngestError, match="empty"):
        load_table(b"")


def test_duplicate_header_rejected():
    with pytest.raises(IngestError, match="duplicate"):
        load_table(b"a,a\n1,2\n")


def test_headerless_input_gets_positional_names():
    t = load_table("1,2\n3,4\n", IngestOptions(has_header=False))
    assert t.column_names == ("c0", "c1")
    assert t.n_rows == 2


def test_quoted_fields_with_delimiters_and_newlines():
    t = load_table(b'name,note\n"Smith, J","line one\nline two"\n')
    assert t.rows == (("Smith, J", "line one\nline two"),)


def test_file_object_and_bom():
    t = load_table(io.BytesIO("\ufeffage\n1\n".encode("utf-8")))
    assert t.column_names == ("age",)


def test_invalid_utf8():
    with pytest.raises(IngestError, match="UTF-8"):
        load_table(b"a\n\xff\n")


def test_drop_columns_and_unknown_drop():
    t = load_table(b"id,age\n1,30\n2,30\n", IngestOptions(drop_columns=("id",)))
    assert t.column_names == ("age",)
    with pytest.raises(UnknownColumnError):
        load_table(b"id,age\n1,30\n", IngestOptions(drop_columns=("nope",)))


def test_empty_cells_become_missing_only_when_asked():
    t = load_table(b"a,b\n,1\n")
    assert t.rows[0][0] is MISSING
    t = load_table(b"a,b\n,1\n", IngestOptions(empty_is_missing=False))
    assert t.rows[0][0] == ""


@pytest.mark.parametrize(
    "raw, options, expected",
    [
        (" M ", IngestOptions(), "M"),
        ("", IngestOptions(), MISSING),
        ("Male", IngestOptions(case_fold=True), "male"),
        ("Male", IngestOptions(), "Male"),
    ],
)
def test_canonicalize_value(raw, options, expected):
    assert canonicalize_value(raw, options) == expected


@pytest.mark.parametrize("delimiter", ['"', "\n", ",,", ""])
def test_bad_delimiter(delimiter):
    with pytest.raises(ValueError):
        IngestOptions(delimiter=delimiter)


def test_table_invariants():
    with pytest.raises(IngestError):
        Table((ColumnSpec("a"), ColumnSpec("b")), (("1",),))
    with pytest.raises(ValueError):
        Table((ColumnSpec("a"), ColumnSpec("a")), ())
    with pytest.raises(ValueError):
        ColumnSpec("")
    with pytest.raises(ValueError):
        ColumnSpec("a", role="secret")


def test_missing_is_a_singleton():
    assert pickle.loads(pickle.dumps(MISSING)) is MISSING
    assert repr(MISSING) == "Missing"
    assert MISSING != ""


def test_project_examples():
    t = rows_table([("30", "M"), ("30", "M"), ("40", "F")])
    assert project(t, ["age"]) == [("30",), ("30",), ("40",)]
    assert project(t, []) == [(), (), ()]
    assert project(t, ["age", "gender"]) == [("30", "M"), ("30", "M"), ("40", "F")]
    assert project(t, ["gender", "age"])[2] == ("F", "40")


def test_project_unknown_column_names_it():
    t = rows_table([("30", "M")])
    with pytest.raises(UnknownColumnError, match="'zip'"):
        project(t, ["zip"])


@given(small_tables(allow_missing=True, min_rows=0))
def test_dump_load_round_trip(table):
    again = load_table(dump_table(table))
    assert again.column_names == table.column_names
    assert again.rows == table.rows


@given(st.text())
def test_canonicalization_idempotent(raw):
    for options in (IngestOptions(), IngestOptions(case_fold=True), IngestOptions(empty_is_missing=False)):
        once = canonicalize_value(raw, options)
        assert canonicalize_value(once, options) == once


@given(small_tables(), st.data())
def test_project_length_matches_rows(table, data):
    attrs = data.draw(st.lists(st.sampled_from(table.column_names), unique=True))
    assert len(project(table, attrs)) == table.n_rows
