from __future__ import annotations

import json
from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dropkit.corpus import Date, Passage, parse_number, tokenize
from dropkit.tables import (
    Cell,
    PredArgStructure,
    PredArgTable,
    TableError,
    dump_tables,
    find_date,
    import_tables,
    parse_tables,
    pattern_extract,
)


def _write(tmp_path, obj):
    path = tmp_path / "t.json"
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path


def test_srl_row_types_cells(tmp_path):
    obj = {"tables": [{
        "passage_id": "p1",
        "provenance": "srl",
        "columns": ["verb", "ARG0", "ARG1", "ARGM"],
        "rows": [{"verb": "sold", "ARG0": "Robert Lehrman", "ARG1": "Untitled (1981)", "ARGM": "$16.3 million"}],
    }]}
    table = import_tables(_write(tmp_path, obj))["p1"]
    row = table.rows[0]
    assert row["ARGM"].number == Decimal(16300000)
    assert row["ARG0"].number is None
    assert row["ARG1"].number == 1981
    assert table.provenance == "srl"


def test_empty_table_skipped_with_warning(tmp_path):
    obj = {"tables": [{"passage_id": "p1", "columns": ["a"], "rows": []}]}
    with pytest.warns(UserWarning, match="no rows"):
        assert import_tables(_write(tmp_path, obj)) == {}


def test_duplicate_rows_kept():
    raw = {"tables": [{"passage_id": "p", "columns": ["a"], "rows": [{"a": "x"}, {"a": "x"}]}]}
    assert len(parse_tables(raw)["p"].rows) == 2


@pytest.mark.parametrize(
    "raw, message",
    [
        ({"tables": [{"passage_id": "p", "columns": ["a"], "rows": [{"b": "x"}]}]}, "unknown column"),
        ({"tables": [{"passage_id": "p", "columns": ["a"], "rows": [{"a": 1}]}]}, "strings"),
        ({"tables": [{"passage_id": "p", "columns": [], "rows": [{}]}]}, "at least one relation"),
        ({"tables": [{"passage_id": "p", "columns": ["a"], "rows": [{"a": "x"}], "provenance": "magic"}]}, "provenance"),
        ({"nope": []}, "tables"),
    ],
)
def test_table_errors(raw, message):
    with pytest.raises(TableError, match=message):
        parse_tables(raw)


def test_duplicate_passage_rejected():
    rec = {"passage_id": "p", "columns": ["a"], "rows": [{"a": "x"}]}
    with pytest.raises(TableError, match="duplicate"):
        parse_tables({"tables": [rec, rec]})


@pytest.mark.parametrize(
    "text, expected",
    [
        ("2 March 1992", Date(2, 3, 1992)),
        ("in May 1518", Date(month=5, year=1518)),
        ("Before 1543", Date(year=1543)),
        ("43 yards", None),
    ],
)
def test_find_date(text, expected):
    hit = find_date(text)
    assert (hit[0] if hit else None) == expected


@given(st.text(alphabet=st.sampled_from("0123456789 ,.$%abMarch"), max_size=20))
def test_cell_typing_reparses(text):
    cell = Cell.from_text(text)
    if cell.number is not None:
        pieces = [text] + [t.text for t in tokenize(text)]
        assert any(parse_number(piece) == cell.number for piece in pieces)
    if cell.date is not None:
        assert find_date(text)[0] == cell.date


def test_import_idempotent_on_fixture_output(tmp_path, tables):
    text = dump_tables(tables)
    path = tmp_path / "t.json"
    path.write_text(text, encoding="utf-8")
    assert dump_tables(import_tables(path)) == text
    assert import_tables(path) == tables


def test_display_relation_prefers_plain_strings():
    table = PredArgTable(
        ("num", "arg0"),
        (PredArgStructure.from_strings({"num": "43", "arg0": "Matt Prater"}),),
    )
    assert table.display_relation == "arg0"


def test_pattern_extract_kicker_passage(by_qid):
    passage, _ = by_qid["t1-count"]
    table = pattern_extract(passage)
    rows = [(r["arg0"].text, r["num"].number) for r in table.rows]
    assert rows == [("Matt Prater", 43), ("John Kasay", 39), ("Kasay", 44), ("Kasay", 42)]
    assert table.provenance == "pattern"


def test_pattern_extract_ethnic_groups(by_qid):
    passage, _ = by_qid["t4-countfilter"]
    nums = [r["num"].number for r in pattern_extract(passage).rows]
    assert nums == [338358, 14298, 8595, 7585, 2557]


def test_pattern_extract_single_clause():
    table = pattern_extract(Passage.from_text("p", "Matt Prater nailing a 43-yard field goal"))
    assert [(r["arg0"].text, r["num"].number) for r in table.rows] == [("Matt Prater", 43)]


@pytest.mark.parametrize("text", ["", "the rain fell quietly on everything.", "it was 43 degrees."])
def test_pattern_extract_no_rows(text):
    assert pattern_extract(Passage.from_text("p", text)).rows == ()


@given(st.text(max_size=120))
def test_pattern_extract_total_and_deterministic(text):
    p = Passage.from_text("p", text)
    first = pattern_extract(p)
    assert first == pattern_extract(p)
    for row in first.rows:
        assert set(row.cells) <= set(first.relations)
