import json

import numpy as np
import pytest

from gyrokit import TableParseError, cyclic_table, read_table, write_table
from gyrokit.tablefile import format_text, parse_json, parse_text

Z4_TEXT = """gyrotable v1 n=4
# name: Z4
# provenance: cyclic group adapter
0 1 2 3
1 2 3 0
2 3 0 1
3 0 1 2
"""


def test_parse_example():
    t, meta = parse_text(Z4_TEXT)
    assert t.tolist() == cyclic_table(4).tolist()
    assert meta == {"name": "Z4", "provenance": "cyclic group adapter"}


def test_round_trip_text_and_json(tmp_path, gyro8):
    for g in (gyro8[0], gyro8[5]):
        meta = {"name": "fixture", "note": "a: b"}
        for suffix in (".tbl", ".json"):
            p = tmp_path / f"t{suffix}"
            write_table(p, g.table, meta)
            t, m = read_table(p)
            assert (t == g.table).all() and m == meta


def test_json_sniffed_without_suffix(tmp_path):
    p = tmp_path / "table.txt"
    p.write_text(json.dumps({"format": "gyrotable", "version": 1, "n": 2, "rows": [[0, 1], [1, 0]]}))
    t, meta = read_table(p)
    assert t.tolist() == [[0, 1], [1, 0]] and meta == {}


def test_wide_labels_are_aligned():
    text = format_text(cyclic_table(12))
    assert text.splitlines()[1].startswith(" 0  1  2")
    assert (parse_text(text)[0] == cyclic_table(12)).all()


def test_comments_and_blank_lines_are_ignored():
    t, meta = parse_text("\n# free text\ngyrotable v1 n=2\n\n# just a comment\n0 1\n\n1 0\n")
    assert t.tolist() == [[0, 1], [1, 0]] and meta == {}


@pytest.mark.parametrize("text,line,col", [
    ("", 1, 1),
    ("table n=2\n0 1\n1 0\n", 1, 1),
    ("gyrotable v2 n=2\n0 1\n1 0\n", 1, 11),
    ("gyrotable v1 n=2\n0 x\n1 0\n", 2, 3),
    ("gyrotable v1 n=2\n0 1\n1 5\n", 3, 3),
    ("gyrotable v1 n=2\n0 1\n1\n", 3, 2),
    ("gyrotable v1 n=2\n0 1\n", 3, 1),
    ("gyrotable v1 n=2\n0 1\n1 0\n0 1\n", 4, 1),
    ("gyrotable v1 n=3\n0 1 2\n1 -2 0\n2 0 1\n", 3, 3),
])
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(TableParseError) as info:
        parse_text(text, "t.tbl")
    assert (info.value.line, info.value.col) == (line, col)
    assert str(info.value).startswith(f"t.tbl:{line}:{col}: ")


@pytest.mark.parametrize("doc", [
    "{",
    '{"format": "other"}',
    '{"format": "gyrotable", "version": 2, "n": 1, "rows": [[0]]}',
    '{"format": "gyrotable", "version": 1, "n": 2, "rows": [[0, 1]]}',
    '{"format": "gyrotable", "version": 1, "n": 2, "rows": [[0, 1], [1, 2]]}',
    '{"format": "gyrotable", "version": 1, "n": 2, "rows": [[0, 1], [1, true]]}',
])
def test_json_errors(doc):
    with pytest.raises(TableParseError):
        parse_json(doc)


def test_missing_file(tmp_path):
    with pytest.raises(TableParseError):
        read_table(tmp_path / "nope.tbl")


def test_parser_does_not_judge_the_operation():
    # a well-formed file need not hold a gyrogroup; that is the carrier's job
    t, _ = parse_text("gyrotable v1 n=2\n1 1\n1 1\n")
    assert np.array_equal(t, [[1, 1], [1, 1]])
