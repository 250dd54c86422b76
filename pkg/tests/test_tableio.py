"""Matrix parsing, table writers, and the SVG emitter."""

import numpy as np
import pytest

from geodepth import ValidationError
from geodepth.tableio import Table, read_matrix, read_table, write_svg, write_table


def test_read_matrix_basic(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("1.0, 2.0\n3.5,-4.25\n\n0.1,0.2\n")
    M = read_matrix(str(p))
    assert M.shape == (3, 2)
    assert M[1, 1] == -4.25


def test_read_matrix_names_bad_line(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("1.0,2.0\n1.0,oops\n")
    with pytest.raises(ValidationError, match="line 2"):
        read_matrix(str(p))


def test_read_matrix_ragged_rows(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("1.0,2.0\n1.0,2.0,3.0\n")
    with pytest.raises(ValidationError, match="line 2"):
        read_matrix(str(p))


def test_read_matrix_column_expectation(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("1.0,2.0\n")
    with pytest.raises(ValidationError, match="expected 3"):
        read_matrix(str(p), expect_cols=3)
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ValidationError, match="no data"):
        read_matrix(str(empty))


def test_table_row_width_checked():
    with pytest.raises(ValidationError):
        Table(("a", "b"), [(1, 2, 3)])


def test_csv_round_trip_is_exact(tmp_path):
    vals = [0.1, 1.0 / 3.0, 1e-17, -0.0, 123456789.123456789, 2.0**-52]
    rows = [(i, v, "tag") for i, v in enumerate(vals)]
    t = Table(("i", "x", "label"), rows, {"seed": 7, "note": "hello"})
    p = tmp_path / "t.csv"
    write_table(t, str(p), fmt="csv")
    back = read_table(str(p))
    assert back.columns == t.columns
    assert back.meta["seed"] == "7"
    for (i, v, s), (bi, bv, bs) in zip(rows, back.rows):
        assert bi == i and bs == s
        assert bv == v  # repr() round-trip, bit-exact


def test_json_matches_csv_values(tmp_path):
    rows = [(0, 0.30000000000000004), (1, 5e-324)]
    t = Table(("i", "x"), rows, {"seed": 0})
    write_table(t, str(tmp_path / "t.csv"), fmt="csv")
    write_table(t, str(tmp_path / "t.json"), fmt="json")
    a = read_table(str(tmp_path / "t.csv"))
    b = read_table(str(tmp_path / "t.json"))
    assert a.columns == b.columns
    for ra, rb in zip(a.rows, b.rows):
        assert ra == rb


def test_metadata_block_leads_the_file(tmp_path):
    t = Table(("x",), [(1.5,)], {"generator": "geodepth", "seed": 3})
    p = tmp_path / "t.csv"
    write_table(t, str(p))
    lines = p.read_text().splitlines()
    assert lines[0] == "# generator: geodepth"
    assert lines[1] == "# seed: 3"
    assert lines[2] == "x"


def test_unknown_format_rejected(tmp_path):
    t = Table(("x",), [(1.0,)])
    with pytest.raises(ValidationError):
        write_table(t, str(tmp_path / "t.xml"), fmt="xml")


def test_svg_deterministic_and_well_formed(tmp_path):
    rows = [(float(i), float(i * i), float(3 - i)) for i in range(6)]
    t = Table(("x", "a", "b"), rows)
    p1 = tmp_path / "p1.svg"
    p2 = tmp_path / "p2.svg"
    write_svg(t, str(p1), "x", ["a", "b"], mode="line", title="demo")
    write_svg(t, str(p2), "x", ["a", "b"], mode="line", title="demo")
    s = p1.read_text()
    assert s == p2.read_text()
    assert s.startswith("<svg ") and s.rstrip().endswith("</svg>")
    assert s.count("<polyline") == 2
    assert "demo" in s


def test_svg_scatter_and_flat_series(tmp_path):
    rows = [(0.0, 2.0), (1.0, 2.0), (2.0, 2.0)]  # zero y-span
    t = Table(("x", "y"), rows)
    p = tmp_path / "s.svg"
    write_svg(t, str(p), "x", ["y"])
    assert p.read_text().count("<circle") == 3


def test_svg_needs_series(tmp_path):
    t = Table(("x", "y"), [(0.0, 1.0)])
    with pytest.raises(ValidationError):
        write_svg(t, str(tmp_path / "s.svg"), "x", [])
