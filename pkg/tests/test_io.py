import io as stdio
import json

import numpy as np
import pytest

from conftest import AGES, FEMALES, HEALTH, MALES
from mwca.io import (
    TableFormatError,
    drop_zero_slices,
    load_table,
    read_long_csv,
    save_table,
    write_long_csv,
)
from mwca.table import ContingencyTable


def test_bundled_health_table(health, health_counts):
    assert health.shape == (2, 7, 5)
    assert health.mode_names == ("gender", "age", "health")
    assert health.labels == (("M", "F"), tuple(AGES), tuple(HEALTH))
    np.testing.assert_array_equal(health.tensor, health_counts)
    assert health.total == 6371


def test_long_csv_sparse_and_first_appearance(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("a,b,count\nx,q,3\ny,p,2\n")
    t = load_table(p)
    assert t.labels == (("x", "y"), ("q", "p"))
    np.testing.assert_array_equal(t.tensor, [[3, 0], [0, 2]])


def test_label_order_sidecar(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("a,b,count\nx,q,3\ny,p,2\n")
    side = tmp_path / "order.json"
    side.write_text(json.dumps({"b": ["p", "q"]}))
    t = load_table(p, label_order=side)
    assert t.labels[1] == ("p", "q")
    np.testing.assert_array_equal(t.tensor, [[0, 3], [2, 0]])


@pytest.mark.parametrize("text, match", [
    ("", "no data rows"),
    ("a,b,count\n", "no data rows"),
    ("a,b,count\nx,y,1\nx,y,2\n", "duplicate cell"),
    ("a,b,count\nx,y,-1\n", "negative"),
    ("a,b,count\nx,1\n", "expected 3 fields"),
    ("a,b,total\nx,y,1\n", "count"),
    ("a,b,count\nx,y,1.5\n", "integer"),
])
def test_long_csv_errors(text, match):
    with pytest.raises(TableFormatError, match=match):
        read_long_csv(stdio.StringIO(text))


def test_duplicate_health_cell_named(tmp_path):
    rows = ["gender,age,health,count", "M,16-24,Very good,145", "M,16-24,Very good,145"]
    p = tmp_path / "dup.csv"
    p.write_text("\n".join(rows) + "\n")
    with pytest.raises(TableFormatError, match="gender=M, age=16-24, health=Very good"):
        load_table(p)


def test_unknown_format(tmp_path):
    with pytest.raises(TableFormatError):
        load_table(tmp_path / "x.txt")
    with pytest.raises(TableFormatError):
        load_table(tmp_path / "x.csv", format="xlsx")


@pytest.mark.parametrize("suffix", [".csv", ".json"])
def test_round_trip(tmp_path, health, suffix):
    # a zero cell and a zero-count label must survive too
    counts = health.tensor.copy()
    counts[0, 0, 0] = 0
    t = ContingencyTable(counts, health.mode_names, health.labels)
    p = tmp_path / f"h{suffix}"
    save_table(t, p)
    back = load_table(p)
    assert np.array_equal(back.tensor, t.tensor)
    assert back.labels == t.labels and back.mode_names == t.mode_names
    p2 = tmp_path / f"h2{suffix}"
    save_table(back, p2)
    assert p.read_bytes() == p2.read_bytes()


def test_dense_json_ordering(tmp_path):
    doc = {"shape": [2, 2], "mode_names": ["r", "c"], "labels": [["a", "b"], ["x", "y"]],
           "values": [1, 2, 3, 4]}
    p = tmp_path / "t.json"
    p.write_text(json.dumps(doc))
    # first index varies fastest
    np.testing.assert_array_equal(load_table(p).tensor, [[1, 3], [2, 4]])


def test_dense_json_ragged(tmp_path):
    doc = {"shape": [2, 2], "mode_names": ["r", "c"], "labels": [["a"], ["x", "y"]],
           "values": [1, 2, 3, 4]}
    p = tmp_path / "t.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(TableFormatError, match="ragged"):
        load_table(p)


def test_drop_zero_slices_noop(health):
    t, report = drop_zero_slices(health)
    assert report == {}
    assert np.array_equal(t.tensor, health.tensor)


def test_drop_zero_age_row(health):
    counts = health.tensor.copy()
    counts[:, 3, :] = 0
    t = ContingencyTable(counts, health.mode_names, health.labels)
    out, report = drop_zero_slices(t)
    assert report == {"age": ["45-54"]}
    assert out.shape == (2, 6, 5)
    assert "45-54" not in out.labels[1]


def test_drop_recursive():
    # dropping column "y" empties row "b"
    t = ContingencyTable.from_array([[1, 0], [0, 0]], ["r", "c"], [["a", "b"], ["x", "y"]])
    out, report = drop_zero_slices(t)
    assert out.shape == (1, 1)
    assert report == {"r": ["b"], "c": ["y"]}


def test_all_zero_table_rejected():
    with pytest.raises(ValueError):
        ContingencyTable.from_array(np.zeros((2, 2), dtype=int))


def test_table_validation():
    with pytest.raises(ValueError, match="labels"):
        ContingencyTable(np.ones((2, 2), int), ("a", "b"), (("x",), ("p", "q")))
    with pytest.raises(ValueError):
        ContingencyTable(np.array([[1, -1]]), ("a", "b"), (("x",), ("p", "q")))


def test_write_long_csv_row_count(health):
    buf = stdio.StringIO()
    write_long_csv(health, buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 71
    assert lines[1] == f"M,16-24,Very good,{MALES[0][0]}"
    assert lines[-1] == f"F,75+,Very bad,{FEMALES[-1][-1]}"
