import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from camcf.data import Dataset, DatasetError
from camcf.io import (
    ArffError,
    discretize_equal_frequency,
    fingerprint,
    load_arff,
    load_csv,
    load_dataset,
    write_csv,
)


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


# -------------------------------------------------------------- discretize

@pytest.mark.parametrize(
    "column, bins, expected",
    [
        ([1, 2, 3, 4], 2, [0, 0, 1, 1]),
        ([1, 1, 1, 2], 2, [0, 0, 0, 1]),
        ([5.5, 5.5, 5.5], 4, [0, 0, 0]),
        ([4, 3, 2, 1], 2, [1, 1, 0, 0]),
    ],
)
def test_discretize_examples(column, bins, expected):
    assert discretize_equal_frequency(column, bins).tolist() == expected


def test_discretize_bins_are_balanced():
    x = np.random.default_rng(0).normal(size=1000)
    counts = np.bincount(discretize_equal_frequency(x, 5))
    assert counts.tolist() == [200] * 5


# --------------------------------------------------------------------- csv

def test_csv_three_columns_one_label(tmp_path):
    p = _write(tmp_path, "a.csv", "a,b,y\n0,1,0\n1,1,1\n2,0,1\n")
    ds = load_csv(p, 1)
    assert (ds.n_features, ds.n_labels, ds.n_samples) == (2, 1, 3)
    assert ds.feature_names == ("a", "b")
    assert ds.labels[:, 0].tolist() == [0, 1, 1]


def test_csv_missing_cell_names_row(tmp_path):
    p = _write(tmp_path, "a.csv", "a,b,y\n0,1,0\n1,,1\n")
    with pytest.raises(DatasetError, match="row 3"):
        load_csv(p, 1)


def test_csv_ragged_row(tmp_path):
    p = _write(tmp_path, "a.csv", "a,b,y\n0,1,0\n1,1\n")
    with pytest.raises(DatasetError, match="row 3"):
        load_csv(p, 1)


def test_csv_empty_and_bad_label_count(tmp_path):
    with pytest.raises(DatasetError, match="empty"):
        load_csv(_write(tmp_path, "e.csv", ""), 1)
    p = _write(tmp_path, "a.csv", "a,y\n0,1\n")
    with pytest.raises(DatasetError):
        load_csv(p, 2)


def test_csv_named_labels_and_encodings(tmp_path):
    text = "y1,colour,size,y2\n1,red,0.5,0\n0,blue,1.5,1\n1,red,2.5,1\n0,green,3.5,0\n"
    ds = load_csv(_write(tmp_path, "a.csv", text), ["y1", "y2"], bins=2)
    assert ds.label_names == ("y1", "y2")
    assert ds.feature_names == ("colour", "size")
    assert ds.features[:, 0].tolist() == [2, 0, 2, 1]  # blue < green < red
    assert ds.features[:, 1].tolist() == [0, 0, 1, 1]
    assert ds.discretized == ("size",)


def test_csv_max_codes_bins_wide_integers(tmp_path):
    rows = "\n".join(f"{v},{v % 2}" for v in range(10))
    ds = load_csv(_write(tmp_path, "a.csv", "a,y\n" + rows + "\n"), 1, bins=2, max_codes=5)
    assert ds.features[:, 0].tolist() == [0] * 5 + [1] * 5


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    ds = Dataset(rng.integers(0, 4, (30, 5)), rng.integers(0, 3, (30, 2)))
    write_csv(ds, tmp_path / "r.csv")
    again = load_csv(tmp_path / "r.csv", 2)
    assert again == ds
    assert fingerprint(again) == fingerprint(ds)


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.int64, st.tuples(st.integers(1, 12), st.integers(1, 4)), elements=st.integers(0, 5)),
    arrays(np.int64, st.tuples(st.just(1), st.integers(1, 3)), elements=st.integers(0, 2)),
)
def test_csv_round_trip_property(tmp_path_factory, feats, lab_row):
    labels = np.resize(lab_row, (feats.shape[0], lab_row.shape[1]))
    ds = Dataset(feats, labels)
    p = tmp_path_factory.mktemp("rt") / "d.csv"
    write_csv(ds, p)
    assert load_csv(p, ds.n_labels) == ds


# -------------------------------------------------------------------- arff

NOMINAL = """@relation tiny
@attribute colour {red,green,blue}
@attribute y {0,1}
@data
red,1
blue,0
"""


def test_arff_nominal_arities(tmp_path):
    ds = load_arff(_write(tmp_path, "t.arff", NOMINAL), n_labels=1)
    assert ds.feature_arities == (3,)
    assert ds.label_arities == (2,)
    assert ds.features[:, 0].tolist() == [0, 2]


def test_arff_sparse_rows(tmp_path):
    text = """@relation 'sparse: -C -2'
@attribute a numeric
@attribute b numeric
@attribute l1 {0,1}
@attribute l2 {0,1}
@data
{0 1, 3 1}
{1 1}
"""
    ds = load_arff(_write(tmp_path, "s.arff", text))
    assert ds.label_names == ("l1", "l2")
    assert ds.features.tolist() == [[1, 0], [0, 1]]
    assert ds.labels.tolist() == [[0, 1], [0, 0]]


def test_arff_positive_label_flag(tmp_path):
    text = """@relation 'x: -C 1'
@attribute y {0,1}
@attribute a {0,1}
@data
1,0
0,1
"""
    ds = load_arff(_write(tmp_path, "p.arff", text))
    assert ds.label_names == ("y",) and ds.feature_names == ("a",)


def test_arff_numeric_is_discretized(tmp_path):
    text = """@relation r
@attribute v numeric
@attribute y {0,1}
@data
0.1,0
0.2,1
0.3,0
0.4,1
"""
    ds = load_arff(_write(tmp_path, "n.arff", text), n_labels=1, bins=2)
    assert ds.discretized == ("v",)
    assert ds.features[:, 0].tolist() == [0, 0, 1, 1]


def test_arff_label_prefix(tmp_path):
    ds = load_arff(_write(tmp_path, "t.arff", NOMINAL), label_prefix="y")
    assert ds.label_names == ("y",)


@pytest.mark.parametrize(
    "text, match",
    [
        ("@relation r\n@attribute a {0,1}\n@attribute y {0,1}\n@data\n0\n", "expected 2"),
        ("@relation r\n@attribute a {0,1}\n@attribute y {0,1}\n@data\n2,1\n", "not declared"),
        ("@relation r\n@attribute a string\n@attribute y {0,1}\n@data\nq,1\n", "unsupported"),
        ("@relation r\n@attribute a {0,1}\n@attribute y {0,1}\n@data\n{5 1}\n", "out of range"),
        ("@relation r\n@attribute a {0,1}\n@attribute y {0,1}\n@data\n?,1\n", "missing"),
        ("@relation r\n@attribute a {0,1}\n@attribute y {0,1}\n@data\n1,1\n", "labels"),
    ],
)
def test_arff_errors(tmp_path, text, match):
    with pytest.raises(ArffError, match=match):
        load_arff(_write(tmp_path, "bad.arff", text))


def test_load_dataset_dispatch(tmp_path):
    p = _write(tmp_path, "t.arff", NOMINAL)
    assert load_dataset(p, "1").n_labels == 1
    q = _write(tmp_path, "a.csv", "a,y\n0,1\n1,0\n")
    assert load_dataset(q, "y").label_names == ("y",)
