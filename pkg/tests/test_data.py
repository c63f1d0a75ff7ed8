import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from camcf.data import (
    CamcfConfig,
    Dataset,
    DatasetError,
    category_indicator,
    ceil_fraction,
    flatten_labels,
)


def _ds(labels, features=None):
    labels = np.asarray(labels)
    if labels.ndim == 1:
        labels = labels[:, None]
    if features is None:
        features = np.zeros((labels.shape[0], 1), dtype=int)
    return Dataset(features, labels)


def test_flatten_binary_label():
    nodes = flatten_labels(_ds([0, 1, 0, 1]))
    assert [n.key for n in nodes] == [(0, 0), (0, 1)]
    assert nodes[0].indicator.tolist() == [1, 0, 1, 0]
    assert nodes[1].indicator.tolist() == [0, 1, 0, 1]


def test_flatten_single_category():
    nodes = flatten_labels(_ds([2, 2, 2]))
    assert [n.key for n in nodes] == [(0, 2)]
    assert nodes[0].indicator.tolist() == [1, 1, 1]


def test_flatten_min_support_skips_rare():
    nodes = flatten_labels(_ds([0, 0, 0, 1]), min_support=2)
    assert [n.key for n in nodes] == [(0, 0)]


def test_flatten_order_across_labels():
    nodes = flatten_labels(_ds(np.array([[2, 0], [0, 1], [1, 1]])))
    assert [n.key for n in nodes] == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1)]


@pytest.mark.parametrize(
    "column, value, expected",
    [([0, 1, 2, 1], 1, [0, 1, 0, 1]), ([0, 0], 0, [1, 1])],
)
def test_category_indicator(column, value, expected):
    assert category_indicator(_ds(column), 0, value).tolist() == expected


def test_category_indicator_missing_value():
    with pytest.raises(KeyError, match="category not present"):
        category_indicator(_ds([0, 0]), 0, 5)
    with pytest.raises(IndexError):
        category_indicator(_ds([0, 0]), 3, 0)


def test_dataset_validation():
    with pytest.raises(DatasetError):
        Dataset(np.zeros((0, 1)), np.zeros((0, 1)))
    with pytest.raises(DatasetError, match="rows"):
        Dataset(np.zeros((3, 1)), np.zeros((2, 1)))
    with pytest.raises(DatasetError, match="negative"):
        Dataset(np.array([[-1]]), np.array([[0]]))
    with pytest.raises(DatasetError):
        Dataset(np.array([[3]]), np.array([[0]]), feature_arities=(2,))


def test_dataset_is_read_only_and_arities_default():
    ds = Dataset(np.array([[0, 4], [1, 2]]), np.array([[1], [0]]))
    assert ds.feature_arities == (2, 5)
    assert ds.label_arities == (2,)
    with pytest.raises(ValueError):
        ds.features[0, 0] = 1


def test_take_rows_keeps_declared_arities():
    ds = Dataset(np.array([[0], [2], [1]]), np.array([[0], [1], [1]]))
    sub = ds.take_rows([0, 2])
    assert sub.n_samples == 2
    assert sub.feature_arities == (3,)


@pytest.mark.parametrize(
    "kw",
    [
        {"delta1": 0},
        {"delta2": -1},
        {"gamma": 0.9},
        {"k1_fraction": 0},
        {"k2_fraction": 1.5},
        {"threshold_mode": "nope"},
        {"threads": 0},
    ],
)
def test_config_rejects_bad_values(kw):
    with pytest.raises(DatasetError):
        CamcfConfig(**kw)


def test_ceil_fraction():
    assert ceil_fraction(0.3, 10) == 3
    assert ceil_fraction(0.1, 19) == 2
    assert ceil_fraction(0.01, 5) == 1
    assert ceil_fraction(1.0, 7) == 7


label_matrices = arrays(
    np.int64,
    st.tuples(st.integers(1, 20), st.integers(1, 3)),
    elements=st.integers(0, 3),
)


@settings(max_examples=100, deadline=None)
@given(label_matrices)
def test_categories_partition_samples(labels):
    ds = _ds(labels)
    nodes = flatten_labels(ds)
    for i in range(ds.n_labels):
        total = sum(n.indicator for n in nodes if n.label_index == i)
        assert np.all(total == 1)
    for n in nodes:
        assert n.indicator.any()


@settings(max_examples=100, deadline=None)
@given(arrays(np.int64, st.integers(1, 20), elements=st.integers(0, 1)))
def test_binary_indicators_are_complements(col):
    nodes = flatten_labels(_ds(col))
    if len(nodes) == 2:
        assert np.all(nodes[0].indicator + nodes[1].indicator == 1)


@settings(max_examples=100, deadline=None)
@given(label_matrices, st.randoms(use_true_random=False))
def test_flatten_commutes_with_row_permutation(labels, rnd):
    perm = list(range(labels.shape[0]))
    rnd.shuffle(perm)
    a = flatten_labels(_ds(labels))
    b = flatten_labels(_ds(labels[perm]))
    assert [n.key for n in a] == [n.key for n in b]
    for na, nb in zip(a, b):
        assert np.array_equal(na.indicator[perm], nb.indicator)
