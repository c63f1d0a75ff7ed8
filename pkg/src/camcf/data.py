"""Dataset container, label-category flattening and shared configuration."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)


class DatasetError(ValueError):
    """Raised when a dataset or configuration violates its invariants."""


def _as_code_matrix(columns, n_samples, what):
    arr = np.asarray(columns, dtype=np.int64)
    if arr.ndim != 2:
        raise DatasetError(f"{what} must be a 2-D array of shape (n_samples, n_columns)")
    if arr.shape[0] != n_samples:
        raise DatasetError(
            f"{what} has {arr.shape[0]} rows, expected n_samples={n_samples}"
        )
    if arr.size and arr.min() < 0:
        raise DatasetError(f"{what} contains negative codes")
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Integer-coded discrete features plus multi-category label columns.

    ``features`` is an ``(N, M)`` array and ``labels`` an ``(N, L)`` array;
    column ``j`` holds codes in ``[0, arity_j)``.  Both arrays are made
    read-only on construction.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple = ()
    label_names: tuple = ()
    feature_arities: tuple = ()
    label_arities: tuple = ()
    discretized: tuple = ()  # names of feature columns binned at load time

    def __post_init__(self):
        feats = np.asarray(self.features)
        if feats.ndim != 2:
            raise DatasetError("features must be 2-D")
        n = feats.shape[0]
        if n < 1:
            raise DatasetError("dataset needs at least one sample")
        feats = _as_code_matrix(feats, n, "features")
        labs = _as_code_matrix(self.labels, n, "labels")
        if feats.shape[1] < 1:
            raise DatasetError("dataset needs at least one feature column")
        if labs.shape[1] < 1:
            raise DatasetError("dataset needs at least one label column")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)

        fnames = tuple(self.feature_names) or tuple(f"f{j}" for j in range(feats.shape[1]))
        lnames = tuple(self.label_names) or tuple(f"y{j}" for j in range(labs.shape[1]))
        if len(fnames) != feats.shape[1] or len(lnames) != labs.shape[1]:
            raise DatasetError("name lists must match the column counts")
        object.__setattr__(self, "feature_names", fnames)
        object.__setattr__(self, "label_names", lnames)

        for attr, arr in (("feature_arities", feats), ("label_arities", labs)):
            given = tuple(int(a) for a in getattr(self, attr))
            observed = tuple(int(c.max()) + 1 for c in arr.T)
            if not given:
                given = observed
            if len(given) != arr.shape[1]:
                raise DatasetError(f"{attr} length does not match the column count")
            for j, (a, o) in enumerate(zip(given, observed)):
                if o > a:
                    raise DatasetError(f"{attr}[{j}]={a} but column holds code {o - 1}")
            object.__setattr__(self, attr, given)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_labels(self) -> int:
        return self.labels.shape[1]

    def feature(self, j: int) -> np.ndarray:
        return self.features[:, j]

    def take_rows(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(
            self.features[rows],
            self.labels[rows],
            self.feature_names,
            self.label_names,
            self.feature_arities,
            self.label_arities,
            self.discretized,
        )

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
            and self.feature_names == other.feature_names
            and self.label_names == other.label_names
            and self.feature_arities == other.feature_arities
            and self.label_arities == other.label_arities
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class CategoryNode:
    """One flattened label category and its 0/1 indicator over samples."""

    label_index: int
    category_value: int
    indicator: np.ndarray = field(repr=False)

    @property
    def key(self) -> tuple:
        return (self.label_index, self.category_value)

    def __eq__(self, other):
        if not isinstance(other, CategoryNode):
            return NotImplemented
        return self.key == other.key and np.array_equal(self.indicator, other.indicator)

    def __hash__(self):
        return hash(self.key)


def category_indicator(dataset: Dataset, label_index: int, category_value: int) -> np.ndarray:
    if not 0 <= label_index < dataset.n_labels:
        raise IndexError(f"label index {label_index} out of range [0, {dataset.n_labels})")
    column = dataset.labels[:, label_index]
    ind = (column == category_value).astype(np.int64)
    if not ind.any():
        name = dataset.label_names[label_index]
        raise KeyError(f"category not present: label {name!r} has no value {category_value}")
    ind.setflags(write=False)
    return ind


def flatten_labels(dataset: Dataset, min_support: int = 1) -> list[CategoryNode]:
    """Split every label column into one binary node per observed category.

    Nodes come back in ascending ``(label_index, category_value)`` order.
    Categories with fewer than ``min_support`` positive samples are skipped.
    """
    nodes = []
    for i in range(dataset.n_labels):
        values, counts = np.unique(dataset.labels[:, i], return_counts=True)
        for v, c in zip(values.tolist(), counts.tolist()):
            if c < min_support:
                logger.info(
                    "skipping category %s=%s: support %d < %d",
                    dataset.label_names[i], v, c, min_support,
                )
                continue
            nodes.append(CategoryNode(i, int(v), category_indicator(dataset, i, v)))
    return nodes


@dataclass(frozen=True)
class CamcfConfig:
    """Thresholds and caps for one selection run.

    ``delta1``/``delta2`` are in bits.  ``k1_fraction``/``k2_fraction`` are
    fractions of the feature count.
    """

    delta1: float = 0.02
    delta2: float = 0.02
    k1_fraction: float = 1.0
    k2_fraction: float = 1.0
    gamma: float = 1.2
    threshold_mode: str = "absolute"
    adaptive_quantile: float = 0.75
    min_category_support: int = 5
    seed: int = 0
    max_conditioning_size: int | None = None
    dedup_binary: bool = False
    threads: int = 1

    def __post_init__(self):
        if not self.delta1 > 0 or not self.delta2 > 0:
            raise DatasetError("delta1 and delta2 must be positive")
        if not self.gamma >= 1:
            raise DatasetError("gamma must be >= 1")
        for name in ("k1_fraction", "k2_fraction"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise DatasetError(f"{name} must lie in (0, 1], got {v}")
        if self.threshold_mode not in ("absolute", "quantile-adaptive"):
            raise DatasetError(f"unknown threshold_mode {self.threshold_mode!r}")
        if not 0 < self.adaptive_quantile < 1:
            raise DatasetError("adaptive_quantile must lie in (0, 1)")
        if self.min_category_support < 1:
            raise DatasetError("min_category_support must be >= 1")
        if self.max_conditioning_size is not None and self.max_conditioning_size < 0:
            raise DatasetError("max_conditioning_size must be non-negative")
        if self.threads < 1:
            raise DatasetError("threads must be >= 1")


@dataclass
class CausalNeighborhood:
    target: CategoryNode
    pc: list = field(default_factory=list)
    sp: list = field(default_factory=list)
    recovered: list = field(default_factory=list)
    final_cmb: list = field(default_factory=list)
    skeleton: object = None
    trace: object = None
    delta1: float | None = None


@dataclass
class SelectionResult:
    per_category: dict
    global_selected: list
    per_phase_snapshots: dict | None = None

    def selected_names(self, dataset: Dataset) -> list[str]:
        return [dataset.feature_names[j] for j in self.global_selected]


def ceil_fraction(fraction: float, total: int) -> int:
    """``ceil(fraction * total)`` with a floor of one."""
    # round first so 0.3 * 10 does not become 4 through float noise
    return max(1, int(np.ceil(round(fraction * total, 9))))


__all__ = [
    "CamcfConfig",
    "CategoryNode",
    "CausalNeighborhood",
    "Dataset",
    "DatasetError",
    "SelectionResult",
    "category_indicator",
    "ceil_fraction",
    "flatten_labels",
]
