"""Reading and writing datasets: CSV, flat ARFF, equal-frequency binning."""
from __future__ import annotations

import csv
import hashlib
import logging
import re
from pathlib import Path
from typing import Sequence

import numpy as np

from .data import Dataset, DatasetError

logger = logging.getLogger(__name__)

MISSING = {"", "?", "na", "nan", "null", "none"}


class ArffError(DatasetError):
    pass


def discretize_equal_frequency(column, bins: int = 5) -> np.ndarray:
    """Bin a real column at its ``i / bins`` quantiles.

    A value equal to a cut point falls in the lower bin.  Bin codes are
    renumbered densely, so a constant column maps to all zeros.
    """
    x = np.asarray(column, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("expected a non-empty 1-D column")
    if bins < 1:
        raise ValueError("bins must be positive")
    cuts = np.quantile(x, np.arange(1, bins) / bins)
    codes = np.searchsorted(cuts, x, side="left")
    _, dense = np.unique(codes, return_inverse=True)
    return dense.reshape(-1).astype(np.int64)


def _is_missing(cell: str) -> bool:
    return cell.strip().lower() in MISSING


def _parse_int(cell):
    try:
        return int(cell)
    except ValueError:
        f = float(cell)
        if f.is_integer():
            return int(f)
        raise


def _encode_column(name, cells, bins, max_codes=None):
    """Return ``(codes, was_discretized)`` for one column of raw strings."""
    try:
        ints = np.array([_parse_int(c) for c in cells], dtype=np.int64)
    except ValueError:
        ints = None
    if ints is not None:
        n_distinct = np.unique(ints).size
        if max_codes is not None and n_distinct > max_codes:
            return discretize_equal_frequency(ints, bins), True
        if ints.min() < 0:
            _, dense = np.unique(ints, return_inverse=True)
            return dense.reshape(-1).astype(np.int64), False
        return ints, False
    try:
        reals = np.array([float(c) for c in cells])
    except ValueError:
        # categorical strings: code by sorted distinct value
        _, dense = np.unique(np.array([c.strip() for c in cells]), return_inverse=True)
        return dense.reshape(-1).astype(np.int64), False
    logger.info("column %r is real-valued; discretizing into %d bins", name, bins)
    return discretize_equal_frequency(reals, bins), True


def _resolve_labels(names: list[str], labels) -> list[int]:
    """Label column indices from a count (last n columns) or a name list."""
    if isinstance(labels, str):
        labels = int(labels) if labels.strip().lstrip("-").isdigit() else [s.strip() for s in labels.split(",")]
    if isinstance(labels, (int, np.integer)):
        n = int(labels)
        if n < 1 or n >= len(names):
            raise DatasetError(
                f"n_label_columns={n} must be at least 1 and less than the column count {len(names)}"
            )
        return list(range(len(names) - n, len(names)))
    idx = []
    for lab in labels:
        if lab not in names:
            raise DatasetError(f"label column {lab!r} not found")
        idx.append(names.index(lab))
    if not idx or len(idx) >= len(names):
        raise DatasetError("need at least one label and one feature column")
    return idx


def _build(names, columns, label_idx, bins, max_codes, discretize_labels=False):
    feats, labs, fnames, lnames, binned = [], [], [], [], []
    for j, (name, cells) in enumerate(zip(names, columns)):
        codes, was_binned = _encode_column(name, cells, bins, max_codes if j not in label_idx else None)
        if j in label_idx:
            if was_binned and not discretize_labels:
                raise DatasetError(f"label column {name!r} is not discrete")
            labs.append(codes)
            lnames.append(name)
        else:
            feats.append(codes)
            fnames.append(name)
            if was_binned:
                binned.append(name)
    # keep label order as declared
    order = np.argsort([label_idx.index(j) for j in range(len(names)) if j in label_idx], kind="stable")
    labs = [labs[k] for k in order]
    lnames = [lnames[k] for k in order]
    return Dataset(
        np.column_stack(feats),
        np.column_stack(labs),
        tuple(fnames),
        tuple(lnames),
        discretized=tuple(binned),
    )


def load_csv(path, n_label_columns=1, *, bins: int = 5, max_codes: int | None = None) -> Dataset:
    """Load a headed, comma-separated table whose label columns are the last
    ``n_label_columns`` (or the named columns, if a list is given).

    Integer columns are used as codes directly; real-valued columns are
    discretized with :func:`discretize_equal_frequency`.  ``max_codes`` also
    bins integer feature columns with more distinct values than that.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise DatasetError(f"{path}: file is empty")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise DatasetError(f"{path}: no data rows")
    for i, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise DatasetError(f"{path}: row {i} has {len(r)} cells, header has {len(header)}")
        missing = [header[j] for j, c in enumerate(r) if _is_missing(c)]
        if missing:
            raise DatasetError(f"{path}: row {i} has missing value(s) in {', '.join(missing)}")
    label_idx = _resolve_labels(header, n_label_columns)
    columns = [[r[j] for r in body] for j in range(len(header))]
    return _build(header, columns, label_idx, bins, max_codes)


def write_csv(dataset: Dataset, path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(dataset.feature_names) + list(dataset.label_names))
        for row in np.hstack([dataset.features, dataset.labels]).tolist():
            w.writerow(row)


_ATTR_RE = re.compile(r"^@attribute\s+('(?:[^']|\\')*'|\"[^\"]*\"|\S+)\s+(.+)$", re.IGNORECASE)
_LABEL_FLAG_RE = re.compile(r"-(?:L|C)\s+(-?\d+)")


def _unquote(s: str) -> str:
    s = s.strip()
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "'\"":
        return s[1:-1]
    return s


def load_arff(
    path,
    n_labels: int | None = None,
    *,
    label_prefix: str | None = None,
    bins: int = 5,
    max_codes: int | None = None,
) -> Dataset:
    """Load a flat ARFF file (dense or sparse ``{index value}`` rows).

    Label attributes are chosen, in order of precedence, by ``label_prefix``
    (attribute names starting with it), ``n_labels`` (the last ``n_labels``
    attributes), or a ``-L n``/``-C n`` option in the relation name (first
    ``n`` attributes for positive ``n``, last ``|n|`` for negative).
    """
    path = Path(path)
    relation = ""
    names, kinds = [], []
    data_lines = []
    in_data = False
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            if in_data:
                data_lines.append((lineno, line))
                continue
            low = line.lower()
            if low.startswith("@relation"):
                relation = line[len("@relation"):].strip()
            elif low.startswith("@attribute"):
                m = _ATTR_RE.match(line)
                if not m:
                    raise ArffError(f"{path}:{lineno}: malformed attribute declaration")
                name, spec = _unquote(m.group(1)), m.group(2).strip()
                if spec.startswith("{"):
                    if not spec.endswith("}"):
                        raise ArffError(f"{path}:{lineno}: unterminated nominal value list")
                    values = [_unquote(v) for v in next(csv.reader([spec[1:-1]], quotechar="'", skipinitialspace=True))]
                    kinds.append(("nominal", values))
                elif spec.lower() in ("numeric", "real", "integer"):
                    kinds.append(("numeric", None))
                else:
                    raise ArffError(f"{path}:{lineno}: unsupported attribute type {spec!r}")
                names.append(name)
            elif low.startswith("@data"):
                in_data = True
            else:
                raise ArffError(f"{path}:{lineno}: unexpected header line {line!r}")
    if not names:
        raise ArffError(f"{path}: no attributes declared")
    if not data_lines:
        raise ArffError(f"{path}: no data rows")

    n_attr = len(names)
    rows = []
    for lineno, line in data_lines:
        if line.startswith("{"):
            if not line.endswith("}"):
                raise ArffError(f"{path}:{lineno}: unterminated sparse row")
            row = [None] * n_attr
            body = line[1:-1].strip()
            for item in filter(None, (t.strip() for t in body.split(","))):
                parts = item.split(None, 1)
                if len(parts) != 2:
                    raise ArffError(f"{path}:{lineno}: malformed sparse entry {item!r}")
                k = int(parts[0])
                if not 0 <= k < n_attr:
                    raise ArffError(f"{path}:{lineno}: sparse index {k} out of range [0, {n_attr})")
                row[k] = _unquote(parts[1])
            for k in range(n_attr):
                if row[k] is None:
                    row[k] = kinds[k][1][0] if kinds[k][0] == "nominal" else "0"
        else:
            row = [_unquote(c) for c in next(csv.reader([line], quotechar="'", skipinitialspace=True))]
            if len(row) != n_attr:
                raise ArffError(f"{path}:{lineno}: row has {len(row)} values, expected {n_attr}")
        if any(_is_missing(c) for c in row):
            raise ArffError(f"{path}:{lineno}: missing value")
        rows.append(row)

    columns = []
    for k, (kind, values) in enumerate(kinds):
        cells = [r[k] for r in rows]
        if kind == "nominal":
            lookup = {v: i for i, v in enumerate(values)}
            bad = [c for c in cells if c not in lookup]
            if bad:
                raise ArffError(f"{path}: value {bad[0]!r} not declared for attribute {names[k]!r}")
            columns.append([str(lookup[c]) for c in cells])
        else:
            columns.append(cells)

    if label_prefix is not None:
        label_idx = [k for k, n in enumerate(names) if n.startswith(label_prefix)]
    elif n_labels is not None:
        label_idx = _resolve_labels(names, int(n_labels))
    else:
        m = _LABEL_FLAG_RE.search(relation)
        if not m:
            raise ArffError(f"{path}: cannot tell which attributes are labels; pass n_labels or label_prefix")
        c = int(m.group(1))
        label_idx = list(range(c)) if c > 0 else list(range(n_attr + c, n_attr))
    if not label_idx or len(label_idx) >= n_attr:
        raise ArffError(f"{path}: need at least one label and one feature attribute")

    ds = _build(names, columns, label_idx, bins, max_codes)
    # nominal arities come from the declarations, not the observed values
    arity = {n: len(v) for n, (kind, v) in zip(names, kinds) if kind == "nominal"}
    return Dataset(
        ds.features,
        ds.labels,
        ds.feature_names,
        ds.label_names,
        tuple(arity.get(n, a) for n, a in zip(ds.feature_names, ds.feature_arities)),
        tuple(arity.get(n, a) for n, a in zip(ds.label_names, ds.label_arities)),
        ds.discretized,
    )


def load_dataset(path, labels=None, **kwargs) -> Dataset:
    """Dispatch on file suffix (``.arff`` or anything else as CSV)."""
    path = Path(path)
    if path.suffix.lower() == ".arff":
        if isinstance(labels, str) and not labels.strip().lstrip("-").isdigit():
            raise DatasetError("ARFF label selection takes a count; use label_prefix for names")
        return load_arff(path, None if labels is None else int(labels), **kwargs)
    return load_csv(path, 1 if labels is None else labels, **kwargs)


def fingerprint(dataset: Dataset) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(dataset.features, dtype="<i8").tobytes())
    h.update(np.ascontiguousarray(dataset.labels, dtype="<i8").tobytes())
    h.update("\x1f".join(dataset.feature_names + ("|",) + dataset.label_names).encode())
    return h.hexdigest()


__all__ = [
    "ArffError",
    "discretize_equal_frequency",
    "fingerprint",
    "load_arff",
    "load_csv",
    "load_dataset",
    "write_csv",
]
