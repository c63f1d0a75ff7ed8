"""Plug-in entropy, mutual information and conditional mutual information.

All quantities are in bits and use empirical (maximum-likelihood)
frequencies with ``0 log 0 = 0``.  Conditioning sets are folded into a single
variable with :func:`joint_encode`, which only ever enumerates the joint
states that actually occur.

Counts are sorted before summation so that every value is a deterministic
function of the multiset of cell counts: relabeling an alphabet or permuting
rows gives bit-identical results.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

# compress the running joint code before it can overflow int64
_COMPRESS_AT = 1 << 40


def _column(x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("expected a 1-D column of codes")
    if x.dtype.kind not in "iub":
        if not np.all(np.equal(np.mod(x, 1), 0)):
            raise ValueError("discrete columns must hold integer codes")
    return x.astype(np.int64, copy=False)


def _compress(codes: np.ndarray) -> np.ndarray:
    _, inv = np.unique(codes, return_inverse=True)
    return inv.reshape(-1).astype(np.int64, copy=False)


def _joint_raw(cols: list) -> np.ndarray:
    """Mixed-radix code of several non-negative code columns; not dense."""
    acc = cols[0]
    if acc.size and acc.min() < 0:
        acc = _compress(acc)
    top = int(acc.max()) + 1 if acc.size else 1
    for c in cols[1:]:
        if c.size and c.min() < 0:
            c = _compress(c)
        width = int(c.max()) + 1 if c.size else 1
        if top * width >= _COMPRESS_AT:
            acc = _compress(acc)
            top = int(acc.max()) + 1
        acc = acc * width + c
        top *= width
    return acc


def joint_encode(columns: Sequence, n_samples: int | None = None) -> np.ndarray:
    """Fold several discrete columns into one.

    Two samples share an output code iff they agree on every input column.
    Codes are dense, ``0 .. n_states - 1``.  An empty sequence yields the
    constant column of length ``n_samples``.
    """
    cols = [_column(c) for c in columns]
    if not cols:
        if n_samples is None:
            raise ValueError("n_samples is required to encode an empty conditioning set")
        return np.zeros(n_samples, dtype=np.int64)
    n = cols[0].shape[0]
    if n_samples is not None and n != n_samples:
        raise ValueError(f"column length {n} != n_samples {n_samples}")
    for c in cols[1:]:
        if c.shape[0] != n:
            raise ValueError(f"length mismatch: {c.shape[0]} != {n}")
    return _compress(_joint_raw(cols))


def _entropy_of_codes(codes: np.ndarray) -> float:
    n = codes.shape[0]
    top = int(codes.max()) + 1 if n else 0
    if top <= 4 * n + 1024:
        counts = np.bincount(codes)
        counts = counts[counts > 0]
    else:
        counts = np.unique(codes, return_counts=True)[1]
    counts = np.sort(counts).astype(np.float64)
    if counts.size <= 1:
        return 0.0
    h = np.log2(n) - float(np.sum(counts * np.log2(counts))) / n
    return max(h, 0.0)


def entropy(x) -> float:
    """Empirical Shannon entropy of one discrete column, in bits."""
    x = _column(x)
    if x.size == 0:
        raise ValueError("entropy of an empty column is undefined")
    return _entropy_of_codes(_compress(x))


def joint_entropy(columns: Sequence) -> float:
    codes = joint_encode(columns)
    if codes.size == 0:
        raise ValueError("entropy of an empty column is undefined")
    return _entropy_of_codes(codes)


def _check_same_length(*cols):
    n = cols[0].shape[0]
    for c in cols[1:]:
        if c.shape[0] != n:
            raise ValueError(f"length mismatch: {c.shape[0]} != {n}")
    if n == 0:
        raise ValueError("columns are empty")
    return n


def _mi_codes(x, y) -> float:
    mi = (_entropy_of_codes(x) + _entropy_of_codes(y)) - _entropy_of_codes(_joint_raw([x, y]))
    return mi if mi > 0.0 else 0.0


def _cmi_codes(x, y, z, hz=None) -> float:
    if hz is None:
        hz = _entropy_of_codes(z)
    hxz = _entropy_of_codes(_joint_raw([x, z]))
    hyz = _entropy_of_codes(_joint_raw([y, z]))
    hxyz = _entropy_of_codes(_joint_raw([x, y, z]))
    cmi = (hxz + hyz) - (hxyz + hz)
    return cmi if cmi > 0.0 else 0.0


def _dense_if_wide(codes):
    if codes.size and int(codes.max()) >= 4 * codes.shape[0]:
        return _compress(codes)
    return codes


def mutual_information(x, y) -> float:
    """``I(X;Y) = H(X) + H(Y) - H(X,Y)``, clamped at zero."""
    x, y = _column(x), _column(y)
    _check_same_length(x, y)
    return _mi_codes(_dense_if_wide(_joint_raw([x])), _dense_if_wide(_joint_raw([y])))


def conditional_mutual_information(x, y, s: Sequence = ()) -> float:
    """``I(X;Y|S)`` for a (possibly empty) sequence of conditioning columns."""
    x, y = _column(x), _column(y)
    n = _check_same_length(x, y)
    s = [_column(c) for c in s]
    if not s:
        return mutual_information(x, y)
    _check_same_length(x, *s)
    z = _dense_if_wide(_joint_raw(s))
    return _cmi_codes(_dense_if_wide(_joint_raw([x])), _dense_if_wide(_joint_raw([y])), z)


def scsmi(feature, target, s: Sequence = ()) -> float:
    """Information a feature carries about one target category indicator.

    ``target`` may be a :class:`~camcf.data.CategoryNode` or a raw 0/1 vector.
    """
    return conditional_mutual_information(feature, _indicator(target), [_indicator(c) for c in s])


def dcsmi(a, b, s: Sequence = ()) -> float:
    """Information shared by two category indicators, optionally conditioned."""
    return conditional_mutual_information(
        _indicator(a), _indicator(b), [_indicator(c) for c in s]
    )


def _indicator(v):
    return getattr(v, "indicator", v)


class InfoEngine:
    """Counts conditional-independence evaluations and memoises work.

    The pipeline refers to variables by hashable keys (``("f", j)`` for a
    feature, ``("c", label, value)`` for a category).  The engine caches the
    joint code of every conditioning set it has seen.  ``memo`` is an
    optional dict of finished results that several engines over the *same*
    data may share (e.g. across the points of a parameter grid); every call
    still counts as one test.
    """

    def __init__(self, memo: dict | None = None, max_cache: int = 4096):
        self.n_tests = 0
        self.memo = memo
        self._codes: dict = {}
        self._max_cache = max_cache

    def _cond_codes(self, ckeys: tuple, columns: Sequence):
        hit = self._codes.get(ckeys)
        if hit is None:
            z = _dense_if_wide(_joint_raw([_column(c) for c in columns]))
            hit = (z, _entropy_of_codes(z))
            if len(self._codes) < self._max_cache:
                self._codes[ckeys] = hit
        return hit

    def cmi(self, x_key, x, y_key, y, cond: Sequence = ()) -> float:
        """CMI between two keyed columns given keyed ``(key, column)`` pairs."""
        self.n_tests += 1
        cond = list(cond)
        ckeys = tuple(k for k, _ in cond)
        if self.memo is not None:
            mkey = (min(x_key, y_key), max(x_key, y_key), tuple(sorted(ckeys)))
            hit = self.memo.get(mkey)
            if hit is not None:
                return hit
        if not cond:
            v = _mi_codes(x, y)
        else:
            z, hz = self._cond_codes(ckeys, [c for _, c in cond])
            v = _cmi_codes(x, y, z, hz)
        if self.memo is not None:
            self.memo[mkey] = v
        return v


__all__ = [
    "InfoEngine",
    "conditional_mutual_information",
    "dcsmi",
    "entropy",
    "joint_encode",
    "joint_entropy",
    "mutual_information",
    "scsmi",
]
