"""Multi-label evaluation metrics.

Label matrices are ``(N, L)`` 0/1 arrays; score matrices hold real
confidences of the same shape.  Ranks are 1-based by descending score with
ties broken by ascending label index.  Ranking-based metrics skip instances
for which they are undefined and emit a :class:`UserWarning`.
"""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

import numpy as np


@dataclass
class EvalReport:
    hamming_loss: float
    subset_accuracy: float
    average_precision: float
    coverage_raw: float
    coverage_normalized: float
    ranking_loss: float
    macro_f1: float
    micro_f1: float
    degenerate_labels: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def mean(cls, reports) -> "EvalReport":
        reports = list(reports)
        fields = asdict(reports[0]).keys()
        out = {k: float(np.mean([getattr(r, k) for r in reports])) for k in fields}
        out["degenerate_labels"] = int(sum(r.degenerate_labels for r in reports))
        return cls(**out)


def _pair(truth, other, what="pred"):
    truth = np.asarray(truth)
    other = np.asarray(other)
    if truth.ndim != 2 or truth.shape != other.shape:
        raise ValueError(f"truth {truth.shape} and {what} {other.shape} must have the same 2-D shape")
    return truth.astype(bool), other


def label_ranks(scores) -> np.ndarray:
    """1-based ranks per row: highest score first, ties by label index."""
    scores = np.asarray(scores, dtype=np.float64)
    order = np.argsort(-scores, axis=1, kind="stable")
    ranks = np.empty_like(order)
    rows = np.arange(scores.shape[0])[:, None]
    ranks[rows, order] = np.arange(1, scores.shape[1] + 1)
    return ranks


def hamming_loss(truth, pred) -> float:
    truth, pred = _pair(truth, pred)
    return float(np.mean(truth != pred.astype(bool)))


def subset_accuracy(truth, pred) -> float:
    truth, pred = _pair(truth, pred)
    return float(np.mean(np.all(truth == pred.astype(bool), axis=1)))


def _warn_excluded(n, metric, why):
    if n:
        warnings.warn(f"{metric}: excluded {n} instance(s) with {why}", UserWarning, stacklevel=3)


def average_precision(truth, scores) -> float:
    truth, scores = _pair(truth, scores, "scores")
    ranks = label_ranks(scores)
    keep = truth.any(axis=1)
    _warn_excluded(int((~keep).sum()), "average_precision", "no relevant label")
    if not keep.any():
        return float("nan")
    total = 0.0
    for y, r in zip(truth[keep], ranks[keep]):
        rel = np.sort(r[y])
        # the k-th relevant label in rank order has k relevant labels at or above it
        total += float(np.mean(np.arange(1, rel.size + 1) / rel))
    return total / int(keep.sum())


def coverage(truth, scores) -> tuple[float, float]:
    """``(raw, normalized)``: mean depth to reach every relevant label, and
    the same divided by the number of labels."""
    truth, scores = _pair(truth, scores, "scores")
    ranks = label_ranks(scores)
    keep = truth.any(axis=1)
    _warn_excluded(int((~keep).sum()), "coverage", "no relevant label")
    if not keep.any():
        return float("nan"), float("nan")
    deepest = np.where(truth[keep], ranks[keep], 0).max(axis=1)
    raw = float(np.mean(deepest - 1))
    return raw, raw / truth.shape[1]


def ranking_loss(truth, scores) -> float:
    truth, scores = _pair(truth, scores, "scores")
    scores = np.asarray(scores, dtype=np.float64)
    n_rel = truth.sum(axis=1)
    keep = (n_rel > 0) & (n_rel < truth.shape[1])
    _warn_excluded(int((~keep).sum()), "ranking_loss", "all or no labels relevant")
    if not keep.any():
        return float("nan")
    total = 0.0
    for y, f in zip(truth[keep], scores[keep]):
        bad = f[y][:, None] <= f[~y][None, :]
        total += bad.sum() / bad.size
    return float(total / int(keep.sum()))


def _confusion(truth, pred):
    truth, pred = _pair(truth, pred)
    pred = pred.astype(bool)
    tp = (truth & pred).sum(axis=0)
    fp = (~truth & pred).sum(axis=0)
    fn = (truth & ~pred).sum(axis=0)
    return tp, fp, fn


def macro_f1(truth, pred, *, return_degenerate: bool = False):
    """Per-label F1 averaged over labels.

    A label with no positives in either matrix has an undefined F1; it counts
    as 0 and is reported through ``return_degenerate``.
    """
    tp, fp, fn = _confusion(truth, pred)
    denom = 2 * tp + fp + fn
    f1 = np.divide(2 * tp, denom, out=np.zeros(tp.shape, dtype=np.float64), where=denom > 0)
    value = float(np.mean(f1))
    if return_degenerate:
        return value, int((denom == 0).sum())
    return value


def micro_f1(truth, pred) -> float:
    tp, fp, fn = _confusion(truth, pred)
    denom = 2 * tp.sum() + fp.sum() + fn.sum()
    return float(2 * tp.sum() / denom) if denom else 0.0


def evaluate(truth, pred, scores) -> EvalReport:
    """All seven metrics in one report."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        cov_raw, cov_norm = coverage(truth, scores)
        avp = average_precision(truth, scores)
        rl = ranking_loss(truth, scores)
    ma, degenerate = macro_f1(truth, pred, return_degenerate=True)
    return EvalReport(
        hamming_loss=hamming_loss(truth, pred),
        subset_accuracy=subset_accuracy(truth, pred),
        average_precision=avp,
        coverage_raw=cov_raw,
        coverage_normalized=cov_norm,
        ranking_loss=rl,
        macro_f1=ma,
        micro_f1=micro_f1(truth, pred),
        degenerate_labels=degenerate,
    )
