"""Train/test protocols: select features on the training part, fit ML-kNN on
those columns, score the held-out part."""
from __future__ import annotations

import itertools
import logging
from dataclasses import replace

import numpy as np

from .data import CamcfConfig, Dataset
from .metrics import EvalReport, evaluate
from .mlknn import mlknn_fit, mlknn_predict
from .pipeline import run_camcf

logger = logging.getLogger(__name__)

DEFAULT_GRID = {
    "delta1": (0.02, 0.05, 0.1),
    "delta2": (0.02, 0.1),
    "k1_fraction": (0.1, 0.4, 0.7, 1.0),
    "k2_fraction": (0.1, 0.4, 0.7, 1.0),
}


def label_matrix(dataset: Dataset) -> np.ndarray:
    """0/1 target matrix for the classifier.

    Binary label columns are used as they are; if any label has more than
    two categories, every label is one-hot expanded over its categories.
    """
    y = dataset.labels
    if y.max() <= 1:
        return y.astype(np.int64)
    blocks = []
    for i in range(dataset.n_labels):
        values = np.unique(y[:, i])
        blocks.append((y[:, i][:, None] == values[None, :]).astype(np.int64))
    return np.hstack(blocks)


def split_indices(n: int, train_fraction: float, seed: int):
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(round(train_fraction * n))
    n_train = min(max(n_train, 1), n - 1)
    return [(np.sort(perm[:n_train]), np.sort(perm[n_train:]))]


def kfold_indices(n: int, folds: int, seed: int):
    if not 2 <= folds <= n:
        raise ValueError(f"folds must lie in [2, {n}]")
    perm = np.random.default_rng(seed).permutation(n)
    parts = np.array_split(perm, folds)
    out = []
    for f in range(folds):
        test = np.sort(parts[f])
        train = np.sort(np.concatenate([parts[g] for g in range(folds) if g != f]))
        out.append((train, test))
    return out


def score_subset(train: Dataset, test: Dataset, selected, k: int = 10, smoothing: float = 1.0) -> EvalReport:
    """ML-kNN on the selected feature columns; an empty subset makes every
    training row equidistant."""
    cols = list(selected)
    y_train, y_test = label_matrix(train), label_matrix(test)
    x_train = train.features[:, cols].astype(np.float64)
    x_test = test.features[:, cols].astype(np.float64)
    model = mlknn_fit(x_train, y_train, min(k, train.n_samples), smoothing)
    pred, scores = mlknn_predict(model, x_test)
    return evaluate(y_test, pred, scores)


def run_protocol(dataset: Dataset, config: CamcfConfig, splits, k: int = 10, smoothing: float = 1.0, memos=None):
    """Select-then-score on each ``(train, test)`` index pair."""
    per_fold = []
    for fold, (tr, te) in enumerate(splits):
        train, test = dataset.take_rows(tr), dataset.take_rows(te)
        memo = None if memos is None else memos[fold]
        selected = run_camcf(train, config, memo).global_selected
        report = score_subset(train, test, selected, k, smoothing)
        per_fold.append({
            "fold": fold,
            "n_train": int(len(tr)),
            "n_test": int(len(te)),
            "selected": list(selected),
            "metrics": report,
        })
    mean = EvalReport.mean(f["metrics"] for f in per_fold)
    return per_fold, mean


def grid_search(
    dataset: Dataset,
    base: CamcfConfig,
    splits,
    grid: dict | None = None,
    k: int = 10,
    smoothing: float = 1.0,
    criterion: str = "hamming_loss",
):
    """Exhaustive search over ``grid``; returns ``(best_config, per_fold,
    mean, n_candidates)``.  Lower is better for losses and coverage, higher
    for everything else; ties keep the earlier grid point."""
    grid = grid or DEFAULT_GRID
    lower_better = criterion in ("hamming_loss", "ranking_loss", "coverage_raw", "coverage_normalized")
    keys = list(grid)
    best = None
    n = 0
    memos = [dict() for _ in splits]
    for values in itertools.product(*(grid[k_] for k_ in keys)):
        cfg = replace(base, **dict(zip(keys, values)))
        per_fold, mean = run_protocol(dataset, cfg, splits, k, smoothing, memos)
        n += 1
        value = getattr(mean, criterion)
        if np.isnan(value):
            continue
        score = value if lower_better else -value
        if best is None or score < best[0]:
            best = (score, cfg, per_fold, mean)
    if best is None:
        raise RuntimeError(f"criterion {criterion} undefined for every grid point")
    return best[1], best[2], best[3], n
