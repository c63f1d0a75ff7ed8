"""
Selection inside cross-validation, scored with ML-kNN
=====================================================

Features are selected on each training fold only; ML-kNN is fitted on
the chosen columns and scored on the held-out fold with seven
multi-label metrics.  Pass a CSV or ARFF path as the first argument to
use your own data (labels are the last ``n`` columns, second argument).
"""

import sys

from camcf import CamcfConfig
from camcf.evaluation import grid_search, kfold_indices, run_protocol
from camcf.io import load_dataset
from camcf.synth import forward_sample, generate_dag

if len(sys.argv) > 1:
    ds = load_dataset(sys.argv[1], sys.argv[2] if len(sys.argv) > 2 else "1")
else:
    # same shape as the Flags benchmark: 194 rows, 19 features, 7 labels
    ds = forward_sample(generate_dag(19, 7, 0.1, seed=3, strong=True), 194, seed=3)

splits = kfold_indices(ds.n_samples, 10, seed=1)
per_fold, mean = run_protocol(ds, CamcfConfig(), splits, k=10)
print("defaults:", {k: round(v, 4) for k, v in mean.to_dict().items()})
print("features per fold:", [len(f["selected"]) for f in per_fold])

# A small grid over the thresholds; results are memoised per fold, so
# the 96 points cost far less than 96 separate runs.
best, _, best_mean, n = grid_search(ds, CamcfConfig(), splits, k=10)
print(f"best of {n}: delta1={best.delta1} delta2={best.delta2} k1={best.k1_fraction} k2={best.k2_fraction}")
print(f"hamming loss {best_mean.hamming_loss:.4f}, macro-F1 {best_mean.macro_f1:.4f}")
