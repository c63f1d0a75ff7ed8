"""Reference implementations written straight from the definitions.

Nothing here shares code with the package: joint tables are built with
``collections.Counter`` over tuples and the sums are taken term by term.
"""
from __future__ import annotations

import math
from collections import Counter


def entropy_ref(x):
    n = len(x)
    return -sum((c / n) * math.log2(c / n) for c in Counter(x).values())


def cmi_ref(x, y, s=()):
    """sum p(x,y,s) log2[ p(x,y|s) / (p(x|s) p(y|s)) ] over observed cells."""
    n = len(x)
    zs = [tuple(col[i] for col in s) for i in range(n)]
    pxyz = Counter(zip(x, y, zs))
    pxz = Counter(zip(x, zs))
    pyz = Counter(zip(y, zs))
    pz = Counter(zs)
    total = 0.0
    for (a, b, z), c in pxyz.items():
        total += (c / n) * math.log2((c * pz[z]) / (pxz[(a, z)] * pyz[(b, z)]))
    return total


def mi_ref(x, y):
    return cmi_ref(x, y, ())


# ---------------------------------------------------------------- metrics

def _rank_ref(scores):
    """1-based ranks, larger score first, ties to the lower label index."""
    order = sorted(range(len(scores)), key=lambda l: (-scores[l], l))
    ranks = [0] * len(scores)
    for pos, l in enumerate(order):
        ranks[l] = pos + 1
    return ranks


def hamming_ref(truth, pred):
    n, L = len(truth), len(truth[0])
    return sum(truth[i][l] != pred[i][l] for i in range(n) for l in range(L)) / (n * L)


def subset_acc_ref(truth, pred):
    return sum(list(t) == list(p) for t, p in zip(truth, pred)) / len(truth)


def _ranking_rows(truth, need_irrelevant=False):
    L = len(truth[0])
    top = L - 1 if need_irrelevant else L
    return [i for i, t in enumerate(truth) if 0 < sum(t) <= top]


def avp_ref(truth, scores):
    rows = _ranking_rows(truth)
    if not rows:
        return float("nan")
    acc = 0.0
    for i in rows:
        r = _rank_ref(scores[i])
        rel = [l for l, v in enumerate(truth[i]) if v]
        acc += sum(sum(1 for m in rel if r[m] <= r[l]) / r[l] for l in rel) / len(rel)
    return acc / len(rows)


def coverage_ref(truth, scores):
    rows = _ranking_rows(truth)
    if not rows:
        return float("nan"), float("nan")
    L = len(truth[0])
    raw = 0.0
    for i in rows:
        r = _rank_ref(scores[i])
        raw += max(r[l] for l, v in enumerate(truth[i]) if v) - 1
    raw /= len(rows)
    return raw, raw / L


def ranking_loss_ref(truth, scores):
    rows = _ranking_rows(truth, need_irrelevant=True)
    if not rows:
        return float("nan")
    acc = 0.0
    for i in rows:
        rel = [l for l, v in enumerate(truth[i]) if v]
        irr = [l for l, v in enumerate(truth[i]) if not v]
        bad = sum(1 for a in rel for b in irr if scores[i][a] <= scores[i][b])
        acc += bad / (len(rel) * len(irr))
    return acc / len(rows)


def _f1(tp, fp, fn):
    d = 2 * tp + fp + fn
    return 0.0 if d == 0 else 2 * tp / d


def macro_f1_ref(truth, pred):
    L = len(truth[0])
    vals = []
    for l in range(L):
        tp = sum(1 for t, p in zip(truth, pred) if t[l] and p[l])
        fp = sum(1 for t, p in zip(truth, pred) if not t[l] and p[l])
        fn = sum(1 for t, p in zip(truth, pred) if t[l] and not p[l])
        vals.append(_f1(tp, fp, fn))
    return sum(vals) / L


def micro_f1_ref(truth, pred):
    tp = fp = fn = 0
    for t, p in zip(truth, pred):
        for a, b in zip(t, p):
            tp += a and b
            fp += (not a) and b
            fn += a and (not b)
    return _f1(tp, fp, fn)
