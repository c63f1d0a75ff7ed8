"""Category-level Markov-blanket selection.

For every flattened label category the selector runs four phases:

1. label skeleton -- other-label categories that carry information about the
   target beyond each other (greedy conditional filter);
2. local structure -- parents/children by conditional elimination, then
   spouses through V-structure tests;
3. recovery -- features masked by a correlated label category are restored
   when they explain the target better than the blocking category;
4. refinement -- top-k truncation, marginal-dependence check and
   cross-label redundancy removal.

The per-category blankets are unioned into one global feature subset.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import (
    CamcfConfig,
    CategoryNode,
    CausalNeighborhood,
    Dataset,
    SelectionResult,
    ceil_fraction,
    flatten_labels,
)
from .info import InfoEngine

logger = logging.getLogger(__name__)

PHASES = ("phase1", "phase2", "phase3", "phase4")


def _ckey(node: CategoryNode) -> tuple:
    return ("c", node.label_index, node.category_value)


def _fkey(j: int) -> tuple:
    return ("f", int(j))


def _order_key(scores):
    return lambda j: (-scores[j], j)


@dataclass
class LabelSkeleton:
    """Other-label categories kept as conditioning context for one target.

    ``members`` holds ``(node, marginal_score)`` pairs in admission order.
    """

    target: CategoryNode
    members: list = field(default_factory=list)

    @property
    def nodes(self) -> list:
        return [m for m, _ in self.members]

    def keys(self) -> list:
        return [m.key for m, _ in self.members]

    def without(self, node: CategoryNode) -> "LabelSkeleton":
        return LabelSkeleton(self.target, [(m, s) for m, s in self.members if m.key != node.key])

    def __len__(self):
        return len(self.members)


@dataclass
class PhaseTrace:
    """Per-phase feature sets, wall-clock durations and CI-test counts."""

    sets: dict = field(default_factory=lambda: {p: [] for p in PHASES})
    durations_ms: dict = field(default_factory=lambda: {p: 0.0 for p in PHASES})
    ci_tests: dict = field(default_factory=lambda: {p: 0 for p in PHASES})
    capped_tests: int = 0

    @property
    def total_ci_tests(self) -> int:
        return sum(self.ci_tests.values())


class _Context:
    """Keyed access to the target, features and conditioning members."""

    def __init__(self, target, features, engine, max_conditioning_size=None):
        self.target = target
        self.features = np.asarray(getattr(features, "features", features))
        self.engine = engine if engine is not None else InfoEngine()
        self.cap = max_conditioning_size
        self.n_capped = 0

    @property
    def n_features(self):
        return self.features.shape[1]

    def fcol(self, j):
        return (_fkey(j), self.features[:, j])

    def cond(self, feature_idx=(), nodes=()):
        # label context first so a cap trims features before skeleton members
        items = [(_ckey(n), n.indicator) for n in nodes]
        items += [self.fcol(j) for j in feature_idx]
        if self.cap is not None and len(items) > self.cap:
            self.n_capped += 1
            items = items[: self.cap]
        return items

    def scsmi(self, j, cond=()):
        return self.engine.cmi(_fkey(j), self.features[:, j], _ckey(self.target), self.target.indicator, cond)

    def scsmi_other(self, j, node):
        return self.engine.cmi(_fkey(j), self.features[:, j], _ckey(node), node.indicator)

    def dcsmi(self, node, cond=()):
        return self.engine.cmi(_ckey(node), node.indicator, _ckey(self.target), self.target.indicator, cond)

    def marginal_scores(self):
        return np.array([self.scsmi(j) for j in range(self.n_features)])


def marginal_scores(target: CategoryNode, features, engine: InfoEngine | None = None) -> np.ndarray:
    """Unconditional feature-to-category information for every column."""
    return _Context(target, features, engine).marginal_scores()


def build_label_skeleton(
    target: CategoryNode,
    others: Sequence[CategoryNode],
    delta2: float,
    engine: InfoEngine | None = None,
) -> LabelSkeleton:
    """Greedy label context for ``target`` drawn from other labels' categories.

    A category is a candidate when its marginal information with the target
    exceeds ``delta2``.  Candidates are visited by descending score and
    admitted only if they still clear ``delta2`` given everything admitted
    before them.
    """
    ctx = _Context(target, np.empty((target.indicator.shape[0], 0)), engine)
    candidates = []
    for node in others:
        if node.label_index == target.label_index:
            raise ValueError("skeleton candidates must come from other labels")
        score = ctx.dcsmi(node)
        if score > delta2:
            candidates.append((node, score))
    candidates.sort(key=lambda p: (-p[1], p[0].key))

    members = []
    for node, score in candidates:
        if not members or ctx.dcsmi(node, ctx.cond(nodes=[m for m, _ in members])) > delta2:
            members.append((node, score))
    return LabelSkeleton(target, members)


def discover_pc(
    target: CategoryNode,
    features,
    skeleton: LabelSkeleton,
    delta1: float,
    k1_fraction: float = 1.0,
    engine: InfoEngine | None = None,
    *,
    scores=None,
    max_conditioning_size: int | None = None,
    _ctx=None,
) -> list[int]:
    """Parents and children of ``target`` among the feature columns.

    Candidates pass the marginal ``delta1`` filter and are capped at
    ``ceil(k1_fraction * M)``.  Each candidate, in descending score order, is
    then tested against the target given all other surviving candidates plus
    the skeleton; failures are dropped immediately.
    """
    ctx = _ctx or _Context(target, features, engine, max_conditioning_size)
    if scores is None:
        scores = ctx.marginal_scores()
    m = ctx.n_features
    cand = sorted((j for j in range(m) if scores[j] > delta1), key=_order_key(scores))
    if not cand:
        return []
    cand = cand[: ceil_fraction(k1_fraction, m)]

    survivors = list(cand)
    for f in cand:
        rest = [j for j in survivors if j != f]
        if ctx.scsmi(f, ctx.cond(rest, skeleton.nodes)) <= delta1:
            survivors.remove(f)
    return survivors


def discover_spouses(
    target: CategoryNode,
    pc: Sequence[int],
    features,
    skeleton: LabelSkeleton,
    delta1: float,
    engine: InfoEngine | None = None,
    *,
    max_conditioning_size: int | None = None,
    _ctx=None,
) -> list[int]:
    """Features forming a V-structure with the target through a PC member.

    ``z`` qualifies when it is independent of the target given the skeleton
    but becomes dependent once some ``x`` in ``pc`` joins the conditioning
    set.
    """
    ctx = _ctx or _Context(target, features, engine, max_conditioning_size)
    pcs = set(pc)
    if not pcs:
        return []
    base_cond = ctx.cond(nodes=skeleton.nodes)
    independent = {}
    spouses, seen = [], set()
    for x in pc:
        for z in range(ctx.n_features):
            if z in pcs or z in seen:
                continue
            if z not in independent:
                independent[z] = ctx.scsmi(z, base_cond) <= delta1
            if not independent[z]:
                continue
            if ctx.scsmi(z, ctx.cond([x], skeleton.nodes)) > delta1:
                spouses.append(z)
                seen.add(z)
    return spouses


def recover_features(
    target: CategoryNode,
    cmb: Sequence[int],
    skeleton: LabelSkeleton,
    pc: Sequence[int],
    delta1: float,
    features,
    engine: InfoEngine | None = None,
    *,
    scores=None,
    max_conditioning_size: int | None = None,
    _ctx=None,
) -> tuple[list[int], LabelSkeleton]:
    """Restore features whose signal was masked by a label category.

    Every feature outside ``cmb`` with marginal score at least ``delta1 / 2``
    competes with each skeleton member ``Y`` given the PC set plus the rest
    of the skeleton.  If the feature tells more about the target than ``Y``
    does, it joins the blanket and ``Y`` leaves the skeleton for good.
    """
    ctx = _ctx or _Context(target, features, engine, max_conditioning_size)
    if scores is None:
        scores = ctx.marginal_scores()
    cmb = list(cmb)
    members = list(skeleton.members)
    missing = [j for j in range(ctx.n_features) if j not in set(cmb)]
    for f in missing:
        if not members:
            break
        if scores[f] < delta1 / 2:
            continue
        for blocker, _ in list(members):
            rest = [n for n, _ in members if n.key != blocker.key]
            base = ctx.cond(pc, rest)
            if ctx.scsmi(f, base) > ctx.dcsmi(blocker, base):
                cmb.append(f)
                members = [(n, s) for n, s in members if n.key != blocker.key]
                break
    return cmb, LabelSkeleton(target, members)


def refine_cmb(
    cmb: Sequence[int],
    target: CategoryNode,
    all_other_categories: Sequence[CategoryNode],
    delta1: float,
    k2_fraction: float,
    gamma: float,
    features,
    engine: InfoEngine | None = None,
    *,
    scores=None,
    _ctx=None,
) -> list[int]:
    """Truncate to the top ``ceil(k2_fraction * M)``, then drop weak or
    cross-label redundant features."""
    ctx = _ctx or _Context(target, features, engine)
    if scores is None:
        scores = ctx.marginal_scores()
    ordered = sorted(set(cmb), key=_order_key(scores))
    if not ordered:
        return []
    ordered = ordered[: ceil_fraction(k2_fraction, ctx.n_features)]
    kept = [f for f in ordered if scores[f] > delta1]

    others = sorted(all_other_categories, key=lambda n: n.key)
    final = []
    for f in kept:
        bound = gamma * scores[f]
        if not any(ctx.scsmi_other(f, node) > bound for node in others):
            final.append(f)
    return final


def adaptive_delta(scores, quantile: float, fallback: float) -> float:
    nz = np.asarray(scores)[np.asarray(scores) > 0]
    if nz.size == 0:
        return fallback
    return float(np.quantile(nz, quantile))


def select_for_category(
    dataset: Dataset,
    target: CategoryNode,
    all_nodes: Sequence[CategoryNode],
    config: CamcfConfig,
    memo: dict | None = None,
) -> CausalNeighborhood:
    """Run the four phases for one target category."""
    engine = InfoEngine(memo)
    trace = PhaseTrace()
    ctx = _Context(target, dataset.features, engine, config.max_conditioning_size)
    others = [n for n in all_nodes if n.label_index != target.label_index]

    def tick(phase, t0, n0):
        trace.durations_ms[phase] = (time.perf_counter() - t0) * 1e3
        trace.ci_tests[phase] = engine.n_tests - n0

    t0, n0 = time.perf_counter(), engine.n_tests
    skeleton = build_label_skeleton(target, others, config.delta2, engine)
    scores = ctx.marginal_scores()
    if config.threshold_mode == "quantile-adaptive":
        delta1 = adaptive_delta(scores, config.adaptive_quantile, config.delta1)
    else:
        delta1 = config.delta1
    cand = sorted((j for j in range(dataset.n_features) if scores[j] > delta1), key=_order_key(scores))
    trace.sets["phase1"] = cand[: ceil_fraction(config.k1_fraction, dataset.n_features)] if cand else []
    tick("phase1", t0, n0)

    t0, n0 = time.perf_counter(), engine.n_tests
    pc = discover_pc(target, None, skeleton, delta1, config.k1_fraction, scores=scores, _ctx=ctx)
    sp = discover_spouses(target, pc, None, skeleton, delta1, _ctx=ctx)
    trace.sets["phase2"] = pc + sp
    tick("phase2", t0, n0)

    t0, n0 = time.perf_counter(), engine.n_tests
    cmb, _ = recover_features(target, pc + sp, skeleton, pc, delta1, None, scores=scores, _ctx=ctx)
    recovered = cmb[len(pc) + len(sp):]
    trace.sets["phase3"] = list(cmb)
    tick("phase3", t0, n0)

    t0, n0 = time.perf_counter(), engine.n_tests
    final = refine_cmb(
        cmb, target, others, delta1, config.k2_fraction, config.gamma, None, scores=scores, _ctx=ctx
    )
    trace.sets["phase4"] = list(final)
    tick("phase4", t0, n0)
    trace.capped_tests = ctx.n_capped

    return CausalNeighborhood(
        target=target,
        pc=pc,
        sp=sp,
        recovered=recovered,
        final_cmb=final,
        skeleton=skeleton,
        trace=trace,
        delta1=delta1,
    )


def target_categories(dataset: Dataset, config: CamcfConfig) -> list[CategoryNode]:
    nodes = flatten_labels(dataset, config.min_category_support)
    if config.dedup_binary:
        binary = {
            i for i in range(dataset.n_labels)
            if set(np.unique(dataset.labels[:, i]).tolist()) == {0, 1}
        }
        nodes = [n for n in nodes if n.label_index not in binary or n.category_value == 1]
    return nodes


def run_camcf(dataset: Dataset, config: CamcfConfig | None = None, memo: dict | None = None) -> SelectionResult:
    """Select a global feature subset as the union of per-category blankets.

    ``memo`` may carry test results between runs on the same dataset (for
    instance across a parameter grid); it never changes the outcome.
    """
    config = config or CamcfConfig()
    targets = target_categories(dataset, config)
    all_nodes = flatten_labels(dataset, 1)
    if not targets:
        logger.warning("no label category reaches min_category_support=%d", config.min_category_support)

    def work(t):
        return select_for_category(dataset, t, all_nodes, config, memo)

    if config.threads > 1 and len(targets) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            hoods = list(pool.map(work, targets))
    else:
        hoods = [work(t) for t in targets]

    per_category = {h.target.key: h for h in hoods}
    selected = sorted({f for h in hoods for f in h.final_cmb})
    snapshots = {p: sorted({f for h in hoods for f in h.trace.sets[p]}) for p in PHASES}
    return SelectionResult(per_category, selected, snapshots)


__all__ = [
    "LabelSkeleton",
    "PhaseTrace",
    "adaptive_delta",
    "build_label_skeleton",
    "discover_pc",
    "discover_spouses",
    "marginal_scores",
    "recover_features",
    "refine_cmb",
    "run_camcf",
    "select_for_category",
    "target_categories",
]
