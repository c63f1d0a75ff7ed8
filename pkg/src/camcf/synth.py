"""Discrete Bayesian networks with known Markov blankets.

Networks mix feature nodes and binary label nodes.  They can be generated at
random, sampled ancestrally into a :class:`~camcf.data.Dataset`, queried for
their ground-truth blankets, and written to a small versioned text format so
that failing cases can be kept as fixtures.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import CategoryNode, Dataset
from .info import scsmi

FORMAT_HEADER = "camcf-bnspec"
FORMAT_VERSION = 1


@dataclass
class BnNode:
    name: str
    kind: str  # "feature" or "label"
    arity: int
    parents: tuple = ()
    cpt: np.ndarray | None = None  # (prod(parent arities), arity)


@dataclass
class BnSpec:
    nodes: list = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    # -- structure -----------------------------------------------------
    def index(self, name_or_idx) -> int:
        if isinstance(name_or_idx, (int, np.integer)):
            return int(name_or_idx)
        for i, n in enumerate(self.nodes):
            if n.name == name_or_idx:
                return i
        raise KeyError(f"no node named {name_or_idx!r}")

    @property
    def feature_nodes(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if n.kind == "feature"]

    @property
    def label_nodes(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if n.kind == "label"]

    def children(self, i: int) -> list[int]:
        return [j for j, n in enumerate(self.nodes) if i in n.parents]

    def edges(self) -> list[tuple[int, int]]:
        return [(p, j) for j, n in enumerate(self.nodes) for p in n.parents]

    def topological_order(self) -> list[int]:
        indeg = {i: len(set(n.parents)) for i, n in enumerate(self.nodes)}
        ready = sorted(i for i, d in indeg.items() if d == 0)
        order = []
        while ready:
            i = ready.pop(0)
            order.append(i)
            for j in self.children(i):
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
            ready.sort()
        if len(order) != len(self.nodes):
            raise ValueError("parent sets contain a cycle")
        return order

    def to_networkx(self):
        import networkx as nx

        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.nodes)))
        g.add_edges_from(self.edges())
        return g

    def validate(self):
        for i, n in enumerate(self.nodes):
            if n.kind not in ("feature", "label"):
                raise ValueError(f"node {n.name}: kind must be 'feature' or 'label'")
            if n.arity < 1:
                raise ValueError(f"node {n.name}: arity must be positive")
            for p in n.parents:
                if not 0 <= p < len(self.nodes) or p == i:
                    raise ValueError(f"node {n.name}: bad parent index {p}")
            if n.cpt is not None:
                rows = int(np.prod([self.nodes[p].arity for p in n.parents], dtype=np.int64))
                cpt = np.asarray(n.cpt, dtype=np.float64)
                if cpt.shape != (rows, n.arity):
                    raise ValueError(f"node {n.name}: CPT shape {cpt.shape} != {(rows, n.arity)}")
                if np.any(cpt < 0) or np.any(np.abs(cpt.sum(axis=1) - 1.0) > 1e-12):
                    raise ValueError(f"node {n.name}: CPT rows must be distributions")
                n.cpt = cpt
        self.topological_order()

    # -- serialization ---------------------------------------------------
    def to_text(self) -> str:
        lines = [f"{FORMAT_HEADER} {FORMAT_VERSION}", f"nodes {len(self.nodes)}"]
        for n in self.nodes:
            parents = ",".join(str(p) for p in n.parents) or "-"
            lines.append(f"node {n.name} {n.kind} {n.arity} {parents}")
        for n in self.nodes:
            lines.append(f"cpt {n.name} {n.cpt.shape[0]}")
            for row in n.cpt:
                lines.append(" ".join(repr(float(v)) for v in row))
        lines.append("end")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BnSpec":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        head = lines[0].split()
        if len(head) != 2 or head[0] != FORMAT_HEADER:
            raise ValueError("not a camcf BnSpec document")
        if int(head[1]) != FORMAT_VERSION:
            raise ValueError(f"unsupported BnSpec version {head[1]}")
        n_nodes = int(lines[1].split()[1])
        nodes = []
        for ln in lines[2:2 + n_nodes]:
            tag, name, kind, arity, parents = ln.split()
            if tag != "node":
                raise ValueError(f"expected a node line, got {ln!r}")
            pars = () if parents == "-" else tuple(int(p) for p in parents.split(","))
            nodes.append(BnNode(name, kind, int(arity), pars))
        pos = 2 + n_nodes
        by_name = {n.name: n for n in nodes}
        while lines[pos] != "end":
            tag, name, n_rows = lines[pos].split()
            if tag != "cpt":
                raise ValueError(f"expected a cpt line, got {lines[pos]!r}")
            rows = [[float(v) for v in lines[pos + 1 + r].split()] for r in range(int(n_rows))]
            by_name[name].cpt = np.array(rows, dtype=np.float64)
            pos += 1 + int(n_rows)
        return cls(nodes)


def _strong_cpt(rng, arity, parent_arities, strength):
    """Rows that put ``strength`` on a state chosen monotonically from the
    parents (with a random orientation per parent)."""
    if not parent_arities:
        return np.full((1, arity), 1.0 / arity)
    flips = rng.random(len(parent_arities)) < 0.5
    rows = []
    for states in itertools.product(*[range(a) for a in parent_arities]):
        pos = []
        for s, a, flip in zip(states, parent_arities, flips):
            u = s / (a - 1) if a > 1 else 0.0
            pos.append(1.0 - u if flip else u)
        dominant = int(np.floor(np.mean(pos) * (arity - 1) + 0.5))
        row = np.full(arity, (1.0 - strength) / (arity - 1)) if arity > 1 else np.ones(1)
        row[dominant] = strength if arity > 1 else 1.0
        rows.append(row)
    return np.array(rows)


def generate_dag(
    n_features: int,
    n_label_nodes: int,
    edge_prob: float,
    arity: int = 2,
    seed: int = 0,
    *,
    strong: bool = False,
    strength: float = 0.9,
) -> BnSpec:
    """Random DAG over features and binary label nodes.

    Nodes are placed in a random order and every ordered pair gets an edge
    with probability ``edge_prob``.  CPT rows are Dirichlet(1) draws, or, with
    ``strong=True``, concentrate ``strength`` mass on one state so that
    effects are reliably detectable at moderate sample sizes.
    """
    if not 0.0 <= edge_prob <= 1.0:
        raise ValueError("edge_prob must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    specs = [(f"f{i}", "feature", arity) for i in range(n_features)]
    specs += [(f"y{i}", "label", 2) for i in range(n_label_nodes)]
    n = len(specs)
    order = rng.permutation(n)
    parents = {i: [] for i in range(n)}
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < edge_prob:
                parents[int(order[b])].append(int(order[a]))
    nodes = []
    for i, (name, kind, ar) in enumerate(specs):
        pars = tuple(sorted(parents[i]))
        p_ar = [specs[p][2] for p in pars]
        rows = int(np.prod(p_ar, dtype=np.int64))
        if strong:
            cpt = _strong_cpt(rng, ar, p_ar, strength)
        else:
            cpt = rng.dirichlet(np.ones(ar), size=rows)
            cpt /= cpt.sum(axis=1, keepdims=True)
        nodes.append(BnNode(name, kind, ar, pars, cpt))
    return BnSpec(nodes)


def forward_sample(bn: BnSpec, n_samples: int, seed: int = 0) -> Dataset:
    """Ancestral sampling; feature nodes become feature columns and label
    nodes become label columns, each in node order."""
    rng = np.random.default_rng(seed)
    values = np.zeros((n_samples, len(bn.nodes)), dtype=np.int64)
    for i in bn.topological_order():
        node = bn.nodes[i]
        if node.parents:
            shape = [bn.nodes[p].arity for p in node.parents]
            cfg = np.ravel_multi_index(tuple(values[:, p] for p in node.parents), shape)
        else:
            cfg = np.zeros(n_samples, dtype=np.int64)
        cum = np.cumsum(node.cpt, axis=1)[cfg]
        u = rng.random(n_samples)
        values[:, i] = np.minimum((u[:, None] >= cum).sum(axis=1), node.arity - 1)
    f, y = bn.feature_nodes, bn.label_nodes
    return Dataset(
        values[:, f],
        values[:, y],
        tuple(bn.nodes[i].name for i in f),
        tuple(bn.nodes[i].name for i in y),
        tuple(bn.nodes[i].arity for i in f),
        tuple(bn.nodes[i].arity for i in y),
    )


def markov_blanket_nodes(bn: BnSpec, node) -> set[int]:
    """Parents, children and co-parents of children, as node indices."""
    i = bn.index(node)
    mb = set(bn.nodes[i].parents)
    for c in bn.children(i):
        mb.add(c)
        mb.update(bn.nodes[c].parents)
    mb.discard(i)
    return mb


def label_node(bn: BnSpec, label_index: int) -> int:
    return bn.label_nodes[label_index]


def true_markov_blanket(bn: BnSpec, node) -> list[int]:
    """Blanket of ``node`` restricted to features, as feature-column indices.

    ``node`` is a node name or index; a :class:`CategoryNode` resolves to its
    label node.
    """
    if isinstance(node, CategoryNode):
        node = label_node(bn, node.label_index)
    column = {n: k for k, n in enumerate(bn.feature_nodes)}
    return sorted(column[j] for j in markov_blanket_nodes(bn, node) if j in column)


def brute_force_mb(
    dataset: Dataset,
    target,
    delta: float,
    max_subset: int = 3,
    max_features: int = 12,
) -> list[int]:
    """Exhaustive conditional-independence blanket, for use as a test oracle.

    A feature is a parent/child when no subset of the other features of size
    at most ``max_subset`` brings its information with the target to
    ``delta`` or below.  A remaining feature is a spouse when it is marginally
    independent of the target but dependent given a single parent/child.
    """
    m = dataset.n_features
    if m > max_features:
        raise ValueError(f"brute-force blanket refuses M={m} > {max_features} features")
    y = getattr(target, "indicator", target)
    cols = [dataset.features[:, j] for j in range(m)]
    pc = []
    for f in range(m):
        rest = [j for j in range(m) if j != f]
        separated = False
        for size in range(max_subset + 1):
            for subset in itertools.combinations(rest, size):
                if scsmi(cols[f], y, [cols[j] for j in subset]) <= delta:
                    separated = True
                    break
            if separated:
                break
        if not separated:
            pc.append(f)
    spouses = []
    for z in range(m):
        if z in pc or scsmi(cols[z], y) > delta:
            continue
        if any(scsmi(cols[z], y, [cols[x]]) > delta for x in pc):
            spouses.append(z)
    return sorted(pc + spouses)


def make_bn(nodes: Sequence[tuple]) -> BnSpec:
    """Build a network from ``(name, kind, arity, parent_names, cpt)`` tuples."""
    names = [n[0] for n in nodes]
    out = []
    for name, kind, arity, parent_names, cpt in nodes:
        pars = tuple(names.index(p) for p in parent_names)
        out.append(BnNode(name, kind, arity, pars, np.asarray(cpt, dtype=np.float64)))
    return BnSpec(out)


def _noisy_copy(flip):
    return [[1 - flip, flip], [flip, 1 - flip]]


def blocking_network(
    copy_noise: float = 0.03,
    target_noise: float = 0.2,
    n_noise: int = 5,
) -> BnSpec:
    """Feature ``x`` drives the target label and, almost deterministically, a
    second label that masks it once conditioned on."""
    nodes = [("x", "feature", 2, (), [[0.5, 0.5]])]
    nodes += [(f"n{k}", "feature", 2, (), [[0.5, 0.5]]) for k in range(n_noise)]
    nodes += [
        ("target", "label", 2, ("x",), _noisy_copy(target_noise)),
        ("blocker", "label", 2, ("x",), _noisy_copy(copy_noise)),
    ]
    return make_bn(nodes)


def collider_network(noise: float = 0.1, n_noise: int = 3) -> BnSpec:
    """Target label ``c`` and feature ``z`` are independent causes of
    feature ``w`` (an OR gate with flip noise)."""
    w_rows = []
    for c, z in itertools.product((0, 1), (0, 1)):
        on = 1 if (c or z) else 0
        w_rows.append([noise, 1 - noise] if on else [1 - noise, noise])
    nodes = [
        ("w", "feature", 2, ("c", "z"), w_rows),
        ("z", "feature", 2, (), [[0.5, 0.5]]),
    ]
    nodes += [(f"n{k}", "feature", 2, (), [[0.5, 0.5]]) for k in range(n_noise)]
    nodes.append(("c", "label", 2, (), [[0.5, 0.5]]))
    return make_bn(nodes)


__all__ = [
    "BnNode",
    "BnSpec",
    "blocking_network",
    "brute_force_mb",
    "collider_network",
    "forward_sample",
    "generate_dag",
    "label_node",
    "make_bn",
    "markov_blanket_nodes",
    "true_markov_blanket",
]
