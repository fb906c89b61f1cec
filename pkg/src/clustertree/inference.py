"""Bootstrap confidence sets for cluster trees and the pruning schemes.

The confidence set is the sup-norm ball of radius ``t_hat`` around the
kernel density estimate, where ``t_hat`` is a bootstrap quantile of the
sup-norm distance between resampled and original estimates. Pruning removes
tree edges whose lifetime is at most ``multiplier * t_hat`` and returns, next
to the simplified tree, a function ``p_tilde`` whose tree it is and which lies
inside the confidence set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .density import EvaluationDomain, KernelOperator, Sample, ScalarField
from .errors import ConfigError, DataError, InvariantError
from .metrics import d_infinity
from .tree import ClusterTree, EdgeSet, build_cluster_tree, edge_set, find_order_embedding, order_isomorphic

__all__ = [
    "ConfidenceRadius",
    "quantile_index",
    "bootstrap_radius",
    "LifeAssignment",
    "life_values",
    "PrunedTree",
    "prune",
    "complete_prune_field",
    "in_confidence_set",
]

SCHEMES = ("leaf", "top")
_BATCH = 32


@dataclass
class ConfidenceRadius:
    alpha: float
    B: int
    t_hat: float
    bootstrap_distances: np.ndarray
    seed: int | None = None
    grid_error: float = 0.0

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "B": self.B,
            "t_hat": self.t_hat,
            "seed": self.seed,
            "grid_error": self.grid_error,
            "bootstrap_distances": [float(x) for x in self.bootstrap_distances],
        }


def quantile_index(B: int, alpha: float) -> int:
    """1-based rank ``k = ceil(B (1 - alpha))`` of the order statistic used as ``t_hat``."""
    if not isinstance(B, (int, np.integer)) or B < 1:
        raise ConfigError("B must be a positive integer", "inference")
    if not 0 < alpha < 1:
        raise ConfigError("alpha must lie in (0, 1)", "inference")
    target = B * (1.0 - alpha)
    if target < 1 - 1e-12:
        raise ConfigError("too few replicates for requested quantile", "inference")
    # guard against 20 * 0.95 = 19.000000000000004
    return int(math.ceil(target - 1e-9))


def _replicate_rng(seed, b):
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(b,)))


def bootstrap_radius(
    sample: Sample,
    h,
    domain: EvaluationDomain,
    B: int,
    alpha: float,
    rng_seed: int = 0,
) -> ConfidenceRadius:
    """Bootstrap estimate of the ``1 - alpha`` quantile of ``||p_hat* - p_hat||_inf``.

    Replicate ``b`` draws its resample from a generator seeded by
    ``(rng_seed, b)``, so the distance list does not depend on how the
    replicates are scheduled.
    """
    k = quantile_index(B, alpha)
    if rng_seed is None:
        rng_seed = int(np.random.SeedSequence().entropy % 2**63)
    op = KernelOperator(sample, h, domain)
    center = op.apply()
    n = sample.n
    dists = np.empty(B)
    for start in range(0, B, _BATCH):
        stop = min(start + _BATCH, B)
        counts = np.stack(
            [np.bincount(_replicate_rng(rng_seed, b).integers(0, n, n), minlength=n) for b in range(start, stop)]
        )
        boot = op.apply(counts.astype(float))
        dists[start:stop] = np.abs(boot - center[None, :]).max(axis=1)
    t_hat = float(np.sort(dists)[k - 1])
    e = domain.edges
    grid_error = float(np.abs(center[e[:, 0]] - center[e[:, 1]]).max()) if len(e) else 0.0
    return ConfidenceRadius(alpha, int(B), t_hat, dists, rng_seed, grid_error)


def in_confidence_set(candidate: ScalarField, center: ScalarField, radius) -> bool:
    """Whether ``candidate`` lies within ``t_hat`` of ``center`` in sup norm."""
    t_hat = radius.t_hat if isinstance(radius, ConfidenceRadius) else float(radius)
    return d_infinity(candidate, center) <= t_hat


@dataclass
class LifeAssignment:
    edges: EdgeSet
    life: np.ndarray
    scheme: str

    def __getitem__(self, e):
        return self.life[e]

    def is_monotone(self) -> bool:
        return all(
            self.life[e.id] <= self.life[e.parent] for e in self.edges if e.parent is not None
        )


def life_values(tree, scheme: str = "top") -> LifeAssignment:
    """Lifetime of every edge.

    ``top``: width of the cumulative level range (edge bottom to the highest
    point above it). ``leaf``: width of the edge's own level range on leaf
    edges and ``+inf`` on internal edges, so only leaves can be removed.
    """
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown prune scheme {scheme!r}", "inference")
    es = tree if isinstance(tree, EdgeSet) else edge_set(tree)
    if scheme == "top":
        life = np.array([e.cum_hi - e.lo for e in es])
    else:
        life = np.array([e.hi - e.lo if e.is_leaf else math.inf for e in es])
    return LifeAssignment(es, life, scheme)


@dataclass
class PrunedTree:
    tree: ClusterTree
    source: ClusterTree
    t_hat: float
    p_tilde: ScalarField
    scheme: str
    multiplier: float
    life: LifeAssignment
    kept: np.ndarray
    certificates: dict = field(default_factory=dict)

    @property
    def n_leaves(self) -> int:
        return len(self.tree.leaves())

    def pruned_nodes(self) -> np.ndarray:
        """Per node of the source tree: was it removed."""
        es = self.life.edges
        return np.array([not self.kept[es.node_edge[i]] for i in range(self.source.n_nodes)])


def _surviving_parent_walk(es: EdgeSet, kept) -> list:
    """For every edge, the first kept edge at or below it toward the root."""
    first = [None] * len(es)
    for e in es._preorder():
        if kept[e]:
            first[e] = e
        else:
            first[e] = first[es[e].parent]
    return first


def _certificate_field(tree: ClusterTree, es: EdgeSet, kept, t_hat) -> np.ndarray:
    first = _surviving_parent_walk(es, kept)
    own_edge = np.array([es.node_edge[i] for i in range(tree.n_nodes)])[tree.owner]
    anchor = np.array(first)[own_edge]
    hi = np.array([e.hi for e in es])
    return np.where(anchor == own_edge, tree.values, hi[anchor]) + t_hat


def _pruned_structure(tree, es: EdgeSet, kept, p_tilde: ScalarField, t_hat) -> ClusterTree:
    # merge every kept edge that has exactly one kept child into that child
    kept_kids = {e.id: [c for c in e.children if kept[c]] for e in es if kept[e.id]}
    group = {}
    births, parents = [], []

    def top_of(e):
        while len(kept_kids[e]) == 1:
            e = kept_kids[e][0]
        return e

    stack = [(es.root, -1)]
    while stack:
        e, par = stack.pop()
        gid = len(births)
        top = top_of(e)
        births.append(es[top].hi + t_hat)
        parents.append(par)
        cur = e
        while True:
            group[cur] = gid
            if cur == top:
                break
            cur = kept_kids[cur][0]
        for c in reversed(kept_kids[top]):
            stack.append((c, gid))
    first = _surviving_parent_walk(es, kept)
    node_group = np.array([group[first[es.node_edge[i]]] for i in range(tree.n_nodes)])
    return ClusterTree(p_tilde, births, parents, node_group[tree.owner])


def prune(tree: ClusterTree, radius, scheme: str = "top", multiplier: float = 2.0) -> PrunedTree:
    """Remove edges with ``life <= multiplier * t_hat``.

    The root edge is never removed. ``p_tilde`` equals ``f + t_hat`` on kept
    edges and ``(top of the nearest kept edge below) + t_hat`` on removed ones.
    The returned object carries three certificates: the pruned tree is below
    the source in the partial order, the tree rebuilt from ``p_tilde`` is
    order-isomorphic to the pruned tree, and ``||p_tilde - f||_inf <= t_hat``
    (guaranteed when ``multiplier <= 2``).
    """
    t_hat = radius.t_hat if isinstance(radius, ConfidenceRadius) else float(radius)
    if not math.isfinite(t_hat) or t_hat < 0:
        raise ConfigError("t_hat must be finite and nonnegative", "inference")
    if not multiplier > 0:
        raise ConfigError("prune multiplier must be positive", "inference")
    life = life_values(tree, scheme)
    if not life.is_monotone():
        raise InvariantError("life assignment is not monotone along the tree", "inference")
    es = life.edges
    threshold = multiplier * t_hat
    kept = life.life > threshold
    kept[es.root] = True

    p_vals = _certificate_field(tree, es, kept, t_hat)
    p_tilde = ScalarField(tree.field.domain, p_vals)
    pruned = _pruned_structure(tree, es, kept, p_tilde, t_hat)

    deviation = float(np.abs(p_vals - tree.values).max())
    slack = 4 * np.finfo(float).eps * max(1.0, float(np.abs(p_vals).max()))
    rebuilt = build_cluster_tree(p_tilde)
    certs = {
        "below_source": find_order_embedding(pruned, tree, max_edges=None) is not None,
        "rebuilt_isomorphic": order_isomorphic(rebuilt, pruned, max_edges=None),
        "sup_deviation": deviation,
        "in_confidence_set": bool(deviation <= t_hat + slack),
    }
    if not (certs["below_source"] and certs["rebuilt_isomorphic"]):
        raise InvariantError(f"pruning certificate failed: {certs}", "inference")
    if multiplier <= 2 and not certs["in_confidence_set"]:
        raise InvariantError(f"pruned function left the confidence set: {certs}", "inference")
    return PrunedTree(pruned, tree, t_hat, p_tilde, scheme, float(multiplier), life, kept, certs)


def complete_prune_field(tree: ClusterTree, t_hat: float, multiplier: float = 2.0) -> ScalarField:
    """Certificate function for one-shot removal of every short edge.

    Each edge is judged on its own length (not its cumulative length) and all
    short edges, internal ones included, are dropped at once. This is not a
    valid pruning: the result can leave the confidence set, which is why the
    ``top`` scheme works from the leaves down instead.
    """
    es = edge_set(tree)
    own = np.array([e.hi - e.lo for e in es])
    kept = own > multiplier * t_hat
    kept[es.root] = True
    return ScalarField(tree.field.domain, _certificate_field(tree, es, kept, t_hat))
