"""Slow, obviously-correct reference implementations used by the tests.

None of these share code with the package beyond the data containers; they
recompute everything from the definitions by brute force.
"""

from __future__ import annotations

import itertools
from collections import deque

import numpy as np

from clustertree.density import EvaluationDomain, ScalarField


def adjacency(domain):
    adj = [set() for _ in range(domain.n_vertices)]
    for a, b in domain.edges:
        adj[a].add(int(b))
        adj[b].add(int(a))
    return adj


def components(adj, active):
    """Connected components (frozensets) of the subgraph induced by ``active``."""
    seen, out = set(), []
    for s in sorted(active):
        if s in seen:
            continue
        comp, queue = {s}, deque([s])
        seen.add(s)
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w in active and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        out.append(frozenset(comp))
    return out


def brute_tree(field: ScalarField):
    """Cluster tree by enumerating upper level sets at every distinct value.

    A component at level ``lam`` is a tree node when it contains zero or at
    least two components of the next higher level; otherwise it continues
    the node of the single component it contains. Returns a set of
    ``(node_key, parent_key)`` pairs with ``node_key = (birth, vertex set at
    birth)``.
    """
    vals = field.values
    adj = adjacency(field.domain)
    levels = sorted(set(vals.tolist()), reverse=True)
    node_of = {}  # component -> key of the node it belongs to
    parent_of = {}
    prev = []
    for lam in levels:
        comps = components(adj, set(np.flatnonzero(vals >= lam).tolist()))
        for c in comps:
            preds = [p for p in prev if p <= c]
            if len(preds) == 1:
                node_of[c] = node_of[preds[0]]
            else:
                key = (lam, c)
                node_of[c] = key
                for p in preds:
                    parent_of[node_of[p]] = key
        prev = comps
    (root_comp,) = prev
    parent_of[node_of[root_comp]] = None
    return set(parent_of.items())


def tree_signature(tree):
    """Same representation as :func:`brute_tree` for a built ClusterTree."""
    key = {i: (float(tree.birth[i]), tree.component(i)) for i in range(tree.n_nodes)}
    return {(key[i], None if tree.parent[i] < 0 else key[int(tree.parent[i])]) for i in range(tree.n_nodes)}


def brute_merge_height(field: ScalarField, x: int, y: int) -> float:
    """Highest level at which ``x`` and ``y`` share an upper-level-set component."""
    vals = field.values
    adj = adjacency(field.domain)
    for lam in sorted(set(vals.tolist()), reverse=True):
        if lam > min(vals[x], vals[y]):
            continue
        active = set(np.flatnonzero(vals >= lam).tolist())
        for c in components(adj, active):
            if x in c:
                if y in c:
                    return float(lam)
                break
    raise AssertionError("domain must be connected")


def brute_order_leq(ea, eb) -> bool:
    """Exhaustive search over all injective maps between edge sets.

    The map must send root to root and satisfy ``e <= e'  iff  phi(e) <= phi(e')``.
    """
    na, nb = len(ea), len(eb)
    if na > nb:
        return False
    leq_a = [[ea.leq(i, j) for j in range(na)] for i in range(na)]
    leq_b = [[eb.leq(i, j) for j in range(nb)] for i in range(nb)]
    for phi in itertools.permutations(range(nb), na):
        if phi[ea.root] != eb.root:
            continue
        if all(leq_a[i][j] == leq_b[phi[i]][phi[j]] for i in range(na) for j in range(na)):
            return True
    return False


def random_connected_domain(rng, n, extra=0.3):
    """Random spanning tree on ``n`` vertices plus a few random chords."""
    edges = [(int(rng.integers(0, i)), i) for i in range(1, n)]
    for _ in range(int(extra * n)):
        a, b = rng.choice(n, size=2, replace=False)
        edges.append((int(a), int(b)))
    verts = rng.standard_normal((n, 2))
    return EvaluationDomain(verts, np.array(edges).reshape(-1, 2))


def random_field(rng, n, n_levels=None, domain=None):
    """Random field on a random connected graph; small integer ranges force ties."""
    domain = domain if domain is not None else random_connected_domain(rng, n)
    if n_levels is None:
        vals = rng.random(domain.n_vertices)
    else:
        vals = rng.integers(0, n_levels, domain.n_vertices).astype(float)
    return ScalarField(domain, vals)


def critical_scan_1d(values) -> tuple:
    """Counts of strict interior local maxima and minima of a 1D array (plateaus collapsed)."""
    v = np.asarray(values, dtype=float)
    keep = np.r_[True, v[1:] != v[:-1]]
    v = v[keep]
    if len(v) < 3:
        return (1 if len(v) else 0), 0
    up = v[1:-1] > v[:-2]
    down = v[1:-1] > v[2:]
    maxima = int(np.sum(up & down)) + int(v[0] > v[1]) + int(v[-1] > v[-2])
    minima = int(np.sum(~up & ~down))
    return maxima, minima
