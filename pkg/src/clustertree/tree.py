"""Cluster (merge) trees of scalar fields on graphs.

The tree is built by a downward sweep over the vertices: vertices are
inserted in order of decreasing value (ties by vertex index) and joined to
already inserted neighbours with a union-find structure. A node of the tree is
a maximal stretch of levels over which the connected component does not
split, so every node is also an edge of the tree in the sense of equivalence
classes of clusters.

Conventions
-----------
``birth`` of a node is the highest level at which its component exists (a
local maximum for leaves, the merge level for internal nodes). The node lives
down to its ``death``, which is the birth of its parent, or the minimum of the
field for the root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .density import ScalarField
from .errors import ConfigError, DataError, InvariantError

__all__ = [
    "TreeNode",
    "ClusterTree",
    "build_cluster_tree",
    "MergeHeightIndex",
    "merge_height",
    "tree_distance",
    "Edge",
    "EdgeSet",
    "edge_set",
    "find_order_embedding",
    "partial_order_leq",
    "order_isomorphic",
]

DEFAULT_ORDER_CAP = 12


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        """Attach root ``b`` under root ``a``."""
        self.parent[b] = a


@dataclass(frozen=True)
class TreeNode:
    id: int
    birth: float
    parent: int | None
    children: tuple
    members: np.ndarray


class ClusterTree:
    """Rooted merge tree of a :class:`ScalarField`.

    Parameters
    ----------
    field : ScalarField
        The function whose upper level sets the tree describes.
    birth : array_like
        Birth level per node.
    parent : array_like
        Parent node id per node, ``-1`` for the root.
    owner : array_like
        For each domain vertex, the node whose component first contains it
        during the downward sweep.
    """

    def __init__(self, field: ScalarField, birth, parent, owner):
        self.field = field
        self.birth = np.asarray(birth, dtype=float)
        self.parent = np.asarray(parent, dtype=np.int64)
        self.owner = np.asarray(owner, dtype=np.int64)
        n = len(self.birth)
        if self.parent.shape != (n,):
            raise InvariantError("birth and parent arrays differ in length", "tree")
        if self.owner.shape != (field.domain.n_vertices,):
            raise InvariantError("owner array must cover every vertex", "tree")
        roots = np.flatnonzero(self.parent < 0)
        if len(roots) != 1:
            raise InvariantError(f"tree must have exactly one root, found {len(roots)}", "tree")
        self.root = int(roots[0])
        children = [[] for _ in range(n)]
        for i, p in enumerate(self.parent):
            if p >= 0:
                children[p].append(i)
        self.children = [tuple(c) for c in children]
        for a in (self.birth, self.parent, self.owner):
            a.setflags(write=False)

    @property
    def values(self) -> np.ndarray:
        return self.field.values

    @property
    def n_nodes(self) -> int:
        return len(self.birth)

    def __len__(self):
        return self.n_nodes

    def __repr__(self):
        return f"ClusterTree(n_nodes={self.n_nodes}, n_leaves={len(self.leaves())})"

    def death(self, i: int) -> float:
        p = self.parent[i]
        return float(self.values.min()) if p < 0 else float(self.birth[p])

    @cached_property
    def deaths(self) -> np.ndarray:
        out = np.where(self.parent >= 0, self.birth[np.maximum(self.parent, 0)], self.values.min())
        out.setflags(write=False)
        return out

    def leaves(self) -> list:
        return [i for i in range(self.n_nodes) if not self.children[i]]

    def members(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.owner == i)

    def node(self, i: int) -> TreeNode:
        p = int(self.parent[i])
        return TreeNode(i, float(self.birth[i]), None if p < 0 else p, self.children[i], self.members(i))

    @property
    def nodes(self) -> list:
        return [self.node(i) for i in range(self.n_nodes)]

    def preorder(self) -> list:
        out, stack = [], [self.root]
        while stack:
            i = stack.pop()
            out.append(i)
            stack.extend(reversed(self.children[i]))
        return out

    @cached_property
    def depth(self) -> np.ndarray:
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        for i in self.preorder():
            if self.parent[i] >= 0:
                depth[i] = depth[self.parent[i]] + 1
        return depth

    @cached_property
    def subtree_max(self) -> np.ndarray:
        """Highest level reached anywhere in each node's subtree."""
        out = self.birth.copy()
        for i in reversed(self.preorder()):
            p = self.parent[i]
            if p >= 0 and out[i] > out[p]:
                out[p] = out[i]
        return out

    @cached_property
    def subtree_size(self) -> np.ndarray:
        """Number of domain vertices owned by each node's subtree."""
        size = np.bincount(self.owner, minlength=self.n_nodes).astype(np.int64)
        for i in reversed(self.preorder()):
            p = self.parent[i]
            if p >= 0:
                size[p] += size[i]
        return size

    def component(self, i: int) -> frozenset:
        """Vertex set of node ``i``'s component at its birth level."""
        sub = np.zeros(self.n_nodes, dtype=bool)
        for j in self.preorder():
            sub[j] = j == i or (self.parent[j] >= 0 and sub[self.parent[j]])
        verts = np.flatnonzero(sub[self.owner] & (self.values >= self.birth[i]))
        return frozenset(verts.tolist())


def build_cluster_tree(field: ScalarField) -> ClusterTree:
    """Merge tree of ``field`` over its domain's adjacency graph.

    Plateaus are resolved so that no node has a single child and every child
    is born strictly above its parent; this makes the result the discrete
    cluster tree of the field rather than an artefact of insertion order.
    """
    values = field.values
    domain = field.domain
    nv = len(values)
    order = np.lexsort((np.arange(nv), -values))
    indptr, indices = domain.indptr, domain.indices
    vals = values.tolist()

    uf = _UnionFind(nv)
    inserted = [False] * nv
    comp_node = {}
    birth, children, members, alive = [], [], [], []

    def new_node(level, kids, mem):
        birth.append(level)
        children.append(kids)
        members.append(mem)
        alive.append(True)
        return len(birth) - 1

    for v in order.tolist():
        lvl = vals[v]
        inserted[v] = True
        roots = []
        for u in indices[indptr[v] : indptr[v + 1]].tolist():
            if inserted[u]:
                r = uf.find(u)
                if r not in roots:
                    roots.append(r)
        if not roots:
            comp_node[v] = new_node(lvl, [], [v])
            continue
        if len(roots) == 1:
            r = roots[0]
            uf.union(r, v)
            members[comp_node[r]].append(v)
            continue

        nodes = [comp_node[r] for r in roots]
        strict = [c for c in nodes if birth[c] > lvl]
        flat = [c for c in nodes if birth[c] == lvl]
        kids = list(strict)
        mem = [v]
        for c in flat:
            kids.extend(children[c])
            mem.extend(members[c])
        if len(kids) >= 2:
            target = flat[0] if flat else None
            if target is None:
                target = new_node(lvl, kids, mem)
            else:
                children[target] = kids
                members[target] = mem
            for c in flat[1:]:
                alive[c] = False
        elif len(kids) == 1:
            # plateau vertices glued onto a single surviving branch
            target = kids[0]
            members[target].extend(mem)
            for c in flat:
                alive[c] = False
        else:
            target = flat[0]
            members[target] = mem
            for c in flat[1:]:
                alive[c] = False
        base = roots[0]
        for r in roots[1:]:
            uf.union(base, r)
        uf.union(base, v)
        comp_node[base] = target

    root_old = comp_node[uf.find(int(order[0]))]
    for v in range(nv):
        if uf.find(v) != uf.find(int(order[0])):
            raise DataError("domain not connected", "tree")

    # relabel in preorder, children kept in creation order
    new_id = {}
    parent_new = []
    birth_new = []
    stack = [(root_old, -1)]
    while stack:
        old, par = stack.pop()
        if not alive[old]:
            raise InvariantError("dead node reachable from root", "tree")
        new_id[old] = len(birth_new)
        birth_new.append(birth[old])
        parent_new.append(par)
        for c in reversed(children[old]):
            stack.append((c, new_id[old]))
    owner = np.empty(nv, dtype=np.int64)
    for old, nid in new_id.items():
        owner[members[old]] = nid
    tree = ClusterTree(field, birth_new, parent_new, owner)
    _check_tree(tree)
    return tree


def _check_tree(tree: ClusterTree):
    b = tree.birth
    p = tree.parent
    has_parent = p >= 0
    if np.any(b[has_parent] <= b[p[has_parent]]):
        raise InvariantError("child born at or below its parent", "tree")
    if any(len(c) == 1 for c in tree.children):
        raise InvariantError("unary node in merge tree", "tree")
    if np.any(tree.values > b[tree.owner]):
        raise InvariantError("vertex above the birth level of its owner", "tree")


class MergeHeightIndex:
    """Answers merge-height and tree-distance queries for one tree.

    Lowest common ancestors are found by binary lifting; all query methods
    accept scalars or equally shaped integer arrays.
    """

    def __init__(self, tree: ClusterTree):
        self.tree = tree
        self.values = tree.values
        n = tree.n_nodes
        self.depth = tree.depth
        up0 = np.where(tree.parent >= 0, tree.parent, tree.root).astype(np.int64)
        levels = max(1, int(self.depth.max()).bit_length())
        up = [up0]
        for _ in range(1, levels):
            up.append(up[-1][up[-1]])
        self._up = up
        self._n = n

    @property
    def n_vertices(self) -> int:
        return len(self.values)

    def _check(self, x):
        x = np.asarray(x)
        if x.size and (not np.issubdtype(x.dtype, np.integer) or x.min() < 0 or x.max() >= self.n_vertices):
            raise DataError("invalid vertex index", "tree")
        return x.astype(np.int64)

    def lca(self, a, b) -> np.ndarray:
        """Lowest common ancestor of node arrays ``a`` and ``b``."""
        a = np.array(a, dtype=np.int64, copy=True, ndmin=1)
        b = np.array(b, dtype=np.int64, copy=True, ndmin=1)
        a, b = np.broadcast_arrays(a, b)
        a, b = a.copy(), b.copy()
        swap = self.depth[a] < self.depth[b]
        a[swap], b[swap] = b[swap], a[swap]
        diff = self.depth[a] - self.depth[b]
        for k, up in enumerate(self._up):
            m = ((diff >> k) & 1).astype(bool)
            a[m] = up[a[m]]
        for up in reversed(self._up):
            ua, ub = up[a], up[b]
            m = ua != ub
            a[m] = ua[m]
            b[m] = ub[m]
        return np.where(a == b, a, self._up[0][a])

    def merge_heights(self, x, y) -> np.ndarray:
        x, y = np.broadcast_arrays(self._check(x), self._check(y))
        owner = self.tree.owner
        anc = self.lca(owner[x].ravel(), owner[y].ravel()).reshape(x.shape)
        return np.minimum(np.minimum(self.values[x], self.values[y]), self.tree.birth[anc])

    def merge_height(self, x: int, y: int) -> float:
        return float(self.merge_heights(np.asarray([x]), np.asarray([y]))[0])

    def cluster_merge_height(self, a: int, b: int) -> float:
        """Merge height of two clusters given as node ids (LCA birth level)."""
        if not (0 <= a < self._n and 0 <= b < self._n):
            raise DataError("invalid node id", "tree")
        return float(self.tree.birth[self.lca([a], [b])[0]])

    def tree_distances(self, x, y) -> np.ndarray:
        x, y = self._check(x), self._check(y)
        return self.values[x] + self.values[y] - 2.0 * self.merge_heights(x, y)

    def matrix(self, vertices=None) -> np.ndarray:
        """Merge heights between all pairs of ``vertices`` (default: all)."""
        verts = np.arange(self.n_vertices) if vertices is None else self._check(vertices)
        own = self.tree.owner[verts]
        nodes, inv = np.unique(own, return_inverse=True)
        ii, jj = np.meshgrid(nodes, nodes, indexing="ij")
        node_mh = self.tree.birth[self.lca(ii.ravel(), jj.ravel())].reshape(ii.shape)
        f = self.values[verts]
        return np.minimum(np.minimum.outer(f, f), node_mh[np.ix_(inv, inv)])


def merge_height(index: MergeHeightIndex, x: int, y: int) -> float:
    """Largest level at which vertices ``x`` and ``y`` share a component."""
    return index.merge_height(x, y)


def tree_distance(index: MergeHeightIndex, x: int, y: int) -> float:
    """``f(x) + f(y) - 2 m_f(x, y)``: distance between x and y along the tree."""
    return float(index.tree_distances(np.asarray([x]), np.asarray([y]))[0])


@dataclass(frozen=True)
class Edge:
    """A maximal chain of nodes between branch points.

    ``level`` is the half-open range ``(lo, hi]`` the chain itself spans;
    ``cumlevel`` runs from the same ``lo`` to the highest level reached in the
    subtree above the chain.
    """

    id: int
    nodes: tuple
    lo: float
    hi: float
    cum_hi: float
    parent: int | None
    children: tuple

    @property
    def level(self) -> tuple:
        return (self.lo, self.hi)

    @property
    def cumlevel(self) -> tuple:
        return (self.lo, self.cum_hi)

    @property
    def is_leaf(self) -> bool:
        return not self.children


class EdgeSet:
    """Edges of a tree together with the induced order (descendant <= ancestor)."""

    def __init__(self, tree: ClusterTree | None, edges: list):
        self.tree = tree
        self.edges = edges
        roots = [e.id for e in edges if e.parent is None]
        if len(roots) != 1:
            raise InvariantError("edge set must have one root edge", "tree")
        self.root = roots[0]
        self.node_edge = {}
        for e in edges:
            for n in e.nodes:
                self.node_edge[n] = e.id

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __getitem__(self, i) -> Edge:
        return self.edges[i]

    def leq(self, a: int, b: int) -> bool:
        """``[a] <= [b]``: every cluster of edge ``a`` lies inside every cluster of ``b``."""
        while a is not None:
            if a == b:
                return True
            a = self.edges[a].parent
        return False

    @cached_property
    def n_leaves_below(self) -> list:
        out = [0] * len(self.edges)
        for e in reversed(self._preorder()):
            out[e] = 1 if not self.edges[e].children else sum(out[c] for c in self.edges[e].children)
        return out

    @cached_property
    def size_below(self) -> list:
        out = [1] * len(self.edges)
        for e in reversed(self._preorder()):
            out[e] = 1 + sum(out[c] for c in self.edges[e].children)
        return out

    def _preorder(self):
        out, stack = [], [self.root]
        while stack:
            e = stack.pop()
            out.append(e)
            stack.extend(reversed(self.edges[e].children))
        return out

    @classmethod
    def from_parents(cls, parents) -> "EdgeSet":
        """Bare combinatorial edge set from a parent list (``None``/-1 for the root)."""
        parents = [None if p is None or p < 0 else int(p) for p in parents]
        kids = [[] for _ in parents]
        for i, p in enumerate(parents):
            if p is not None:
                kids[p].append(i)
        edges = [Edge(i, (i,), math.nan, math.nan, math.nan, p, tuple(kids[i])) for i, p in enumerate(parents)]
        return cls(None, edges)


def edge_set(tree: ClusterTree) -> EdgeSet:
    """Partition the nodes of ``tree`` into maximal unbranched chains."""
    # chain bottom (closest to the root) for every node
    head = {}
    for i in tree.preorder():
        p = int(tree.parent[i])
        if p >= 0 and len(tree.children[p]) == 1:
            head[i] = head[p]
        else:
            head[i] = i
    chains = {}
    for i in tree.preorder():
        chains.setdefault(head[i], []).append(i)
    heads = list(chains)
    eid = {h: k for k, h in enumerate(heads)}
    edges = []
    sub_max = tree.subtree_max
    for h in heads:
        chain = chains[h]
        top = chain[-1]
        p = int(tree.parent[h])
        kids = tuple(eid[head[c]] for c in tree.children[top])
        edges.append(
            Edge(
                id=eid[h],
                nodes=tuple(chain),
                lo=tree.death(h),
                hi=float(tree.birth[top]),
                cum_hi=float(sub_max[h]),
                parent=None if p < 0 else eid[head[p]],
                children=kids,
            )
        )
    return EdgeSet(tree, edges)


def _as_edges(t) -> EdgeSet:
    if isinstance(t, EdgeSet):
        return t
    if isinstance(t, ClusterTree):
        return edge_set(t)
    raise TypeError(f"expected ClusterTree or EdgeSet, got {type(t).__name__}")


def find_order_embedding(a, b, max_edges: int | None = DEFAULT_ORDER_CAP) -> dict | None:
    """Search for an order embedding of the edges of ``a`` into those of ``b``.

    Returns a dict ``{edge of a: edge of b}`` that is injective, sends the root
    to the root and satisfies ``e1 <= e2  iff  phi(e1) <= phi(e2)``, or ``None``
    if no such map exists. The search is exhaustive: each child subtree of an
    edge of ``a`` must land below a distinct, mutually incomparable edge of
    ``b``, and all ways of distributing children over subtrees are tried,
    with memoisation on (set of subtrees, target edge).
    """
    ea, eb = _as_edges(a), _as_edges(b)
    if max_edges is not None and max(len(ea), len(eb)) > max_edges:
        raise ConfigError("tree too large for exact order check", "tree")
    if len(ea) > len(eb) or ea.n_leaves_below[ea.root] > eb.n_leaves_below[eb.root]:
        return None

    leaves_a, leaves_b = ea.n_leaves_below, eb.n_leaves_below
    size_a, size_b = ea.size_below, eb.size_below
    memo_emb, memo_group, memo_split = {}, {}, {}

    def emb(u, v):
        # subtree(u) into subtree(v) with u -> v
        key = (u, v)
        if key in memo_emb:
            return memo_emb[key]
        res = None
        if size_a[u] <= size_b[v] and leaves_a[u] <= leaves_b[v]:
            kids = ea[u].children
            if not kids:
                res = {u: v}
            else:
                sub = split(frozenset(kids), v, 0)
                if sub is not None:
                    res = dict(sub)
                    res[u] = v
        memo_emb[key] = res
        return res

    def group(S, w):
        # antichain placement of the subtrees in S inside subtree(w)
        key = (S, w)
        if key in memo_group:
            return memo_group[key]
        res = None
        if sum(leaves_a[s] for s in S) <= leaves_b[w] and sum(size_a[s] for s in S) <= size_b[w]:
            if len(S) == 1:
                (s,) = S
                res = emb(s, w)
                if res is None:
                    for c in eb[w].children:
                        res = group(S, c)
                        if res is not None:
                            break
            else:
                res = split(S, w, 0)
        memo_group[key] = res
        return res

    def split(S, w, j):
        # distribute S over children j, j+1, ... of w
        if not S:
            return {}
        kids = eb[w].children
        if j == len(kids):
            return None
        key = (S, w, j)
        if key in memo_split:
            return memo_split[key]
        res = None
        items = sorted(S)
        for r in range(len(items), -1, -1):
            for T in combinations(items, r):
                T = frozenset(T)
                head = group(T, kids[j]) if T else {}
                if head is None:
                    continue
                tail = split(S - T, w, j + 1)
                if tail is not None:
                    res = {**head, **tail}
                    break
            if res is not None:
                break
        memo_split[key] = res
        return res

    return emb(ea.root, eb.root)


def partial_order_leq(a, b, max_edges: int | None = DEFAULT_ORDER_CAP) -> bool:
    """``a`` is simpler than or equal to ``b`` in the tree partial order."""
    return find_order_embedding(a, b, max_edges) is not None


def order_isomorphic(a, b, max_edges: int | None = DEFAULT_ORDER_CAP) -> bool:
    """Mutual order relation; on finite trees this is a root-preserving isomorphism."""
    ea, eb = _as_edges(a), _as_edges(b)
    if len(ea) != len(eb):
        return False
    return partial_order_leq(ea, eb, max_edges) and partial_order_leq(eb, ea, max_edges)
