import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clustertree.density import EvaluationDomain, ScalarField
from clustertree.errors import ConfigError
from clustertree.tree import (
    EdgeSet,
    MergeHeightIndex,
    build_cluster_tree,
    edge_set,
    find_order_embedding,
    merge_height,
    order_isomorphic,
    partial_order_leq,
    tree_distance,
)

from .oracles import (
    brute_merge_height,
    brute_order_leq,
    brute_tree,
    random_connected_domain,
    random_field,
    tree_signature,
)

values_1d = st.lists(st.integers(0, 6), min_size=1, max_size=14).map(lambda v: np.array(v, dtype=float))


def path_tree(vals):
    return build_cluster_tree(ScalarField.on_path(vals))


def test_two_peaks_example():
    t = path_tree([1, 3, 1, 4, 1])
    assert t.n_nodes == 3
    assert t.birth[t.root] == 1
    assert sorted(t.birth[c] for c in t.children[t.root]) == [3, 4]
    idx = MergeHeightIndex(t)
    assert merge_height(idx, 1, 3) == 1
    assert tree_distance(idx, 1, 3) == 5
    assert len(edge_set(t)) == 3


def test_unimodal_is_single_node():
    t = path_tree([0, 1, 2, 5, 2, 1])
    assert t.n_nodes == 1
    assert t.birth[t.root] == 5
    assert t.death(t.root) == 0


def test_plateau_peak_is_one_leaf():
    # a flat top must not split into one leaf per vertex
    t = path_tree([0, 2, 2, 2, 0])
    assert t.n_nodes == 1


def test_plateau_saddle_three_children():
    t = path_tree([3, 2, 3, 2, 5])
    assert t.birth[t.root] == 2
    assert len(t.children[t.root]) == 3


def test_constant_field():
    t = path_tree([1.5] * 6)
    assert t.n_nodes == 1
    assert t.members(t.root).tolist() == list(range(6))


def test_children_born_above_parent_and_no_unary_nodes():
    rng = np.random.default_rng(3)
    for _ in range(50):
        t = build_cluster_tree(random_field(rng, 30, n_levels=4))
        for i in range(t.n_nodes):
            assert len(t.children[i]) != 1
            p = t.parent[i]
            if p >= 0:
                assert t.birth[i] > t.birth[p]


def test_owner_consistent_with_levels():
    rng = np.random.default_rng(4)
    f = random_field(rng, 40)
    t = build_cluster_tree(f)
    # each vertex is at or below the birth level of its owner
    assert np.all(f.values <= t.birth[t.owner])


def test_grid_field_two_bumps():
    ax = np.linspace(-3, 3, 41)
    dom = EvaluationDomain.grid([ax, ax])
    x, y = dom.vertices.T
    v = np.exp(-((x - 1.5) ** 2 + y**2)) + 0.8 * np.exp(-((x + 1.5) ** 2 + y**2))
    t = build_cluster_tree(ScalarField(dom, v))
    assert len(t.leaves()) == 2


@given(values_1d)
@settings(max_examples=150, deadline=None)
def test_matches_brute_force_on_paths(vals):
    f = ScalarField.on_path(vals)
    assert tree_signature(build_cluster_tree(f)) == brute_tree(f)


def test_matches_brute_force_on_graphs():
    rng = np.random.default_rng(11)
    for k in range(100):
        f = random_field(rng, int(rng.integers(1, 11)), n_levels=None if k % 3 == 0 else 3)
        assert tree_signature(build_cluster_tree(f)) == brute_tree(f)


@given(values_1d, st.data())
@settings(max_examples=100, deadline=None)
def test_merge_height_matches_bfs(vals, data):
    f = ScalarField.on_path(vals)
    idx = MergeHeightIndex(build_cluster_tree(f))
    n = len(vals)
    x = data.draw(st.integers(0, n - 1))
    y = data.draw(st.integers(0, n - 1))
    assert idx.merge_height(x, y) == brute_merge_height(f, x, y)


def test_merge_height_vectorised_and_matrix_agree():
    rng = np.random.default_rng(5)
    f = random_field(rng, 25, n_levels=5)
    idx = MergeHeightIndex(build_cluster_tree(f))
    m = idx.matrix()
    assert np.array_equal(m, m.T)
    assert np.array_equal(np.diag(m), f.values)
    for x in range(0, 25, 4):
        for y in range(0, 25, 3):
            assert m[x, y] == brute_merge_height(f, x, y)


def test_cluster_merge_height_is_lca_birth():
    t = path_tree([1, 3, 1, 4, 1])
    idx = MergeHeightIndex(t)
    a, b = t.children[t.root]
    assert idx.cluster_merge_height(a, b) == 1
    assert idx.cluster_merge_height(a, a) == t.birth[a]


def test_out_of_range_vertex():
    idx = MergeHeightIndex(path_tree([1, 2, 1]))
    with pytest.raises(Exception):
        idx.merge_height(0, 7)


def test_edges_partition_nodes_and_levels():
    rng = np.random.default_rng(6)
    t = build_cluster_tree(random_field(rng, 40, n_levels=6))
    es = edge_set(t)
    covered = sorted(n for e in es for n in e.nodes)
    assert covered == list(range(t.n_nodes))
    for e in es:
        assert e.lo <= e.hi <= e.cum_hi
        if e.parent is not None:
            assert es.leq(e.id, e.parent) and not es.leq(e.parent, e.id)


def test_order_reflexive_and_simpler_tree_below():
    big = path_tree([0, 3, 1, 4, 1, 5, 0])
    small = path_tree([0, 3, 1, 4, 0])
    single = path_tree([0, 1, 0])
    assert partial_order_leq(big, big)
    assert partial_order_leq(small, big)
    assert not partial_order_leq(big, small)
    assert partial_order_leq(single, small)
    assert order_isomorphic(small, path_tree([0, 9, 2, 7, 0]))


def test_order_shape_matters():
    # ((a, b), c) versus a flat three-way split: the flat tree embeds by
    # skipping the inner branch, but the nested one cannot be flattened
    nested = EdgeSet.from_parents([-1, 0, 0, 1, 1])
    flat = EdgeSet.from_parents([-1, 0, 0, 0])
    assert partial_order_leq(flat, nested)
    assert not partial_order_leq(nested, flat)
    assert not order_isomorphic(flat, nested)
    # collapsing the inner branch gives a tree below ``nested``
    cherry = EdgeSet.from_parents([-1, 0, 0])
    assert partial_order_leq(cherry, nested) and partial_order_leq(cherry, flat)


def _random_parents(rng, n):
    return [-1] + [int(rng.integers(0, i)) for i in range(1, n)]


def _compress(parents):
    # drop unary chains so the result is a valid edge tree
    kids = {i: [] for i in range(len(parents))}
    for i, p in enumerate(parents):
        if p >= 0:
            kids[p].append(i)
    keep = [i for i in range(len(parents)) if len(kids[i]) != 1 or parents[i] < 0]
    new = {}
    out = []

    def anc(i):
        p = parents[i]
        while p >= 0 and p not in new:
            p = parents[p]
        return p

    for i in keep:
        new[i] = len(out)
        p = anc(i)
        out.append(-1 if p < 0 else new[p])
    return out


def test_order_matches_exhaustive_search():
    rng = np.random.default_rng(8)
    hits = 0
    for _ in range(300):
        a = EdgeSet.from_parents(_compress(_random_parents(rng, int(rng.integers(1, 7)))))
        b = EdgeSet.from_parents(_compress(_random_parents(rng, int(rng.integers(1, 8)))))
        got = partial_order_leq(a, b)
        assert got == brute_order_leq(a, b)
        hits += got
        emb = find_order_embedding(a, b)
        if emb is not None:
            assert len(set(emb.values())) == len(a)
    assert hits > 20  # the sample exercises the positive branch


def test_order_cap():
    big = EdgeSet.from_parents([-1] + [0] * 13)
    with pytest.raises(ConfigError):
        partial_order_leq(big, big)
    assert partial_order_leq(big, big, max_edges=None)


def test_random_domain_is_connected_and_tree_roots_once():
    rng = np.random.default_rng(9)
    dom = random_connected_domain(rng, 30)
    t = build_cluster_tree(ScalarField(dom, rng.random(30)))
    assert (t.parent < 0).sum() == 1
    assert t.subtree_size[t.root] == 30
