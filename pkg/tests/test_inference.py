import itertools
import math

import numpy as np
import pytest

from clustertree.density import EvaluationDomain, Sample, ScalarField, kde_evaluate
from clustertree.errors import ConfigError
from clustertree.inference import (
    bootstrap_radius,
    complete_prune_field,
    in_confidence_set,
    life_values,
    prune,
    quantile_index,
)
from clustertree.metrics import d_infinity
from clustertree.tree import build_cluster_tree, order_isomorphic, partial_order_leq

from .oracles import random_field


def path_tree(vals):
    return build_cluster_tree(ScalarField.on_path(np.asarray(vals, float)))


def test_quantile_index():
    assert quantile_index(20, 0.05) == 19
    assert quantile_index(1000, 0.05) == 950
    assert quantile_index(10, 0.05) == 10
    assert quantile_index(4, 0.25) == 3
    with pytest.raises(ConfigError, match="too few replicates"):
        quantile_index(5, 0.9)
    for B, a in [(0, 0.1), (10, 0.0), (10, 1.0)]:
        with pytest.raises(ConfigError):
            quantile_index(B, a)


def _direct_distances(sample, h, dom, B, seed):
    center = kde_evaluate(sample, h, dom).values
    out = []
    for b in range(B):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(b,)))
        idx = rng.integers(0, sample.n, sample.n)
        out.append(np.abs(kde_evaluate(Sample(sample.points[idx]), h, dom).values - center).max())
    return np.array(out)


def test_bootstrap_distances_equal_explicit_resamples():
    rng = np.random.default_rng(0)
    s = Sample(rng.normal(size=30))
    dom = EvaluationDomain.line(-4, 4, 64)
    r = bootstrap_radius(s, 0.5, dom, B=40, alpha=0.1, rng_seed=7)
    np.testing.assert_allclose(r.bootstrap_distances, _direct_distances(s, 0.5, dom, 40, 7), rtol=1e-10)
    assert r.t_hat == np.sort(r.bootstrap_distances)[35]
    assert r.grid_error > 0


def test_bootstrap_is_deterministic_and_prefix_stable():
    rng = np.random.default_rng(1)
    s = Sample(rng.normal(size=(40, 2)))
    dom = EvaluationDomain.grid([np.linspace(-3, 3, 15)] * 2)
    a = bootstrap_radius(s, 0.6, dom, B=50, alpha=0.1, rng_seed=3)
    b = bootstrap_radius(s, 0.6, dom, B=50, alpha=0.1, rng_seed=3)
    c = bootstrap_radius(s, 0.6, dom, B=70, alpha=0.1, rng_seed=3)
    assert np.array_equal(a.bootstrap_distances, b.bootstrap_distances)
    # replicate b depends only on (seed, b), not on B or batching
    assert np.array_equal(a.bootstrap_distances, c.bootstrap_distances[:50])
    assert a.to_dict()["seed"] == 3


def test_bootstrap_small_n_exhaustive_support():
    # every Monte Carlo distance is one of the 27 resample distances
    pts = Sample(np.array([0.0, 0.7, 1.9]))
    dom = EvaluationDomain.line(-2, 4, 61)
    center = kde_evaluate(pts, 0.5, dom).values
    support = {
        round(float(np.abs(kde_evaluate(Sample(pts.points[list(t)]), 0.5, dom).values - center).max()), 12)
        for t in itertools.product(range(3), repeat=3)
    }
    r = bootstrap_radius(pts, 0.5, dom, B=200, alpha=0.1, rng_seed=0)
    assert {round(float(d), 12) for d in r.bootstrap_distances} <= support


def test_life_values_two_peaks():
    t = path_tree([1, 3, 1, 4, 1])
    top = life_values(t, "top")
    leaf = life_values(t, "leaf")
    root = top.edges.root
    assert top[root] == 3  # 4 - 1
    assert sorted(top.life[[e.id for e in top.edges if e.is_leaf]].tolist()) == [2, 3]
    assert leaf[root] == math.inf
    assert top.is_monotone() and leaf.is_monotone()
    with pytest.raises(ConfigError):
        life_values(t, "bottom")


def test_leaf_prune_example():
    t = path_tree([1, 3, 1, 4, 1])
    res = prune(t, 1.25, "leaf")
    assert res.n_leaves == 1
    np.testing.assert_array_equal(res.p_tilde.values, [2.25, 2.25, 2.25, 5.25, 2.25])
    assert res.certificates["in_confidence_set"]
    assert res.pruned_nodes().tolist().count(True) == 1


def test_nothing_pruned_at_zero_radius():
    t = path_tree([1, 3, 1, 4, 1, 2.5, 0])
    res = prune(t, 0.0, "top")
    assert res.n_leaves == len(t.leaves())
    assert order_isomorphic(res.tree, t)
    np.testing.assert_array_equal(res.p_tilde.values, t.values)


def test_everything_pruned_at_large_radius():
    t = path_tree([1, 3, 1, 4, 1])
    res = prune(t, 10.0, "top")
    assert res.n_leaves == 1
    assert res.certificates["sup_deviation"] <= 10.0


@pytest.mark.parametrize("scheme", ["leaf", "top"])
def test_random_prune_certificates(scheme):
    rng = np.random.default_rng(5 if scheme == "top" else 6)
    for _ in range(60):
        f = random_field(rng, int(rng.integers(2, 40)), n_levels=int(rng.integers(2, 8)))
        t = build_cluster_tree(f)
        # dyadic radius on an integer field: p_tilde - f is computed exactly
        that = int(rng.integers(0, 128)) / 64
        res = prune(t, that, scheme)
        assert d_infinity(res.p_tilde, f) <= that
        assert in_confidence_set(res.p_tilde, f, that)
        assert partial_order_leq(res.tree, t, max_edges=None)
        rebuilt = build_cluster_tree(res.p_tilde)
        assert partial_order_leq(rebuilt, res.tree, max_edges=None)
        assert partial_order_leq(res.tree, rebuilt, max_edges=None)


def test_top_prunes_at_least_as_much_as_leaf():
    rng = np.random.default_rng(7)
    for _ in range(40):
        t = build_cluster_tree(random_field(rng, 30, n_levels=6))
        that = float(rng.uniform(0, 1.5))
        assert prune(t, that, "top").n_leaves <= prune(t, that, "leaf").n_leaves


def test_multiplier_and_validation():
    t = path_tree([1, 3, 1, 4, 1])
    assert prune(t, 0.6, "top", multiplier=1.0).n_leaves == 2
    assert prune(t, 0.6, "top", multiplier=4.0).n_leaves == 1
    for bad in (-1.0, math.inf, math.nan):
        with pytest.raises(ConfigError):
            prune(t, bad)
    with pytest.raises(ConfigError):
        prune(t, 0.5, multiplier=0)


def comb():
    # two lumps, each holding two peaks; every edge is 1.5 long
    return ScalarField.on_path([0, 1.5, 3, 1.5, 3, 1.5, 0, 1.5, 3, 1.5, 3, 1.5, 0])


def test_complete_pruning_leaves_confidence_set():
    f = comb()
    t = build_cluster_tree(f)
    bad = complete_prune_field(t, 1.0)
    assert d_infinity(bad, f) > 1.0
    good = prune(t, 1.0, "top")
    assert good.certificates["sup_deviation"] <= 1.0
    assert good.n_leaves == 2
