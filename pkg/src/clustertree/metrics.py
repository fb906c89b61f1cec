"""Distances between cluster trees that live on a shared evaluation domain.

Three metrics are provided: the sup-norm distance between the underlying
functions, the merge distortion metric (largest discrepancy in merge heights)
and the modified merge distortion metric (largest discrepancy in distances
measured along the trees). The two merge metrics are suprema over vertex
pairs; they are exact up to ``EXACT_PAIR_LIMIT`` vertices and otherwise
evaluated on a reported subset of pairs, which makes them lower bounds.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .density import ScalarField
from .errors import DataError
from .tree import MergeHeightIndex, build_cluster_tree

__all__ = [
    "MetricReport",
    "d_infinity",
    "d_merge_distortion",
    "d_modified_merge",
    "lemma_a_constant",
    "critical_vertices",
    "compare",
]

EXACT_PAIR_LIMIT = 2000
N_RANDOM_VERTICES = 512
EPS_NUM = 1e-9
_BLOCK = 1024


@dataclass
class MetricReport:
    d_inf: float
    d_merge: float
    d_modified: float
    argmax_pairs: dict
    exhaustive: bool
    n_pair_vertices: int

    def to_dict(self) -> dict:
        return asdict(self)


def _same_domain(a, b):
    if not a.domain.same_as(b.domain):
        raise DataError("fields live on different domains", "metrics")


def d_infinity(p: ScalarField, q: ScalarField) -> float:
    """``max_v |p(v) - q(v)|``."""
    _same_domain(p, q)
    return float(np.max(np.abs(p.values - q.values)))


def _argmax_inf(p: ScalarField, q: ScalarField):
    v = int(np.argmax(np.abs(p.values - q.values)))
    return (v, v)


def critical_vertices(field: ScalarField) -> np.ndarray:
    """Weak local maxima and minima of the field over its adjacency graph."""
    vals = field.values
    e = field.domain.edges
    is_max = np.ones(len(vals), dtype=bool)
    is_min = np.ones(len(vals), dtype=bool)
    a, b = e[:, 0], e[:, 1]
    np.logical_and.at(is_max, a, vals[a] >= vals[b])
    np.logical_and.at(is_max, b, vals[b] >= vals[a])
    np.logical_and.at(is_min, a, vals[a] <= vals[b])
    np.logical_and.at(is_min, b, vals[b] <= vals[a])
    return np.flatnonzero(is_max | is_min)


def _pair_vertices(p_idx, q_idx, seed):
    nv = p_idx.n_vertices
    if nv <= EXACT_PAIR_LIMIT:
        return np.arange(nv), True
    rng = np.random.default_rng(seed)
    crit = np.union1d(critical_vertices(p_idx.tree.field), critical_vertices(q_idx.tree.field))
    rand = rng.choice(nv, size=min(N_RANDOM_VERTICES, nv), replace=False)
    return np.union1d(crit, rand), False


def _pair_sup(p_idx, q_idx, kind, seed=0):
    """Max over vertex pairs of the merge-height or tree-distance discrepancy."""
    if not p_idx.tree.field.domain.same_as(q_idx.tree.field.domain):
        raise DataError("indexes built over different domains", "metrics")
    verts, exact = _pair_vertices(p_idx, q_idx, seed)
    fp = p_idx.values[verts]
    fq = q_idx.values[verts]
    best, arg = -np.inf, (int(verts[0]), int(verts[0]))
    for start in range(0, len(verts), _BLOCK):
        rows = verts[start : start + _BLOCK]
        mp = _rect(p_idx, rows, verts)
        mq = _rect(q_idx, rows, verts)
        if kind == "merge":
            diff = np.abs(mp - mq)
        else:
            sp = p_idx.values[rows][:, None] + fp[None, :]
            sq = q_idx.values[rows][:, None] + fq[None, :]
            diff = np.abs((sp - 2.0 * mp) - (sq - 2.0 * mq))
        k = int(np.argmax(diff))
        if diff.flat[k] > best:
            i, j = divmod(k, diff.shape[1])
            best, arg = float(diff.flat[k]), (int(rows[i]), int(verts[j]))
    return best, arg, exact, len(verts)


def _rect(idx: MergeHeightIndex, rows, cols):
    x = np.repeat(rows, len(cols))
    y = np.tile(cols, len(rows))
    return idx.merge_heights(x, y).reshape(len(rows), len(cols))


def d_merge_distortion(p_idx: MergeHeightIndex, q_idx: MergeHeightIndex) -> float:
    """``max_{x,y} |m_p(x,y) - m_q(x,y)|``."""
    return _pair_sup(p_idx, q_idx, "merge")[0]


def d_modified_merge(p_idx: MergeHeightIndex, q_idx: MergeHeightIndex) -> float:
    """``max_{x,y} |d_Tp(x,y) - d_Tq(x,y)|`` with ``d_T(x,y) = f(x)+f(y)-2m(x,y)``."""
    return _pair_sup(p_idx, q_idx, "modified")[0]


def lemma_a_constant(p: ScalarField, q: ScalarField) -> float:
    """``inf(p+q) - 2 min(inf p, inf q)``, the slack in ``d_MM >= d_inf - a``."""
    _same_domain(p, q)
    return float((p.values + q.values).min() - 2.0 * min(p.values.min(), q.values.min()))


def compare(p: ScalarField, q: ScalarField, seed: int = 0) -> MetricReport:
    """All three metrics between the trees of ``p`` and ``q`` plus witness pairs."""
    _same_domain(p, q)
    p_idx = MergeHeightIndex(build_cluster_tree(p))
    q_idx = MergeHeightIndex(build_cluster_tree(q))
    dm, am, exact, nverts = _pair_sup(p_idx, q_idx, "merge", seed)
    dmm, amm, _, _ = _pair_sup(p_idx, q_idx, "modified", seed)
    return MetricReport(
        d_inf=d_infinity(p, q),
        d_merge=dm,
        d_modified=dmm,
        argmax_pairs={"d_inf": list(_argmax_inf(p, q)), "d_merge": list(am), "d_modified": list(amm)},
        exhaustive=exact,
        n_pair_vertices=nverts,
    )
