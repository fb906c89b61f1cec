"""Gaussian kernel density estimation on discrete evaluation domains.

A density estimate is only ever looked at through its values on a finite
set of vertices connected by an adjacency graph (an :class:`EvaluationDomain`).
Regular grids are used for one and two dimensional data; for higher
dimensions the sample points themselves become the vertices and a symmetrised
k-nearest-neighbour graph supplies the connectivity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from .errors import ConfigError, DataError

__all__ = [
    "Sample",
    "EvaluationDomain",
    "ScalarField",
    "silverman_bandwidth",
    "check_bandwidth",
    "kde_evaluate",
    "KernelOperator",
    "biased_density",
    "default_domain",
]

# Above this many kernel entries the (n, |V|) kernel matrix is not cached.
_MAX_CACHED_KERNEL = 40_000_000
_CHUNK = 2048


@dataclass(frozen=True)
class Sample:
    """An i.i.d. sample stored as an ``(n, d)`` float array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise DataError("sample must be an (n, d) array", "density")
        if pts.shape[0] < 2:
            raise DataError("sample needs at least 2 points", "density")
        if not np.all(np.isfinite(pts)):
            raise DataError("sample contains non-finite coordinates", "density")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class EvaluationDomain:
    """Vertices in R^d plus an undirected, connected adjacency graph.

    ``axes`` is set only for regular grids; the vertex order is then the
    C-order ravel of ``np.meshgrid(*axes, indexing="ij")``.
    """

    vertices: np.ndarray
    edges: np.ndarray
    kind: str = "sample-graph"
    axes: tuple | None = None
    _csr: sparse.csr_matrix = field(init=False, repr=False)

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        if verts.ndim == 1:
            verts = verts[:, None]
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        nv = verts.shape[0]
        if nv == 0:
            raise DataError("domain has no vertices", "density")
        if edges.size and (edges.min() < 0 or edges.max() >= nv):
            raise DataError("edge references a vertex outside the domain", "density")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise DataError("adjacency contains self loops", "density")
        if self.kind not in ("regular-grid", "sample-graph"):
            raise ConfigError(f"unknown domain kind {self.kind!r}", "density")
        # canonical undirected edge list: (lo, hi), sorted, unique
        edges = np.unique(np.sort(edges, axis=1), axis=0) if edges.size else edges
        adj = sparse.coo_matrix(
            (np.ones(len(edges), dtype=np.int8), (edges[:, 0], edges[:, 1])), shape=(nv, nv)
        ).tocsr()
        adj = (adj + adj.T).tocsr()
        adj.sort_indices()
        ncomp, _ = csgraph.connected_components(adj, directed=False)
        if ncomp != 1:
            raise DataError("domain not connected", "density")
        verts.setflags(write=False)
        edges.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_csr", adj)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def indptr(self) -> np.ndarray:
        return self._csr.indptr

    @property
    def indices(self) -> np.ndarray:
        return self._csr.indices

    def neighbors(self, v: int) -> np.ndarray:
        return self._csr.indices[self._csr.indptr[v] : self._csr.indptr[v + 1]]

    def spacing(self) -> float:
        """Largest grid step (grids) or longest edge (graphs)."""
        if self.axes is not None:
            return max(float(ax[1] - ax[0]) if len(ax) > 1 else 0.0 for ax in self.axes)
        if len(self.edges) == 0:
            return 0.0
        d = self.vertices[self.edges[:, 0]] - self.vertices[self.edges[:, 1]]
        return float(np.sqrt((d**2).sum(axis=1)).max())

    def same_as(self, other: "EvaluationDomain") -> bool:
        if self is other:
            return True
        return (
            self.vertices.shape == other.vertices.shape
            and self.edges.shape == other.edges.shape
            and np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.edges, other.edges)
        )

    # -- constructors -----------------------------------------------------

    @classmethod
    def grid(cls, axes) -> "EvaluationDomain":
        """Regular grid over the given 1D coordinate arrays (one per dimension)."""
        axes = tuple(np.asarray(ax, dtype=float) for ax in axes)
        if not axes or any(ax.ndim != 1 or len(ax) < 1 for ax in axes):
            raise ConfigError("grid axes must be non-empty 1D arrays", "density")
        shape = tuple(len(ax) for ax in axes)
        mesh = np.meshgrid(*axes, indexing="ij")
        verts = np.stack([m.ravel() for m in mesh], axis=1)
        idx = np.arange(verts.shape[0]).reshape(shape)
        edges = []
        for k in range(len(shape)):
            lo = [slice(None)] * len(shape)
            hi = [slice(None)] * len(shape)
            lo[k] = slice(0, -1)
            hi[k] = slice(1, None)
            edges.append(np.stack([idx[tuple(lo)].ravel(), idx[tuple(hi)].ravel()], axis=1))
        return cls(verts, np.concatenate(edges), kind="regular-grid", axes=axes)

    @classmethod
    def line(cls, lo: float, hi: float, n: int) -> "EvaluationDomain":
        return cls.grid([np.linspace(lo, hi, n)])

    @classmethod
    def path(cls, n: int) -> "EvaluationDomain":
        """Path graph on vertices 0, 1, ..., n-1 (unit spacing)."""
        return cls.grid([np.arange(n, dtype=float)])

    @classmethod
    def knn_graph(cls, points, k: int = 10) -> "EvaluationDomain":
        """Symmetrised k-NN graph over ``points``.

        Disconnected pieces are joined by the shortest edges of a minimum
        spanning tree over component-to-component distances, so the result is
        always connected.
        """
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        n = pts.shape[0]
        if k < 1:
            raise ConfigError("k must be positive", "density")
        kk = min(k, n - 1)
        tree = cKDTree(pts)
        _, nbr = tree.query(pts, k=kk + 1)
        rows = np.repeat(np.arange(n), kk)
        edges = np.stack([rows, nbr[:, 1:].ravel()], axis=1)
        edges = edges[edges[:, 0] != edges[:, 1]]
        edges = np.concatenate([edges, _bridge_components(pts, edges)])
        return cls(pts, edges, kind="sample-graph")


def _bridge_components(pts: np.ndarray, edges: np.ndarray) -> np.ndarray:
    n = pts.shape[0]
    adj = sparse.coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
    ncomp, labels = csgraph.connected_components(adj, directed=False)
    if ncomp == 1:
        return np.empty((0, 2), dtype=np.int64)
    # closest pair between every two components, then an MST over components
    best = np.full((ncomp, ncomp), np.inf)
    pair = {}
    trees = [cKDTree(pts[labels == c]) for c in range(ncomp)]
    members = [np.flatnonzero(labels == c) for c in range(ncomp)]
    for a in range(ncomp):
        for b in range(a + 1, ncomp):
            dist, j = trees[b].query(pts[members[a]])
            i = int(np.argmin(dist))
            best[a, b] = best[b, a] = dist[i]
            pair[a, b] = (members[a][i], members[b][j[i]])
    mst = csgraph.minimum_spanning_tree(np.where(np.isfinite(best), best + 1e-300, 0)).tocoo()
    out = [pair[min(a, b), max(a, b)] for a, b in zip(mst.row, mst.col)]
    return np.asarray(out, dtype=np.int64).reshape(-1, 2)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Nonnegative finite values, one per domain vertex."""

    domain: EvaluationDomain
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        if vals.shape[0] != self.domain.n_vertices:
            raise DataError(
                f"field has {vals.shape[0]} values for {self.domain.n_vertices} vertices", "density"
            )
        if not np.all(np.isfinite(vals)):
            raise DataError("field values must be finite", "density")
        if np.any(vals < 0):
            raise DataError("field values must be nonnegative", "density")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def on_path(cls, values) -> "ScalarField":
        """Field on a path graph, handy for small 1D examples."""
        values = np.asarray(values, dtype=float)
        return cls(EvaluationDomain.path(len(values)), values)

    def __len__(self):
        return self.values.shape[0]


def check_bandwidth(h) -> float:
    try:
        h = float(h)
    except (TypeError, ValueError):
        raise ConfigError(f"bandwidth must be a number, got {h!r}", "density") from None
    if not np.isfinite(h) or h <= 0:
        raise ConfigError(f"bandwidth must be positive and finite, got {h}", "density")
    return h


def silverman_bandwidth(sample: Sample) -> float:
    """Rule-of-thumb bandwidth ``sigma * (4/(d+2))**(1/(d+4)) * n**(-1/(d+4))``.

    ``sigma`` is the mean of the per-coordinate sample standard deviations
    (``ddof=1``).
    """
    n, d = sample.n, sample.dim
    sd = sample.points.std(axis=0, ddof=1)
    if not np.any(sd > 0):
        raise DataError("zero variance", "density")
    sigma = float(sd.mean())
    return sigma * (4.0 / (d + 2)) ** (1.0 / (d + 4)) * n ** (-1.0 / (d + 4))


class KernelOperator:
    """Weighted Gaussian KDE evaluator for a fixed sample, bandwidth and domain.

    ``apply(w)`` returns ``sum_i w_i K((v - X_i)/h) / (n h^d)`` at every vertex
    ``v``; with ``w`` all ones that is the ordinary KDE, and with bootstrap
    multiplicities it is the KDE of the resample. Kernel factors are computed
    once, so repeated bootstrap evaluations only pay for a matrix product.
    Regular grids use the separable form of the Gaussian kernel.
    """

    def __init__(self, sample: Sample, h, domain: EvaluationDomain):
        h = check_bandwidth(h)
        if domain.dim != sample.dim:
            raise DataError(
                f"domain dimension {domain.dim} != sample dimension {sample.dim}", "density"
            )
        self.sample = sample
        self.h = h
        self.domain = domain
        n, d = sample.n, sample.dim
        self._scale = 1.0 / (n * h**d * (2 * np.pi) ** (d / 2))
        self._factors = None
        self._matrix = None
        if domain.axes is not None and d <= 2:
            self._factors = [
                np.exp(-0.5 * ((ax[None, :] - sample.points[:, [k]]) / h) ** 2)
                for k, ax in enumerate(domain.axes)
            ]
        elif n * domain.n_vertices <= _MAX_CACHED_KERNEL:
            self._matrix = self._kernel_block(0, domain.n_vertices)

    def _kernel_block(self, start, stop):
        v = self.domain.vertices[start:stop]
        x = self.sample.points
        d2 = (x**2).sum(1)[:, None] + (v**2).sum(1)[None, :] - 2.0 * x @ v.T
        np.maximum(d2, 0.0, out=d2)
        return np.exp(-0.5 * d2 / self.h**2)

    def apply(self, weights=None) -> np.ndarray:
        """Evaluate for one weight vector (n,) or a batch (B, n)."""
        n = self.sample.n
        w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
        single = w.ndim == 1
        w = np.atleast_2d(w)
        if w.shape[1] != n:
            raise DataError("weight vector length must equal sample size", "density")
        if self._factors is not None:
            if len(self._factors) == 1:
                out = w @ self._factors[0]
            else:
                kx, ky = self._factors
                out = np.stack([((kx * wb[:, None]).T @ ky).ravel() for wb in w])
        elif self._matrix is not None:
            out = w @ self._matrix
        else:
            nv = self.domain.n_vertices
            out = np.empty((w.shape[0], nv))
            for start in range(0, nv, _CHUNK):
                stop = min(start + _CHUNK, nv)
                out[:, start:stop] = w @ self._kernel_block(start, stop)
        out *= self._scale
        return out[0] if single else out

    def field(self, weights=None) -> ScalarField:
        return ScalarField(self.domain, self.apply(weights))


def kde_evaluate(sample: Sample, h, domain: EvaluationDomain) -> ScalarField:
    """Gaussian KDE of ``sample`` with bandwidth ``h`` at every domain vertex."""
    return KernelOperator(sample, h, domain).field()


def biased_density(true_density, h, domain: EvaluationDomain) -> ScalarField:
    """Expected KDE ``p_h = E[p_hat_h]`` for a Gaussian-mixture truth.

    Convolving a component N(mu, s^2 I) with the Gaussian kernel of bandwidth
    ``h`` gives N(mu, (s^2 + h^2) I); ``h = 0`` returns the density itself.
    """
    from .data_io import GaussianMixture

    if not isinstance(true_density, GaussianMixture):
        raise ConfigError(
            f"biased density needs a GaussianMixture, got {type(true_density).__name__}", "density"
        )
    h = float(h)
    if not np.isfinite(h) or h < 0:
        raise ConfigError("bandwidth must be nonnegative", "density")
    if domain.dim != true_density.dim:
        raise DataError("domain and mixture dimensions differ", "density")
    return ScalarField(domain, true_density.smoothed(h).pdf(domain.vertices))


def default_domain(sample: Sample, h, resolution=None, k: int = 10) -> EvaluationDomain:
    """Grid over the data range padded by ``3h`` (d <= 2) or a k-NN graph (d >= 3)."""
    h = check_bandwidth(h)
    d = sample.dim
    if d > 2:
        return EvaluationDomain.knn_graph(sample.points, k)
    if resolution is None:
        resolution = 256 if d == 1 else 128
    resolution = int(resolution)
    if resolution < 2:
        raise ConfigError("grid resolution must be at least 2", "density")
    lo = sample.points.min(axis=0) - 3 * h
    hi = sample.points.max(axis=0) + 3 * h
    return EvaluationDomain.grid([np.linspace(a, b, resolution) for a, b in zip(lo, hi)])
