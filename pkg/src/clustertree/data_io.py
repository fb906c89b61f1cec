"""Synthetic datasets, CSV ingestion and Gaussian-mixture oracle densities."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import geometry
from .density import Sample
from .errors import ConfigError, DataError

__all__ = [
    "GaussianMixture",
    "mixture_density",
    "generate_ring",
    "generate_mickey",
    "generate_yingyang",
    "read_csv",
    "write_csv",
    "DatasetSpec",
    "load_dataset",
    "GENERATORS",
]


class GaussianMixture:
    """Mixture of isotropic Gaussians ``sum_k w_k N(mu_k, s_k^2 I)``.

    Parameters
    ----------
    weights : array_like, shape (K,)
        Positive, summing to one.
    means : array_like, shape (K, d)
    sigmas : array_like, shape (K,)
        Positive standard deviations.
    """

    def __init__(self, weights, means, sigmas):
        w = np.asarray(weights, dtype=float).ravel()
        mu = np.asarray(means, dtype=float)
        if mu.ndim == 1:
            mu = mu[:, None]
        s = np.asarray(sigmas, dtype=float).ravel()
        if not (len(w) == len(mu) == len(s)) or len(w) == 0:
            raise ConfigError("weights, means and sigmas must have the same length", "data_io")
        if np.any(w <= 0) or not math.isclose(w.sum(), 1.0, rel_tol=0, abs_tol=1e-9):
            raise ConfigError("mixture weights must be positive and sum to 1", "data_io")
        if np.any(~np.isfinite(s)) or np.any(s <= 0):
            raise ConfigError("mixture sigmas must be positive", "data_io")
        self.weights, self.means, self.sigmas = w, mu, s

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def __repr__(self):
        return f"GaussianMixture(K={len(self.weights)}, dim={self.dim})"

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None] if self.dim == 1 else x[None, :]
        if x.shape[1] != self.dim:
            raise DataError("evaluation points have the wrong dimension", "data_io")
        d = self.dim
        out = np.zeros(len(x))
        for w, mu, s in zip(self.weights, self.means, self.sigmas):
            r2 = ((x - mu) ** 2).sum(axis=1)
            out += w * np.exp(-0.5 * r2 / s**2) / (2 * np.pi * s**2) ** (d / 2)
        return out

    def smoothed(self, h: float) -> "GaussianMixture":
        """Mixture convolved with the Gaussian kernel of bandwidth ``h``."""
        return GaussianMixture(self.weights, self.means, np.sqrt(self.sigmas**2 + h**2))

    def sample(self, n: int, rng) -> Sample:
        rng = np.random.default_rng(rng)
        comp = rng.choice(len(self.weights), size=n, p=self.weights)
        pts = self.means[comp] + rng.standard_normal((n, self.dim)) * self.sigmas[comp, None]
        return Sample(pts)


def mixture_density(spec) -> GaussianMixture:
    """Build a mixture from ``{"weights": ..., "means": ..., "sigmas": ...}``."""
    if isinstance(spec, GaussianMixture):
        return spec
    try:
        return GaussianMixture(spec["weights"], spec["means"], spec["sigmas"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"invalid mixture spec: {exc}", "data_io") from None


def _uniform_disk(rng, n, cx, cy, r):
    rad = r * np.sqrt(rng.random(n))
    ang = rng.uniform(0, 2 * np.pi, n)
    return np.column_stack([cx + rad * np.cos(ang), cy + rad * np.sin(ang)])


def _noisy_circle(rng, n, radius, sd):
    ang = rng.uniform(0, 2 * np.pi, n)
    rad = radius + sd * rng.standard_normal(n)
    return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])


def _annular_arc(rng, n, r_in, r_out, start, stop):
    rad = np.sqrt(rng.uniform(r_in**2, r_out**2, n))
    ang = rng.uniform(start, stop, n)
    return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])


def generate_ring(seed=None) -> Sample:
    """Noisy unit circle (1000 points) around a Gaussian blob (200 points)."""
    g = geometry.RING
    rng = np.random.default_rng(seed)
    ring = _noisy_circle(rng, g["n_ring"], g["radius"], g["radial_sd"])
    center = g["center_sd"] * rng.standard_normal((g["n_center"], 2))
    return Sample(np.vstack([ring, center]))


def generate_mickey(seed=None) -> Sample:
    """Three uniform disks: a large head (1200 points) and two ears (400 each)."""
    rng = np.random.default_rng(seed)
    parts = [_uniform_disk(rng, n, cx, cy, r) for cx, cy, r, n in geometry.MICKEY["disks"]]
    return Sample(np.vstack(parts))


def generate_yingyang(seed=None) -> Sample:
    """Outer ring (2000), two crescent moons (400 each) and two nodes (200 each)."""
    g = geometry.YINGYANG
    rng = np.random.default_rng(seed)
    ring = _noisy_circle(rng, g["n_ring"], g["ring_radius"], g["ring_sd"])
    a = g["moon_half_angle"]
    right = _annular_arc(rng, g["n_moon"], g["moon_inner"], g["moon_outer"], -a, a)
    left = _annular_arc(rng, g["n_moon"], g["moon_inner"], g["moon_outer"], np.pi - a, np.pi + a)
    top = np.array([0.0, g["node_y"]]) + g["node_sd"] * rng.standard_normal((g["n_node"], 2))
    bottom = np.array([0.0, -g["node_y"]]) + g["node_sd"] * rng.standard_normal((g["n_node"], 2))
    return Sample(np.vstack([ring, right, left, top, bottom]))


GENERATORS = {
    "ring": generate_ring,
    "mickey": generate_mickey,
    "yingyang": generate_yingyang,
}


def read_csv(path, has_header: bool = False) -> Sample:
    """Read a rectangular numeric CSV file into a :class:`Sample`."""
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}", "data_io") from None
    rows = []
    width = None
    with fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if has_header and lineno == 1:
                continue
            if not row or all(not c.strip() for c in row):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DataError(f"{path}: row {lineno} has {len(row)} columns, expected {width}", "data_io")
            vals = []
            for col, cell in enumerate(row, start=1):
                try:
                    x = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: non-numeric cell {cell!r} at row {lineno}, column {col}", "data_io"
                    ) from None
                if not math.isfinite(x):
                    raise DataError(f"{path}: non-finite value at row {lineno}, column {col}", "data_io")
                vals.append(x)
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: empty file", "data_io")
    return Sample(np.asarray(rows))


def write_csv(sample: Sample, path) -> None:
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            for row in sample.points:
                w.writerow([repr(float(x)) for x in row])
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}", "data_io") from None


@dataclass
class DatasetSpec:
    """Where a sample comes from: a named generator, a CSV file or a mixture."""

    kind: str
    seed: int | None = None
    path: str | None = None
    has_header: bool = False
    n: int | None = None
    mixture: dict | None = field(default=None)

    def __post_init__(self):
        kinds = set(GENERATORS) | {"csv", "mixture"}
        if self.kind not in kinds:
            raise ConfigError(f"unknown dataset kind {self.kind!r}; choose from {sorted(kinds)}", "data_io")
        if self.kind == "csv" and not self.path:
            raise ConfigError("csv dataset needs a path", "data_io")
        if self.kind == "mixture":
            if self.mixture is None or self.n is None or self.n < 2:
                raise ConfigError("mixture dataset needs a mixture spec and n >= 2", "data_io")


def load_dataset(spec: DatasetSpec) -> Sample:
    if spec.kind in GENERATORS:
        return GENERATORS[spec.kind](spec.seed)
    if spec.kind == "csv":
        return read_csv(spec.path, spec.has_header)
    return mixture_density(spec.mixture).sample(spec.n, spec.seed)
