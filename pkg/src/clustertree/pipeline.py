"""End-to-end analysis: sample -> bandwidth -> KDE -> tree -> bootstrap -> prune."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

from .data_io import DatasetSpec, load_dataset
from .density import Sample, check_bandwidth, default_domain, kde_evaluate, silverman_bandwidth
from .errors import ConfigError
from .inference import SCHEMES, ConfidenceRadius, PrunedTree, bootstrap_radius, prune, quantile_index
from .tree import ClusterTree, build_cluster_tree

__all__ = ["PipelineConfig", "AnalysisResult", "analyze", "analyze_sample"]


@dataclass
class PipelineConfig:
    """Every knob of one analysis run.

    ``dataset`` holds the keyword arguments of :class:`DatasetSpec`; its seed
    defaults to ``seed``. ``bandwidth`` is a positive number or
    ``"silverman"``. ``grid_res`` is the points per axis of the evaluation
    grid (``None``: 256 in 1D, 128 in 2D) and ``knn`` the neighbour count of
    the sample graph used in three or more dimensions.
    """

    dataset: dict = field(default_factory=lambda: {"kind": "ring"})
    bandwidth: object = "silverman"
    grid_res: int | None = None
    knn: int = 10
    bootstrap: int = 1000
    alpha: float = 0.05
    prune: str = "top"
    prune_multiplier: float = 2.0
    seed: int = 0
    out_dir: str = "."

    def __post_init__(self):
        self.validate()

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}", "cli")
        return cls(**doc)

    def to_dict(self) -> dict:
        return asdict(self)

    def dataset_spec(self) -> DatasetSpec:
        if not isinstance(self.dataset, dict):
            raise ConfigError("dataset must be a mapping", "cli")
        kw = dict(self.dataset)
        kw.setdefault("seed", self.seed)
        try:
            return DatasetSpec(**kw)
        except TypeError as exc:
            raise ConfigError(f"invalid dataset spec: {exc}", "cli") from None

    def validate(self) -> None:
        self.dataset_spec()
        if self.bandwidth != "silverman":
            if isinstance(self.bandwidth, bool) or not isinstance(self.bandwidth, (int, float)):
                raise ConfigError("bandwidth must be a positive number or 'silverman'", "cli")
            check_bandwidth(self.bandwidth)
        if self.grid_res is not None and (not isinstance(self.grid_res, int) or self.grid_res < 2):
            raise ConfigError("grid_res must be an integer >= 2", "cli")
        if not isinstance(self.knn, int) or self.knn < 1:
            raise ConfigError("knn must be a positive integer", "cli")
        if not isinstance(self.bootstrap, int) or isinstance(self.bootstrap, bool):
            raise ConfigError("bootstrap must be an integer", "cli")
        if not isinstance(self.alpha, (int, float)) or isinstance(self.alpha, bool):
            raise ConfigError("alpha must be a number", "cli")
        # surfaces an infeasible (B, alpha) pair before any heavy work
        quantile_index(self.bootstrap, float(self.alpha))
        if self.prune not in SCHEMES:
            raise ConfigError(f"prune must be one of {SCHEMES}", "cli")
        m = self.prune_multiplier
        if isinstance(m, bool) or not isinstance(m, (int, float)) or not (math.isfinite(m) and m > 0):
            raise ConfigError("prune_multiplier must be a positive number", "cli")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer", "cli")


@dataclass
class AnalysisResult:
    config: PipelineConfig
    sample: Sample
    bandwidth: float
    field: object
    tree: ClusterTree
    radius: ConfidenceRadius
    pruned: PrunedTree


def analyze_sample(sample: Sample, config: PipelineConfig) -> AnalysisResult:
    h = silverman_bandwidth(sample) if config.bandwidth == "silverman" else float(config.bandwidth)
    domain = default_domain(sample, h, resolution=config.grid_res, k=config.knn)
    f = kde_evaluate(sample, h, domain)
    tree = build_cluster_tree(f)
    radius = bootstrap_radius(sample, h, domain, config.bootstrap, float(config.alpha), rng_seed=config.seed)
    pruned = prune(tree, radius, config.prune, float(config.prune_multiplier))
    return AnalysisResult(config, sample, h, f, tree, radius, pruned)


def analyze(config: PipelineConfig) -> AnalysisResult:
    return analyze_sample(load_dataset(config.dataset_spec()), config)
