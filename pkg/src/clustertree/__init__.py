"""Cluster trees of kernel density estimates with bootstrap confidence sets.

The main entry points are :func:`build_cluster_tree` (merge tree of a field on
a graph domain), :func:`bootstrap_radius` (confidence radius ``t_hat``),
:func:`prune` (simplified tree inside the confidence set) and
:func:`compare` (distances between trees).
"""

__version__ = "0.1.0"

from .data_io import GaussianMixture, generate_mickey, generate_ring, generate_yingyang, read_csv, write_csv
from .density import (
    EvaluationDomain,
    KernelOperator,
    Sample,
    ScalarField,
    biased_density,
    default_domain,
    kde_evaluate,
    silverman_bandwidth,
)
from .errors import ClusterTreeError, ConfigError, DataError, InvariantError
from .inference import ConfidenceRadius, PrunedTree, bootstrap_radius, life_values, prune
from .metrics import MetricReport, compare, d_infinity, d_merge_distortion, d_modified_merge
from .pipeline import PipelineConfig, analyze
from .tree import (
    ClusterTree,
    MergeHeightIndex,
    build_cluster_tree,
    edge_set,
    merge_height,
    order_isomorphic,
    partial_order_leq,
    tree_distance,
)
