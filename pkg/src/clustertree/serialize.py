"""JSON encoding of domains, fields, trees and pruning results.

Floats are written with ``repr``, the shortest string that parses back to the
same double, so every value round-trips exactly. Key order is fixed and no
timestamps are written, so equal inputs give byte-identical files. The layout
of each document is described in ``docs/formats.md``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .density import EvaluationDomain, ScalarField
from .errors import DataError

__all__ = [
    "FORMAT_VERSION",
    "to_jsonable",
    "dumps",
    "write_json",
    "read_json",
    "domain_to_dict",
    "domain_from_dict",
    "field_to_dict",
    "field_from_dict",
    "tree_to_dict",
    "pruned_to_dict",
]

FORMAT_VERSION = 1


def to_jsonable(obj):
    """Convert numpy scalars/arrays and non-finite floats into plain JSON values.

    ``inf`` and ``nan`` are not valid JSON; they become the strings
    ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=1, allow_nan=False) + "\n"


def write_json(obj, path) -> None:
    path = Path(path)
    try:
        path.write_text(dumps(obj))
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}", "cli") from None


def read_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}", "cli") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})", "cli") from None
    if not isinstance(doc, dict):
        raise DataError(f"{path}: expected a JSON object at top level", "cli")
    return doc


def _require(doc, key, where):
    try:
        return doc[key]
    except (KeyError, TypeError):
        raise DataError(f"{where}: missing field {key!r}", "cli") from None


def domain_to_dict(domain: EvaluationDomain) -> dict:
    if domain.axes is not None:
        return {"kind": domain.kind, "axes": [ax.tolist() for ax in domain.axes]}
    return {"kind": domain.kind, "vertices": domain.vertices.tolist(), "edges": domain.edges.tolist()}


def domain_from_dict(doc) -> EvaluationDomain:
    kind = _require(doc, "kind", "domain")
    try:
        if kind == "regular-grid":
            return EvaluationDomain.grid(_require(doc, "axes", "domain"))
        return EvaluationDomain(
            np.asarray(_require(doc, "vertices", "domain"), dtype=float),
            np.asarray(_require(doc, "edges", "domain"), dtype=np.int64),
            kind=kind,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"domain: {exc}", "cli") from None


def field_to_dict(field: ScalarField) -> dict:
    return {"domain": domain_to_dict(field.domain), "values": field.values.tolist()}


def field_from_dict(doc) -> ScalarField:
    domain = domain_from_dict(_require(doc, "domain", "field"))
    try:
        values = np.asarray(_require(doc, "values", "field"), dtype=float)
    except (TypeError, ValueError):
        raise DataError("field: values must be numbers", "cli") from None
    if values.shape != (domain.n_vertices,):
        raise DataError("field: one value per domain vertex expected", "cli")
    return ScalarField(domain, values)


def tree_to_dict(tree, pruned_nodes=None) -> dict:
    """Node table of a cluster tree.

    ``size`` counts the domain vertices in the node's subtree; ``levels``
    gives the range of the underlying function.
    """
    deaths = tree.deaths
    sizes = tree.subtree_size
    nodes = []
    for i in range(tree.n_nodes):
        p = int(tree.parent[i])
        nodes.append(
            {
                "id": i,
                "birth": float(tree.birth[i]),
                "death": float(deaths[i]),
                "parent": None if p < 0 else p,
                "children": list(tree.children[i]),
                "size": int(sizes[i]),
                "pruned": bool(pruned_nodes[i]) if pruned_nodes is not None else False,
            }
        )
    vals = tree.values
    return {"nodes": nodes, "root": int(tree.root), "levels": [float(vals.min()), float(vals.max())]}


def pruned_to_dict(result) -> dict:
    """Source tree with ``pruned`` flags, the simplified tree and its certificates."""
    return {
        "scheme": result.scheme,
        "t_hat": result.t_hat,
        "multiplier": result.multiplier,
        "threshold": result.multiplier * result.t_hat,
        "n_leaves": result.n_leaves,
        "tree": tree_to_dict(result.source, result.pruned_nodes()),
        "pruned_tree": tree_to_dict(result.tree),
        "certificates": dict(result.certificates),
    }
