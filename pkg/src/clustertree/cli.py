"""Command line driver.

Subcommands::

    clustertree generate --dataset ring --seed 3 --out-dir runs/
    clustertree analyze  --dataset mickey --bootstrap 1000 --alpha 0.05 --out-dir runs/
    clustertree render   runs/tree.json --out runs/tree.svg
    clustertree metrics  runs/field.json runs/p_tilde.json --out-dir runs/

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
invariant breach.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .data_io import GENERATORS, load_dataset, write_csv
from .errors import ClusterTreeError, ConfigError, DataError
from .metrics import compare, lemma_a_constant
from .pipeline import PipelineConfig, analyze
from .render import render_svg
from .serialize import (
    FORMAT_VERSION,
    field_from_dict,
    field_to_dict,
    pruned_to_dict,
    read_json,
    tree_to_dict,
    write_json,
)

# config keys that command line flags may override
_FLAG_KEYS = ("bandwidth", "grid_res", "knn", "bootstrap", "alpha", "prune", "prune_multiplier", "seed", "out_dir")


def _bandwidth(text):
    if text == "silverman":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a number or 'silverman'") from None


def _add_pipeline_flags(p, with_analysis=True):
    p.add_argument("--config", help="JSON file with PipelineConfig fields; flags override it")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--dataset", choices=sorted(GENERATORS), help="synthetic dataset")
    src.add_argument("--csv", help="numeric CSV file with one point per row")
    p.add_argument("--header", action="store_true", help="the CSV file has a header row")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    if not with_analysis:
        return
    p.add_argument("--bandwidth", type=_bandwidth, help="positive number or 'silverman' (default)")
    p.add_argument("--grid-res", dest="grid_res", type=int, help="grid points per axis (d <= 2)")
    p.add_argument("--knn", type=int, help="neighbours in the sample graph (d >= 3)")
    p.add_argument("--bootstrap", type=int, metavar="B", help="number of bootstrap replicates")
    p.add_argument("--alpha", type=float)
    p.add_argument("--prune", choices=["leaf", "top"])
    p.add_argument("--prune-multiplier", dest="prune_multiplier", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clustertree", description="Cluster tree inference from samples.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic sample as CSV")
    _add_pipeline_flags(g, with_analysis=False)
    g.add_argument("--out", help="output CSV path (default: <out-dir>/<dataset>.csv)")

    a = sub.add_parser("analyze", help="tree, bootstrap radius and pruned tree of a sample")
    _add_pipeline_flags(a)

    r = sub.add_parser("render", help="SVG dendrogram of a tree JSON file")
    r.add_argument("tree_json")
    r.add_argument("--out", help="output SVG path (default: next to the input)")

    m = sub.add_parser("metrics", help="distances between the trees of two field JSON files")
    m.add_argument("field_a")
    m.add_argument("field_b")
    m.add_argument("--seed", type=int, default=0, help="seed for pair subsampling on large domains")
    m.add_argument("--out-dir", dest="out_dir", default=".")
    return parser


def resolve_config(args) -> PipelineConfig:
    """Config file (if any) overlaid with the flags given on the command line."""
    doc = {}
    if args.config:
        doc = read_json(args.config)
        doc = doc.get("config", doc)
    for key in _FLAG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            doc[key] = val
    if args.dataset:
        doc["dataset"] = {"kind": args.dataset}
    elif args.csv:
        doc["dataset"] = {"kind": "csv", "path": args.csv, "has_header": bool(args.header)}
    try:
        return PipelineConfig.from_dict(doc)
    except TypeError as exc:
        raise ConfigError(f"invalid config: {exc}", "cli") from None


def _header(command, config_dict, seed):
    return {"format_version": FORMAT_VERSION, "command": command, "config": config_dict, "seed": seed}


def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create {out}: {exc.strerror}", "cli") from None
    return out


def cmd_generate(args) -> int:
    config = resolve_config(args)
    spec = config.dataset_spec()
    if spec.kind not in GENERATORS:
        raise ConfigError("generate needs a synthetic --dataset", "cli")
    sample = load_dataset(spec)
    out = Path(args.out) if args.out else _out_dir(config.out_dir) / f"{spec.kind}.csv"
    write_csv(sample, out)
    print(out)
    return 0


def cmd_analyze(args) -> int:
    config = resolve_config(args)
    out = _out_dir(config.out_dir)
    res = analyze(config)
    head = _header("analyze", config.to_dict(), config.seed)
    summary = {"n": res.sample.n, "dim": res.sample.dim, "bandwidth": res.bandwidth}
    write_json({**head, **summary, "prune": pruned_to_dict(res.pruned), "unpruned": tree_to_dict(res.tree)},
               out / "tree.json")
    write_json({**head, **summary, "confidence": res.radius.to_dict()}, out / "confidence.json")
    write_json({**head, **summary, "field": field_to_dict(res.field)}, out / "field.json")
    write_json({**head, **summary, "field": field_to_dict(res.pruned.p_tilde)}, out / "p_tilde.json")
    print(
        f"h={res.bandwidth:.4g} t_hat={res.radius.t_hat:.4g} "
        f"leaves: {len(res.tree.leaves())} -> {res.pruned.n_leaves} ({config.prune})"
    )
    return 0


def cmd_render(args) -> int:
    doc = read_json(args.tree_json)
    if "prune" in doc:
        tree_doc, t_hat = doc["prune"].get("tree"), doc["prune"].get("t_hat")
    else:
        tree_doc, t_hat = doc, doc.get("t_hat")
    if not isinstance(tree_doc, dict):
        raise DataError(f"{args.tree_json}: no tree found", "cli")
    if t_hat is not None and not isinstance(t_hat, (int, float)):
        raise DataError(f"{args.tree_json}: t_hat must be a number", "cli")
    out = Path(args.out) if args.out else Path(args.tree_json).with_suffix(".svg")
    try:
        out.write_text(render_svg(tree_doc, t_hat))
    except OSError as exc:
        raise DataError(f"cannot write {out}: {exc.strerror}", "cli") from None
    print(out)
    return 0


def _load_field(path):
    doc = read_json(path)
    return field_from_dict(doc.get("field", doc))


def cmd_metrics(args) -> int:
    p, q = _load_field(args.field_a), _load_field(args.field_b)
    report = compare(p, q, seed=args.seed)
    a = lemma_a_constant(p, q)
    checks = {
        "lemma_a_constant": a,
        "d_modified_le_4_d_inf": report.d_modified <= 4 * report.d_inf,
        "d_modified_ge_d_inf_minus_a": report.d_modified >= report.d_inf - a,
    }
    config = {"field_a": args.field_a, "field_b": args.field_b, "seed": args.seed}
    out = _out_dir(args.out_dir) / "metrics.json"
    write_json({**_header("metrics", config, args.seed), "report": report.to_dict(), "checks": checks}, out)
    print(f"d_inf={report.d_inf:.6g} d_merge={report.d_merge:.6g} d_modified={report.d_modified:.6g}")
    return 0


COMMANDS = {"generate": cmd_generate, "analyze": cmd_analyze, "render": cmd_render, "metrics": cmd_metrics}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ClusterTreeError as exc:
        print(f"clustertree: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
