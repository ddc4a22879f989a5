"""Command-line interface.

Subcommands: decompose, split, train, propagate, eval, pipeline, bench.
Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .benchmark import format_table, run_kernel_benchmarks
from .errors import NumericError, ParseError, ValidationError
from .evaluation import kmeans, nmi, roc_auc, average_precision
from .graph import load_edge_list, load_features, load_labels, save_edge_list
from .kcore import core_numbers, core_size_table, k_core
from .models import ModelSpec, decode_scores, train
from .pipeline import PipelineConfig, emit_report, run_pipeline
from .propagation import PropagationConfig, propagate_all
from .storage import (load_embedding_gaez, load_embedding_tsv,
                      load_node_mapping, load_pairs, save_embedding_gaez,
                      save_embedding_tsv, save_node_mapping, save_pairs)


def _add_common(p):
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--out", help="output directory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coregae",
                                     description="k-core scaled graph autoencoders")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="emit the k-core size table")
    _add_common(p)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")

    p = sub.add_parser("split", help="mask edges for link prediction")
    _add_common(p)
    p.add_argument("--val", type=float, default=0.05)
    p.add_argument("--test", type=float, default=0.10)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("train", help="train an autoencoder on a k-core")
    _add_common(p)
    p.add_argument("--features", help="node feature TSV")
    p.add_argument("--k", type=int, default=0, help="core order (0 = whole graph)")
    p.add_argument("--model", choices=("gae", "vgae", "deepgae", "deepvgae",
                                       "chebgae", "chebvgae"), default="gae")
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--hidden", help="comma-separated hidden widths")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("propagate", help="extend a core embedding to all nodes")
    _add_common(p)
    p.add_argument("--embedding", required=True, help="core embedding (.tsv or .gaez)")
    p.add_argument("--mapping", help="node mapping sidecar (required for .gaez)")
    p.add_argument("--iterations", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("eval", help="evaluate a full embedding")
    _add_common(p)
    p.add_argument("--embedding", required=True, help="full embedding TSV")
    p.add_argument("--task", choices=("link_prediction", "node_clustering"),
                   default="link_prediction")
    p.add_argument("--pairs-dir", help="directory written by `split`")
    p.add_argument("--labels", help="node label TSV (clustering)")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("pipeline", help="run the full multi-seed experiment")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--graph")
    p.add_argument("--features")
    p.add_argument("--labels")
    p.add_argument("--task", choices=("link_prediction", "node_clustering"))
    p.add_argument("--k", dest="core_k", help="core order or 'max-tractable'")
    p.add_argument("--model", choices=("gae", "vgae", "deepgae", "deepvgae",
                                       "chebgae", "chebvgae"))
    p.add_argument("--dim", type=int)
    p.add_argument("--hidden")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--use-features", action="store_true", default=None)
    p.add_argument("--out", dest="out_dir")
    p.add_argument("--format", dest="fmt", choices=("tsv", "json"))
    p.add_argument("--reference", help="report.json of a reference run for speed gain")

    p = sub.add_parser("bench", help="compare compiled and python kernels")
    p.add_argument("--nodes", type=int, default=50_000)
    p.add_argument("--edges", type=int, default=400_000)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--repeats", type=int, default=3)

    return parser


def _outdir(args) -> Path:
    out = Path(args.out) if args.out else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_decompose(args) -> int:
    data = load_edge_list(args.graph)
    table = core_size_table(data.graph)
    tsv = "k\tnodes\tedges\n" + "".join(f"{r.k}\t{r.nodes}\t{r.edges}\n" for r in table)
    blob = json.dumps([{"k": r.k, "nodes": r.nodes, "edges": r.edges} for r in table],
                      indent=2) + "\n"
    if args.out:
        out = _outdir(args)
        (out / "cores.tsv").write_text(tsv, encoding="utf-8")
        (out / "cores.json").write_text(blob, encoding="utf-8")
    sys.stdout.write(tsv if args.format == "tsv" else blob)
    return 0


def _cmd_split(args) -> int:
    from .graph import split_edges

    data = load_edge_list(args.graph)
    split = split_edges(data.graph, args.val, args.test, args.seed)
    out = _outdir(args)
    orig = data.mapping.original_ids
    save_edge_list(split.train_graph, out / "train.edges", data.mapping)
    for name, pairs in (("val_pos", split.val_pos), ("val_neg", split.val_neg),
                        ("test_pos", split.test_pos), ("test_neg", split.test_neg)):
        save_pairs(out / f"{name}.tsv", orig[pairs])
    save_node_mapping(out / "mapping.tsv", data.mapping)
    print(f"train edges: {split.train_graph.m}  val: {len(split.val_pos)}  "
          f"test: {len(split.test_pos)}")
    return 0


def _cmd_train(args) -> int:
    from .graph import NodeFeatures

    data = load_edge_list(args.graph)
    g = data.graph
    core_g, core_map = k_core(g, args.k)
    if core_g.n == 0:
        raise ValidationError(f"{args.k}-core is empty; degeneracy is "
                              f"{core_numbers(g).degeneracy}")
    if args.features:
        X = load_features(args.features, g.n).restrict(core_map.original_ids)
    else:
        X = NodeFeatures.from_identity(core_g.n)
    hidden = tuple(int(h) for h in args.hidden.split(",")) if args.hidden else None
    spec = ModelSpec(variant=args.model, hidden_dims=hidden, latent_dim=args.dim,
                     epochs=args.epochs, lr=args.lr, seed=args.seed)
    _, report = train(core_g, X, spec)

    out = _outdir(args)
    original_ids = data.mapping.original_ids[core_map.original_ids]
    save_embedding_tsv(out / "embedding.tsv", report.z, original_ids)
    save_embedding_gaez(out / "embedding.gaez", report.z)
    from .graph import NodeMapping
    save_node_mapping(out / "mapping.tsv", NodeMapping(original_ids))
    summary = {
        "nodes": core_g.n, "edges": core_g.m, "k": args.k,
        "model": args.model, "epochs": spec.epochs,
        "final_loss": float(report.total_history[-1]),
        "train_seconds": report.train_seconds,
    }
    (out / "train_report.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"trained {args.model} on {core_g.n} nodes, "
          f"final loss {report.total_history[-1]:.4f}")
    return 0


def _load_embedding(path, mapping_path):
    if str(path).endswith(".gaez"):
        if not mapping_path:
            raise ValidationError("a .gaez embedding needs --mapping")
        z = load_embedding_gaez(path)
        ids = load_node_mapping(mapping_path).original_ids
        if len(ids) != len(z):
            raise ValidationError("mapping rows do not match embedding rows")
        return ids, z
    return load_embedding_tsv(path)


def _cmd_propagate(args) -> int:
    data = load_edge_list(args.graph)
    ids, z_core = _load_embedding(args.embedding, args.mapping)
    dense = np.asarray([data.mapping.to_dense(i) for i in ids], dtype=np.int64)
    cfg = PropagationConfig(iterations=args.iterations, seed=args.seed)
    z = propagate_all(data.graph, dense, z_core, cfg)
    out = _outdir(args)
    save_embedding_tsv(out / "embedding_full.tsv", z, data.mapping.original_ids)
    save_embedding_gaez(out / "embedding_full.gaez", z)
    save_node_mapping(out / "mapping.tsv", data.mapping)
    print(f"propagated to {data.graph.n} nodes")
    return 0


def _cmd_eval(args) -> int:
    data = load_edge_list(args.graph)
    ids, z = load_embedding_tsv(args.embedding)
    row_of = {int(i): r for r, i in enumerate(ids)}
    report: dict
    if args.task == "link_prediction":
        if not args.pairs_dir:
            raise ValidationError("link_prediction eval needs --pairs-dir")
        pairs_dir = Path(args.pairs_dir)

        def rows_for(name):
            pairs = load_pairs(pairs_dir / f"{name}.tsv")
            try:
                return np.asarray([[row_of[int(a)], row_of[int(b)]] for a, b in pairs])
            except KeyError as exc:
                raise ValidationError(f"no embedding for node {exc}") from None

        report = {}
        for split_name in ("val", "test"):
            pos = decode_scores(z, rows_for(f"{split_name}_pos"))
            neg = decode_scores(z, rows_for(f"{split_name}_neg"))
            report[f"{split_name}_auc"] = roc_auc(pos, neg)
            report[f"{split_name}_ap"] = average_precision(pos, neg)
    else:
        if not args.labels:
            raise ValidationError("node_clustering eval needs --labels")
        labels = load_labels(args.labels, data.graph.n)
        order = np.asarray([row_of[int(i)] for i in data.mapping.original_ids])
        km = kmeans(z[order], labels.k, args.seed)
        report = {"nmi": nmi(km.labels, labels.labels), "k": labels.k,
                  "inertia": km.inertia, "seed": args.seed}
    blob = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out:
        (_outdir(args) / "eval.json").write_text(blob, encoding="utf-8")
    sys.stdout.write(blob)
    return 0


def _cmd_pipeline(args) -> int:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    overrides = {k: getattr(args, k) for k in
                 ("graph", "features", "labels", "task", "core_k", "model",
                  "dim", "hidden", "epochs", "lr", "runs", "seed", "iterations",
                  "use_features", "out_dir", "fmt")}
    cfg = cfg.with_overrides(overrides)
    if not cfg.graph:
        raise ValidationError("pipeline needs a graph (config key or --graph)")
    reference_total = None
    if args.reference:
        with open(args.reference, "r", encoding="utf-8") as fh:
            reference_total = json.load(fh)["timings"]["mean"]["total_s"]
    summary = run_pipeline(cfg)
    out_dir = cfg.out_dir or "."
    emit_report(summary, out_dir, cfg.fmt, reference_total_seconds=reference_total)
    agg = summary.aggregates()
    parts = [f"{k}={v:.4f}" for k, v in sorted(agg.items()) if k.endswith("_mean")]
    print(f"{cfg.dataset_name()} {cfg.model} k={cfg.core_k} runs={cfg.runs}: "
          + " ".join(parts))
    return 0


def _cmd_bench(args) -> int:
    rows = run_kernel_benchmarks(n=args.nodes, m=args.edges, f=args.dim,
                                 repeats=args.repeats)
    sys.stdout.write(format_table(rows))
    return 0


_COMMANDS = {
    "decompose": _cmd_decompose,
    "split": _cmd_split,
    "train": _cmd_train,
    "propagate": _cmd_propagate,
    "eval": _cmd_eval,
    "pipeline": _cmd_pipeline,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; our contract says 1
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
