"""End-to-end orchestration: split, core extraction, training, propagation,
evaluation, multi-seed aggregation and report emission.

Link-prediction runs split edges on the full graph first and take the
k-core of the masked train graph (so core sizes vary across runs); the
train graph is the only graph the training and propagation stages ever
see.  Node-clustering runs decompose the full graph.

Reports: ``metrics.json`` holds everything deterministic (criterion for
reproducibility checks), ``report.json``/``report.tsv`` add wall-clock
timings and the optional speed gain against a reference run.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .evaluation import (ClusterReport, LinkPredReport, TimingReport, kmeans,
                         link_prediction_eval, nmi)
from .graph import (Graph, NodeFeatures, load_edge_list, load_features,
                    load_labels, split_edges)
from .kcore import core_numbers, core_size_table, k_core
from .models import ModelSpec, train
from .propagation import PropagationConfig, propagate_all
from .storage import save_embedding_gaez, save_node_mapping

__all__ = [
    "PipelineConfig",
    "RunResult",
    "RunSummary",
    "select_core_k",
    "run_pipeline",
    "emit_report",
]

TASKS = ("link_prediction", "node_clustering")


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one experiment needs; see ``from_file`` for the key=value
    config format (CLI flags override file keys of the same name)."""

    graph: str = ""
    features: str | None = None
    labels: str | None = None
    task: str = "link_prediction"
    core_k: int | str = 2
    node_budget: int = 50_000
    model: str = "gae"
    hidden: tuple | None = None
    dim: int = 16
    epochs: int = 200
    lr: float = 0.01
    cheb_order: int = 3
    dense_cap: int = 50_000
    val_frac: float = 0.05
    test_frac: float = 0.10
    runs: int = 1
    seed: int = 0
    iterations: int = 10
    use_features: bool = False
    out_dir: str | None = None
    fmt: str = "tsv"
    dataset: str | None = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValidationError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if self.runs < 1:
            raise ValidationError("runs must be >= 1")
        if isinstance(self.core_k, str) and self.core_k != "max-tractable":
            object.__setattr__(self, "core_k", int(self.core_k))
        if isinstance(self.core_k, int) and self.core_k < 0:
            raise ValidationError("core_k must be >= 0")

    def dataset_name(self) -> str:
        return self.dataset or Path(self.graph).stem

    def model_spec(self, seed: int) -> ModelSpec:
        return ModelSpec(variant=self.model, hidden_dims=self.hidden,
                         latent_dim=self.dim, epochs=self.epochs, lr=self.lr,
                         seed=seed, cheb_order=self.cheb_order,
                         dense_cap=self.dense_cap)

    @staticmethod
    def from_file(path) -> "PipelineConfig":
        values = {}
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValidationError(f"{path}:{lineno}: expected key=value")
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
        return PipelineConfig().with_overrides(values)

    def with_overrides(self, values: dict) -> "PipelineConfig":
        converted = {}
        for key, value in values.items():
            if value is None:
                continue
            if key in ("node_budget", "dim", "epochs", "runs", "seed",
                       "iterations", "cheb_order", "dense_cap"):
                converted[key] = int(value)
            elif key in ("lr", "val_frac", "test_frac"):
                converted[key] = float(value)
            elif key == "use_features":
                converted[key] = value if isinstance(value, bool) else \
                    str(value).lower() in ("1", "true", "yes")
            elif key == "hidden":
                if isinstance(value, str):
                    converted[key] = tuple(int(h) for h in value.split(",") if h.strip())
                else:
                    converted[key] = tuple(value)
            elif key == "core_k":
                converted[key] = value if value == "max-tractable" else int(value)
            elif key in ("graph", "features", "labels", "task", "model",
                         "out_dir", "fmt", "dataset"):
                converted[key] = str(value)
            else:
                raise ValidationError(f"unknown config key {key!r}")
        return replace(self, **converted)


@dataclass
class RunResult:
    seed: int
    k: int
    core_n: int
    core_m: int
    link: LinkPredReport | None = None
    link_val: LinkPredReport | None = None
    cluster: ClusterReport | None = None
    timings: TimingReport | None = None


@dataclass
class RunSummary:
    config: PipelineConfig
    results: list = field(default_factory=list)

    def metric_rows(self) -> list[dict]:
        rows = []
        for r in self.results:
            row = {"seed": r.seed, "k": r.k, "core_n": r.core_n, "core_m": r.core_m}
            if r.link is not None:
                row["auc"] = r.link.auc
                row["ap"] = r.link.ap
                row["val_auc"] = r.link_val.auc
                row["val_ap"] = r.link_val.ap
            if r.cluster is not None:
                row["nmi"] = r.cluster.nmi
                row["inertia"] = r.cluster.inertia
            rows.append(row)
        return rows

    def aggregates(self) -> dict:
        rows = self.metric_rows()
        keys = [k for k in ("auc", "ap", "val_auc", "val_ap", "nmi", "core_n")
                if k in rows[0]]
        out = {}
        for key in keys:
            values = np.asarray([row[key] for row in rows], dtype=np.float64)
            out[f"{key}_mean"] = float(values.mean())
            out[f"{key}_stderr"] = _stderr(values)
        return out

    def timing_means(self) -> dict:
        names = (("kcore_s", "kcore_seconds"), ("train_s", "train_seconds"),
                 ("propagate_s", "propagation_seconds"),
                 ("total_s", "total_seconds"))
        return {key: float(np.mean([getattr(r.timings, attr) for r in self.results]))
                for key, attr in names}


def _stderr(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    return float(values.std(ddof=1) / np.sqrt(len(values)))


def select_core_k(g: Graph, node_budget: int) -> int:
    """Smallest k >= 2 whose core fits the node budget; the degeneracy
    core (smallest one there is) when even that is too large."""
    if node_budget < 1:
        raise ValidationError("node_budget must be >= 1")
    table = core_size_table(g)
    for row in table:
        if row.k >= 2 and row.nodes <= node_budget:
            return row.k
    return table[-1].k


def _resolve_k(cfg: PipelineConfig, g: Graph) -> int:
    if cfg.core_k == "max-tractable":
        return select_core_k(g, cfg.node_budget)
    return int(cfg.core_k)


def _core_features(cfg: PipelineConfig, features, core_map, core_n) -> NodeFeatures:
    if cfg.use_features:
        if features is None:
            raise ValidationError("use_features set but no feature file given")
        return features.restrict(core_map.original_ids)
    return NodeFeatures.from_identity(core_n)


def _extract_core(cfg: PipelineConfig, g: Graph):
    dec = core_numbers(g)
    k = _resolve_k(cfg, g)
    core_g, core_map = k_core(g, k, dec)
    if core_g.n == 0:
        raise ValidationError(
            f"{k}-core is empty (graph degeneracy is {dec.degeneracy}); "
            f"choose k <= {dec.degeneracy}")
    return k, core_g, core_map


def _run_once(cfg: PipelineConfig, g: Graph, features, labels, seed: int) -> RunResult:
    t_start = time.perf_counter()
    if cfg.task == "link_prediction":
        split = split_edges(g, cfg.val_frac, cfg.test_frac, seed)
        work_graph = split.train_graph
    else:
        split = None
        work_graph = g

    t0 = time.perf_counter()
    k, core_g, core_map = _extract_core(cfg, work_graph)
    kcore_s = time.perf_counter() - t0

    X = _core_features(cfg, features, core_map, core_g.n)
    _, report = train(core_g, X, cfg.model_spec(seed))

    t0 = time.perf_counter()
    z = propagate_all(work_graph, core_map.original_ids, report.z,
                      PropagationConfig(iterations=cfg.iterations, seed=seed))
    prop_s = time.perf_counter() - t0

    result = RunResult(seed=seed, k=k, core_n=core_g.n, core_m=core_g.m)
    if cfg.task == "link_prediction":
        result.link = link_prediction_eval(z, split, "test", seed)
        result.link_val = link_prediction_eval(z, split, "val", seed)
    else:
        if labels is None:
            raise ValidationError("node_clustering requires a label file")
        km = kmeans(z, labels.k, seed)
        result.cluster = ClusterReport(nmi=nmi(km.labels, labels.labels),
                                       k=labels.k, kmeans_seed=seed,
                                       inertia=km.inertia)
    total_s = time.perf_counter() - t_start
    result.timings = TimingReport(kcore_seconds=kcore_s,
                                  train_seconds=report.train_seconds,
                                  propagation_seconds=prop_s,
                                  total_seconds=total_s)
    if cfg.out_dir:
        run_dir = Path(cfg.out_dir) / f"run_{seed}"
        run_dir.mkdir(parents=True, exist_ok=True)
        save_embedding_gaez(run_dir / "embedding.gaez", z)
        with open(run_dir / "run.json", "w", encoding="utf-8") as fh:
            json.dump(_run_metrics(result), fh, sort_keys=True, indent=2)
            fh.write("\n")
    return result


def _run_metrics(r: RunResult) -> dict:
    out = {"seed": r.seed, "k": r.k, "core_n": r.core_n, "core_m": r.core_m}
    if r.link is not None:
        out.update(auc=r.link.auc, ap=r.link.ap,
                   val_auc=r.link_val.auc, val_ap=r.link_val.ap)
    if r.cluster is not None:
        out.update(nmi=r.cluster.nmi, inertia=r.cluster.inertia)
    return out


def run_pipeline(cfg: PipelineConfig, graph_data=None) -> RunSummary:
    """Execute ``cfg.runs`` independent runs with seeds seed, seed+1, ...

    ``graph_data`` may carry a preloaded ``EdgeListData`` to skip parsing.
    """
    data = graph_data if graph_data is not None else load_edge_list(cfg.graph)
    g = data.graph
    features = load_features(cfg.features, g.n) if cfg.features else None
    labels = load_labels(cfg.labels, g.n) if cfg.labels else None
    if cfg.out_dir:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        save_node_mapping(out / "mapping.tsv", data.mapping)

    summary = RunSummary(config=cfg)
    for i in range(cfg.runs):
        summary.results.append(_run_once(cfg, g, features, labels, cfg.seed + i))
    return summary


def _metrics_payload(summary: RunSummary) -> dict:
    cfg = summary.config
    return {
        "dataset": cfg.dataset_name(),
        "task": cfg.task,
        "model": cfg.model,
        "core_k": cfg.core_k,
        "seed": cfg.seed,
        "runs": summary.metric_rows(),
        "aggregate": summary.aggregates(),
    }


def _report_payload(summary: RunSummary, speed_gain: float | None) -> dict:
    payload = _metrics_payload(summary)
    payload["timings"] = {
        "per_run": [
            {
                "kcore_s": r.timings.kcore_seconds,
                "train_s": r.timings.train_seconds,
                "propagate_s": r.timings.propagation_seconds,
                "total_s": r.timings.total_seconds,
            }
            for r in summary.results
        ],
        "mean": summary.timing_means(),
    }
    if speed_gain is not None:
        payload["speed_gain"] = speed_gain
    return payload


def _report_tsv(summary: RunSummary, speed_gain: float | None) -> str:
    cfg = summary.config
    agg = summary.aggregates()
    t = summary.timing_means()
    ks = sorted({r.k for r in summary.results})
    columns = ["model", "core_k", "core_n_mean", "core_n_stderr"]
    values = [cfg.model, ",".join(str(k) for k in ks),
              f"{agg['core_n_mean']!r}", f"{agg['core_n_stderr']!r}"]
    for key in ("auc", "ap", "nmi"):
        if f"{key}_mean" in agg:
            columns += [f"{key}_mean", f"{key}_stderr"]
            values += [f"{agg[f'{key}_mean']!r}", f"{agg[f'{key}_stderr']!r}"]
    columns += ["kcore_s", "train_s", "propagate_s", "total_s", "speed_gain"]
    values += [f"{t['kcore_s']!r}", f"{t['train_s']!r}",
               f"{t['propagate_s']!r}", f"{t['total_s']!r}",
               "" if speed_gain is None else f"{speed_gain!r}"]
    return "\t".join(columns) + "\n" + "\t".join(values) + "\n"


def emit_report(summary: RunSummary, out_dir, fmt: str = "tsv",
                reference_total_seconds: float | None = None) -> dict:
    """Write metrics.json (deterministic), report.json and report.tsv
    (identical values plus timings); returns the written paths."""
    if fmt not in ("tsv", "json"):
        raise ValidationError("format must be 'tsv' or 'json'")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    speed_gain = None
    if reference_total_seconds is not None:
        speed_gain = reference_total_seconds / summary.timing_means()["total_s"]

    paths = {}
    metrics_path = out / "metrics.json"
    with open(metrics_path, "w", encoding="utf-8") as fh:
        json.dump(_metrics_payload(summary), fh, sort_keys=True, indent=2)
        fh.write("\n")
    paths["metrics"] = metrics_path

    report_path = out / "report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(_report_payload(summary, speed_gain), fh, sort_keys=True, indent=2)
        fh.write("\n")
    paths["report_json"] = report_path

    tsv_path = out / "report.tsv"
    with open(tsv_path, "w", encoding="utf-8") as fh:
        fh.write(_report_tsv(summary, speed_gain))
    paths["report_tsv"] = tsv_path
    return paths
