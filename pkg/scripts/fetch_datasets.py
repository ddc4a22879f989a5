#!/usr/bin/env python3
"""Download the citation datasets and convert them to the package formats.

Produces, for each dataset, a directory under data/:

    data/<name>/edges.txt       edge list (isolated nodes as "i i" lines)
    data/<name>/features.tsv    one dense row per node
    data/<name>/labels.tsv      one class index per node

Node ids are assigned 0..n-1 in the order papers appear in the node table,
so feature/label row i always belongs to edge-list node i.  Citations to
papers missing from the node table are dropped (Citeseer has a few).
Class names map to indices in sorted order.

Sources (LINQS / Pubmed-Diabetes releases):
    https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz
    https://linqs-data.soe.ucsc.edu/public/lbc/citeseer.tgz
    https://linqs-data.soe.ucsc.edu/public/Pubmed-Diabetes.tgz

After undirected dedup and self-loop removal the graphs should match the
reference core tables (Cora 2708/5278, Citeseer 3327/4552, Pubmed
19717/44324); the script prints the ingested counts so this can be
checked.  Run `pytest tests/test_acceptance.py` afterwards for the golden
tests.
"""

import argparse
import sys
import tarfile
import tempfile
import urllib.request
from pathlib import Path

URLS = {
    "cora": "https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz",
    "citeseer": "https://linqs-data.soe.ucsc.edu/public/lbc/citeseer.tgz",
    "pubmed": "https://linqs-data.soe.ucsc.edu/public/Pubmed-Diabetes.tgz",
}


def parse_content(lines):
    """LINQS .content rows: <paper_id> <f_1 .. f_d> <class>.

    Returns (ids in file order, {id: feature row}, {id: class name}).
    """
    order, feats, labels = [], {}, {}
    for line in lines:
        parts = line.rstrip("\n").split("\t")
        if len(parts) < 3:
            continue
        pid, values, label = parts[0], parts[1:-1], parts[-1]
        order.append(pid)
        feats[pid] = [float(v) for v in values]
        labels[pid] = label
    return order, feats, labels


def parse_cites(lines, known):
    """LINQS .cites rows: <cited> <citing>; unknown endpoints dropped."""
    edges, dropped = [], 0
    for line in lines:
        parts = line.split()
        if len(parts) != 2:
            continue
        a, b = parts
        if a in known and b in known:
            edges.append((a, b))
        else:
            dropped += 1
    return edges, dropped


def parse_pubmed_nodes(lines):
    """Pubmed-Diabetes NODE.paper.tab: two header lines, then
    <paper_id> label=<k> w-term=<tfidf> ... summary=...  (sparse rows)."""
    it = iter(lines)
    next(it)
    header = next(it)
    vocab = []
    for field in header.split("\t"):
        field = field.strip()
        if field.startswith("numeric:"):
            vocab.append(field.split(":")[1])
    index = {w: i for i, w in enumerate(vocab)}
    order, feats, labels = [], {}, {}
    for line in it:
        parts = line.rstrip("\n").split("\t")
        if len(parts) < 2:
            continue
        pid = parts[0]
        row = [0.0] * len(vocab)
        label = None
        for field in parts[1:]:
            if "=" not in field:
                continue
            key, _, value = field.partition("=")
            if key == "label":
                label = value
            elif key in index:
                row[index[key]] = float(value)
        if label is None:
            continue
        order.append(pid)
        feats[pid] = row
        labels[pid] = label
    return order, feats, labels


def parse_pubmed_cites(lines, known):
    """Pubmed-Diabetes DIRECTED.cites.tab rows: <id> paper:<a> | paper:<b>."""
    edges, dropped = [], 0
    for line in lines:
        refs = [tok.split(":", 1)[1] for tok in line.split()
                if tok.startswith("paper:")]
        if len(refs) != 2:
            continue
        a, b = refs
        if a in known and b in known:
            edges.append((a, b))
        else:
            dropped += 1
    return edges, dropped


def write_dataset(out_dir: Path, order, feats, labels, edges):
    out_dir.mkdir(parents=True, exist_ok=True)
    dense = {pid: i for i, pid in enumerate(order)}
    connected = set()
    with open(out_dir / "edges.txt", "w", encoding="utf-8") as fh:
        for a, b in edges:
            fh.write(f"{dense[a]} {dense[b]}\n")
            connected.add(a)
            connected.add(b)
        for pid in order:
            if pid not in connected:
                fh.write(f"{dense[pid]} {dense[pid]}\n")   # node declaration
    with open(out_dir / "features.tsv", "w", encoding="utf-8") as fh:
        for pid in order:
            fh.write("\t".join(repr(float(v)) for v in feats[pid]) + "\n")
    classes = {name: i for i, name in enumerate(sorted(set(labels.values())))}
    with open(out_dir / "labels.tsv", "w", encoding="utf-8") as fh:
        for pid in order:
            fh.write(f"{classes[labels[pid]]}\n")
    return len(order), len(edges), len(order) - len(connected)


def _report(name, out_dir, n, raw_edges, isolated):
    print(f"{name}: {n} nodes, {raw_edges} citation lines kept, "
          f"{isolated} isolated nodes -> {out_dir}")
    try:
        from coregae.graph import load_edge_list
        from coregae.kcore import core_size_table

        data = load_edge_list(out_dir / "edges.txt")
        table = core_size_table(data.graph)
        print(f"  ingested: n={data.graph.n} m={data.graph.m} "
              f"(raw lines {data.raw_edges})")
        for row in table:
            print(f"  {row.k}-core: {row.nodes} nodes / {row.edges} edges")
    except ImportError:
        print("  (install coregae to print the core table)")


def fetch(name, data_root: Path):
    url = URLS[name]
    with tempfile.TemporaryDirectory() as tmp:
        archive = Path(tmp) / f"{name}.tgz"
        print(f"downloading {url}")
        urllib.request.urlretrieve(url, archive)
        with tarfile.open(archive) as tf:
            tf.extractall(tmp)
        root = Path(tmp)
        if name in ("cora", "citeseer"):
            content = next(root.rglob(f"{name}.content"))
            cites = next(root.rglob(f"{name}.cites"))
            order, feats, labels = parse_content(
                content.read_text(encoding="utf-8", errors="replace").splitlines())
            edges, dropped = parse_cites(
                cites.read_text(encoding="utf-8", errors="replace").splitlines(),
                set(order))
        else:
            nodes = next(root.rglob("*NODE.paper.tab"))
            cites = next(root.rglob("*DIRECTED.cites.tab"))
            order, feats, labels = parse_pubmed_nodes(
                nodes.read_text(encoding="utf-8", errors="replace").splitlines())
            edges, dropped = parse_pubmed_cites(
                cites.read_text(encoding="utf-8", errors="replace").splitlines(),
                set(order))
        if dropped:
            print(f"  dropped {dropped} citation lines with unknown endpoints")
        out_dir = data_root / name
        n, kept, isolated = write_dataset(out_dir, order, feats, labels, edges)
        _report(name, out_dir, n, kept, isolated)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("datasets", nargs="*",
                        default=["cora", "citeseer", "pubmed"],
                        choices=["cora", "citeseer", "pubmed"],
                        help="datasets to fetch (default: all)")
    parser.add_argument("--data-root", default=None,
                        help="output root (default: <repo>/data)")
    args = parser.parse_args(argv)
    data_root = Path(args.data_root) if args.data_root else \
        Path(__file__).resolve().parent.parent / "data"
    for name in args.datasets or ["cora", "citeseer", "pubmed"]:
        fetch(name, data_root)
    return 0


if __name__ == "__main__":
    sys.exit(main())
