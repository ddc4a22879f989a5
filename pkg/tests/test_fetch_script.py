"""The dataset converters are exercised on miniature synthetic inputs so the
format handling is covered even where the download hosts are unreachable."""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "scripts"))

from fetch_datasets import (parse_cites, parse_content, parse_pubmed_cites,
                            parse_pubmed_nodes, write_dataset)

from coregae.graph import load_edge_list, load_features, load_labels


def test_content_and_cites_roundtrip(tmp_path):
    content = [
        "paperA\t0\t1\t0\tGenetic_Algorithms",
        "paperB\t1\t0\t0\tNeural_Networks",
        "paperC\t0\t0\t1\tNeural_Networks",
        "paperD\t1\t1\t1\tTheory",          # isolated
    ]
    cites = [
        "paperA\tpaperB",
        "paperB\tpaperA",                    # duplicate direction
        "paperC\tpaperA",
        "paperC\tghost",                     # dangling: dropped
    ]
    order, feats, labels = parse_content(content)
    assert order == ["paperA", "paperB", "paperC", "paperD"]
    edges, dropped = parse_cites(cites, set(order))
    assert dropped == 1 and len(edges) == 3

    out = tmp_path / "mini"
    n, kept, isolated = write_dataset(out, order, feats, labels, edges)
    assert (n, kept, isolated) == (4, 3, 1)

    data = load_edge_list(out / "edges.txt")
    assert data.graph.n == 4
    assert data.graph.m == 2                 # dedup of A<->B, plus C-A
    features = load_features(out / "features.tsv", 4)
    assert features.d == 3
    assert features.values[0].tolist() == [0.0, 1.0, 0.0]
    lab = load_labels(out / "labels.tsv", 4)
    # classes sorted: Genetic_Algorithms=0, Neural_Networks=1, Theory=2
    assert lab.labels.tolist() == [0, 1, 1, 2]
    # isolated node survives ingestion with degree 0
    assert data.graph.neighbors(3).tolist() == []


def test_pubmed_formats(tmp_path):
    nodes = [
        "NODE\tpaper\t3",
        "\tcat=label:label\tnumeric:w-gene:0.0\tnumeric:w-rat:0.0\tstring:summary:summary",
        "1001\tlabel=2\tw-gene=0.5\tsummary=x",
        "1002\tlabel=1\tw-rat=0.25\tsummary=y",
        "1003\tlabel=3\tw-gene=0.1\tw-rat=0.2\tsummary=z",
    ]
    cites = [
        "DIRECTED\tcites\t2",
        "\tNO_FEATURES",
        "0\tpaper:1001\t|\tpaper:1002",
        "1\tpaper:1003\t|\tpaper:9999",      # dangling
        "2\tpaper:1002\t|\tpaper:1003",
    ]
    order, feats, labels = parse_pubmed_nodes(nodes)
    assert order == ["1001", "1002", "1003"]
    assert feats["1003"] == [0.1, 0.2]
    edges, dropped = parse_pubmed_cites(cites, set(order))
    assert dropped == 1 and edges == [("1001", "1002"), ("1002", "1003")]

    out = tmp_path / "minipub"
    write_dataset(out, order, feats, labels, edges)
    data = load_edge_list(out / "edges.txt")
    assert data.graph.n == 3 and data.graph.m == 2
    lab = load_labels(out / "labels.tsv", 3)
    assert lab.labels.tolist() == [1, 0, 2]  # classes "1","2","3" sorted
    feats_back = load_features(out / "features.tsv", 3)
    assert np.allclose(feats_back.values, [[0.5, 0.0], [0.0, 0.25], [0.1, 0.2]])
