import numpy as np
import pytest

from coregae.errors import ParseError, ValidationError
from coregae.graph import (EdgeSplit, Graph, NodeFeatures, degrees,
                           induced_subgraph, load_edge_list, load_features,
                           load_labels, save_edge_list, split_edges)

from conftest import make_graph, random_graph, validate_graph


def write(tmp_path, text, name="g.edges"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestLoadEdgeList:
    def test_triangle(self, tmp_path):
        data = load_edge_list(write(tmp_path, "0 1\n1 2\n2 0\n"))
        assert data.graph.n == 3 and data.graph.m == 3
        assert data.raw_edges == 3
        validate_graph(data.graph)

    def test_self_loop_dropped_ids_compacted(self, tmp_path):
        data = load_edge_list(write(tmp_path, "# comment\n5 5\n5 7\n"))
        assert data.graph.n == 2 and data.graph.m == 1
        assert data.mapping.original_ids.tolist() == [5, 7]
        assert data.raw_edges == 2

    def test_duplicate_direction_collapsed(self, tmp_path):
        data = load_edge_list(write(tmp_path, "0 1\n1 0\n"))
        assert data.graph.n == 2 and data.graph.m == 1

    def test_tabs_and_spaces(self, tmp_path):
        data = load_edge_list(write(tmp_path, "0\t1\n1  \t 2\n"))
        assert data.graph.m == 2

    def test_weighted_duplicates_summed(self, tmp_path):
        data = load_edge_list(write(tmp_path, "0 1 2.0\n1 0 0.5\n"), weighted=True)
        g = data.graph
        assert g.m == 1
        assert g.weights.tolist() == [2.5, 2.5]

    def test_unweighted_ignores_third_field(self, tmp_path):
        data = load_edge_list(write(tmp_path, "0 1 9.0\n"))
        assert data.graph.weights is None

    def test_malformed_line_reports_number(self, tmp_path):
        with pytest.raises(ParseError, match=":2:"):
            load_edge_list(write(tmp_path, "0 1\nbad line here more\n"))

    def test_non_integer_id(self, tmp_path):
        with pytest.raises(ParseError, match=":1:"):
            load_edge_list(write(tmp_path, "a b\n"))

    def test_negative_weight(self, tmp_path):
        with pytest.raises(ValidationError):
            load_edge_list(write(tmp_path, "0 1 -3.0\n"), weighted=True)

    def test_roundtrip_identical(self, tmp_path):
        rng = np.random.default_rng(7)
        for trial in range(10):
            g = random_graph(rng, 20, 0.15)
            path = tmp_path / f"rt{trial}.edges"
            save_edge_list(g, path)
            back = load_edge_list(path).graph
            assert back.n == g.n and back.m == g.m
            assert np.array_equal(back.indptr, g.indptr)
            assert np.array_equal(back.indices, g.indices)

    def test_roundtrip_weighted_with_isolated(self, tmp_path):
        g = make_graph([(0, 2), (2, 3)], n=5, weights=[1.5, 2.0])
        path = tmp_path / "w.edges"
        save_edge_list(g, path)
        back = load_edge_list(path, weighted=True).graph
        assert back.n == 5 and back.m == 2
        assert np.allclose(back.weights, g.weights)
        assert np.array_equal(back.indptr, g.indptr)


class TestDegrees:
    def test_triangle(self, triangle):
        assert degrees(triangle).tolist() == [2, 2, 2]

    def test_star(self, star4):
        assert degrees(star4).tolist() == [3, 1, 1, 1]

    def test_empty(self):
        assert degrees(Graph.from_edges([], [], n=0)).tolist() == []

    def test_sums_to_2m(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            g = random_graph(rng, 30, 0.1)
            assert degrees(g).sum() == 2 * g.m


class TestInducedSubgraph:
    def test_triangle_pair(self, triangle):
        sub, mapping = induced_subgraph(triangle, [0, 1])
        assert sub.n == 2 and sub.m == 1
        assert mapping.original_ids.tolist() == [0, 1]

    def test_full_set_is_copy(self, triangle):
        sub, mapping = induced_subgraph(triangle, [0, 1, 2])
        assert np.array_equal(sub.indices, triangle.indices)
        assert mapping.original_ids.tolist() == [0, 1, 2]

    def test_empty_set(self, triangle):
        sub, _ = induced_subgraph(triangle, [])
        assert sub.n == 0 and sub.m == 0

    def test_out_of_range(self, triangle):
        with pytest.raises(ValidationError):
            induced_subgraph(triangle, [0, 5])

    def test_weights_carried(self):
        g = make_graph([(0, 1), (1, 2)], weights=[4.0, 9.0])
        sub, _ = induced_subgraph(g, [1, 2])
        assert sub.weights.tolist() == [9.0, 9.0]


class TestFeaturesAndLabels:
    def test_load_dense(self, tmp_path):
        p = write(tmp_path, "1.0\t2.0\n3.0\t4.0\n5.0\t6.0\n", "f.tsv")
        feats = load_features(p, 3)
        assert feats.n == 3 and feats.d == 2 and not feats.identity

    def test_row_count_mismatch(self, tmp_path):
        p = write(tmp_path, "1.0\t2.0\n3.0\t4.0\n", "f.tsv")
        with pytest.raises(ValidationError):
            load_features(p, 3)

    def test_non_numeric(self, tmp_path):
        p = write(tmp_path, "1.0\toops\n", "f.tsv")
        with pytest.raises(ParseError):
            load_features(p, 1)

    def test_identity_mode(self):
        feats = NodeFeatures.from_identity(4)
        assert feats.identity and feats.d == 4 and feats.values is None
        sub = feats.restrict([1, 2])
        assert sub.identity and sub.n == 2

    def test_labels(self, tmp_path):
        p = write(tmp_path, "0\n2\n1\n", "labels.tsv")
        labels = load_labels(p, 3)
        assert labels.labels.tolist() == [0, 2, 1] and labels.k == 3


class TestSplitEdges:
    def make_m100(self):
        rng = np.random.default_rng(11)
        while True:
            g = random_graph(rng, 40, 0.13)
            if g.m == 100:
                return g
            rng = np.random.default_rng(rng.integers(1 << 30))

    def test_counts(self):
        g = self.make_m100()
        split = split_edges(g, 0.05, 0.10, seed=1)
        assert len(split.val_pos) == 5 and len(split.test_pos) == 10
        assert len(split.val_neg) == 5 and len(split.test_neg) == 10
        assert split.train_graph.m == 85

    def test_zero_fractions(self, triangle):
        split = split_edges(triangle, 0.0, 0.0, seed=0)
        assert split.train_graph.m == triangle.m
        assert len(split.val_pos) == 0 and len(split.test_neg) == 0
        assert np.array_equal(split.train_graph.indices, triangle.indices)

    def test_deterministic(self):
        g = self.make_m100()
        a = split_edges(g, 0.05, 0.10, seed=42)
        b = split_edges(g, 0.05, 0.10, seed=42)
        for field in ("val_pos", "val_neg", "test_pos", "test_neg"):
            assert np.array_equal(getattr(a, field), getattr(b, field))
        assert np.array_equal(a.train_graph.indices, b.train_graph.indices)

    def test_partition_and_disjointness(self):
        rng = np.random.default_rng(5)
        for trial in range(10):
            g = random_graph(rng, 30, 0.2)
            split = split_edges(g, 0.1, 0.2, seed=trial)
            orig = {tuple(e) for e in g.undirected_edges().tolist()}
            train = {tuple(e) for e in split.train_graph.undirected_edges().tolist()}
            vp = {tuple(e) for e in split.val_pos.tolist()}
            tp = {tuple(e) for e in split.test_pos.tolist()}
            assert train | vp | tp == orig
            assert not (train & vp) and not (train & tp) and not (vp & tp)
            neg = {tuple(e) for e in split.val_neg.tolist()} | \
                  {tuple(e) for e in split.test_neg.tolist()}
            assert len(neg) == len(split.val_neg) + len(split.test_neg)
            assert not (neg & orig)
            for i, j in neg:
                assert i < j and i != j

    def test_precondition(self, triangle):
        with pytest.raises(ValidationError):
            split_edges(triangle, 0.6, 0.5, seed=0)

    def test_split_keeps_isolated_nodes(self):
        g = make_graph([(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], n=6)
        split = split_edges(g, 0.0, 0.2, seed=3)
        assert split.train_graph.n == g.n

    def test_is_edge_split_type(self, triangle):
        assert isinstance(split_edges(triangle, 0, 0, seed=0), EdgeSplit)


class TestGraphInvariants:
    def test_random_graphs_valid(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            validate_graph(random_graph(rng, int(rng.integers(2, 40)), 0.2))

    def test_immutable(self, triangle):
        with pytest.raises(ValueError):
            triangle.indices[0] = 9
