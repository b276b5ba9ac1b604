import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import small_graphs
from graphcorr.corpus import bundled_graphs, morita_pair_corpus, perturbed_copy, shuffled_copy
from graphcorr.errors import MalformedInputError, MismatchError
from graphcorr.graph import (
    GraphIsoCertificate,
    VertexPermutation,
    composability_matrix,
    count_paths,
    graph_isomorphism,
    identity_certificate,
    permutation_graph,
    relabel,
    validate_graph,
)
from graphcorr.oracles import count_paths_by_enumeration, isomorphic_by_enumeration


class TestValidate:
    @pytest.mark.parametrize(
        "raw",
        [
            [],
            {},
            {"vertices": []},
            {"vertices": "v1"},
            {"vertices": [1]},
            {"vertices": ["a", "a"]},
            {"vertices": ["a"], "edges": [{"id": "e", "src": "a"}]},
            {"vertices": ["a"], "edges": [{"id": "e", "src": "a", "dst": "b"}]},
            {"vertices": ["a"], "edges": [["e", "a", "a"], ["e", "a", "a"]]},
            {"vertices": ["a"], "edges": [["e", "a"]]},
            {"vertices": ["a"], "edges": [{"id": 3, "src": "a", "dst": "a"}]},
        ],
    )
    def test_rejects_malformed(self, raw):
        with pytest.raises(MalformedInputError):
            validate_graph(raw)

    def test_accepts_triples_and_records(self):
        g = validate_graph({"vertices": ["a", "b"], "edges": [["e1", "a", "b"], {"id": "e2", "src": "b", "dst": "b"}]})
        assert g.n_vertices == 2 and g.n_edges == 2
        assert list(g.source) == [0, 1] and list(g.range) == [1, 1]
        assert g.loops() == [1]

    def test_round_trip(self, mixed4):
        assert validate_graph(mixed4.to_dict()) == mixed4

    def test_unknown_ids(self, loop):
        with pytest.raises(MismatchError):
            loop.vertex_index("nope")
        with pytest.raises(MismatchError):
            loop.edge_index("nope")


class TestPaths:
    def test_composability_convention(self, twocycle):
        # B[v, w] counts edges with range v and source w
        B = composability_matrix(twocycle)
        assert B.tolist() == [[0, 1], [1, 0]]

    # frozen from count_paths_by_enumeration
    @pytest.mark.parametrize(
        "name,expected",
        [
            ("loop", [1, 1, 1, 1, 1]),
            ("two_loops", [1, 2, 4, 8, 16]),
            ("path", [3, 2, 1, 0, 0]),
            ("parallel", [2, 3, 3, 3, 3]),
            ("mixed4", [4, 6, 10, 18, 32]),
            ("isolated", [2, 0, 0, 0, 0]),
        ],
    )
    def test_frozen_counts(self, name, expected):
        g = dict(bundled_graphs())[name]
        assert [count_paths(g, n) for n in range(5)] == expected

    @settings(max_examples=60, deadline=None)
    @given(small_graphs(max_vertices=4, max_edges=5), st.integers(0, 4))
    def test_counts_match_enumeration(self, g, n):
        assert count_paths(g, n) == count_paths_by_enumeration(g, n)


class TestPermutations:
    def test_compose_inverse(self):
        verts = ["a", "b", "c"]
        for images in itertools.permutations(verts):
            s = VertexPermutation.from_images(verts, images)
            ident = s.compose(s.inverse())
            assert all(ident(v) == v for v in verts)

    def test_as_indices(self):
        s = VertexPermutation.from_images(["a", "b", "c"], ["b", "c", "a"])
        assert list(s.as_indices(["a", "b", "c"])) == [1, 2, 0]

    def test_permutation_graph_edges(self):
        s = VertexPermutation.from_images(["a", "b"], ["b", "a"])
        g = permutation_graph(s)
        assert g.n_vertices == 2 and g.n_edges == 2

    def test_rejects_non_bijection(self):
        with pytest.raises(MalformedInputError):
            VertexPermutation({"a": "b", "b": "b"})


class TestIsomorphism:
    def test_identity(self, mixed4):
        iso = graph_isomorphism(mixed4, mixed4)
        assert iso is not None and iso.verify(mixed4, mixed4)
        assert identity_certificate(mixed4).verify(mixed4, mixed4)

    def test_loop_vs_twocycle(self, loop, twocycle):
        assert graph_isomorphism(loop, twocycle) is None

    def test_same_degrees_not_isomorphic(self):
        # a 4-cycle against two 2-cycles: every vertex has in/out degree 1
        c4 = validate_graph({"vertices": list("abcd"), "edges": [["1", "a", "b"], ["2", "b", "c"], ["3", "c", "d"], ["4", "d", "a"]]})
        c22 = validate_graph({"vertices": list("abcd"), "edges": [["1", "a", "b"], ["2", "b", "a"], ["3", "c", "d"], ["4", "d", "c"]]})
        assert graph_isomorphism(c4, c22) is None
        assert not isomorphic_by_enumeration(c4, c22)

    def test_bad_certificate_rejected(self, twocycle):
        bad = GraphIsoCertificate(beta={"v1": "v1", "v2": "v2"}, alpha={"e1": "e2", "e2": "e1"})
        assert not bad.verify(twocycle, twocycle)

    def test_relabel_maps(self, mixed4):
        vmap = {v: v.upper() for v in mixed4.vertices}
        emap = {e.id: "x" + e.id for e in mixed4.edges}
        h = relabel(mixed4, vmap, emap)
        iso = GraphIsoCertificate(beta=vmap, alpha=emap)
        assert iso.verify(mixed4, h)

    @settings(max_examples=80, deadline=None)
    @given(small_graphs(max_vertices=5, max_edges=6), st.integers(0, 2**32 - 1))
    def test_shuffled_copy_found(self, g, seed):
        h = shuffled_copy(g, np.random.default_rng(seed))
        iso = graph_isomorphism(g, h)
        assert iso is not None and iso.verify(g, h)

    @settings(max_examples=80, deadline=None)
    @given(small_graphs(max_vertices=5, max_edges=6), st.integers(0, 2**32 - 1))
    def test_decision_matches_enumeration(self, g, seed):
        h = perturbed_copy(g, np.random.default_rng(seed))
        found = graph_isomorphism(g, h)
        assert (found is not None) == isomorphic_by_enumeration(g, h)
        if found is not None:
            assert found.verify(g, h)

    def test_networkx_cross_check(self):
        def to_nx(g):
            m = nx.MultiDiGraph()
            m.add_nodes_from(g.vertices)
            m.add_edges_from((e.src, e.dst) for e in g.edges)
            return m

        for G, F in morita_pair_corpus(seed=3, count=60):
            assert (graph_isomorphism(G, F) is not None) == nx.is_isomorphic(to_nx(G), to_nx(F))
