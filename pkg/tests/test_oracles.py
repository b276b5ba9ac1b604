
import numpy as np
from hypothesis import given, settings

from conftest import small_graphs
from graphcorr.corpus import (
    bundled_graph,
    bundled_names,
    intertwiner_corpus,
    morita_pair_corpus,
    shuffled_copy,
)
from graphcorr.duality import Representation
from graphcorr.oracles import (
    center_dim_by_solving,
    isomorphic_by_enumeration,
    isomorphic_by_full_enumeration,
    intertwiner_nullity,
)

@settings(max_examples=40, deadline=None)
@given(small_graphs(max_vertices=3, max_edges=4), small_graphs(max_vertices=3, max_edges=4))
def test_enumeration_oracles_agree(g, h):
    assert isomorphic_by_enumeration(g, h) == isomorphic_by_full_enumeration(g, h)

def test_nullity_hand_values():
    # loop with m=2: all 2x2 matrices
    assert intertwiner_nullity(Representation(bundled_graph("loop"), 2)) == 4
    # no edges: nothing to intertwine
    assert intertwiner_nullity(Representation(bundled_graph("isolated"), 3)) == 0
    assert center_dim_by_solving(Representation(bundled_graph("isolated"), 1)) == 0

def test_corpora_are_seeded():
    a, b = intertwiner_corpus(), intertwiner_corpus()
    assert [l for l, _ in a] == [l for l, _ in b] and len(a) >= 200
    pa, pb = morita_pair_corpus(), morita_pair_corpus()
    assert all(g1 == g2 and f1 == f2 for (g1, f1), (g2, f2) in zip(pa, pb))
    assert all(g.n_vertices <= 5 for g, _ in pa) and len(pa) >= 100

def test_bundled_corpus():
    names = bundled_names()
    assert {"loop", "twocycle", "threecycle"} <= set(names)
    for name in names:
        g = bundled_graph(name)
        assert g.n_vertices <= 5 and g.n_edges <= 8

def test_shuffled_copy_is_renamed(mixed4):
    h = shuffled_copy(mixed4, np.random.default_rng(0))
    assert set(h.vertices).isdisjoint(mixed4.vertices)
    assert isomorphic_by_enumeration(mixed4, h)
