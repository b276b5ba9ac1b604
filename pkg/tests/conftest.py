import numpy as np
import pytest
from hypothesis import strategies as st

from graphcorr.corpus import bundled_graph
from graphcorr.graph import DirectedGraph


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def loop():
    return bundled_graph("loop")


@pytest.fixture
def twocycle():
    return bundled_graph("twocycle")


@pytest.fixture
def threecycle():
    return bundled_graph("threecycle")


@pytest.fixture
def mixed4():
    return bundled_graph("mixed4")


@st.composite
def small_graphs(draw, max_vertices=4, max_edges=6, min_edges=0):
    n = draw(st.integers(1, max_vertices))
    m = draw(st.integers(min_edges, max_edges))
    ends = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=m, max_size=m))
    verts = [f"v{i}" for i in range(n)]
    return DirectedGraph(verts, [(f"e{j}", verts[s], verts[d]) for j, (s, d) in enumerate(ends)])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
