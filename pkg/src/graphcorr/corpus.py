"""Bundled example graphs and the seeded test corpora built from them."""

from __future__ import annotations

import itertools
import json
from importlib import resources

import numpy as np

from .duality import Representation
from .graph import random_graph, relabel, validate_graph


def bundled_names():
    files = resources.files("graphcorr") / "data"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def bundled_graph(name):
    text = (resources.files("graphcorr") / "data" / f"{name}.json").read_text(encoding="utf-8")
    return validate_graph(json.loads(text))


def bundled_graphs():
    """``[(name, graph), ...]`` in name order."""
    return [(name, bundled_graph(name)) for name in bundled_names()]


def shuffled_copy(G, rng, prefix=("w", "f")):
    """Isomorphic copy of ``G`` with fresh names and shuffled vertex and edge order."""
    vperm, eperm = rng.permutation(G.n_vertices), rng.permutation(G.n_edges)
    vmap = {v: f"{prefix[0]}{vperm[i] + 1}" for i, v in enumerate(G.vertices)}
    emap = {e.id: f"{prefix[1]}{eperm[j] + 1}" for j, e in enumerate(G.edges)}
    return relabel(
        G, vmap, emap,
        vertex_order=list(rng.permutation(G.n_vertices)),
        edge_order=list(rng.permutation(G.n_edges)),
    )


def perturbed_copy(G, rng):
    """Shuffled copy with one edge endpoint moved; usually not isomorphic to ``G``."""
    H = shuffled_copy(G, rng)
    if H.n_edges == 0 or H.n_vertices < 2:
        return H
    raw = H.to_dict()
    j = int(rng.integers(H.n_edges))
    key = "dst" if rng.random() < 0.5 else "src"
    raw["edges"][j][key] = H.vertices[int(rng.integers(H.n_vertices))]
    return validate_graph(raw)


def intertwiner_corpus(seed=0, extra=40):
    """``[(label, Representation)]``: every ``m_v <= 3`` pattern on the small bundled
    graphs, sampled patterns on larger ones, plus seeded random graphs
    (at most 5 vertices and 8 edges).
    """
    rng = np.random.default_rng(seed)
    out = []
    for name, G in bundled_graphs():
        if G.n_vertices <= 4:
            for m in itertools.product((1, 2, 3), repeat=G.n_vertices):
                out.append((f"{name}:{m}", Representation(G, list(m))))
        else:
            for _ in range(20):
                m = rng.integers(1, 4, size=G.n_vertices)
                out.append((f"{name}:{tuple(int(k) for k in m)}", Representation(G, [int(k) for k in m])))
    for i in range(extra):
        nv = int(rng.integers(1, 6))
        ne = int(rng.integers(0, 9))
        G = random_graph(rng, nv, ne)
        m = [int(k) for k in rng.integers(1, 4, size=nv)]
        out.append((f"random{i}:{tuple(m)}", Representation(G, m)))
    return out


def morita_pair_corpus(seed=0, count=120):
    """Seeded pairs ``(G, F)`` with at most 5 vertices: isomorphic shuffles and near misses."""
    rng = np.random.default_rng(seed)
    pairs = []
    for i in range(count):
        nv = int(rng.integers(1, 6))
        ne = int(rng.integers(0, 8))
        G = random_graph(rng, nv, ne)
        kind = i % 3
        if kind == 0:
            F = shuffled_copy(G, rng)
        elif kind == 1:
            F = perturbed_copy(G, rng)
        else:
            F = random_graph(rng, nv, ne, prefix=("w", "f"))
        pairs.append((G, F))
    return pairs
