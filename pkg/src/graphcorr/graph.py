"""Finite directed graphs, isomorphism search and path counting.

A graph has an ordered vertex list and an ordered edge list. Each edge
``e`` carries a source ``s(e)`` (JSON key ``src``) and a range ``r(e)``
(JSON key ``dst``). Loops and parallel edges are allowed.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import MalformedInputError, MismatchError


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str


class DirectedGraph:
    """An immutable finite directed graph.

    Parameters
    ----------
    vertices : sequence of str
        Distinct vertex identifiers, in a fixed order.
    edges : sequence of Edge or (id, src, dst) triples
        Distinct edge identifiers with endpoints among ``vertices``.

    Raises
    ------
    MalformedInputError
        If the vertex set is empty, an identifier repeats, or an edge
        endpoint is not a vertex.
    """

    def __init__(self, vertices, edges):
        vertices = tuple(str(v) for v in vertices)
        edges = tuple(e if isinstance(e, Edge) else Edge(*map(str, e)) for e in edges)
        if not vertices:
            raise MalformedInputError("empty vertex set")
        vindex = {}
        for v in vertices:
            if v in vindex:
                raise MalformedInputError(f"duplicate vertex id {v}")
            vindex[v] = len(vindex)
        eindex = {}
        for e in edges:
            if e.id in eindex:
                raise MalformedInputError(f"duplicate edge id {e.id}")
            for end in (e.src, e.dst):
                if end not in vindex:
                    raise MalformedInputError(f"dangling endpoint {end}")
            eindex[e.id] = len(eindex)
        self._vertices = vertices
        self._edges = edges
        self._vindex = vindex
        self._eindex = eindex
        self._source = np.array([vindex[e.src] for e in edges], dtype=np.int64)
        self._range = np.array([vindex[e.dst] for e in edges], dtype=np.int64)
        self._source.setflags(write=False)
        self._range.setflags(write=False)
        # memo for derived, immutable data (path bases, Fock bases)
        self._cache = {}

    @property
    def vertices(self):
        return self._vertices

    @property
    def edges(self):
        return self._edges

    @property
    def n_vertices(self):
        return len(self._vertices)

    @property
    def n_edges(self):
        return len(self._edges)

    @property
    def source(self):
        """Vertex index of ``s(e)`` for every edge, as an int array."""
        return self._source

    @property
    def range(self):
        """Vertex index of ``r(e)`` for every edge, as an int array."""
        return self._range

    def vertex_index(self, v):
        try:
            return self._vindex[v]
        except KeyError:
            raise MismatchError(f"unknown vertex {v}") from None

    def edge_index(self, e):
        try:
            return self._eindex[e]
        except KeyError:
            raise MismatchError(f"unknown edge {e}") from None

    def loops(self):
        """Indices of edges with ``s(e) == r(e)``."""
        return [j for j in range(self.n_edges) if self._source[j] == self._range[j]]

    def in_degree(self):
        return np.bincount(self._range, minlength=self.n_vertices)

    def out_degree(self):
        return np.bincount(self._source, minlength=self.n_vertices)

    def to_dict(self):
        return {
            "vertices": list(self._vertices),
            "edges": [{"id": e.id, "src": e.src, "dst": e.dst} for e in self._edges],
        }

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self):
        return hash((self._vertices, self._edges))

    def __repr__(self):
        return f"DirectedGraph(n_vertices={self.n_vertices}, n_edges={self.n_edges})"


def validate_graph(raw):
    """Build a :class:`DirectedGraph` from a JSON-style description.

    ``raw`` is a mapping with ``"vertices"`` (list of ids) and ``"edges"``
    (list of ``{"id", "src", "dst"}`` mappings or ``(id, src, dst)``
    triples). Any structural problem raises :class:`MalformedInputError`
    naming the first violated invariant.
    """
    if not isinstance(raw, dict):
        raise MalformedInputError("graph description must be a mapping")
    if "vertices" not in raw:
        raise MalformedInputError("missing 'vertices'")
    vertices = raw["vertices"]
    edges_raw = raw.get("edges", [])
    if not isinstance(vertices, (list, tuple)) or not isinstance(edges_raw, (list, tuple)):
        raise MalformedInputError("'vertices' and 'edges' must be lists")
    for v in vertices:
        if not isinstance(v, str):
            raise MalformedInputError(f"vertex id must be a string, got {v!r}")
    edges = []
    for item in edges_raw:
        if isinstance(item, dict):
            try:
                triple = (item["id"], item["src"], item["dst"])
            except KeyError as exc:
                raise MalformedInputError(f"edge record missing key {exc.args[0]!r}") from None
        elif isinstance(item, (list, tuple)) and len(item) == 3:
            triple = tuple(item)
        else:
            raise MalformedInputError(f"malformed edge record {item!r}")
        if not all(isinstance(t, str) for t in triple):
            raise MalformedInputError(f"edge fields must be strings in {item!r}")
        edges.append(Edge(*triple))
    return DirectedGraph(vertices, edges)


@dataclass(frozen=True)
class GraphIsoCertificate:
    """Vertex bijection ``beta`` and edge bijection ``alpha`` between two graphs."""

    beta: dict
    alpha: dict

    def verify(self, G, F):
        """Replay both compatibility equations over every edge of ``G``."""
        if sorted(self.beta) != sorted(G.vertices) or sorted(self.beta.values()) != sorted(F.vertices):
            return False
        if sorted(self.alpha) != sorted(e.id for e in G.edges):
            return False
        if sorted(self.alpha.values()) != sorted(e.id for e in F.edges):
            return False
        f_edges = {e.id: e for e in F.edges}
        for e in G.edges:
            f = f_edges[self.alpha[e.id]]
            if f.src != self.beta[e.src] or f.dst != self.beta[e.dst]:
                return False
        return True

    def to_dict(self):
        return {"beta": dict(self.beta), "alpha": dict(self.alpha)}


class VertexPermutation:
    """A bijection of a finite vertex set onto itself.

    Parameters
    ----------
    mapping : dict
        ``mapping[x]`` is the image of ``x``. The key order fixes the
        domain order used by :func:`permutation_graph`.
    """

    def __init__(self, mapping):
        mapping = {str(k): str(v) for k, v in dict(mapping).items()}
        if set(mapping.values()) != set(mapping):
            raise MalformedInputError("permutation image differs from its domain")
        self._map = mapping

    @classmethod
    def from_images(cls, domain, images):
        return cls(dict(zip(domain, images)))

    @property
    def domain(self):
        return tuple(self._map)

    def __call__(self, x):
        return self._map[x]

    def inverse(self):
        return VertexPermutation({v: k for k, v in self._map.items()})

    def compose(self, other):
        """Return ``self ∘ other`` (apply ``other`` first)."""
        return VertexPermutation({x: self._map[other(x)] for x in other.domain})

    def as_indices(self, vertices):
        """Integer array ``p`` with ``p[i] = index of sigma(vertices[i])``."""
        pos = {v: i for i, v in enumerate(vertices)}
        return np.array([pos[self._map[v]] for v in vertices], dtype=np.int64)

    def to_dict(self):
        return dict(self._map)

    def __eq__(self, other):
        return isinstance(other, VertexPermutation) and self._map == other._map

    def __hash__(self):
        return hash(tuple(sorted(self._map.items())))

    def __repr__(self):
        return f"VertexPermutation({self._map})"


def permutation_graph(sigma):
    """The graph with one edge ``e_x`` per vertex, ``s(e_x)=sigma(x)``, ``r(e_x)=x``."""
    verts = sigma.domain
    return DirectedGraph(verts, [Edge(f"e_{x}", sigma(x), x) for x in verts])


def composability_matrix(G):
    """Integer matrix ``B[v, w]`` counting edges with ``r(e)=v`` and ``s(e)=w``.

    Entries of ``B**n`` count composable paths of length ``n`` by their
    first range and last source.
    """
    B = np.zeros((G.n_vertices, G.n_vertices), dtype=np.int64)
    np.add.at(B, (G.range, G.source), 1)
    return B


def count_paths(G, n):
    """Number of composable paths of length ``n`` (vertices when ``n == 0``)."""
    return int(np.linalg.matrix_power(composability_matrix(G), n).sum())


def _signature(G):
    loops = np.zeros(G.n_vertices, dtype=np.int64)
    for j in G.loops():
        loops[G.source[j]] += 1
    ind, outd = G.in_degree(), G.out_degree()
    return [(int(ind[i]), int(outd[i]), int(loops[i])) for i in range(G.n_vertices)]


def graph_isomorphism(G, F):
    """Search for a graph isomorphism from ``G`` onto ``F``.

    Backtracks over vertex assignments. Vertices of ``G`` are visited in
    order of decreasing degree (ties by input order) and candidate images
    are tried in ``F``'s input order, so the result is deterministic.
    Candidates must share the (in-degree, out-degree, loop count)
    signature, and every partial assignment must preserve the edge
    multiplicity between each pair of assigned vertices. Edges are then
    matched greedily in input order, which always succeeds once the
    multiplicities agree.

    Returns
    -------
    GraphIsoCertificate or None
    """
    if G.n_vertices != F.n_vertices or G.n_edges != F.n_edges:
        return None
    sig_g, sig_f = _signature(G), _signature(F)
    if Counter(sig_g) != Counter(sig_f):
        return None
    cg, cf = composability_matrix(G), composability_matrix(F)
    n = G.n_vertices
    degree = [s[0] + s[1] for s in sig_g]
    order = sorted(range(n), key=lambda i: (-degree[i], i))
    by_sig = defaultdict(list)
    for j in range(n):
        by_sig[sig_f[j]].append(j)

    beta = [-1] * n
    used = [False] * n

    def consistent(u, img, depth):
        for k in range(depth):
            w = order[k]
            bw = beta[w]
            if cg[u, w] != cf[img, bw] or cg[w, u] != cf[bw, img]:
                return False
        return True

    def extend(depth):
        if depth == n:
            return True
        u = order[depth]
        for img in by_sig[sig_g[u]]:
            if used[img] or not consistent(u, img, depth):
                continue
            beta[u] = img
            used[img] = True
            if extend(depth + 1):
                return True
            used[img] = False
            beta[u] = -1
        return False

    if not extend(0):
        return None
    pool = defaultdict(list)
    for j, f in enumerate(F.edges):
        pool[(F.source[j], F.range[j])].append(f.id)
    alpha = {}
    for j, e in enumerate(G.edges):
        key = (beta[G.source[j]], beta[G.range[j]])
        alpha[e.id] = pool[key].pop(0)
    return GraphIsoCertificate(
        beta={G.vertices[i]: F.vertices[beta[i]] for i in range(n)},
        alpha=alpha,
    )


def identity_certificate(G):
    return GraphIsoCertificate(
        beta={v: v for v in G.vertices}, alpha={e.id: e.id for e in G.edges}
    )


def relabel(G, vertex_map, edge_map, vertex_order=None, edge_order=None):
    """Copy of ``G`` with renamed vertices/edges and optionally reordered lists."""
    verts = [vertex_map[v] for v in G.vertices]
    edges = [Edge(edge_map[e.id], vertex_map[e.src], vertex_map[e.dst]) for e in G.edges]
    if vertex_order is not None:
        verts = [verts[i] for i in vertex_order]
    if edge_order is not None:
        edges = [edges[i] for i in edge_order]
    return DirectedGraph(verts, edges)


def random_graph(rng, n_vertices, n_edges, prefix=("v", "e")):
    """Uniformly random endpoints; loops and parallel edges allowed."""
    verts = [f"{prefix[0]}{i + 1}" for i in range(n_vertices)]
    src = rng.integers(0, n_vertices, size=n_edges)
    dst = rng.integers(0, n_vertices, size=n_edges)
    edges = [Edge(f"{prefix[1]}{j + 1}", verts[src[j]], verts[dst[j]]) for j in range(n_edges)]
    return DirectedGraph(verts, edges)
