"""The graph correspondence over the diagonal algebra, and its tensor powers.

Elements of the correspondence are complex functions on edges. The
algebra acts on the left through ranges and on the right through sources::

    (a . x . b)(e) = a(r(e)) x(e) b(s(e))
    <x, y>(v)      = sum over s(e) = v of conj(x(e)) y(e)

Tensor powers are stored in the basis of composable paths
``(e_1, ..., e_n)`` with ``s(e_k) = r(e_{k+1})``: over a commutative
diagonal algebra the balancing relation kills every non-composable
simple tensor and identifies the rest with single paths.
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement
from .errors import MismatchError


class CorrElement:
    """An edge-indexed complex vector ``x = sum_e x(e) delta_e``."""

    __slots__ = ("graph", "coeffs")

    def __init__(self, graph, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (graph.n_edges,):
            raise MismatchError(
                f"expected {graph.n_edges} edge coefficients, got shape {coeffs.shape}"
            )
        self.graph = graph
        self.coeffs = coeffs

    @classmethod
    def delta(cls, graph, e):
        c = np.zeros(graph.n_edges, dtype=complex)
        c[graph.edge_index(e) if isinstance(e, str) else e] = 1.0
        return cls(graph, c)

    @classmethod
    def zero(cls, graph):
        return cls(graph, np.zeros(graph.n_edges, dtype=complex))

    def _check(self, other):
        if self.graph != other.graph:
            raise MismatchError("graph mismatch")

    def __add__(self, other):
        self._check(other)
        return CorrElement(self.graph, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return CorrElement(self.graph, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return CorrElement(self.graph, self.coeffs * scalar)

    __rmul__ = __mul__

    def norm(self):
        return corr_norm(self)

    def to_dict(self):
        return {e.id: [float(c.real), float(c.imag)] for e, c in zip(self.graph.edges, self.coeffs)}

    def __repr__(self):
        return f"CorrElement({dict(zip((e.id for e in self.graph.edges), self.coeffs))})"


def _check_graph(graph, *elements):
    for el in elements:
        if el.graph != graph:
            raise MismatchError("graph mismatch")


def bimodule_action(a, x, b):
    """``(a . x . b)(e) = a(r(e)) x(e) b(s(e))``."""
    g = x.graph
    _check_graph(g, a, b)
    return CorrElement(g, a.coeffs[g.range] * x.coeffs * b.coeffs[g.source])


def corr_inner_product(x, y):
    """Algebra-valued inner product, conjugate-linear in ``x``."""
    g = x.graph
    _check_graph(g, y)
    out = np.zeros(g.n_vertices, dtype=complex)
    np.add.at(out, g.source, x.coeffs.conj() * y.coeffs)
    return AlgebraElement(g, out)


def corr_norm(x):
    """Square root of the largest per-source sum of squared moduli."""
    g = x.graph
    sums = np.zeros(g.n_vertices)
    np.add.at(sums, g.source, np.abs(x.coeffs) ** 2)
    return float(np.sqrt(sums.max(initial=0.0)))


class PathLevel:
    """All composable paths of one length, in lexicographic edge-index order.

    Attributes
    ----------
    level : int
    edges : int array of shape (n_paths, level)
        Edge indices along each path; empty columns at level 0.
    first_range : int array
        ``r(e_1)`` for each path; the vertex itself at level 0.
    last_source : int array
        ``s(e_n)`` for each path; the vertex itself at level 0.
    """

    def __init__(self, graph, level, edges):
        self.graph = graph
        self.level = level
        self.edges = edges
        if level == 0:
            self.first_range = np.arange(graph.n_vertices)
            self.last_source = np.arange(graph.n_vertices)
            self._index = {(v,): v for v in range(graph.n_vertices)}
        else:
            self.first_range = graph.range[edges[:, 0]]
            self.last_source = graph.source[edges[:, -1]]
            self._index = {tuple(int(k) for k in row): i for i, row in enumerate(edges)}

    def __len__(self):
        return len(self.first_range)

    def find(self, path):
        """Row of ``path`` (a tuple of edge indices, or ``(v,)`` at level 0)."""
        return self._index.get(tuple(path))

    def keys(self):
        """JSON keys: vertex ids at level 0, ``"e1|e2|..."`` above."""
        g = self.graph
        if self.level == 0:
            return list(g.vertices)
        return ["|".join(g.edges[k].id for k in row) for row in self.edges]


def path_level(graph, n):
    """Cached :class:`PathLevel` for ``graph`` at length ``n``."""
    if n < 0:
        raise MismatchError("negative level")
    key = ("paths", n)
    cache = graph._cache
    if key in cache:
        return cache[key]
    if n == 0:
        lvl = PathLevel(graph, 0, np.zeros((graph.n_vertices, 0), dtype=np.int64))
    elif n == 1:
        lvl = PathLevel(graph, 1, np.arange(graph.n_edges, dtype=np.int64).reshape(-1, 1))
    else:
        prev = path_level(graph, n - 1)
        by_range = [[] for _ in range(graph.n_vertices)]
        for j in range(graph.n_edges):
            by_range[graph.range[j]].append(j)
        rows = []
        for row, s in zip(prev.edges, prev.last_source):
            for j in by_range[s]:
                rows.append((*row, j))
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), n)
        lvl = PathLevel(graph, n, arr)
    cache[key] = lvl
    return lvl


def path_basis(graph, n):
    """Composable paths of length ``n`` as tuples of edge ids.

    Paths are ordered lexicographically by edge index. For ``n == 0`` the
    vertex ids are returned instead.
    """
    lvl = path_level(graph, n)
    if n == 0:
        return list(graph.vertices)
    return [tuple(graph.edges[k].id for k in row) for row in lvl.edges]


class TensorElement:
    """An element of the ``level``-fold tensor power, in the path basis."""

    __slots__ = ("graph", "level", "coeffs")

    def __init__(self, graph, level, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        n = len(path_level(graph, level))
        if coeffs.shape != (n,):
            raise MismatchError(f"expected {n} path coefficients, got shape {coeffs.shape}")
        self.graph = graph
        self.level = level
        self.coeffs = coeffs

    @classmethod
    def basis_vector(cls, graph, path):
        """Unit coefficient at ``path`` (edge ids), or at a vertex id for level 0."""
        if isinstance(path, str):
            level, key = 0, (graph.vertex_index(path),)
        else:
            level, key = len(path), tuple(graph.edge_index(e) for e in path)
        lvl = path_level(graph, level)
        row = lvl.find(key)
        if row is None:
            raise MismatchError(f"{path} is not a composable path")
        c = np.zeros(len(lvl), dtype=complex)
        c[row] = 1.0
        return cls(graph, level, c)

    @classmethod
    def from_algebra(cls, a):
        return cls(a.graph, 0, a.coeffs)

    def __add__(self, other):
        _check_level(self, other)
        return TensorElement(self.graph, self.level, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_level(self, other)
        return TensorElement(self.graph, self.level, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return TensorElement(self.graph, self.level, self.coeffs * scalar)

    __rmul__ = __mul__

    def left_action(self, a):
        """``a . u``: scale each path by ``a`` at the range of its first edge."""
        lvl = path_level(self.graph, self.level)
        return TensorElement(self.graph, self.level, a.coeffs[lvl.first_range] * self.coeffs)

    def right_action(self, b):
        """``u . b``: scale each path by ``b`` at the source of its last edge."""
        lvl = path_level(self.graph, self.level)
        return TensorElement(self.graph, self.level, self.coeffs * b.coeffs[lvl.last_source])

    def to_dict(self):
        keys = path_level(self.graph, self.level).keys()
        return {
            "level": self.level,
            "coeffs": {k: [float(c.real), float(c.imag)] for k, c in zip(keys, self.coeffs)},
        }


def _check_level(u, w):
    if u.graph != w.graph:
        raise MismatchError("graph mismatch")
    if u.level != w.level:
        raise MismatchError(f"level mismatch: {u.level} vs {w.level}")


def expand_elementary_tensor(*xs):
    """Path-basis coefficients of ``x_1 (x) ... (x) x_n``.

    The coefficient of a composable path is the product of the factor
    coefficients along it; non-composable simple tensors vanish.
    """
    if not xs:
        raise MismatchError("need at least one factor")
    g = xs[0].graph
    _check_graph(g, *xs)
    lvl = path_level(g, len(xs))
    coeffs = np.ones(len(lvl), dtype=complex)
    for k, x in enumerate(xs):
        coeffs = coeffs * x.coeffs[lvl.edges[:, k]]
    return TensorElement(g, len(xs), coeffs)


def tensor_inner_product(u, w):
    """``<u, w>`` on a tensor power: orthogonal paths, ``<mu, mu> = delta_{s(mu_n)}``."""
    _check_level(u, w)
    lvl = path_level(u.graph, u.level)
    out = np.zeros(u.graph.n_vertices, dtype=complex)
    np.add.at(out, lvl.last_source, u.coeffs.conj() * w.coeffs)
    return AlgebraElement(u.graph, out)
