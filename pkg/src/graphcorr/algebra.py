"""The diagonal algebra of a graph: complex functions on the vertex set."""

from __future__ import annotations

import numpy as np

from .errors import MismatchError


class AlgebraElement:
    """A vertex-indexed complex vector ``a = sum_v a(v) delta_v``.

    Multiplication is pointwise, so the point masses ``delta_v`` are
    mutually orthogonal idempotents summing to the unit.
    """

    __slots__ = ("graph", "coeffs")

    def __init__(self, graph, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (graph.n_vertices,):
            raise MismatchError(
                f"expected {graph.n_vertices} vertex coefficients, got shape {coeffs.shape}"
            )
        self.graph = graph
        self.coeffs = coeffs

    @classmethod
    def delta(cls, graph, v):
        c = np.zeros(graph.n_vertices, dtype=complex)
        c[graph.vertex_index(v) if isinstance(v, str) else v] = 1.0
        return cls(graph, c)

    @classmethod
    def unit(cls, graph):
        return cls(graph, np.ones(graph.n_vertices, dtype=complex))

    @classmethod
    def zero(cls, graph):
        return cls(graph, np.zeros(graph.n_vertices, dtype=complex))

    def _check(self, other):
        if self.graph.vertices != other.graph.vertices:
            raise MismatchError("vertex-set mismatch")

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return alg_mul(self, other)
        return AlgebraElement(self.graph, self.coeffs * other)

    __rmul__ = __mul__

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.graph, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.graph, self.coeffs - other.coeffs)

    def __neg__(self):
        return AlgebraElement(self.graph, -self.coeffs)

    def adjoint(self):
        return AlgebraElement(self.graph, self.coeffs.conj())

    def norm(self):
        return alg_norm(self)

    def allclose(self, other, tol=1e-10):
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= tol)

    def to_dict(self):
        return {v: [float(c.real), float(c.imag)] for v, c in zip(self.graph.vertices, self.coeffs)}

    def __repr__(self):
        return f"AlgebraElement({dict(zip(self.graph.vertices, self.coeffs))})"


def alg_mul(a, b):
    """Pointwise product of two vertex functions over the same vertex set."""
    a._check(b)
    return AlgebraElement(a.graph, a.coeffs * b.coeffs)


def alg_norm(a):
    """Supremum norm: the largest modulus over vertices."""
    return float(np.max(np.abs(a.coeffs), initial=0.0))
