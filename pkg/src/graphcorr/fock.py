"""Truncated Fock space of a graph correspondence and its basic operators.

The truncated Fock space ``F_N`` is the direct sum of the tensor powers of
levels ``0..N``; its basis is the concatenation of the path bases. All
operators here are right-module maps, so a matrix entry ``(nu, mu)`` can
be nonzero only when the two paths end at the same source vertex.

Creation operators send level ``N`` to zero. Identities that hold on the
full Fock space therefore hold here only on inputs of low enough level;
callers restrict checks to those "safe" levels.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .algebra import AlgebraElement
from .correspondence import CorrElement, TensorElement, path_level
from .errors import MalformedInputError, MismatchError

# Matrices larger than this are stored in compressed sparse row format.
DENSE_LIMIT = 64


class FockBasis:
    """Ordered basis of ``F_N``: vertices, then paths of length 1, ..., N."""

    def __init__(self, graph, N):
        if N < 0:
            raise MismatchError("truncation level must be non-negative")
        self.graph = graph
        self.N = N
        self.levels = [path_level(graph, n) for n in range(N + 1)]
        sizes = [len(lvl) for lvl in self.levels]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        self.dim = int(self.offsets[-1])
        self.first_range = np.concatenate([lvl.first_range for lvl in self.levels])
        self.last_source = np.concatenate([lvl.last_source for lvl in self.levels])
        self.level_of = np.repeat(np.arange(N + 1), sizes)

    def level_slice(self, n):
        return slice(int(self.offsets[n]), int(self.offsets[n + 1]))

    def index(self, level, path):
        row = self.levels[level].find(path)
        return None if row is None else int(self.offsets[level]) + row

    def embed(self, u):
        """Fock-space coordinates of a single-level tensor element."""
        if u.graph != self.graph or u.level > self.N:
            raise MismatchError("tensor element does not fit this Fock basis")
        v = np.zeros(self.dim, dtype=complex)
        v[self.level_slice(u.level)] = u.coeffs
        return v

    def inner(self, u, w):
        """Algebra-valued inner product of two coordinate vectors."""
        out = np.zeros(self.graph.n_vertices, dtype=complex)
        np.add.at(out, self.last_source, np.conj(u) * w)
        return AlgebraElement(self.graph, out)

    def __eq__(self, other):
        return isinstance(other, FockBasis) and self.graph == other.graph and self.N == other.N

    def __hash__(self):
        return hash((self.graph, self.N))


def fock_basis(graph, N):
    key = ("fock", N)
    if key not in graph._cache:
        graph._cache[key] = FockBasis(graph, N)
    return graph._cache[key]


def _as_basis(graph_or_basis, N):
    if isinstance(graph_or_basis, FockBasis):
        return graph_or_basis
    return fock_basis(graph_or_basis, N)


class FockOperator:
    """A right-module operator on ``F_N``, dense or sparse by size.

    Parameters
    ----------
    basis : FockBasis
    matrix : array_like or scipy sparse matrix
    check : bool
        Verify the right-support sparsity pattern on construction.
    """

    def __init__(self, basis, matrix, check=True):
        if sp.issparse(matrix):
            matrix = sp.csr_matrix(matrix, dtype=complex)
        else:
            matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (basis.dim, basis.dim):
            raise MismatchError(f"matrix shape {matrix.shape} does not match basis dim {basis.dim}")
        if basis.dim > DENSE_LIMIT and not sp.issparse(matrix):
            matrix = sp.csr_matrix(matrix)
        elif basis.dim <= DENSE_LIMIT and sp.issparse(matrix):
            matrix = matrix.toarray()
        self.basis = basis
        self.matrix = matrix
        if check:
            bad = self.sparsity_violations()
            if bad:
                raise MalformedInputError(f"{bad} entries violate the right-module sparsity pattern")

    @property
    def is_sparse(self):
        return sp.issparse(self.matrix)

    def _coo(self):
        m = sp.coo_matrix(self.matrix)
        keep = m.data != 0
        return m.row[keep], m.col[keep], m.data[keep]

    def sparsity_violations(self):
        rows, cols, _ = self._coo()
        src = self.basis.last_source
        return int(np.count_nonzero(src[rows] != src[cols]))

    def to_dense(self):
        return self.matrix.toarray() if self.is_sparse else self.matrix.copy()

    def adjoint(self):
        return operator_adjoint(self)

    def apply(self, v):
        return np.asarray(self.matrix @ np.asarray(v, dtype=complex)).ravel()

    def _other(self, other):
        if not isinstance(other, FockOperator) or other.basis != self.basis:
            raise MismatchError("operators act on different Fock spaces")
        return other.matrix

    def __matmul__(self, other):
        return FockOperator(self.basis, self.matrix @ self._other(other), check=False)

    def __add__(self, other):
        return FockOperator(self.basis, self.matrix + self._other(other), check=False)

    def __sub__(self, other):
        return FockOperator(self.basis, self.matrix - self._other(other), check=False)

    def __mul__(self, scalar):
        return FockOperator(self.basis, self.matrix * scalar, check=False)

    __rmul__ = __mul__

    def max_abs_diff(self, other):
        d = self.matrix - self._other(other)
        if sp.issparse(d):
            return float(np.max(np.abs(d.data), initial=0.0))
        return float(np.max(np.abs(d), initial=0.0))

    def restricted(self, max_level):
        """Dense matrix of the columns with level ``<= max_level``."""
        cols = self.basis.level_of <= max_level
        return self.to_dense()[:, cols]

    def norm(self, max_level=None):
        """Operator norm, optionally on the span of levels ``<= max_level``.

        Computed as the square root of the top eigenvalue of the Hermitian
        Gram matrix ``M* M``.
        """
        M = self.to_dense() if max_level is None else self.restricted(max_level)
        if M.size == 0:
            return 0.0
        top = np.linalg.eigvalsh(M.conj().T @ M)[-1]
        return float(np.sqrt(max(top, 0.0)))

    def to_dict(self):
        rows, cols, data = self._coo()
        order = np.lexsort((cols, rows))
        return {
            "N": self.basis.N,
            "entries": [
                [int(rows[i]), int(cols[i]), [float(data[i].real), float(data[i].imag)]]
                for i in order
            ],
        }


def _build(basis, rows, cols, vals):
    m = sp.coo_matrix(
        (np.asarray(vals, dtype=complex), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=(basis.dim, basis.dim),
    ).tocsr()
    return FockOperator(basis, m, check=False)


def phi_infinity(a, N):
    """Diagonal operator: ``a`` at the range of the first edge of each path."""
    basis = fock_basis(a.graph, N)
    diag = a.coeffs[basis.first_range]
    idx = np.arange(basis.dim)
    return _build(basis, idx, idx, diag)


def tensor_creation(xi, N):
    """Left tensoring by a single-level tensor ``xi``, truncated at level ``N``.

    A path ``mu`` at level ``k`` with ``k + n <= N`` goes to the
    concatenations ``nu mu`` with ``s(nu_last) = r(mu_1)``, weighted by
    ``xi(nu)``. At ``n == 0`` this is the diagonal action of ``xi``.
    """
    g, n = xi.graph, xi.level
    if n > N:
        raise MismatchError(f"tensor level {n} exceeds truncation {N}")
    if n == 0:
        return phi_infinity(AlgebraElement(g, xi.coeffs), N)
    basis = fock_basis(g, N)
    head = basis.levels[n]
    nz = np.flatnonzero(xi.coeffs)
    by_source = {}
    for i in nz:
        by_source.setdefault(int(head.last_source[i]), []).append(i)
    rows, cols, vals = [], [], []
    for k in range(0, N - n + 1):
        src_lvl, dst_lvl = basis.levels[k], basis.levels[k + n]
        for j in range(len(src_lvl)):
            heads = by_source.get(int(src_lvl.first_range[j]))
            if not heads:
                continue
            tail = tuple(int(t) for t in src_lvl.edges[j])
            for i in heads:
                target = dst_lvl.find(tuple(int(t) for t in head.edges[i]) + tail)
                rows.append(basis.offsets[k + n] + target)
                cols.append(basis.offsets[k] + j)
                vals.append(xi.coeffs[i])
    return _build(basis, rows, cols, vals)


def creation_operator(x, N):
    """``T_x``: left tensoring by ``x``, with level ``N`` sent to zero."""
    return tensor_creation(TensorElement(x.graph, 1, x.coeffs), N)


def operator_adjoint(T):
    """Conjugate transpose, after checking the right-module sparsity pattern."""
    bad = T.sparsity_violations()
    if bad:
        raise MalformedInputError(f"{bad} entries violate the right-module sparsity pattern")
    return FockOperator(T.basis, T.matrix.conj().T, check=False)


def poly_operator(terms, a0, N):
    """``phi_inf(a0) + sum_n T_{xi_n}``, a truncated tensor-algebra element.

    Parameters
    ----------
    terms : iterable of (level, TensorElement) or TensorElement
    a0 : AlgebraElement
    N : int
    """
    T = phi_infinity(a0, N)
    for term in terms:
        xi = term[1] if isinstance(term, tuple) else term
        if isinstance(term, tuple) and term[0] != xi.level:
            raise MismatchError("declared level does not match tensor level")
        if isinstance(xi, CorrElement):
            xi = TensorElement(xi.graph, 1, xi.coeffs)
        T = T + tensor_creation(xi, N)
    return T
