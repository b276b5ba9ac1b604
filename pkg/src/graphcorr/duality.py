"""Representations of the diagonal algebra and the intertwiner space.

A faithful normal representation ``sigma`` of the vertex algebra is fixed
up to unitary equivalence by multiplicities ``m_v >= 1``: ``H`` is the
direct sum of ``C^{m_v}`` and ``delta_v`` acts as the projection onto the
``v``-th summand. The induced space ``E (x)_sigma H`` splits as the direct
sum over edges of ``H_{s(e)}``.

An intertwiner ``eta*`` from the induced space to ``H`` has exactly one
nonzero block per edge, ``T_e : H_{s(e)} -> H_{r(e)}``. These blocks are
what :class:`Intertwiner` stores; the element ``eta`` of the dual
correspondence is their adjoint and is applied on demand.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .correspondence import path_level
from .errors import MalformedInputError, MismatchError


class Representation:
    """Multiplicities ``m_v >= 1`` for every vertex of ``graph``.

    Parameters
    ----------
    graph : DirectedGraph
    mult : dict, sequence, int or None
        Per-vertex multiplicities. Missing vertices default to 1.
    """

    def __init__(self, graph, mult=None):
        if mult is None:
            m = [1] * graph.n_vertices
        elif isinstance(mult, int):
            m = [mult] * graph.n_vertices
        elif isinstance(mult, dict):
            unknown = set(mult) - set(graph.vertices)
            if unknown:
                raise MalformedInputError(f"multiplicity given for unknown vertex {sorted(unknown)[0]}")
            m = [int(mult.get(v, 1)) for v in graph.vertices]
        else:
            m = [int(k) for k in mult]
            if len(m) != graph.n_vertices:
                raise MismatchError("one multiplicity per vertex required")
        if min(m) < 1:
            raise MalformedInputError("multiplicities must be >= 1 (faithful representation)")
        self.graph = graph
        self.mult = tuple(m)
        self.offsets = np.concatenate([[0], np.cumsum(m)]).astype(np.int64)
        self.dim = int(self.offsets[-1])
        ms = np.array(m)[graph.source] if graph.n_edges else np.zeros(0, dtype=np.int64)
        self.edge_offsets = np.concatenate([[0], np.cumsum(ms)]).astype(np.int64)
        self.induced_dim = int(self.edge_offsets[-1])

    def block(self, v):
        return slice(int(self.offsets[v]), int(self.offsets[v + 1]))

    def edge_block(self, j):
        return slice(int(self.edge_offsets[j]), int(self.edge_offsets[j + 1]))

    def m_source(self, j):
        return self.mult[self.graph.source[j]]

    def m_range(self, j):
        return self.mult[self.graph.range[j]]

    def intertwiner_dim(self):
        g = self.graph
        return int(sum(self.mult[g.range[j]] * self.mult[g.source[j]] for j in range(g.n_edges)))

    def __eq__(self, other):
        return isinstance(other, Representation) and self.graph == other.graph and self.mult == other.mult

    def __hash__(self):
        return hash((self.graph, self.mult))

    def __repr__(self):
        return f"Representation({dict(zip(self.graph.vertices, self.mult))})"


def parse_mult(graph, text):
    """Parse ``"v1=2,v2=1"``; unlisted vertices default to 1."""
    mult = {}
    if text:
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            key, sep, val = item.partition("=")
            if not sep:
                raise MalformedInputError(f"malformed multiplicity entry {item!r}")
            try:
                mult[key.strip()] = int(val)
            except ValueError:
                raise MalformedInputError(f"malformed multiplicity entry {item!r}") from None
    return Representation(graph, mult)


def induced_space_decomposition(rep):
    """``[(edge_id, m_{s(e)}), ...]``: the edge-wise summands of ``E (x)_sigma H``."""
    g = rep.graph
    return [(e.id, rep.m_source(j)) for j, e in enumerate(g.edges)]


class Intertwiner:
    """Per-edge blocks ``T_e`` of shape ``(m_{r(e)}, m_{s(e)})``."""

    __slots__ = ("rep", "blocks")

    def __init__(self, rep, blocks):
        g = rep.graph
        if len(blocks) != g.n_edges:
            raise MismatchError("exactly one block per edge required")
        out = []
        for j, b in enumerate(blocks):
            b = np.asarray(b, dtype=complex)
            if b.shape != (rep.m_range(j), rep.m_source(j)):
                raise MismatchError(
                    f"block for edge {g.edges[j].id} has shape {b.shape}, "
                    f"expected {(rep.m_range(j), rep.m_source(j))}"
                )
            out.append(b)
        self.rep = rep
        self.blocks = out

    @classmethod
    def zero(cls, rep):
        return cls(rep, [np.zeros((rep.m_range(j), rep.m_source(j))) for j in range(rep.graph.n_edges)])

    @classmethod
    def random(cls, rep, rng, scale=1.0):
        return cls(
            rep,
            [
                scale * (rng.standard_normal((rep.m_range(j), rep.m_source(j)))
                         + 1j * rng.standard_normal((rep.m_range(j), rep.m_source(j))))
                for j in range(rep.graph.n_edges)
            ],
        )

    @classmethod
    def from_full_matrix(cls, rep, M):
        g = rep.graph
        return cls(rep, [M[rep.block(g.range[j]), rep.edge_block(j)] for j in range(g.n_edges)])

    def full_matrix(self):
        """``eta*`` as a ``dim H x dim(E (x) H)`` matrix."""
        rep, g = self.rep, self.rep.graph
        M = np.zeros((rep.dim, rep.induced_dim), dtype=complex)
        for j, b in enumerate(self.blocks):
            M[rep.block(g.range[j]), rep.edge_block(j)] = b
        return M

    def eta_matrix(self):
        """``eta`` itself: the adjoint of :meth:`full_matrix`."""
        return self.full_matrix().conj().T

    def _check(self, other):
        if self.rep != other.rep:
            raise MismatchError("representation mismatch")

    def __add__(self, other):
        self._check(other)
        return Intertwiner(self.rep, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return Intertwiner(self.rep, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, scalar):
        return Intertwiner(self.rep, [scalar * b for b in self.blocks])

    __rmul__ = __mul__

    def vector(self):
        return np.concatenate([b.ravel() for b in self.blocks]) if self.blocks else np.zeros(0, complex)

    def max_abs_diff(self, other):
        self._check(other)
        return float(max((np.max(np.abs(a - b), initial=0.0) for a, b in zip(self.blocks, other.blocks)), default=0.0))

    def to_dict(self):
        return {
            "blocks": {
                e.id: [[[float(z.real), float(z.imag)] for z in row] for row in b]
                for e, b in zip(self.rep.graph.edges, self.blocks)
            }
        }


def _vertex_projections(rep):
    """``sigma(delta_v)`` on ``H`` and ``(sigma^E o phi)(delta_v)`` on ``E (x) H``, as diagonals."""
    g = rep.graph
    h_vertex = np.repeat(np.arange(g.n_vertices), rep.mult)
    ms = [rep.m_source(j) for j in range(g.n_edges)]
    eh_range = np.repeat(g.range, ms) if g.n_edges else np.zeros(0, dtype=np.int64)
    return h_vertex, eh_range


def is_intertwiner(M, rep, tol=1e-12):
    """Whether ``M (sigma^E o phi)(delta_v) = sigma(delta_v) M`` for every vertex."""
    M = np.asarray(M, dtype=complex)
    if M.shape != (rep.dim, rep.induced_dim):
        raise MismatchError(f"expected shape {(rep.dim, rep.induced_dim)}, got {M.shape}")
    h_vertex, eh_range = _vertex_projections(rep)
    for v in range(rep.graph.n_vertices):
        left = M * (eh_range == v)[None, :]
        right = (h_vertex == v)[:, None] * M
        if np.max(np.abs(left - right), initial=0.0) > tol:
            return False
    return True


def intertwiner_basis(rep):
    """Matrix units of the per-edge blocks: a basis of the intertwiner space."""
    g = rep.graph
    out = []
    for j in range(g.n_edges):
        for r in range(rep.m_range(j)):
            for c in range(rep.m_source(j)):
                blocks = [np.zeros((rep.m_range(k), rep.m_source(k)), dtype=complex) for k in range(g.n_edges)]
                blocks[j][r, c] = 1.0
                out.append(Intertwiner(rep, blocks))
    return out


def ball_membership(eta):
    """``(norm < 1, norm)`` with ``norm**2`` the top eigenvalue over vertices
    of ``sum_{r(e)=v} T_e T_e*``.
    """
    rep, g = eta.rep, eta.rep.graph
    top = 0.0
    for v in range(g.n_vertices):
        m = rep.mult[v]
        gram = np.zeros((m, m), dtype=complex)
        for j in np.flatnonzero(g.range == v):
            b = eta.blocks[j]
            gram += b @ b.conj().T
        top = max(top, float(np.linalg.eigvalsh(gram)[-1]))
    norm = float(np.sqrt(max(top, 0.0)))
    return norm < 1.0, norm


def center_basis(rep):
    """One element per loop edge: identity block on that loop, zero elsewhere."""
    g = rep.graph
    out = []
    for j in g.loops():
        blocks = [np.zeros((rep.m_range(k), rep.m_source(k)), dtype=complex) for k in range(g.n_edges)]
        blocks[j] = np.eye(rep.mult[g.source[j]], dtype=complex)
        out.append(Intertwiner(rep, blocks))
    return out


class CommutantElement:
    """Block-diagonal operator ``(+)_v c_v`` with ``c_v`` of size ``m_v``."""

    __slots__ = ("rep", "blocks")

    def __init__(self, rep, blocks):
        if len(blocks) != rep.graph.n_vertices:
            raise MismatchError("one block per vertex required")
        out = []
        for v, b in enumerate(blocks):
            b = np.asarray(b, dtype=complex)
            if b.shape != (rep.mult[v], rep.mult[v]):
                raise MismatchError(f"block {v} has shape {b.shape}")
            out.append(b)
        self.rep = rep
        self.blocks = out

    @classmethod
    def identity(cls, rep):
        return cls(rep, [np.eye(m, dtype=complex) for m in rep.mult])

    @classmethod
    def random(cls, rep, rng):
        return cls(rep, [rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)) for m in rep.mult])

    @classmethod
    def basis(cls, rep):
        out = []
        for v, m in enumerate(rep.mult):
            for r in range(m):
                for c in range(m):
                    blocks = [np.zeros((k, k), dtype=complex) for k in rep.mult]
                    blocks[v][r, c] = 1.0
                    out.append(cls(rep, blocks))
        return out

    def _check(self, other):
        if self.rep != other.rep:
            raise MismatchError("representation mismatch")

    def __matmul__(self, other):
        self._check(other)
        return CommutantElement(self.rep, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def __add__(self, other):
        self._check(other)
        return CommutantElement(self.rep, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return CommutantElement(self.rep, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, scalar):
        return CommutantElement(self.rep, [scalar * b for b in self.blocks])

    __rmul__ = __mul__

    def adjoint(self):
        return CommutantElement(self.rep, [b.conj().T for b in self.blocks])

    def matrix(self):
        rep = self.rep
        M = np.zeros((rep.dim, rep.dim), dtype=complex)
        for v, b in enumerate(self.blocks):
            M[rep.block(v), rep.block(v)] = b
        return M

    def max_abs_diff(self, other):
        self._check(other)
        return float(max((np.max(np.abs(a - b), initial=0.0) for a, b in zip(self.blocks, other.blocks)), default=0.0))


def dual_left_action(a, eta):
    """``a . eta = (I_E (x) a) eta``; on stored blocks ``T_e -> T_e a_{s(e)}*``."""
    if a.rep != eta.rep:
        raise MismatchError("representation mismatch")
    g = eta.rep.graph
    return Intertwiner(eta.rep, [b @ a.blocks[g.source[j]].conj().T for j, b in enumerate(eta.blocks)])


def dual_right_action(eta, b):
    """``eta . b = eta b``; on stored blocks ``T_e -> b_{r(e)}* T_e``."""
    if b.rep != eta.rep:
        raise MismatchError("representation mismatch")
    g = eta.rep.graph
    return Intertwiner(eta.rep, [b.blocks[g.range[j]].conj().T @ t for j, t in enumerate(eta.blocks)])


def dual_pairing(a, eta, b):
    """``a . eta . b`` for commutant elements ``a`` and ``b``."""
    return dual_right_action(dual_left_action(a, eta), b)


def dual_inner(eta, xi):
    """``<eta, xi> = eta* xi``, the block sum ``(+)_v sum_{r(e)=v} T^eta_e (T^xi_e)*``."""
    if eta.rep != xi.rep:
        raise MismatchError("representation mismatch")
    rep, g = eta.rep, eta.rep.graph
    blocks = [np.zeros((m, m), dtype=complex) for m in rep.mult]
    for j in range(g.n_edges):
        blocks[g.range[j]] += eta.blocks[j] @ xi.blocks[j].conj().T
    return CommutantElement(rep, blocks)


class TensorHBasis:
    """Coordinates of ``E^{(x)n} (x)_sigma H``: one ``H_{s(mu_n)}`` block per path."""

    def __init__(self, rep, n):
        self.rep = rep
        self.level = n
        self.paths = path_level(rep.graph, n)
        sizes = np.array(rep.mult)[self.paths.last_source]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        self.dim = int(self.offsets[-1])

    def block(self, row):
        return slice(int(self.offsets[row]), int(self.offsets[row + 1]))


def tensor_h_basis(rep, n):
    key = ("tensor_h", rep.mult, n)
    cache = rep.graph._cache
    if key not in cache:
        cache[key] = TensorHBasis(rep, n)
    return cache[key]


def _append_eta_matrix(eta, n):
    """Matrix of ``I_{E^{(x)n}} (x) eta`` from level ``n`` to level ``n + 1``."""
    rep, g = eta.rep, eta.rep.graph
    src, dst = tensor_h_basis(rep, n), tensor_h_basis(rep, n + 1)
    by_range = [np.flatnonzero(g.range == v) for v in range(g.n_vertices)]
    rows, cols, vals = [], [], []
    for i in range(len(src.paths)):
        head = tuple(int(t) for t in src.paths.edges[i])
        c0 = int(src.offsets[i])
        for j in by_range[int(src.paths.last_source[i])]:
            t = dst.paths.find(head + (int(j),))
            r0 = int(dst.offsets[t])
            blk = eta.blocks[j].conj().T
            rr, cc = np.nonzero(blk)
            rows.extend(r0 + rr)
            cols.extend(c0 + cc)
            vals.extend(blk[rr, cc])
    return sp.csr_matrix((vals, (rows, cols)), shape=(dst.dim, src.dim), dtype=complex)


def u_map(eta_list, h, max_level=None):
    """``(I (x) eta_1) ... (I_E (x) eta_{n-1}) eta_n h`` in path-times-``H`` coordinates.

    Parameters
    ----------
    eta_list : sequence of Intertwiner
    h : array of length ``dim H``
    max_level : int, optional
        Truncation level; raises if ``len(eta_list)`` exceeds it.
    """
    n = len(eta_list)
    if max_level is not None and n > max_level:
        raise MismatchError(f"level {n} exceeds truncation {max_level}")
    v = np.asarray(h, dtype=complex)
    if n == 0:
        return v.copy()
    rep = eta_list[0].rep
    if v.shape != (rep.dim,):
        raise MismatchError("vector does not live in H")
    for k, eta in enumerate(reversed(eta_list)):
        if eta.rep != rep:
            raise MismatchError("representation mismatch")
        v = _append_eta_matrix(eta, k) @ v
    return v


def balanced_inner(etas, h, xis, k):
    """Inner product of ``eta_1 (x) ... (x) eta_n (x) h`` and ``xi_1 (x) ... (x) k``.

    Evaluated through the commutant-valued recursion
    ``c_1 = <eta_1, xi_1>``, ``c_j = <eta_j, c_{j-1} . xi_j>``, ending
    with ``<h, c_n k>`` on ``H``.
    """
    if len(etas) != len(xis):
        raise MismatchError("tensor lengths differ")
    if not etas:
        return complex(np.vdot(h, k))
    c = dual_inner(etas[0], xis[0])
    for eta, xi in zip(etas[1:], xis[1:]):
        c = dual_inner(eta, dual_left_action(c, xi))
    return complex(np.vdot(h, c.matrix() @ k))


class FockHBasis:
    """Coordinates of ``F_N(E) (x)_sigma H``: levels ``0..N`` of :class:`TensorHBasis`."""

    def __init__(self, rep, N):
        self.rep = rep
        self.N = N
        self.levels = [tensor_h_basis(rep, n) for n in range(N + 1)]
        sizes = [lvl.dim for lvl in self.levels]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        self.dim = int(self.offsets[-1])
        self.level_of = np.repeat(np.arange(N + 1), sizes)


def _block_diag_levels(basis, pieces):
    """Assemble level-raising pieces ``(k, matrix k -> k+1)`` into one operator."""
    out = sp.lil_matrix((basis.dim, basis.dim), dtype=complex)
    for k, m in pieces:
        r0, c0 = int(basis.offsets[k + 1]), int(basis.offsets[k])
        out[r0:r0 + m.shape[0], c0:c0 + m.shape[1]] = m
    return out.tocsr()


def right_creation_operator(eta, N):
    """``U`` composed with the creation operator of ``eta``: ``I_{E^{(x)k}} (x) eta`` on each level."""
    basis = FockHBasis(eta.rep, N)
    return _block_diag_levels(basis, [(k, _append_eta_matrix(eta, k)) for k in range(N)])


def induced_creation_operator(x, rep, N):
    """``T_x (x) I_H`` on ``F_N(E) (x)_sigma H``."""
    g = rep.graph
    basis = FockHBasis(rep, N)
    by_source = [np.flatnonzero(g.source == v) for v in range(g.n_vertices)]
    pieces = []
    for k in range(N):
        src, dst = basis.levels[k], basis.levels[k + 1]
        rows, cols, vals = [], [], []
        for i in range(len(src.paths)):
            tail = tuple(int(t) for t in src.paths.edges[i])
            m = int(src.offsets[i + 1] - src.offsets[i])
            for j in by_source[int(src.paths.first_range[i])]:
                if x.coeffs[j] == 0:
                    continue
                t = dst.paths.find((int(j),) + tail)
                rows.extend(range(int(dst.offsets[t]), int(dst.offsets[t]) + m))
                cols.extend(range(int(src.offsets[i]), int(src.offsets[i]) + m))
                vals.extend([x.coeffs[j]] * m)
        pieces.append((k, sp.csr_matrix((vals, (rows, cols)), shape=(dst.dim, src.dim), dtype=complex)))
    return _block_diag_levels(basis, pieces)


def commutant_commutator_check(eta, x, N):
    """Largest ``||(S R - R S) b||`` over basis vectors ``b`` of level ``<= N - 2``.

    ``S`` is the U-conjugated creation operator of ``eta`` and ``R`` is
    ``T_x (x) I_H``, both on ``F_N(E) (x)_sigma H``. The two raise the
    level by one each, so levels up to ``N - 2`` are unaffected by the
    truncation.
    """
    if N < 2:
        raise MismatchError("commutator check needs N >= 2")
    if x.graph != eta.rep.graph:
        raise MismatchError("graph mismatch")
    S = right_creation_operator(eta, N)
    R = induced_creation_operator(x, eta.rep, N)
    C = (S @ R - R @ S).toarray()
    cols = FockHBasis(eta.rep, N).level_of <= N - 2
    C = C[:, cols]
    if C.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(C, axis=0)))
