"""Brute-force reference computations.

These are deliberately naive: they enumerate or solve the defining
equations directly and share no search or structure logic with the main
modules. The tests and the ``verify`` suites compare against them.
"""

from __future__ import annotations

import itertools
from collections import Counter

import numpy as np

from .duality import CommutantElement, Intertwiner, dual_left_action, dual_right_action, intertwiner_basis


def isomorphic_by_enumeration(G, F):
    """Try every vertex bijection and compare the multisets of edge endpoints."""
    if G.n_vertices != F.n_vertices or G.n_edges != F.n_edges:
        return False
    target = Counter((e.src, e.dst) for e in F.edges)
    for perm in itertools.permutations(F.vertices):
        beta = dict(zip(G.vertices, perm))
        if Counter((beta[e.src], beta[e.dst]) for e in G.edges) == target:
            return True
    return False


def isomorphic_by_full_enumeration(G, F):
    """Try every (vertex bijection, edge bijection) pair; only for tiny graphs."""
    if G.n_vertices != F.n_vertices or G.n_edges != F.n_edges:
        return False
    f_edges = list(F.edges)
    for perm in itertools.permutations(F.vertices):
        beta = dict(zip(G.vertices, perm))
        for eperm in itertools.permutations(range(F.n_edges)):
            if all(
                f_edges[eperm[j]].src == beta[e.src] and f_edges[eperm[j]].dst == beta[e.dst]
                for j, e in enumerate(G.edges)
            ):
                return True
    return False


def count_paths_by_enumeration(G, n):
    """Count composable edge sequences of length ``n`` by trying all words."""
    if n == 0:
        return G.n_vertices
    total = 0
    for word in itertools.product(range(G.n_edges), repeat=n):
        if all(G.source[word[k]] == G.range[word[k + 1]] for k in range(n - 1)):
            total += 1
    return total


def intertwiner_nullity(rep):
    """Dimension of ``{M : M Phi_v = S_v M for all v}`` by rank of the Kronecker system."""
    g = rep.graph
    h_vertex = np.repeat(np.arange(g.n_vertices), rep.mult)
    ms = [rep.m_source(j) for j in range(g.n_edges)]
    eh_range = np.repeat(g.range, ms) if g.n_edges else np.zeros(0, dtype=np.int64)
    p, q = rep.dim, rep.induced_dim
    if q == 0:
        return 0
    rows = []
    for v in range(g.n_vertices):
        Phi = np.diag((eh_range == v).astype(float))
        S = np.diag((h_vertex == v).astype(float))
        # vec(M Phi - S M) = (Phi^T kron I_p - I_q kron S) vec(M), column-major vec
        rows.append(np.kron(Phi.T, np.eye(p)) - np.kron(np.eye(q), S))
    K = np.vstack(rows)
    return p * q - int(np.linalg.matrix_rank(K))


def intertwiner_span_dim(rep):
    """Dimension of the span of :func:`intertwiner_basis`, by numeric rank."""
    basis = intertwiner_basis(rep)
    if not basis:
        return 0
    return int(np.linalg.matrix_rank(np.array([b.full_matrix().ravel() for b in basis])))


def center_dim_by_solving(rep):
    """Dimension of ``{eta : a . eta = eta . a for every commutant matrix unit a}``."""
    basis = intertwiner_basis(rep)
    if not basis:
        return 0
    cols = []
    units = CommutantElement.basis(rep)
    for eta in basis:
        parts = []
        for a in units:
            d = dual_left_action(a, eta) - dual_right_action(eta, a)
            parts.append(d.vector())
        cols.append(np.concatenate(parts))
    K = np.array(cols).T
    return len(basis) - int(np.linalg.matrix_rank(K))


def random_intertwiner_span_rank(rep, rng, n, count):
    """Rank of ``count`` random U-map images at level ``n`` (used for spanning checks)."""
    from .duality import u_map

    vecs = []
    for _ in range(count):
        etas = [Intertwiner.random(rep, rng) for _ in range(n)]
        h = rng.standard_normal(rep.dim) + 1j * rng.standard_normal(rep.dim)
        vecs.append(u_map(etas, h))
    M = np.array(vecs)
    return int(np.linalg.matrix_rank(M)) if M.size else 0
