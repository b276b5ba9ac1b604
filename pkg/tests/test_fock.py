import json

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import small_graphs
from graphcorr.algebra import AlgebraElement
from graphcorr.correspondence import (
    CorrElement,
    TensorElement,
    bimodule_action,
    corr_inner_product,
    corr_norm,
    expand_elementary_tensor,
)
from graphcorr.errors import MalformedInputError, MismatchError
from graphcorr.fock import (
    DENSE_LIMIT,
    FockOperator,
    creation_operator,
    fock_basis,
    operator_adjoint,
    phi_infinity,
    poly_operator,
    tensor_creation,
)
from graphcorr.graph import count_paths


def rc(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_basis_dimension(mixed4):
    fb = fock_basis(mixed4, 3)
    assert fb.dim == sum(count_paths(mixed4, n) for n in range(4))


def test_creation_on_basis_paths(twocycle):
    # e1 runs v1 -> v2, so T_{e1} sends v1 (level 0) to e1 and e2 to e1|e2
    fb = fock_basis(twocycle, 2)
    T = creation_operator(CorrElement.delta(twocycle, "e1"), 2).to_dense()
    assert T[fb.index(1, (0,)), fb.index(0, (0,))] == 1
    assert T[fb.index(2, (0, 1)), fb.index(1, (1,))] == 1
    assert np.count_nonzero(T) == 2


def test_truncation_kills_top_level(loop):
    T = creation_operator(CorrElement.delta(loop, "e1"), 2).to_dense()
    assert not T[:, fock_basis(loop, 2).level_slice(2)].any()


def test_sparse_above_limit():
    from graphcorr.corpus import bundled_graph

    g = bundled_graph("two_loops")
    small = creation_operator(CorrElement.delta(g, "e1"), 2)
    big = creation_operator(CorrElement.delta(g, "e1"), 6)
    assert fock_basis(g, 2).dim <= DENSE_LIMIT and not small.is_sparse
    assert fock_basis(g, 6).dim > DENSE_LIMIT and big.is_sparse


def test_sparsity_pattern_enforced(twocycle):
    fb = fock_basis(twocycle, 1)
    M = np.zeros((fb.dim, fb.dim))
    M[0, 1] = 1.0  # v1 and v2 have different sources
    with pytest.raises(MalformedInputError):
        FockOperator(fb, M)
    op = FockOperator(fb, M, check=False)
    with pytest.raises(MalformedInputError):
        operator_adjoint(op)


def test_level_guard(twocycle):
    with pytest.raises(MismatchError):
        tensor_creation(expand_elementary_tensor(*[CorrElement.delta(twocycle, "e1")] * 1) * 1, 0)


def test_to_dict_json(twocycle):
    op = creation_operator(CorrElement(twocycle, [1j, 2]), 2)
    d = json.loads(json.dumps(op.to_dict()))
    rebuilt = np.zeros((op.basis.dim,) * 2, dtype=complex)
    for r, c, (re, im) in d["entries"]:
        rebuilt[r, c] = re + 1j * im
    assert np.array_equal(rebuilt, op.to_dense())


class TestIdentities:
    @settings(max_examples=30, deadline=None)
    @given(small_graphs(max_vertices=3, max_edges=5, min_edges=1), st.integers(0, 2**32 - 1))
    def test_creation_relations(self, g, seed):
        rng = np.random.default_rng(seed)
        N = 3
        x, y = CorrElement(g, rc(rng, g.n_edges)), CorrElement(g, rc(rng, g.n_edges))
        a = AlgebraElement(g, rc(rng, g.n_vertices))
        one = AlgebraElement.unit(g)
        lvl = fock_basis(g, N).level_of
        Tx, Ty = creation_operator(x, N), creation_operator(y, N)
        # T_x* T_y = phi_inf(<x, y>) below the top level
        lhs = (Tx.adjoint() @ Ty).to_dense()[:, lvl <= N - 1]
        rhs = phi_infinity(corr_inner_product(x, y), N).to_dense()[:, lvl <= N - 1]
        assert np.allclose(lhs, rhs, atol=1e-10)
        # T_x T_y = T_{x (x) y} on levels <= N - 2
        lhs = (Tx @ Ty).to_dense()[:, lvl <= N - 2]
        rhs = tensor_creation(expand_elementary_tensor(x, y), N).to_dense()[:, lvl <= N - 2]
        assert np.allclose(lhs, rhs, atol=1e-10)
        # covariance: phi_inf(a) T_x = T_{a.x}, T_x phi_inf(a) = T_{x.a}
        Pa = phi_infinity(a, N)
        assert (Pa @ Tx).max_abs_diff(creation_operator(bimodule_action(a, x, one), N)) < 1e-10
        assert (Tx @ Pa).max_abs_diff(creation_operator(bimodule_action(one, x, a), N)) < 1e-10

    @settings(max_examples=30, deadline=None)
    @given(small_graphs(max_vertices=3, max_edges=5, min_edges=1), st.integers(0, 2**32 - 1))
    def test_creation_norm(self, g, seed):
        rng = np.random.default_rng(seed)
        x = CorrElement(g, rc(rng, g.n_edges))
        assert creation_operator(x, 2).norm(max_level=1) == pytest.approx(corr_norm(x), rel=1e-9)

    def test_phi_infinity_is_homomorphism(self, mixed4, rng):
        a, b = AlgebraElement(mixed4, rc(rng, 4)), AlgebraElement(mixed4, rc(rng, 4))
        lhs = phi_infinity(a * b, 3)
        assert lhs.max_abs_diff(phi_infinity(a, 3) @ phi_infinity(b, 3)) < 1e-12
        assert phi_infinity(a.adjoint(), 3).max_abs_diff(phi_infinity(a, 3).adjoint()) == 0.0

    def test_poly_operator(self, twocycle, rng):
        a0 = AlgebraElement(twocycle, rc(rng, 2))
        xi1 = TensorElement(twocycle, 1, rc(rng, 2))
        xi2 = TensorElement(twocycle, 2, rc(rng, 2))
        T = poly_operator([(1, xi1), xi2], a0, 3)
        ref = phi_infinity(a0, 3) + tensor_creation(xi1, 3) + tensor_creation(xi2, 3)
        assert T.max_abs_diff(ref) == 0.0
        with pytest.raises(MismatchError):
            poly_operator([(2, xi1)], a0, 3)

    def test_sparse_and_dense_agree(self, rng):
        from graphcorr.corpus import bundled_graph

        g = bundled_graph("two_loops")
        x = CorrElement(g, rc(rng, 2))
        T = creation_operator(x, 6)
        assert sp.issparse(T.matrix)
        dense = FockOperator(T.basis, T.to_dense())
        assert dense.max_abs_diff(T) == 0.0
