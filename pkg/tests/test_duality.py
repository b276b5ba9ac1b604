import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import small_graphs
from graphcorr.correspondence import CorrElement
from graphcorr.corpus import bundled_graph
from graphcorr.duality import (
    CommutantElement,
    Intertwiner,
    Representation,
    balanced_inner,
    ball_membership,
    center_basis,
    commutant_commutator_check,
    dual_inner,
    dual_left_action,
    dual_pairing,
    dual_right_action,
    induced_space_decomposition,
    intertwiner_basis,
    is_intertwiner,
    parse_mult,
    tensor_h_basis,
    u_map,
)
from graphcorr.errors import MalformedInputError, MismatchError
from graphcorr.oracles import (
    center_dim_by_solving,
    intertwiner_nullity,
    intertwiner_span_dim,
    random_intertwiner_span_rank,
)

mults = st.lists(st.integers(1, 3), min_size=5, max_size=5)


def rep_of(g, ms):
    return Representation(g, ms[: g.n_vertices])


class TestRepresentation:
    def test_parse_mult(self, mixed4):
        r = parse_mult(mixed4, "a=2, c=3")
        assert r.mult == (2, 1, 3, 1) and r.dim == 7
        assert parse_mult(mixed4, "").mult == (1, 1, 1, 1)

    @pytest.mark.parametrize("text", ["a", "a=x", "zz=2", "a=0"])
    def test_parse_mult_rejects(self, mixed4, text):
        with pytest.raises(MalformedInputError):
            parse_mult(mixed4, text)

    def test_decomposition(self, mixed4):
        r = parse_mult(mixed4, "a=2,c=3")
        assert induced_space_decomposition(r) == [("e1", 2), ("e2", 1), ("e3", 3), ("e4", 3), ("e5", 1), ("e6", 1)]
        assert r.induced_dim == 11

    def test_wrong_length(self, twocycle):
        with pytest.raises(MismatchError):
            Representation(twocycle, [1, 2, 3])


class TestIntertwinerSpace:
    def test_frozen_dimension(self, mixed4):
        # value from the Kronecker nullspace oracle
        r = parse_mult(mixed4, "a=2,c=3")
        assert len(intertwiner_basis(r)) == 23 == intertwiner_nullity(r)

    @settings(max_examples=40, deadline=None)
    @given(small_graphs(max_vertices=5, max_edges=8), mults)
    def test_basis_matches_nullspace(self, g, ms):
        r = rep_of(g, ms)
        assert intertwiner_span_dim(r) == intertwiner_nullity(r) == r.intertwiner_dim()

    def test_block_shapes_enforced(self, twocycle):
        r = Representation(twocycle, [1, 2])
        with pytest.raises(MismatchError):
            Intertwiner(r, [np.zeros((1, 1)), np.zeros((1, 1))])

    def test_membership(self, mixed4, rng):
        r = Representation(mixed4, [2, 1, 3, 2])
        eta = Intertwiner.random(r, rng)
        assert is_intertwiner(eta.full_matrix(), r)
        M = rng.standard_normal((r.dim, r.induced_dim))
        assert not is_intertwiner(M, r)
        assert Intertwiner.from_full_matrix(r, eta.full_matrix()).max_abs_diff(eta) == 0.0

    def test_to_dict(self, loop):
        eta = Intertwiner(Representation(loop), [np.array([[0.5j]])])
        assert eta.to_dict() == {"blocks": {"e1": [[[0.0, 0.5]]]}}


class TestBall:
    def test_open_disc(self, loop):
        r = Representation(loop)
        inside, norm = ball_membership(Intertwiner(r, [np.array([[0.999]])]))
        assert inside and abs(norm - 0.999) <= 1e-12
        inside, norm = ball_membership(Intertwiner(r, [np.array([[1.0]])]))
        assert not inside and abs(norm - 1.0) <= 1e-12
        inside, norm = ball_membership(Intertwiner(r, [np.array([[0.6 + 0.8j]])]))
        assert not inside and abs(norm - 1.0) <= 1e-12

    def test_two_loops_is_euclidean_ball(self):
        r = Representation(bundled_graph("two_loops"))
        _, norm = ball_membership(Intertwiner(r, [np.array([[0.6]]), np.array([[0.8j]])]))
        assert norm == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(small_graphs(max_vertices=4, max_edges=6, min_edges=1), mults, st.integers(0, 2**32 - 1))
    def test_norm_is_operator_norm(self, g, ms, seed):
        # oracle: spectral norm of the full eta* matrix
        eta = Intertwiner.random(rep_of(g, ms), np.random.default_rng(seed))
        _, norm = ball_membership(eta)
        assert norm == pytest.approx(np.linalg.norm(eta.full_matrix(), 2), rel=1e-10)


class TestCenter:
    @pytest.mark.parametrize("name,loops", [("loop", 1), ("two_loops", 2), ("twocycle", 0), ("mixed4", 2), ("path", 0)])
    def test_one_per_loop(self, name, loops):
        for m in (1, 2):
            r = Representation(bundled_graph(name), m)
            assert len(center_basis(r)) == loops == center_dim_by_solving(r)

    def test_center_commutes(self, mixed4, rng):
        r = Representation(mixed4, [2, 1, 3, 2])
        for z in center_basis(r):
            a = CommutantElement.random(r, rng)
            assert dual_left_action(a, z).max_abs_diff(dual_right_action(z, a)) < 1e-12


class TestDualModule:
    def test_module_axioms(self, mixed4, rng):
        r = Representation(mixed4, [2, 1, 3, 2])
        for _ in range(20):
            eta, xi = Intertwiner.random(r, rng), Intertwiner.random(r, rng)
            a, b = CommutantElement.random(r, rng), CommutantElement.random(r, rng)
            assert dual_left_action(a @ b, eta).max_abs_diff(dual_left_action(a, dual_left_action(b, eta))) < 1e-10
            assert dual_right_action(eta, a @ b).max_abs_diff(dual_right_action(dual_right_action(eta, a), b)) < 1e-10
            assert dual_pairing(a, eta, b).max_abs_diff(dual_right_action(dual_left_action(a, eta), b)) < 1e-12
            assert dual_inner(eta, dual_right_action(xi, b)).max_abs_diff(dual_inner(eta, xi) @ b) < 1e-10
            lhs = dual_inner(dual_left_action(a, eta), xi)
            assert lhs.max_abs_diff(dual_inner(eta, dual_left_action(a.adjoint(), xi))) < 1e-10
            assert dual_inner(eta, xi).max_abs_diff(dual_inner(xi, eta).adjoint()) < 1e-12
            assert np.linalg.eigvalsh(dual_inner(eta, eta).matrix())[0] > -1e-10

    def test_identity_acts_trivially(self, twocycle, rng):
        r = Representation(twocycle, [2, 3])
        eta = Intertwiner.random(r, rng)
        one = CommutantElement.identity(r)
        assert dual_pairing(one, eta, one).max_abs_diff(eta) == 0.0


class TestUMap:
    def test_loop_scalars(self, loop):
        r = Representation(loop)
        etas = [Intertwiner(r, [np.array([[z]])]) for z in (0.5j, 2.0)]
        assert u_map(etas, np.array([3.0])) == pytest.approx(np.array([3.0 * np.conj(0.5j) * 2.0]))

    def test_level_guard(self, loop):
        r = Representation(loop)
        with pytest.raises(MismatchError):
            u_map([Intertwiner.zero(r)] * 3, np.ones(1), max_level=2)

    @settings(max_examples=25, deadline=None)
    @given(small_graphs(max_vertices=4, max_edges=5, min_edges=1), st.lists(st.integers(1, 2), min_size=4, max_size=4),
           st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_isometry(self, g, ms, n, seed):
        rng = np.random.default_rng(seed)
        r = Representation(g, ms[: g.n_vertices])
        etas = [Intertwiner.random(r, rng) for _ in range(n)]
        xis = [Intertwiner.random(r, rng) for _ in range(n)]
        h = rng.standard_normal(r.dim) + 1j * rng.standard_normal(r.dim)
        k = rng.standard_normal(r.dim) + 1j * rng.standard_normal(r.dim)
        lhs = np.vdot(u_map(etas, h), u_map(xis, k))
        assert abs(lhs - balanced_inner(etas, h, xis, k)) <= 1e-10 * max(1.0, abs(lhs))

    @pytest.mark.parametrize("name", ["twocycle", "mixed4", "parallel"])
    def test_spanning(self, name, rng):
        r = Representation(bundled_graph(name), 2)
        for n in (1, 2):
            target = tensor_h_basis(r, n).dim
            assert random_intertwiner_span_rank(r, rng, n, target + 4) == target

    def test_commutator_vanishes(self, mixed4, rng):
        r = Representation(mixed4, [1, 2, 1, 2])
        for _ in range(5):
            eta = Intertwiner.random(r, rng)
            x = CorrElement(mixed4, rng.standard_normal(6) + 1j * rng.standard_normal(6))
            assert commutant_commutator_check(eta, x, 3) <= 1e-10

    def test_commutator_needs_two_levels(self, loop):
        r = Representation(loop)
        with pytest.raises(MismatchError):
            commutant_commutator_check(Intertwiner.zero(r), CorrElement.delta(loop, "e1"), 1)
