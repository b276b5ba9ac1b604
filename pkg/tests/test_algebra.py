import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphcorr.algebra import AlgebraElement, alg_mul, alg_norm
from graphcorr.errors import MismatchError

complexes = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


def elem(g, vals):
    return AlgebraElement(g, np.array(vals, dtype=complex))


def test_point_masses_are_orthogonal_idempotents(mixed4):
    deltas = [AlgebraElement.delta(mixed4, v) for v in mixed4.vertices]
    for i, a in enumerate(deltas):
        for j, b in enumerate(deltas):
            expected = a if i == j else AlgebraElement.zero(mixed4)
            assert np.array_equal(alg_mul(a, b).coeffs, expected.coeffs)
    total = sum((d.coeffs for d in deltas), np.zeros(4))
    assert np.array_equal(total, AlgebraElement.unit(mixed4).coeffs)


def test_norm_is_sup(twocycle):
    assert alg_norm(elem(twocycle, [3 + 4j, -1])) == 5.0
    assert AlgebraElement.zero(twocycle).norm() == 0.0


def test_shape_and_graph_checks(loop, twocycle):
    with pytest.raises(MismatchError):
        AlgebraElement(loop, [1, 2])
    with pytest.raises(MismatchError):
        alg_mul(AlgebraElement.unit(loop), AlgebraElement.unit(twocycle))


def test_to_dict(twocycle):
    assert elem(twocycle, [1j, 2]).to_dict() == {"v1": [0.0, 1.0], "v2": [2.0, 0.0]}


@settings(max_examples=50, deadline=None)
@given(st.lists(complexes, min_size=9, max_size=9))
def test_star_algebra_axioms(vals):
    from graphcorr.corpus import bundled_graph

    g = bundled_graph("threecycle")
    a, b, c = elem(g, vals[0:3]), elem(g, vals[3:6]), elem(g, vals[6:9])
    assert (a * b).allclose(b * a)
    assert ((a * b) * c).allclose(a * (b * c), tol=1e-6)
    assert (a * AlgebraElement.unit(g)).allclose(a)
    assert (a * b).adjoint().allclose(b.adjoint() * a.adjoint())
    assert a.adjoint().adjoint().allclose(a)
    # C*-identity
    assert abs((a.adjoint() * a).norm() - a.norm() ** 2) <= 1e-9 * max(1.0, a.norm() ** 2)
