import numpy as np
import pytest

from graphcorr.corpus import bundled_graph, shuffled_copy
from graphcorr.errors import MismatchError
from graphcorr.graph import GraphIsoCertificate, graph_isomorphism, identity_certificate
from graphcorr.linking import (
    ZFockContext,
    ZTensor,
    build_z,
    corner_compression,
    invariance_residual,
    linking_report,
    matrix_model_residual,
    phi_z_residuals,
    product_compression,
    projection_residuals,
    w_level,
    z_fock_decomposition,
    z_left_action,
)
from graphcorr.morita import build_certificate
from graphcorr.oracles import count_paths_by_enumeration


def cert_for(name, kind, rng):
    g = bundled_graph(name)
    if kind == "identity":
        return build_certificate(g, g, identity_certificate(g), rng, 20)
    if kind == "swap":
        # identity on vertices, parallel edges exchanged
        iso = GraphIsoCertificate(beta={"v1": "v1", "v2": "v2"}, alpha={"e1": "e2", "e2": "e1", "e3": "e3"})
        return build_certificate(g, g, iso, rng, 20)
    h = shuffled_copy(g, rng)
    return build_certificate(g, h, graph_isomorphism(g, h), rng, 20)


CASES = [("loop", "identity"), ("twocycle", "shuffle"), ("threecycle", "shuffle"), ("parallel", "swap"), ("path", "shuffle")]


@pytest.fixture(params=CASES, ids=[f"{a}-{b}" for a, b in CASES])
def ctx(request):
    rng = np.random.default_rng(7)
    return build_z(cert_for(*request.param, rng))


def test_gram_is_positive(ctx):
    assert ctx.gram_report["min_eigenvalue"] >= -1e-10
    assert ctx.gram_report["size"] == 2 * ctx.F.n_edges + 2 * ctx.G.n_edges


def test_matrix_model_agrees(ctx, rng):
    assert matrix_model_residual(ctx, rng, trials=20) <= 1e-12


def test_linking_algebra(ctx, rng):
    one = ctx.linking_identity()
    lam, mu, nu = (ctx.random_linking(rng) for _ in range(3))
    lhs = ctx.linking_mul(ctx.linking_mul(lam, mu), nu)
    rhs = ctx.linking_mul(lam, ctx.linking_mul(mu, nu))
    assert np.allclose(lhs.coords(), rhs.coords())
    assert np.allclose(ctx.linking_mul(one, lam).coords(), lam.coords())
    star = ctx.linking_adjoint(ctx.linking_mul(lam, mu))
    assert np.allclose(star.coords(), ctx.linking_mul(ctx.linking_adjoint(mu), ctx.linking_adjoint(lam)).coords())


def test_left_action_is_star_homomorphism(ctx):
    res = phi_z_residuals(ctx)
    assert res["multiplicative"] <= 1e-12 and res["adjoint"] <= 1e-12


def test_module_compatibility(ctx, rng):
    z, w = ctx.random_z(rng), ctx.random_z(rng)
    lam = ctx.random_linking(rng)
    lhs = ctx.z_inner(z, ctx.z_right_action(w, lam))
    rhs = ctx.linking_mul(ctx.z_inner(z, w), lam)
    assert np.allclose(lhs.coords(), rhs.coords())
    assert np.allclose(z_left_action(ctx.linking_identity(), z).coords(), z.coords())


def test_fock_corner_dimensions(ctx):
    rep = z_fock_decomposition(ctx, 3)
    pf = [count_paths_by_enumeration(ctx.F, n) for n in range(4)]
    pe = [count_paths_by_enumeration(ctx.G, n) for n in range(4)]
    assert rep["level_dims"] == {"11": pf, "12": pf, "21": pe, "22": pe}
    assert rep["match"]


def test_transport_is_unitary(ctx):
    fctx = ZFockContext(ctx, 3)
    T = fctx.transport
    assert np.allclose(T @ T.conj().T, np.eye(T.shape[0]))
    assert np.allclose(w_level(ctx, 1), ctx.W)


def test_corner_identities(ctx, rng):
    fctx = ZFockContext(ctx, 3)
    for _ in range(50):
        xi = ZTensor.random(ctx, int(rng.integers(1, 4)), rng)
        res = corner_compression(fctx, xi, ctx.random_linking(rng))
        assert max(res.values()) <= 1e-12
    assert product_compression(fctx, ZTensor.random(ctx, 1, rng), ZTensor.random(ctx, 2, rng)) <= 1e-12
    assert max(projection_residuals(fctx).values()) == 0.0


def test_first_column_invariance(ctx, rng):
    assert invariance_residual(ctx, rng, trials=10) <= 1e-12


def test_guards(rng):
    ctx = build_z(cert_for("loop", "identity", rng))
    with pytest.raises(MismatchError):
        z_fock_decomposition(ctx, 4)
    with pytest.raises(MismatchError):
        corner_compression(ZFockContext(ctx, 1), ZTensor.random(ctx, 2, rng), ctx.linking_identity())
    with pytest.raises(MismatchError):
        ZTensor(ctx, 0, np.zeros((1, 2, 2)))


def test_report_keys(rng):
    rep = linking_report(cert_for("twocycle", "shuffle", rng), 3, rng, trials=10)
    assert rep["fock_match"] and rep["corner_residual_max"] <= 1e-12
    assert rep["fock_dims"] == {"F": 8, "F_Xt": 8, "E_X": 8, "E": 8}


def test_corner_check_detects_wrong_corner(rng):
    ctx = build_z(cert_for("threecycle", "shuffle", rng))
    fctx = ZFockContext(ctx, 3)
    xi = ZTensor.random(ctx, 1, rng)
    lam = ctx.random_linking(rng)
    # swap the diagonal blocks but keep the original reference corners
    assert max(corner_compression(fctx, xi, lam).values()) <= 1e-12
    swapped = ZTensor(ctx, 1, xi.blocks[:, ::-1, ::-1])
    swapped.h1 = xi.h1
    swapped.k2 = xi.k2
    broken = corner_compression(fctx, swapped, lam)
    assert broken["pTp"] > 1e-3 and broken["qTq"] > 1e-3
