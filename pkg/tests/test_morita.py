import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import small_graphs
from graphcorr.corpus import bundled_graph, perturbed_copy, shuffled_copy
from graphcorr.duality import Intertwiner, Representation
from graphcorr.errors import MismatchError, VerificationError
from graphcorr.graph import GraphIsoCertificate, VertexPermutation, graph_isomorphism
from graphcorr.morita import (
    CollapseIso,
    ConjugateBimodule,
    ConjugationIso,
    DualMoritaIso,
    EquivalenceBimodule,
    MoritaCertificate,
    PermutationBimodule,
    a_sigma,
    a_sigma_collapse_iso,
    a_sigma_inner,
    build_certificate,
    conjugation_iso,
    dual_morita_iso,
    gram_rank,
    inverse_law_check,
    morita_decide,
    pairing_mA,
    pairing_mB,
    pairing_residuals,
    unit_collapse_check,
)
from graphcorr.oracles import isomorphic_by_enumeration

S3 = ["1", "2", "3"]


def perms(verts):
    return [VertexPermutation.from_images(verts, p) for p in itertools.permutations(verts)]


class TestEquivalenceBimodule:
    def test_pairings(self, mixed4, rng):
        X = EquivalenceBimodule(Representation(mixed4, [1, 2, 1, 3]), Representation(mixed4, [2, 2, 1, 1]))
        res = pairing_residuals(X, rng, 100)
        assert max(res.values()) <= 1e-10

    def test_pairing_values(self, twocycle, rng):
        X = EquivalenceBimodule(Representation(twocycle, [1, 2]), Representation(twocycle, [2, 1]))
        x, y = X.random(rng), X.random(rng)
        for q in range(2):
            assert np.allclose(pairing_mA(x, y).blocks[q], x.blocks[q] @ y.blocks[q].conj().T)
            assert np.allclose(pairing_mB(x, y).blocks[q], x.blocks[q].conj().T @ y.blocks[q])

    def test_frame_is_full(self, twocycle):
        X = EquivalenceBimodule(Representation(twocycle, [2, 1]), Representation(twocycle, [3, 2]))
        total = None
        for f in X.frame():
            li = X.left_inner(f, f)
            total = li if total is None else total + li
        assert all(np.allclose(b, np.eye(b.shape[0])) for b in total.blocks)

    def test_gram_rank(self):
        v = np.array([[1, 0], [0, 1], [1, 1]], dtype=complex)
        assert gram_rank(v @ v.conj().T) == 2
        assert gram_rank(np.zeros((3, 3))) == 0


class TestDualMorita:
    @pytest.mark.parametrize("name,ms,mt", [("loop", [1], [2]), ("twocycle", [1, 2], [2, 1]), ("mixed4", [1, 1, 1, 1], [2, 1, 2, 1])])
    def test_verifies(self, name, ms, mt, rng):
        g = bundled_graph(name)
        iso = dual_morita_iso(Representation(g, ms), Representation(g, mt), rng, samples=100)
        rep = iso.report
        assert rep["ok"] and rep["rank"] == rep["target_dim"]
        assert max(rep["bimodule"], rep["inner"], rep["chain"]) <= 1e-10

    def test_blocks(self, twocycle, rng):
        sigma, tau = Representation(twocycle, [1, 2]), Representation(twocycle, [2, 1])
        iso = DualMoritaIso(sigma, tau)
        x, y = iso.X.random(rng), iso.X.random(rng)
        eta = Intertwiner.random(sigma, rng)
        out = iso.apply(x, eta, y)
        g = twocycle
        for j in range(2):
            ref = y.blocks[g.range[j]].conj().T @ eta.blocks[j] @ x.blocks[g.source[j]]
            assert np.allclose(out.blocks[j], ref)

    def test_wrong_side(self, twocycle):
        sigma, tau = Representation(twocycle, [1, 2]), Representation(twocycle, [2, 1])
        iso = DualMoritaIso(sigma, tau)
        with pytest.raises(MismatchError):
            iso.apply(iso.X.basis()[0], Intertwiner.zero(tau), iso.X.basis()[0])


class TestPermutationBimodules:
    def test_a_sigma_twisting(self):
        # sigma: 1 -> 2 -> 3 -> 1
        s = VertexPermutation.from_images(S3, ["2", "3", "1"])
        z = np.array([1.0, 2.0, 3.0], dtype=complex)
        a = np.array([1.0, 10.0, 100.0])
        one = np.ones(3)
        assert np.allclose(a_sigma(s, a, z, one, S3), a * z)
        assert np.allclose(a_sigma(s, one, z, a, S3), z * np.array([10.0, 100.0, 1.0]))
        # <z, z> puts |z_x|^2 at sigma(x)
        assert np.allclose(a_sigma_inner(s, z, z, S3), [9.0, 1.0, 4.0])

    @pytest.mark.parametrize("si,ti", list(itertools.product(range(6), range(6))))
    def test_collapse_all_s3_pairs(self, si, ti):
        ps = perms(S3)
        iso = a_sigma_collapse_iso(ps[si], ps[ti], S3)
        ok, res = iso.verify_basis()
        assert ok and max(res.values()) == 0.0

    def test_collapse_random(self, rng):
        ps = perms(S3)
        res = CollapseIso(ps[1], ps[4], S3).verify_random(rng, 100)
        assert max(res.values()) <= 1e-10

    def test_unit_and_inverse_laws(self):
        for s in perms(S3):
            assert max(unit_collapse_check(PermutationBimodule(s, S3)).values()) == 0.0
            assert max(inverse_law_check(s, S3).values()) == 0.0

    def test_conjugate_reverses_inner(self, rng):
        s = perms(S3)[3]
        X = PermutationBimodule(s, S3)
        Xt = ConjugateBimodule(X)
        c, d = rng.standard_normal(3) + 1j * rng.standard_normal(3), rng.standard_normal(3) + 1j * rng.standard_normal(3)
        # coordinates of x~ are conj(x): <x~, y~> = <x, y>_left
        assert np.allclose(Xt.inner(c, d), X.left_inner(np.conj(c), np.conj(d)))


class TestConjugation:
    @pytest.mark.parametrize("name", ["threecycle", "path", "mixed4"])
    def test_exact_on_basis_and_random(self, name, rng):
        g = bundled_graph(name)
        for s in perms(list(g.vertices))[:6]:
            iso = conjugation_iso(g, s)
            assert max(iso.verify_random(rng, 100 if name != "mixed4" else 20).values()) <= 1e-10

    def test_domain_mismatch(self, twocycle):
        with pytest.raises(MismatchError):
            ConjugationIso(twocycle, perms(S3)[0])


class TestCertificates:
    def test_loop_twocycle(self, loop, twocycle):
        assert morita_decide(loop, twocycle) is None

    def test_certificate_contents(self, threecycle, rng):
        h = shuffled_copy(threecycle, rng)
        cert = morita_decide(threecycle, h, rng)
        assert cert.corr_verified and cert.W_verified and cert.max_residual <= 1e-10
        # W is the permutation matrix of alpha and W~ is its transpose
        assert np.array_equal(cert.W @ cert.W.T, np.eye(3))
        assert np.array_equal(cert.W_tilde, cert.W.T)
        d = json.loads(json.dumps(cert.to_dict()))
        assert d["graph_iso"] == cert.graph_iso.to_dict()
        assert GraphIsoCertificate(**d["graph_iso"]).verify(threecycle, h)

    def test_bad_isomorphism_rejected(self, twocycle):
        bad = GraphIsoCertificate(beta={"v1": "v1", "v2": "v2"}, alpha={"e1": "e2", "e2": "e1"})
        with pytest.raises(VerificationError):
            MoritaCertificate(twocycle, twocycle, bad)

    def test_build_from_iso(self, mixed4, rng):
        h = shuffled_copy(mixed4, rng)
        cert = build_certificate(mixed4, h, graph_isomorphism(mixed4, h), rng, 100)
        assert cert.max_residual <= 1e-10

    @settings(max_examples=60, deadline=None)
    @given(small_graphs(max_vertices=5, max_edges=6), st.integers(0, 2**32 - 1), st.booleans())
    def test_decide_matches_enumeration(self, g, seed, perturb):
        rng = np.random.default_rng(seed)
        h = perturbed_copy(g, rng) if perturb else shuffled_copy(g, rng)
        cert = morita_decide(g, h, rng, samples=20)
        assert (cert is not None) == isomorphic_by_enumeration(g, h)
        if cert is not None:
            assert cert.corr_iso.verify_basis() and cert.max_residual <= 1e-10
