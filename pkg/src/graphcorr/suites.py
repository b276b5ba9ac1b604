"""Orchestrated verification suites behind ``graphcorr verify``.

Each suite runs one family of numerical checks over a list of graphs and
returns a :class:`VerifyReport`. Integer-valued checks (dimension counts,
oracle disagreements) have tolerance zero; floating-point residuals use
the ``tol`` given by the caller.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraElement
from .correspondence import (
    CorrElement,
    bimodule_action,
    corr_inner_product,
    expand_elementary_tensor,
    tensor_inner_product,
)
from .duality import (
    Intertwiner,
    Representation,
    balanced_inner,
    ball_membership,
    center_basis,
    commutant_commutator_check,
    tensor_h_basis,
    u_map,
)
from .fock import creation_operator, fock_basis, phi_infinity, tensor_creation
from .graph import VertexPermutation, count_paths, graph_isomorphism
from .linking import build_z, linking_report, phi_z_residuals
from .morita import (
    CollapseIso,
    ConjugationIso,
    DualMoritaIso,
    EquivalenceBimodule,
    build_certificate,
    inverse_law_check,
    pairing_residuals,
)
from . import oracles
from .corpus import perturbed_copy, shuffled_copy

SUITES = ("graph", "correspondence", "fock", "duality", "morita", "linking")

# linking checks grow quickly with the edge count
LINKING_MAX_EDGES = 4


@dataclass
class VerifyReport:
    suite: str
    seed: int
    instances: int = 0
    residuals: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    wall_time: float | None = None

    def record(self, prop, value, tol):
        value = float(value)
        self.residuals[prop] = max(self.residuals.get(prop, 0.0), value)
        self.tolerances[prop] = tol

    @property
    def passed(self):
        return all(self.residuals[k] <= self.tolerances[k] for k in self.residuals)

    def failures(self):
        return sorted(k for k in self.residuals if self.residuals[k] > self.tolerances[k])

    def to_dict(self, timing=False):
        out = {
            "suite": self.suite,
            "seed": self.seed,
            "instances": self.instances,
            "residuals": dict(sorted(self.residuals.items())),
            "tolerances": dict(sorted(self.tolerances.items())),
            "pass": self.passed,
            "failures": self.failures(),
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out


def _rc(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _max(a):
    return float(np.max(np.abs(np.asarray(a)), initial=0.0))


def _graph_suite(rep, graphs, rng, opts):
    for _, G in graphs:
        rep.instances += 1
        for n in range(min(opts["level"], 3) + 1):
            rep.record("path_count_vs_enumeration", abs(count_paths(G, n) - oracles.count_paths_by_enumeration(G, n)), 0)
        H = shuffled_copy(G, rng)
        iso = graph_isomorphism(G, H)
        rep.record("shuffled_copy_not_certified", 0 if iso is not None and iso.verify(G, H) else 1, 0)
        P = perturbed_copy(G, rng)
        rep.record(
            "decision_vs_enumeration",
            int((graph_isomorphism(G, P) is not None) != oracles.isomorphic_by_enumeration(G, P)),
            0,
        )


def _correspondence_suite(rep, graphs, rng, opts):
    tol = opts["tol"]
    for _, G in graphs:
        if G.n_edges == 0:
            continue
        rep.instances += 1
        for _ in range(opts["trials"]):
            x1, x2, y1, y2 = (CorrElement(G, _rc(rng, G.n_edges)) for _ in range(4))
            b = AlgebraElement(G, _rc(rng, G.n_vertices))
            u, w = expand_elementary_tensor(x1, y1), expand_elementary_tensor(x2, y2)
            lhs = tensor_inner_product(u, w)
            inner_x = corr_inner_product(x1, x2)
            rhs = corr_inner_product(y1, bimodule_action(inner_x, y2, AlgebraElement.unit(G)))
            rep.record("balanced_inner_product", _max(lhs.coeffs - rhs.coeffs), tol)
            lhs = tensor_inner_product(u, w.right_action(b))
            rhs = tensor_inner_product(u, w) * b
            rep.record("right_linearity", _max(lhs.coeffs - rhs.coeffs), tol)
            rep.record("positivity", max(0.0, -float(np.min(tensor_inner_product(u, u).coeffs.real))), tol)


def _fock_suite(rep, graphs, rng, opts):
    tol, N = opts["tol"], max(opts["level"], 2)
    for _, G in graphs:
        if G.n_edges == 0:
            continue
        rep.instances += 1
        fb = fock_basis(G, N)
        low1 = fb.level_of <= N - 1
        low2 = fb.level_of <= N - 2
        for _ in range(max(1, opts["trials"] // 5)):
            x, y = CorrElement(G, _rc(rng, G.n_edges)), CorrElement(G, _rc(rng, G.n_edges))
            a = AlgebraElement(G, _rc(rng, G.n_vertices))
            Tx, Ty = creation_operator(x, N).to_dense(), creation_operator(y, N).to_dense()
            ref = tensor_creation(expand_elementary_tensor(x, y), N).to_dense()
            rep.record("creation_product", _max((Tx @ Ty - ref)[:, low2]), tol)
            gram = phi_infinity(corr_inner_product(x, y), N).to_dense()
            rep.record("creation_adjoint_product", _max((Tx.conj().T @ Ty - gram)[:, low1]), tol)
            Pa = phi_infinity(a, N).to_dense()
            ax = creation_operator(bimodule_action(a, x, AlgebraElement.unit(G)), N).to_dense()
            rep.record("left_covariance", _max(Pa @ Tx - ax), tol)


def _duality_suite(rep, graphs, rng, opts):
    tol, N = opts["tol"], max(opts["level"], 2)
    for _, G in graphs:
        for m in (1, 2):
            r = Representation(G, m)
            rep.instances += 1
            rep.record("intertwiner_dim_vs_nullspace", abs(oracles.intertwiner_nullity(r) - oracles.intertwiner_span_dim(r)), 0)
            rep.record("center_dim_vs_solve", abs(oracles.center_dim_by_solving(r) - len(center_basis(r))), 0)
            if G.n_edges == 0:
                continue
            eta = Intertwiner.random(r, rng)
            _, nrm = ball_membership(eta)
            inside, n_in = ball_membership(eta * (0.5 / nrm))
            outside, _ = ball_membership(eta * (1.5 / nrm))
            rep.record("ball_scaling", abs(n_in - 0.5), tol)
            rep.record("ball_decision", int(not inside) + int(outside), 0)
            for n in range(1, min(N, 3) + 1):
                if tensor_h_basis(r, n).dim > 200:
                    break
                for _ in range(3):
                    etas = [Intertwiner.random(r, rng) for _ in range(n)]
                    xis = [Intertwiner.random(r, rng) for _ in range(n)]
                    h, k = _rc(rng, r.dim), _rc(rng, r.dim)
                    lhs = np.vdot(u_map(etas, h), u_map(xis, k))
                    rep.record("u_map_isometry", abs(lhs - balanced_inner(etas, h, xis, k)), tol)
                target = tensor_h_basis(r, n).dim
                rank = oracles.random_intertwiner_span_rank(r, rng, n, target + 4)
                rep.record("u_map_spanning", abs(rank - target), 0)
            for _ in range(opts["trials"] // 2):
                eta = Intertwiner.random(r, rng)
                x = CorrElement(G, _rc(rng, G.n_edges))
                rep.record("commutant_commutator", commutant_commutator_check(eta, x, min(N, 3)), tol)


def _random_perm(vertices, rng):
    return VertexPermutation.from_images(vertices, [vertices[i] for i in rng.permutation(len(vertices))])


def _morita_suite(rep, graphs, rng, opts):
    tol, samples = opts["tol"], opts["trials"]
    for _, G in graphs:
        rep.instances += 1
        sigma = Representation(G, 1)
        tau = Representation(G, [int(k) for k in rng.integers(1, 3, size=G.n_vertices)])
        res = pairing_residuals(EquivalenceBimodule(sigma, tau), rng, samples)
        for k, v in res.items():
            rep.record(f"pairing_{k}", v, tol)
        if G.n_edges:
            iso = DualMoritaIso(sigma, tau)
            out = iso.verify(rng, max(10, samples // 5), tol)
            for k in ("bimodule", "inner", "chain"):
                rep.record(f"dual_iso_{k}", out[k], tol)
            rep.record("dual_iso_rank_deficit", out["target_dim"] - out["rank"], 0)
        H = shuffled_copy(G, rng)
        cert = build_certificate(G, H, graph_isomorphism(G, H), rng, samples, tol)
        rep.record("certificate_residual", cert.max_residual, tol)
        rep.record("certificate_corr_iso_exact", int(not cert.corr_verified), 0)
        verts = list(G.vertices)
        s, t = _random_perm(verts, rng), _random_perm(verts, rng)
        ok, _ = CollapseIso(s, t, verts).verify_basis()
        rep.record("collapse_basis_exact", int(not ok), 0)
        for k, v in CollapseIso(s, t, verts).verify_random(rng, max(10, samples // 5)).items():
            rep.record(f"collapse_random_{k}", v, tol)
        for k, v in inverse_law_check(s, verts).items():
            rep.record(f"inverse_law_{k}", v, 0)
        if G.n_edges:
            conj = ConjugationIso(G, s)
            ok, _ = conj.verify_basis()
            rep.record("conjugation_basis_exact", int(not ok), 0)
            for k, v in conj.verify_random(rng, max(10, samples // 5)).items():
                rep.record(f"conjugation_random_{k}", v, tol)


def _linking_suite(rep, graphs, rng, opts):
    tol, N = opts["tol"], max(1, min(opts["level"], 3))
    for _, G in graphs:
        if G.n_edges == 0 or G.n_edges > LINKING_MAX_EDGES:
            continue
        rep.instances += 1
        H = shuffled_copy(G, rng)
        cert = build_certificate(G, H, graph_isomorphism(G, H), rng, 20, tol)
        out = linking_report(cert, N, rng, opts["trials"])
        rep.record("corner_identities", out["corner_residual_max"], tol)
        rep.record("corner_product", out["product_residual"], tol)
        rep.record("fock_corner_dims_mismatch", int(not out["fock_match"]), 0)
        rep.record("first_column_invariance", out["invariance_residual"], tol)
        rep.record("matrix_model", out["matrix_model_residual"], tol)
        rep.record("projections", max(out["projections"].values()), tol)
        rep.record("gram_negativity", max(0.0, -out["gram"]["min_eigenvalue"]), tol)
        for k, v in phi_z_residuals(build_z(cert)).items():
            rep.record(f"phi_z_{k}", v, tol)


_RUNNERS = {
    "graph": _graph_suite,
    "correspondence": _correspondence_suite,
    "fock": _fock_suite,
    "duality": _duality_suite,
    "morita": _morita_suite,
    "linking": _linking_suite,
}


def run_suite(name, graphs, seed=0, tol=1e-10, level=3, trials=50):
    """Run one suite over ``[(label, graph), ...]``; randomness comes only from ``seed``."""
    rng = np.random.default_rng([seed, SUITES.index(name)])
    report = VerifyReport(suite=name, seed=seed)
    start = time.perf_counter()
    _RUNNERS[name](report, graphs, rng, {"tol": tol, "level": level, "trials": trials})
    report.wall_time = time.perf_counter() - start
    return report


def run_suites(names, graphs, seed=0, tol=1e-10, level=3, trials=50):
    names = SUITES if names == "all" or names == ["all"] else names
    return [run_suite(n, graphs, seed, tol, level, trials) for n in names]
