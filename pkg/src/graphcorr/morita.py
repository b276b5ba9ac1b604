"""Equivalence bimodules, permutation bimodules and Morita certificates.

Three families of bimodules live here.

* :class:`EquivalenceBimodule` is ``X = (+)_q B(K_q, H_q)`` between the
  commutants of two representations of the vertex algebra.
* :class:`PermutationBimodule` is ``A_sigma``: the vertex algebra with its
  right action and right inner product twisted by a vertex permutation.
  Together with :class:`ConjugateBimodule` and :class:`TensorBimodule` it
  gives finite models for products and inverses of such bimodules.
* :class:`MoritaCertificate` packages a graph isomorphism with the
  correspondence isomorphism it induces and the chain isomorphism
  ``W: X (x)_B F -> E (x)_A X``.

Every explicit map is checked rather than trusted: exact checks on basis
elements where the arithmetic is 0/1, seeded random samples otherwise.
"""

from __future__ import annotations

import itertools

import numpy as np

from .algebra import AlgebraElement
from .correspondence import CorrElement, bimodule_action, corr_inner_product
from .duality import (
    CommutantElement,
    Intertwiner,
    dual_inner,
    dual_left_action,
    dual_right_action,
)
from .errors import MismatchError, VerificationError
from .graph import VertexPermutation, graph_isomorphism


def _rand_c(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _maxabs(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a), initial=0.0))


def gram_rank(G, threshold=1e-8):
    """Rank of a Hermitian PSD Gram matrix, counting eigenvalues above ``threshold * max(1, top)``."""
    G = np.asarray(G, dtype=complex)
    if G.size == 0:
        return 0
    w = np.linalg.eigvalsh((G + G.conj().T) / 2)
    return int(np.count_nonzero(w > threshold * max(1.0, float(w[-1]))))


# ---------------------------------------------------------------------------
# X = (+)_q B(K_q, H_q)


class BimoduleElement:
    """Per-vertex blocks ``x_q`` of shape ``(m^sigma_q, m^tau_q)``."""

    __slots__ = ("module", "blocks")

    def __init__(self, module, blocks):
        out = []
        for q, b in enumerate(blocks):
            b = np.asarray(b, dtype=complex)
            if b.shape != (module.left_rep.mult[q], module.right_rep.mult[q]):
                raise MismatchError(f"block {q} has shape {b.shape}")
            out.append(b)
        if len(out) != module.left_rep.graph.n_vertices:
            raise MismatchError("one block per vertex required")
        self.module = module
        self.blocks = out

    def __add__(self, other):
        return BimoduleElement(self.module, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, scalar):
        return BimoduleElement(self.module, [scalar * b for b in self.blocks])

    __rmul__ = __mul__


class EquivalenceBimodule:
    """``X`` as a ``sigma(A)'``-``tau(A)'`` equivalence bimodule.

    Left action and right action are block-wise matrix products; the
    inner products are ``<x, y> = (+) x_q* y_q`` (right) and
    ``<x, y>_left = (+) x_q y_q*``.
    """

    def __init__(self, left_rep, right_rep):
        if left_rep.graph != right_rep.graph:
            raise MismatchError("representations of different graphs")
        self.left_rep = left_rep
        self.right_rep = right_rep

    @property
    def dim(self):
        return int(sum(m * k for m, k in zip(self.left_rep.mult, self.right_rep.mult)))

    def element(self, blocks):
        return BimoduleElement(self, blocks)

    def random(self, rng):
        return self.element([_rand_c(rng, m, k) for m, k in zip(self.left_rep.mult, self.right_rep.mult)])

    def basis(self):
        out = []
        for q, (m, k) in enumerate(zip(self.left_rep.mult, self.right_rep.mult)):
            for i in range(m):
                for j in range(k):
                    blocks = [np.zeros((mm, kk), dtype=complex) for mm, kk in zip(self.left_rep.mult, self.right_rep.mult)]
                    blocks[q][i, j] = 1.0
                    out.append(self.element(blocks))
        return out

    def frame(self):
        """Matrix units ``E^{(q)}_{j,1}``; their left inner products sum to the identity."""
        out = []
        for q, (m, k) in enumerate(zip(self.left_rep.mult, self.right_rep.mult)):
            for i in range(m):
                blocks = [np.zeros((mm, kk), dtype=complex) for mm, kk in zip(self.left_rep.mult, self.right_rep.mult)]
                blocks[q][i, 0] = 1.0
                out.append(self.element(blocks))
        return out

    def _own(self, x):
        if x.module is not self and (x.module.left_rep, x.module.right_rep) != (self.left_rep, self.right_rep):
            raise MismatchError("element of a different bimodule")

    def left_action(self, a, x):
        self._own(x)
        if a.rep != self.left_rep:
            raise MismatchError("left action needs the left commutant")
        return self.element([ab @ xb for ab, xb in zip(a.blocks, x.blocks)])

    def right_action(self, x, b):
        self._own(x)
        if b.rep != self.right_rep:
            raise MismatchError("right action needs the right commutant")
        return self.element([xb @ bb for xb, bb in zip(x.blocks, b.blocks)])

    def right_inner(self, x, y):
        self._own(x)
        self._own(y)
        return CommutantElement(self.right_rep, [a.conj().T @ b for a, b in zip(x.blocks, y.blocks)])

    def left_inner(self, x, y):
        self._own(x)
        self._own(y)
        return CommutantElement(self.left_rep, [a @ b.conj().T for a, b in zip(x.blocks, y.blocks)])


def pairing_mA(x, y):
    """``m_A(x (x) y~) = <x, y>_left``."""
    return x.module.left_inner(x, y)


def pairing_mB(x, y):
    """``m_B(x~ (x) y) = <x, y>``."""
    return x.module.right_inner(x, y)


def pairing_residuals(module, rng, samples=100):
    """Residuals of the pairing maps against the balanced-tensor inner products.

    On ``X (x) X~`` the inner product is ``<y1~, <x1, x2> . y2~>``, where
    ``b . y~ = (y b*)~`` and ``<u~, v~> = <u, v>_left``. On ``X~ (x) X``
    it is ``<y1, <x1~, x2~> . y2>``. Both must match the products of the
    pairing values. The compatibility ``<x, y>_left . z = x . <y, z>`` is
    checked on the same samples.
    """
    worst = {"mA_inner": 0.0, "mB_inner": 0.0, "compat": 0.0}
    for _ in range(samples):
        x1, y1, x2, y2 = (module.random(rng) for _ in range(4))
        c = module.right_inner(x1, x2)
        # (y2 c*)~ is c . y2~ ; then <y1~, (y2 c*)~> = <y1, y2 c*>_left
        lhs = module.left_inner(y1, module.right_action(y2, c.adjoint()))
        rhs = pairing_mA(x1, y1).adjoint() @ pairing_mA(x2, y2)
        worst["mA_inner"] = max(worst["mA_inner"], lhs.max_abs_diff(rhs))
        d = module.left_inner(x1, x2)
        lhs = module.right_inner(y1, module.left_action(d, y2))
        rhs = pairing_mB(x1, y1).adjoint() @ pairing_mB(x2, y2)
        worst["mB_inner"] = max(worst["mB_inner"], lhs.max_abs_diff(rhs))
        z = module.random(rng)
        lhs = module.left_action(module.left_inner(x1, y1), z)
        rhs = module.right_action(x1, module.right_inner(y1, z))
        worst["compat"] = max(worst["compat"], max(_maxabs(a - b) for a, b in zip(lhs.blocks, rhs.blocks)))
    return worst


# ---------------------------------------------------------------------------
# dual Morita map  X~ (x) E^sigma (x) X -> E^tau


class DualMoritaIso:
    """``phi(x~ (x) eta (x) y) = (I_E (x) x*) eta y`` from ``E^sigma`` data to ``E^tau``.

    On stored blocks the image has ``y_{r(e)}* T_e x_{s(e)}`` at edge ``e``.
    """

    def __init__(self, sigma, tau):
        self.sigma = sigma
        self.tau = tau
        self.X = EquivalenceBimodule(sigma, tau)
        self.report = None

    def apply(self, x, eta, y):
        if eta.rep != self.sigma:
            raise MismatchError("eta must live over the left representation")
        g = self.sigma.graph
        blocks = [
            y.blocks[g.range[j]].conj().T @ eta.blocks[j] @ x.blocks[g.source[j]]
            for j in range(g.n_edges)
        ]
        return Intertwiner(self.tau, blocks)

    def domain_inner(self, u, w):
        """``<x1~ (x) eta1 (x) y1, x2~ (x) eta2 (x) y2>`` by the balancing formula."""
        (x1, e1, y1), (x2, e2, y2) = u, w
        c = self.X.left_inner(x1, x2)
        inner = dual_inner(e1, dual_left_action(c, e2))
        return self.X.right_inner(y1, self.X.left_action(inner, y2))

    def chain_image(self, eta, y):
        """``eta (x) y -> sum_i x_i (x) phi(x_i~ (x) eta (x) y)`` over the frame."""
        return [(xi, self.apply(xi, eta, y)) for xi in self.X.frame()]

    def chain_inner_domain(self, eta1, y1, eta2, y2):
        c = dual_inner(eta1, eta2)
        return self.X.right_inner(y1, self.X.left_action(c, y2))

    def chain_inner_image(self, img1, img2):
        total = CommutantElement(self.tau, [np.zeros((m, m), dtype=complex) for m in self.tau.mult])
        for x1, xi1 in img1:
            for x2, xi2 in img2:
                total = total + dual_inner(xi1, dual_left_action(self.X.right_inner(x1, x2), xi2))
        return total

    def verify(self, rng, samples=100, tol=1e-10):
        """Bimodule property, inner products, chain inner products and surjectivity."""
        X = self.X
        rep = {"bimodule": 0.0, "inner": 0.0, "chain": 0.0}
        for _ in range(samples):
            x1, y1, x2, y2 = (X.random(rng) for _ in range(4))
            e1, e2 = Intertwiner.random(self.sigma, rng), Intertwiner.random(self.sigma, rng)
            a, b = CommutantElement.random(self.tau, rng), CommutantElement.random(self.tau, rng)
            # a . x~ = (x a*)~ and y . b = y b
            lhs = self.apply(X.right_action(x1, a.adjoint()), e1, X.right_action(y1, b))
            rhs = dual_right_action(dual_left_action(a, self.apply(x1, e1, y1)), b)
            rep["bimodule"] = max(rep["bimodule"], lhs.max_abs_diff(rhs))
            lhs = self.domain_inner((x1, e1, y1), (x2, e2, y2))
            rhs = dual_inner(self.apply(x1, e1, y1), self.apply(x2, e2, y2))
            rep["inner"] = max(rep["inner"], lhs.max_abs_diff(rhs))
            lhs = self.chain_inner_domain(e1, y1, e2, y2)
            rhs = self.chain_inner_image(self.chain_image(e1, y1), self.chain_image(e2, y2))
            rep["chain"] = max(rep["chain"], lhs.max_abs_diff(rhs))
        target = self.tau.intertwiner_dim()
        imgs = []
        for _ in range(target + 8):
            imgs.append(self.apply(X.random(rng), Intertwiner.random(self.sigma, rng), X.random(rng)).vector())
        M = np.array(imgs) if imgs and target else np.zeros((0, 0))
        rank = gram_rank(M.conj() @ M.T) if target else 0
        rep["rank"] = rank
        rep["target_dim"] = target
        rep["ok"] = bool(rank == target and max(rep["bimodule"], rep["inner"], rep["chain"]) <= tol)
        self.report = rep
        return rep


def dual_morita_iso(sigma, tau, rng=None, samples=100, tol=1e-10):
    """Build and verify the map ``X~ (x) E^sigma (x) X -> E^tau``.

    Raises
    ------
    VerificationError
        If the image does not span ``E^tau``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    iso = DualMoritaIso(sigma, tau)
    rep = iso.verify(rng, samples, tol)
    if rep["rank"] != rep["target_dim"]:
        raise VerificationError(f"image rank {rep['rank']} below {rep['target_dim']}")
    return iso


# ---------------------------------------------------------------------------
# bimodules over the vertex algebra C(X)


class DiagonalBimodule:
    """A finite bimodule over functions on ``n`` points, in a fixed basis.

    Subclasses implement ``left``, ``right``, ``inner`` and
    ``left_inner`` on coefficient arrays; algebra elements are arrays of
    length ``n``.
    """

    n: int
    dim: int

    def basis(self):
        return list(np.eye(self.dim, dtype=complex))

    def act(self, a, z, b):
        return self.right(self.left(a, z), b)


class PermutationBimodule(DiagonalBimodule):
    """``A_sigma``: ``(a . z . b)_x = a_x z_x b_{sigma(x)}``.

    ``<z, w> = sum_x conj(z_x) w_x delta_{sigma(x)}`` and
    ``<z, w>_left = sum_x z_x conj(w_x) delta_x``.

    Parameters
    ----------
    sigma : VertexPermutation
    vertices : sequence, optional
        Coordinate order; defaults to ``sigma.domain``.
    """

    def __init__(self, sigma, vertices=None):
        self.sigma = sigma
        self.vertices = tuple(sigma.domain if vertices is None else vertices)
        self.p = sigma.as_indices(self.vertices)
        self.n = self.dim = len(self.vertices)

    def left(self, a, z):
        return np.asarray(a) * z

    def right(self, z, b):
        return z * np.asarray(b)[self.p]

    def inner(self, z, w):
        out = np.zeros(self.n, dtype=complex)
        np.add.at(out, self.p, np.conj(z) * w)
        return out

    def left_inner(self, z, w):
        return z * np.conj(w)


class ConjugateBimodule(DiagonalBimodule):
    """``X~``: coordinates ``c`` stand for ``sum_i c_i delta~_i``, i.e. ``(conj c)~``.

    ``a . z~ = (z . a*)~``, ``z~ . b = (b* . z)~``, ``<z~, w~> = <z, w>_left``
    and ``<z~, w~>_left = <z, w>``.
    """

    def __init__(self, base):
        self.base = base
        self.n = base.n
        self.dim = base.dim

    def left(self, a, c):
        return np.conj(self.base.right(np.conj(c), np.conj(a)))

    def right(self, c, b):
        return np.conj(self.base.left(np.conj(b), np.conj(c)))

    def inner(self, c, d):
        return self.base.left_inner(np.conj(c), np.conj(d))

    def left_inner(self, c, d):
        return self.base.inner(np.conj(c), np.conj(d))


class TensorBimodule(DiagonalBimodule):
    """``X (x)_A Y`` on the spanning set ``{x_i (x) y_j}``; elements are ``dim X x dim Y`` arrays.

    The inner products follow the balancing formulas
    ``<z (x) w, u (x) v> = <w, <z, u> . v>`` and
    ``<z (x) w, u (x) v>_left = <z . <w, v>_left, u>_left``, extended
    sesquilinearly from precomputed basis tables. Elements that differ by
    a balancing relation have equal inner products, so the coordinates
    are not unique; maps out of the tensor product are compared through
    inner products or on elementary tensors.
    """

    def __init__(self, X, Y):
        if X.n != Y.n:
            raise MismatchError("middle algebras differ")
        self.X, self.Y = X, Y
        self.n = X.n
        self.dim = X.dim * Y.dim
        bx, by = X.basis(), Y.basis()
        R = np.zeros((X.dim, Y.dim, X.dim, Y.dim, self.n), dtype=complex)
        L = np.zeros_like(R)
        for i, k in itertools.product(range(X.dim), repeat=2):
            c = X.inner(bx[i], bx[k])
            for j, l in itertools.product(range(Y.dim), repeat=2):
                R[i, j, k, l] = Y.inner(by[j], Y.left(c, by[l]))
        for j, l in itertools.product(range(Y.dim), repeat=2):
            d = Y.left_inner(by[j], by[l])
            for i, k in itertools.product(range(X.dim), repeat=2):
                L[i, j, k, l] = X.left_inner(X.right(bx[i], d), bx[k])
        self._R, self._L = R, L

    def basis(self):
        return [m for m in np.eye(self.dim, dtype=complex).reshape(self.dim, self.X.dim, self.Y.dim)]

    def elementary(self, z, w):
        return np.outer(z, w)

    def left(self, a, C):
        return np.stack([self.X.left(a, C[:, j]) for j in range(self.Y.dim)], axis=1)

    def right(self, C, b):
        return np.stack([self.Y.right(C[i], b) for i in range(self.X.dim)], axis=0)

    def inner(self, C, D):
        return np.einsum("ij,ijklv,kl->v", np.conj(C), self._R, D)

    def left_inner(self, C, D):
        return np.einsum("ij,ijklv,kl->v", C, self._L, np.conj(D))


def a_sigma(sigma, a, z, b, vertices=None):
    """``a . z . b`` in ``A_sigma``."""
    return PermutationBimodule(sigma, vertices).act(np.asarray(a, complex), np.asarray(z, complex), b)


def a_sigma_inner(sigma, z, w, vertices=None):
    """Right inner product of ``A_sigma``."""
    return PermutationBimodule(sigma, vertices).inner(np.asarray(z, complex), np.asarray(w, complex))


def a_sigma_left_inner(sigma, z, w, vertices=None):
    """Left inner product of ``A_sigma``."""
    return PermutationBimodule(sigma, vertices).left_inner(np.asarray(z, complex), np.asarray(w, complex))


def bimodule_tensor(X, Y):
    return TensorBimodule(X, Y)


def _point_basis(n):
    return list(np.eye(n, dtype=complex))


class CollapseIso:
    """The triple ``(omega, psi, pi)`` identifying ``A_sigma (x) A_tau`` with ``A``.

    ``psi(C) = sum_x C[x, sigma(x)] delta_{sigma(x)}``,
    ``omega(a) = a o sigma^{-1}`` and ``pi(a) = a o tau``. The identities
    checked are ``psi(a . u . b) = omega(a) psi(u) pi(b)``,
    ``<psi u, psi w> = pi(<u, w>)`` and
    ``<psi u, psi w>_left = omega(<u, w>_left)``.
    """

    def __init__(self, sigma, tau, vertices=None):
        vertices = tuple(sigma.domain if vertices is None else vertices)
        self.X = PermutationBimodule(sigma, vertices)
        self.Y = PermutationBimodule(tau, vertices)
        self.T = TensorBimodule(self.X, self.Y)
        self.p = self.X.p
        self.q = self.Y.p
        self.p_inv = np.argsort(self.p)

    def psi(self, C):
        n = self.X.n
        out = np.zeros(n, dtype=C.dtype)
        out[self.p] = C[np.arange(n), self.p]
        return out

    def omega(self, a):
        return np.asarray(a)[self.p_inv]

    def pi(self, a):
        return np.asarray(a)[self.q]

    def _residuals(self, algebra_elems, tensor_elems):
        T = self.T
        act = inner = left = 0.0
        for a in algebra_elems:
            for b in algebra_elems:
                for u in tensor_elems:
                    lhs = self.psi(T.act(a, u, b))
                    rhs = self.omega(a) * self.psi(u) * self.pi(b)
                    act = max(act, _maxabs(lhs - rhs))
        for u in tensor_elems:
            for w in tensor_elems:
                pu, pw = self.psi(u), self.psi(w)
                inner = max(inner, _maxabs(np.conj(pu) * pw - self.pi(T.inner(u, w))))
                left = max(left, _maxabs(pu * np.conj(pw) - self.omega(T.left_inner(u, w))))
        return {"action": act, "inner": inner, "left_inner": left}

    def verify_basis(self):
        """Exact check over all basis triples; returns ``(ok, residuals)``."""
        n = self.X.n
        pts = _point_basis(n)
        elems = [self.T.elementary(z, w) for z in pts for w in pts]
        res = self._residuals(pts, elems)
        return all(v == 0.0 for v in res.values()), res

    def verify_random(self, rng, samples=100):
        n = self.X.n
        worst = {"action": 0.0, "inner": 0.0, "left_inner": 0.0}
        for _ in range(samples):
            a, b = _rand_c(rng, n), _rand_c(rng, n)
            u = self.T.elementary(_rand_c(rng, n), _rand_c(rng, n)) + self.T.elementary(_rand_c(rng, n), _rand_c(rng, n))
            w = self.T.elementary(_rand_c(rng, n), _rand_c(rng, n))
            res = self._residuals([a, b], [u, w])
            for k in worst:
                worst[k] = max(worst[k], res[k])
        return worst


def a_sigma_collapse_iso(sigma, tau, vertices=None):
    """Build and exactly verify ``(omega, psi, pi): A_sigma (x) A_tau -> A``."""
    iso = CollapseIso(sigma, tau, vertices)
    ok, res = iso.verify_basis()
    if not ok:
        raise VerificationError(f"collapse isomorphism failed: {res}")
    return iso


def unit_collapse_check(X):
    """``A (x) X -> X``, ``a (x) x -> a . x``: exact residuals on basis elements."""
    A = PermutationBimodule(VertexPermutation({str(i): str(i) for i in range(X.n)}))
    T = TensorBimodule(A, X)
    pts, xs = _point_basis(X.n), X.basis()

    def m(C):
        return sum(X.left(pts[i], C[i]) for i in range(X.n))

    act = inner = 0.0
    elems = [T.elementary(a, x) for a in pts for x in xs]
    for a in pts:
        for b in pts:
            for u in elems:
                act = max(act, _maxabs(m(T.act(a, u, b)) - X.act(a, m(u), b)))
    for u in elems:
        for w in elems:
            inner = max(inner, _maxabs(T.inner(u, w) - X.inner(m(u), m(w))))
    return {"action": act, "inner": inner}


def inverse_law_check(sigma, vertices=None):
    """``A_sigma (x) A_sigma~ -> A`` by ``z (x) w~ -> <z, w>_left``: exact residuals on basis."""
    X = PermutationBimodule(sigma, vertices)
    Xt = ConjugateBimodule(X)
    T = TensorBimodule(X, Xt)
    n = X.n
    pts = _point_basis(n)

    def m(C):
        # bilinear extension of z (x) w~ -> z conj(w); coordinates c of w~ mean w = conj(c)
        return np.einsum("ij,ik,jk->k", C, np.eye(n), np.eye(n))

    elems = [T.elementary(z, w) for z in pts for w in pts]
    act = inner = left = 0.0
    for a in pts:
        for b in pts:
            for u in elems:
                act = max(act, _maxabs(m(T.act(a, u, b)) - a * m(u) * b))
    for u in elems:
        for w in elems:
            mu, mw = m(u), m(w)
            inner = max(inner, _maxabs(T.inner(u, w) - np.conj(mu) * mw))
            left = max(left, _maxabs(T.left_inner(u, w) - mu * np.conj(mw)))
    return {"action": act, "inner": inner, "left_inner": left}


class ConjugationIso:
    """``phi(a~ (x) x (x) b) = a* . x . b`` from ``A_sigma~ (x) E (x) A_sigma`` onto ``E``.

    ``pi(c) = c o sigma``. Checked identities:
    ``phi(alpha . u . beta) = pi(alpha) . phi(u) . pi(beta)`` and
    ``<phi u, phi w>_E = pi(<b, <x, <a~, c~> . y>_E . d>)``.
    """

    def __init__(self, graph, sigma):
        if set(sigma.domain) != set(graph.vertices):
            raise MismatchError("permutation domain differs from the vertex set")
        self.graph = graph
        self.P = PermutationBimodule(sigma, graph.vertices)
        self.Pt = ConjugateBimodule(self.P)
        self.p = self.P.p

    def pi(self, c):
        return np.asarray(c)[self.p]

    def phi(self, ca, x, b):
        """``ca`` are coordinates of ``a~``; they equal the coefficients of ``a*``."""
        g = self.graph
        return CorrElement(g, np.asarray(ca)[g.range] * x.coeffs * np.asarray(b)[g.source])

    def domain_inner(self, u, w):
        (ca, x, b), (cc, y, d) = u, w
        g = self.graph
        t = self.Pt.inner(ca, cc)
        inner_e = corr_inner_product(x, bimodule_action(AlgebraElement(g, t), y, AlgebraElement.unit(g)))
        return self.P.inner(b, self.P.left(inner_e.coeffs, d))

    def _residuals(self, alg, triples):
        g = self.graph
        act = inner = 0.0
        for al in alg:
            for be in alg:
                for ca, x, b in triples:
                    lhs = self.phi(self.Pt.left(al, ca), x, self.P.right(b, be))
                    rhs = bimodule_action(AlgebraElement(g, self.pi(al)), self.phi(ca, x, b), AlgebraElement(g, self.pi(be)))
                    act = max(act, _maxabs(lhs.coeffs - rhs.coeffs))
        for u in triples:
            for w in triples:
                lhs = corr_inner_product(self.phi(*u), self.phi(*w)).coeffs
                rhs = self.pi(self.domain_inner(u, w))
                inner = max(inner, _maxabs(lhs - rhs))
        return {"action": act, "inner": inner}

    def basis_triples(self):
        g = self.graph
        pts = _point_basis(g.n_vertices)
        return [(a, CorrElement.delta(g, j), b) for a in pts for j in range(g.n_edges) for b in pts]

    def verify_basis(self):
        res = self._residuals(_point_basis(self.graph.n_vertices), self.basis_triples())
        return all(v == 0.0 for v in res.values()), res

    def verify_random(self, rng, samples=100):
        g = self.graph
        n = g.n_vertices
        worst = {"action": 0.0, "inner": 0.0}
        for _ in range(samples):
            trip = [(_rand_c(rng, n), CorrElement(g, _rand_c(rng, g.n_edges)), _rand_c(rng, n)) for _ in range(2)]
            res = self._residuals([_rand_c(rng, n), _rand_c(rng, n)], trip)
            for k in worst:
                worst[k] = max(worst[k], res[k])
        return worst


def conjugation_iso(graph, sigma):
    """Build ``(pi, phi)`` and verify it exactly on basis triples."""
    iso = ConjugationIso(graph, sigma)
    ok, res = iso.verify_basis()
    if not ok:
        raise VerificationError(f"conjugation isomorphism failed: {res}")
    return iso


# ---------------------------------------------------------------------------
# graph-level certificates


class CorrespondenceIso:
    """``omega(delta_v) = delta_{beta(v)}`` and ``phi(delta_e) = delta_{alpha(e)}``."""

    def __init__(self, G, F, iso):
        self.G, self.F, self.iso = G, F, iso
        self.beta = np.array([F.vertex_index(iso.beta[v]) for v in G.vertices], dtype=np.int64)
        self.alpha = np.array([F.edge_index(iso.alpha[e.id]) for e in G.edges], dtype=np.int64)

    def omega(self, a):
        out = np.zeros(self.F.n_vertices, dtype=complex)
        out[self.beta] = a.coeffs
        return AlgebraElement(self.F, out)

    def phi(self, x):
        out = np.zeros(self.F.n_edges, dtype=complex)
        out[self.alpha] = x.coeffs
        return CorrElement(self.F, out)

    def verify_basis(self):
        """Exact: ``phi(a.e.b) = omega(a).phi(e).omega(b)`` and ``<phi e, phi f> = omega(<e, f>)``."""
        G = self.G
        pts = [AlgebraElement.delta(G, v) for v in range(G.n_vertices)]
        edges = [CorrElement.delta(G, j) for j in range(G.n_edges)]
        for a in pts:
            for b in pts:
                for x in edges:
                    lhs = self.phi(bimodule_action(a, x, b))
                    rhs = bimodule_action(self.omega(a), self.phi(x), self.omega(b))
                    if not np.array_equal(lhs.coeffs, rhs.coeffs):
                        return False
        for x in edges:
            for y in edges:
                lhs = corr_inner_product(self.phi(x), self.phi(y))
                rhs = self.omega(corr_inner_product(x, y))
                if not np.array_equal(lhs.coeffs, rhs.coeffs):
                    return False
        return True

    def to_dict(self):
        return {"omega": dict(self.iso.beta), "phi": dict(self.iso.alpha)}


class MoritaCertificate:
    """Graph isomorphism, induced correspondence isomorphism and the chain map ``W``.

    ``X`` is ``B`` with ``a . x . b = pi(a) x b`` where ``pi = omega``. In
    coordinates ``X (x)_B F`` is indexed by the edges of ``F``
    (``delta_{r(f)} (x) delta_f``) and ``E (x)_A X`` by the edges of ``G``
    (``delta_e (x) delta_{beta(s(e))}``). ``W[e, f] = 1`` exactly when
    ``f = alpha(e)``.
    """

    def __init__(self, G, F, graph_iso):
        if not graph_iso.verify(G, F):
            raise VerificationError("graph isomorphism does not satisfy the compatibility equations")
        self.G, self.F = G, F
        self.graph_iso = graph_iso
        self.corr_iso = CorrespondenceIso(G, F, graph_iso)
        self.beta = self.corr_iso.beta
        self.alpha = self.corr_iso.alpha
        self.beta_inv = np.argsort(self.beta)
        self.alpha_inv = np.argsort(self.alpha)
        W = np.zeros((G.n_edges, F.n_edges))
        W[np.arange(G.n_edges), self.alpha] = 1.0
        self.W = W
        self.W_tilde = derive_w_tilde(self)
        self.max_residual = None
        self.W_verified = False
        self.corr_verified = False

    # X = B with twisted left action
    def pi(self, a):
        """``pi(a)`` as an ``F``-vertex array: ``pi(a)_{beta(v)} = a_v``."""
        out = np.zeros(self.F.n_vertices, dtype=complex)
        out[self.beta] = a
        return out

    def x_act(self, a, x, b):
        return self.pi(a) * x * b

    def x_right_inner(self, x, y):
        return np.conj(x) * y

    def x_left_inner(self, x, y):
        """``A``-valued: ``pi^{-1}(x conj(y))``."""
        return (x * np.conj(y))[self.beta]

    # X (x)_B F, coordinates on F-edges
    def xf_elementary(self, x, f):
        return x[self.F.range] * f.coeffs

    def xf_act(self, a, u, b):
        F = self.F
        return self.pi(a)[F.range] * u * b[F.source]

    def xf_inner_formula(self, x1, f1, x2, f2):
        """``<f1, (conj(x1) x2) . f2>_B`` on elementary tensors."""
        F = self.F
        left = AlgebraElement(F, self.x_right_inner(x1, x2))
        return corr_inner_product(f1, bimodule_action(left, f2, AlgebraElement.unit(F))).coeffs

    # E (x)_A X, coordinates on G-edges
    def ex_act(self, a, d, b):
        G = self.G
        return a[G.range] * d * b[self.beta[G.source]]

    def ex_inner(self, d1, d2):
        """``conj(x1) pi(<e1, e2>_A) x2``, evaluated on the coordinate basis."""
        out = np.zeros(self.F.n_vertices, dtype=complex)
        np.add.at(out, self.beta[self.G.source], np.conj(d1) * d2)
        return out

    def apply_W(self, u):
        return self.W @ u

    def verify(self, rng, samples=100, tol=1e-10):
        """Exact correspondence-iso check plus ``samples`` random checks of ``W``."""
        self.corr_verified = self.corr_iso.verify_basis()
        worst = 0.0
        G, F = self.G, self.F
        for _ in range(samples):
            x1, x2 = _rand_c(rng, F.n_vertices), _rand_c(rng, F.n_vertices)
            f1 = CorrElement(F, _rand_c(rng, F.n_edges))
            f2 = CorrElement(F, _rand_c(rng, F.n_edges))
            a, b = _rand_c(rng, G.n_vertices), _rand_c(rng, F.n_vertices)
            u1, u2 = self.xf_elementary(x1, f1), self.xf_elementary(x2, f2)
            lhs = self.ex_inner(self.apply_W(u1), self.apply_W(u2))
            rhs = self.xf_inner_formula(x1, f1, x2, f2)
            worst = max(worst, _maxabs(lhs - rhs))
            lhs = self.apply_W(self.xf_act(a, u1, b))
            rhs = self.ex_act(a, self.apply_W(u1), b)
            worst = max(worst, _maxabs(lhs - rhs))
        wt = verify_w_tilde(self, rng, samples)
        worst = max(worst, wt)
        self.max_residual = worst
        self.W_verified = bool(worst <= tol)
        return self.corr_verified and self.W_verified

    def to_dict(self):
        return {
            "graph_iso": self.graph_iso.to_dict(),
            "corr_iso": self.corr_iso.to_dict(),
            "W_verified": bool(self.W_verified),
            "max_residual": float(self.max_residual) if self.max_residual is not None else None,
        }


def derive_w_tilde(cert):
    """``W~: X~ (x)_A E -> F (x)_B X~`` as ``(m_B (x) I)(I (x) W^{-1} (x) I)(insert m_A^{-1}(1))``.

    Coordinates: ``X~ (x) E`` on ``G``-edges (``delta~_{beta(r(e))} (x) delta_e``),
    ``F (x) X~`` on ``F``-edges (``delta_f (x) delta~_{s(f)}``). The unit
    of ``A`` is ``m_A(sum_w delta_w (x) delta~_w)``; after inserting it,
    ``e (x) delta_w`` survives only for ``w = beta(s(e))``, ``W^{-1}``
    moves it to ``delta_{r(f)} (x) delta_f``, and ``m_B`` contracts the
    leading ``delta~_{beta(r(e))} (x) delta_{r(f)}``.
    """
    G, F = cert.G, cert.F
    Winv = cert.W.T  # W is a permutation matrix
    out = np.zeros((F.n_edges, G.n_edges))
    for j in range(G.n_edges):
        lead = cert.beta[G.range[j]]
        for w in range(F.n_vertices):
            if w != cert.beta[G.source[j]]:
                continue
            for f in np.flatnonzero(Winv[:, j]):
                # m_B(delta~_lead (x) delta_{r(f)}) = <delta_lead, delta_{r(f)}>_B
                contract = 1.0 if lead == F.range[f] else 0.0
                # delta_{r f} . delta_f (x) delta~_w, nonzero when w = s(f)
                if contract and w == F.source[f]:
                    out[f, j] += Winv[f, j]
    return out


def verify_w_tilde(cert, rng, samples=100):
    """Max residual of ``W~`` on inner products and ``B``-``A`` actions."""
    G, F = cert.G, cert.F
    Wt = cert.W_tilde

    def xe_inner(u, v):
        out = np.zeros(G.n_vertices, dtype=complex)
        np.add.at(out, G.source, np.conj(u) * v)
        return out

    def fx_inner(u, v):
        out = np.zeros(G.n_vertices, dtype=complex)
        np.add.at(out, cert.beta_inv[F.source], np.conj(u) * v)
        return out

    worst = 0.0
    for _ in range(samples):
        u, v = _rand_c(rng, G.n_edges), _rand_c(rng, G.n_edges)
        b, a = _rand_c(rng, F.n_vertices), _rand_c(rng, G.n_vertices)
        worst = max(worst, _maxabs(xe_inner(u, v) - fx_inner(Wt @ u, Wt @ v)))
        lhs = Wt @ (b[cert.beta[G.range]] * u * a[G.source])
        rhs = b[F.range] * (Wt @ u) * a[cert.beta_inv[F.source]]
        worst = max(worst, _maxabs(lhs - rhs))
    return worst


def build_certificate(G, F, graph_iso, rng=None, samples=100, tol=1e-10):
    """Certificate from a given graph isomorphism, verified before it is returned."""
    rng = np.random.default_rng(0) if rng is None else rng
    cert = MoritaCertificate(G, F, graph_iso)
    if not cert.verify(rng, samples, tol):
        raise VerificationError(f"certificate failed verification (residual {cert.max_residual})")
    return cert


def morita_decide(G, F, rng=None, samples=100, tol=1e-10):
    """Certificate of Morita equivalence of the two graph correspondences, or ``None``.

    The correspondences are equivalent exactly when the graphs are
    isomorphic; the certificate exhibits and checks the isomorphisms.
    """
    iso = graph_isomorphism(G, F)
    if iso is None:
        return None
    return build_certificate(G, F, iso, rng, samples, tol)


__all__ = [
    "BimoduleElement",
    "CollapseIso",
    "ConjugateBimodule",
    "ConjugationIso",
    "CorrespondenceIso",
    "DualMoritaIso",
    "EquivalenceBimodule",
    "MoritaCertificate",
    "PermutationBimodule",
    "TensorBimodule",
    "a_sigma",
    "a_sigma_collapse_iso",
    "a_sigma_inner",
    "a_sigma_left_inner",
    "bimodule_tensor",
    "build_certificate",
    "conjugation_iso",
    "derive_w_tilde",
    "dual_morita_iso",
    "gram_rank",
    "inverse_law_check",
    "morita_decide",
    "pairing_mA",
    "pairing_mB",
    "pairing_residuals",
    "unit_collapse_check",
]
