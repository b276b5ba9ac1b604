"""The linking algebra of a Morita certificate and the correspondence Z over it.

For a certificate between graphs ``G`` (correspondence ``E`` over ``A``)
and ``F`` (correspondence ``F`` over ``B``) the equivalence bimodule is
``X = B`` with left action through ``pi``. Coordinates:

=========  ==========================================  ==============
object     basis                                       indexed by
=========  ==========================================  ==============
``B``      ``delta_w``                                 F-vertices
``X~``     ``delta~_w``                                F-vertices
``X``      ``delta_w``                                 F-vertices
``A``      ``delta_v``                                 G-vertices
``F``      ``delta_f``                                 F-edges
``F(x)X~`` ``delta_f (x) delta~_{s(f)}``               F-edges
``E(x)X``  ``delta_e (x) delta_{beta(s(e))}``          G-edges
``E``      ``delta_e``                                 G-edges
=========  ==========================================  ==============

Right action, inner product and left action of ``L`` on ``Z`` are
implemented term by term from their block formulas, using ``W``, ``W~``
and the pairings. Independently, ``L`` is the direct sum over F-vertices
of 2x2 matrices and ``Z`` the direct sum over F-edges of 2x2 matrices;
:func:`matrix_model_residual` compares the two routes.
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement
from .correspondence import TensorElement, path_level
from .errors import MismatchError, VerificationError
from .fock import fock_basis, phi_infinity, tensor_creation
from .graph import count_paths
from .morita import gram_rank

RANK_THRESHOLD = 1e-8


def _rand_c(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _maxabs(a):
    return float(np.max(np.abs(np.asarray(a)), initial=0.0))


class LinkingElement:
    """``[[b, c~], [x, a]]`` with ``c~ = sum_w c_w delta~_w``."""

    __slots__ = ("ctx", "b", "c", "x", "a")

    def __init__(self, ctx, b, c, x, a):
        n, m = ctx.F.n_vertices, ctx.G.n_vertices
        self.ctx = ctx
        self.b = np.asarray(b, dtype=complex).reshape(n)
        self.c = np.asarray(c, dtype=complex).reshape(n)
        self.x = np.asarray(x, dtype=complex).reshape(n)
        self.a = np.asarray(a, dtype=complex).reshape(m)

    def coords(self):
        return np.concatenate([self.b, self.c, self.x, self.a])

    def __add__(self, o):
        return LinkingElement(self.ctx, self.b + o.b, self.c + o.c, self.x + o.x, self.a + o.a)

    def __sub__(self, o):
        return LinkingElement(self.ctx, self.b - o.b, self.c - o.c, self.x - o.x, self.a - o.a)


class ZElement:
    """``[[f1, g (F(x)X~)], [h (E(x)X), e2]]`` in corner coordinates."""

    __slots__ = ("ctx", "f1", "g", "h", "e2")

    def __init__(self, ctx, f1, g, h, e2):
        nf, ne = ctx.F.n_edges, ctx.G.n_edges
        self.ctx = ctx
        self.f1 = np.asarray(f1, dtype=complex).reshape(nf)
        self.g = np.asarray(g, dtype=complex).reshape(nf)
        self.h = np.asarray(h, dtype=complex).reshape(ne)
        self.e2 = np.asarray(e2, dtype=complex).reshape(ne)

    def coords(self):
        return np.concatenate([self.f1, self.g, self.h, self.e2])

    def __add__(self, o):
        return ZElement(self.ctx, self.f1 + o.f1, self.g + o.g, self.h + o.h, self.e2 + o.e2)

    def __sub__(self, o):
        return ZElement(self.ctx, self.f1 - o.f1, self.g - o.g, self.h - o.h, self.e2 - o.e2)


class ZContext:
    """Structure maps of ``L`` and ``Z`` for one verified certificate."""

    def __init__(self, cert):
        if cert.G.n_edges != cert.F.n_edges or cert.G.n_vertices != cert.F.n_vertices:
            raise MismatchError("certificate graphs differ in size")
        self.cert = cert
        self.G, self.F = cert.G, cert.F
        self.beta, self.beta_inv = cert.beta, cert.beta_inv
        self.alpha, self.alpha_inv = cert.alpha, cert.alpha_inv
        self.W, self.W_tilde = cert.W, cert.W_tilde
        self.gram_report = None

    # -- constructors -----------------------------------------------------
    def linking(self, b=None, c=None, x=None, a=None):
        n, m = self.F.n_vertices, self.G.n_vertices
        z = np.zeros
        return LinkingElement(
            self, z(n) if b is None else b, z(n) if c is None else c, z(n) if x is None else x, z(m) if a is None else a
        )

    def z(self, f1=None, g=None, h=None, e2=None):
        nf, ne = self.F.n_edges, self.G.n_edges
        z = np.zeros
        return ZElement(
            self, z(nf) if f1 is None else f1, z(nf) if g is None else g, z(ne) if h is None else h, z(ne) if e2 is None else e2
        )

    def linking_identity(self):
        return self.linking(b=np.ones(self.F.n_vertices), a=np.ones(self.G.n_vertices))

    def random_linking(self, rng):
        n, m = self.F.n_vertices, self.G.n_vertices
        return LinkingElement(self, _rand_c(rng, n), _rand_c(rng, n), _rand_c(rng, n), _rand_c(rng, m))

    def random_z(self, rng):
        nf, ne = self.F.n_edges, self.G.n_edges
        return ZElement(self, _rand_c(rng, nf), _rand_c(rng, nf), _rand_c(rng, ne), _rand_c(rng, ne))

    def linking_basis(self):
        k = 3 * self.F.n_vertices + self.G.n_vertices
        return [self.linking_from_coords(v) for v in np.eye(k)]

    def linking_from_coords(self, v):
        n = self.F.n_vertices
        return LinkingElement(self, v[:n], v[n:2 * n], v[2 * n:3 * n], v[3 * n:])

    def z_basis(self):
        nf, ne = self.F.n_edges, self.G.n_edges
        out = []
        for v in np.eye(2 * nf + 2 * ne):
            out.append(ZElement(self, v[:nf], v[nf:2 * nf], v[2 * nf:2 * nf + ne], v[2 * nf + ne:]))
        return out

    def z_rows(self):
        """Indices of ``z_basis`` in the first row (``f1``, ``g``) and the second (``h``, ``e2``)."""
        nf, ne = self.F.n_edges, self.G.n_edges
        return [list(range(2 * nf)), list(range(2 * nf, 2 * nf + 2 * ne))]

    def linking_rows(self):
        n, m = self.F.n_vertices, self.G.n_vertices
        return [list(range(2 * n)), list(range(2 * n, 3 * n + m))]

    # -- the algebra L ----------------------------------------------------
    def linking_mul(self, l1, l2):
        """Block product with ``c~ x' = m_B(c~ (x) x')`` and ``x c~' = m_A(x (x) c~')``."""
        cert = self.cert
        y1 = np.conj(l1.c)  # c~ = y~
        y2 = np.conj(l2.c)
        b = l1.b * l2.b + cert.x_right_inner(y1, l2.x)
        # b . y2~ = (y2 b*)~ ; y1~ . a' = (pi(a'*) y1)~
        c = np.conj(y2 * np.conj(l1.b)) + np.conj(cert.x_act(np.conj(l2.a), y1, np.ones_like(y1)))
        x = cert.x_act(np.ones_like(l1.a), l1.x, l2.b) + cert.x_act(l1.a, l2.x, np.ones_like(l2.x))
        a = cert.x_left_inner(l1.x, y2) + l1.a * l2.a
        return LinkingElement(self, b, c, x, a)

    def linking_adjoint(self, lam):
        """``[[b, y~], [x, a]]* = [[b*, x~], [y, a*]]``."""
        return LinkingElement(self, np.conj(lam.b), np.conj(lam.x), np.conj(lam.c), np.conj(lam.a))

    def tau(self, coords, part=None):
        """Faithful trace ``sum b + sum a`` on L-coordinates; ``part`` 0 or 1 keeps one corner."""
        n = self.F.n_vertices
        tb = coords[..., :n].sum(axis=-1)
        ta = coords[..., 3 * n:].sum(axis=-1)
        if part == 0:
            return tb
        if part == 1:
            return ta
        return tb + ta

    # -- Z: right action, inner product, left action ----------------------
    def z_right_action(self, z, lam):
        G, F, beta, beta_inv = self.G, self.F, self.beta, self.beta_inv
        sf = F.source
        bse = beta[G.source]
        # (1,1): f1 b + I_F (x) m_B(f2 (x) x~ (x) u): delta~_{s f} (x) u contracts to u_{s f}
        f1 = z.f1 * lam.b[sf] + z.g * lam.x[sf]
        # (1,2): f1 (x) z~ + f2 (x) x~ a, with delta~_{s f} . a = a_{beta^{-1} s f} delta~_{s f}
        g = z.f1 * lam.c[sf] + z.g * lam.a[beta_inv[sf]]
        # (2,1): e1 (x) y b + e2 (x) u, through delta_e (x) u = delta_e (x) delta_{beta s e} u
        h = z.h * lam.b[bse] + z.e2 * lam.x[bse]
        # (2,2): I_E (x) m_A(e1 (x) y (x) z~) + e2 a
        e2 = z.h * lam.c[bse] + z.e2 * lam.a[G.source]
        return ZElement(self, f1, g, h, e2)

    def z_inner(self, z, w):
        G, F, beta, beta_inv = self.G, self.F, self.beta, self.beta_inv
        n, m = F.n_vertices, G.n_vertices
        sf, bse = F.source, beta[G.source]

        def on(idx, vals, size):
            out = np.zeros(size, dtype=complex)
            np.add.at(out, idx, vals)
            return out

        # <f1, g1>_F + <e1 (x) y, k1 (x) u>_B
        b = on(sf, np.conj(z.f1) * w.f1, n) + on(bse, np.conj(z.h) * w.h, n)
        # <f1, g2> z~ + y~ <e1, k2>
        c = on(sf, np.conj(z.f1) * w.g, n) + on(bse, np.conj(z.h) * w.e2, n)
        # x <f2, g1> + <e2, k1> u
        x = on(sf, np.conj(z.g) * w.f1, n) + on(bse, np.conj(z.e2) * w.h, n)
        # <f2 (x) x~, g2 (x) z~>_A + <e2, k2>
        a = on(beta_inv[sf], np.conj(z.g) * w.g, m) + on(G.source, np.conj(z.e2) * w.e2, m)
        return LinkingElement(self, b, c, x, a)

    def z_left_action(self, lam, z):
        """``phi_Z(lam) z`` as the sum of the diagonal, ``x`` and ``y~`` parts."""
        G, F = self.G, self.F
        W, Wt = self.W, self.W_tilde
        # diagonal part: phi_F(b) and phi_E(a)
        f1 = lam.b[F.range] * z.f1
        g = lam.b[F.range] * z.g
        h = lam.a[G.range] * z.h
        e2 = lam.a[G.range] * z.e2
        # x part: W(x (x) f1) and (I_E (x) m_A)(W (x) I)(x (x) f2 (x) z~)
        h = h + W @ (lam.x[F.range] * z.f1)
        e2 = e2 + W @ (lam.x[F.range] * z.g)
        # y~ part: (m_B (x) I_F)(I (x) W^{-1})(y~ (x) e1 (x) v) and W~(y~ (x) e2)
        f1 = f1 + lam.c[F.range] * (W.T @ z.h)
        g = g + Wt @ (lam.c[self.beta[G.range]] * z.e2)
        return ZElement(self, f1, g, h, e2)

    # -- matrix model -----------------------------------------------------
    def linking_blocks(self, lam):
        """``L_w = [[b_w, c_w], [x_w, a_{beta^{-1} w}]]`` for each F-vertex ``w``."""
        out = np.zeros((self.F.n_vertices, 2, 2), dtype=complex)
        out[:, 0, 0], out[:, 0, 1], out[:, 1, 0] = lam.b, lam.c, lam.x
        out[:, 1, 1] = lam.a[self.beta_inv]
        return out

    def linking_from_blocks(self, blocks):
        return LinkingElement(self, blocks[:, 0, 0], blocks[:, 0, 1], blocks[:, 1, 0], blocks[:, 1, 1][self.beta])

    def z_blocks(self, z):
        """``Z_f = [[f1_f, g_f], [h_e, e2_e]]`` with ``f = alpha(e)``."""
        out = np.zeros((self.F.n_edges, 2, 2), dtype=complex)
        out[:, 0, 0], out[:, 0, 1] = z.f1, z.g
        out[:, 1, 0], out[:, 1, 1] = z.h[self.alpha_inv], z.e2[self.alpha_inv]
        return out

    def z_from_blocks(self, blocks):
        return ZElement(
            self, blocks[:, 0, 0], blocks[:, 0, 1], blocks[:, 1, 0][self.alpha], blocks[:, 1, 1][self.alpha]
        )


def build_z(cert, tol=1e-10):
    """``ZContext`` for ``cert``, after checking the L-valued Gram of the Z basis is PSD.

    The Gram ``[<z_i, z_j>]`` is assembled per F-vertex in the matrix
    model and its smallest eigenvalue must be ``>= -tol``. The report
    stored on the context also carries the scalar rank under ``tau``.
    """
    ctx = ZContext(cert)
    basis = ctx.z_basis()
    d = len(basis)
    grams = np.zeros((ctx.F.n_vertices, 2 * d, 2 * d), dtype=complex)
    scalar = np.zeros((d, d), dtype=complex)
    for i, zi in enumerate(basis):
        for j, zj in enumerate(basis):
            lam = ctx.z_inner(zi, zj)
            grams[:, 2 * i:2 * i + 2, 2 * j:2 * j + 2] = ctx.linking_blocks(lam)
            scalar[i, j] = ctx.tau(lam.coords())
    low = min(float(np.linalg.eigvalsh(gm)[0]) for gm in grams)
    if low < -tol:
        raise VerificationError(f"Z inner product is not positive (eigenvalue {low})")
    ctx.gram_report = {"min_eigenvalue": low, "rank": gram_rank(scalar, RANK_THRESHOLD), "size": d}
    return ctx


def z_left_action(lam, z):
    if lam.ctx is not z.ctx:
        raise MismatchError("context mismatch")
    return z.ctx.z_left_action(lam, z)


def matrix_model_residual(ctx, rng, trials=20):
    """Max deviation between the block formulas and the 2x2 matrix model."""
    F = ctx.F
    worst = 0.0
    for _ in range(trials):
        lam, mu = ctx.random_linking(rng), ctx.random_linking(rng)
        z, w = ctx.random_z(rng), ctx.random_z(rng)
        Lb, Mb = ctx.linking_blocks(lam), ctx.linking_blocks(mu)
        Zb, Wb = ctx.z_blocks(z), ctx.z_blocks(w)
        worst = max(worst, _maxabs(ctx.linking_blocks(ctx.linking_mul(lam, mu)) - Lb @ Mb))
        worst = max(worst, _maxabs(ctx.linking_blocks(ctx.linking_adjoint(lam)) - Lb.conj().transpose(0, 2, 1)))
        worst = max(worst, _maxabs(ctx.z_blocks(ctx.z_right_action(z, lam)) - Zb @ Lb[F.source]))
        worst = max(worst, _maxabs(ctx.z_blocks(ctx.z_left_action(lam, z)) - Lb[F.range] @ Zb))
        inner = np.zeros((F.n_vertices, 2, 2), dtype=complex)
        np.add.at(inner, F.source, Zb.conj().transpose(0, 2, 1) @ Wb)
        worst = max(worst, _maxabs(ctx.linking_blocks(ctx.z_inner(z, w)) - inner))
    return worst


def phi_z_residuals(ctx):
    """``phi_Z`` multiplicative and ``*``-preserving, on all basis elements."""
    Lb, Zb = ctx.linking_basis(), ctx.z_basis()
    mult = adj = 0.0
    for lam in Lb:
        lam_star = ctx.linking_adjoint(lam)
        for mu in Lb:
            prod = ctx.linking_mul(lam, mu)
            for z in Zb:
                lhs = ctx.z_left_action(prod, z)
                rhs = ctx.z_left_action(lam, ctx.z_left_action(mu, z))
                mult = max(mult, _maxabs(lhs.coords() - rhs.coords()))
        for z in Zb:
            for w in Zb:
                lhs = ctx.z_inner(ctx.z_left_action(lam, z), w)
                rhs = ctx.z_inner(z, ctx.z_left_action(lam_star, w))
                adj = max(adj, _maxabs(lhs.coords() - rhs.coords()))
    return {"multiplicative": mult, "adjoint": adj}


# ---------------------------------------------------------------------------
# tensor powers of Z via L-valued Gram recursion


def _coefficient_tensor(ctx):
    """``C[i, k, j, l]``: coordinate ``l`` of ``<z_i, phi_Z(l_k) z_j>``."""
    Zb, Lb = ctx.z_basis(), ctx.linking_basis()
    d, K = len(Zb), len(Lb)
    C = np.zeros((d, K, d, K), dtype=complex)
    for k, lam in enumerate(Lb):
        moved = [ctx.z_left_action(lam, z) for z in Zb]
        for i, zi in enumerate(Zb):
            for j in range(d):
                C[i, k, j] = ctx.z_inner(zi, moved[j]).coords()
    return C


def _reduce(ctx, gamma):
    """Replace the spanning set by a tau-orthonormal basis of its span."""
    M = ctx.tau(gamma)
    M = (M + M.conj().T) / 2
    w, U = np.linalg.eigh(M)
    keep = w > RANK_THRESHOLD * max(1.0, float(w[-1]) if w.size else 1.0)
    V = U[:, keep] / np.sqrt(w[keep])
    return np.einsum("jk,jlq,lm->kmq", V.conj(), gamma, V)


def z_fock_decomposition(ctx, N, force=False):
    """Corner dimensions of ``F_N(Z)`` from Gram ranks, against path-count predictions.

    Level ``n`` of corner ``(i, j)`` is ``phi_Z(P_i) Z^{(x)n} P_j``; its
    dimension is the rank of ``tau_j(<s P_j, s' P_j>)`` over elementary
    tensors ``s`` whose first factor lies in row ``i``. The spanning set is
    ``L`` at level 0 and grows by appending a ``Z`` basis element, with
    ``<s (x) z, s' (x) z'> = <z, <s, s'> . z'>``; it is reduced to a basis
    after every level.

    Raises
    ------
    VerificationError
        If any corner dimension differs from its prediction.
    """
    if N > 3 and not force:
        raise MismatchError("N > 3 needs force=True")
    C = _coefficient_tensor(ctx)
    d = C.shape[0]
    Lb = ctx.linking_basis()
    dims = {key: [] for key in ("11", "12", "21", "22")}
    for row, idx in enumerate(ctx.linking_rows()):
        gamma = np.array(
            [[ctx.linking_mul(ctx.linking_adjoint(Lb[i]), Lb[j]).coords() for j in idx] for i in idx]
        )
        for n in range(N + 1):
            if n:
                S = gamma.shape[0]
                gamma = np.einsum("abk,ikjl->aibjl", gamma, C).reshape(S * d, S * d, -1)
            for col in (0, 1):
                dims[f"{row + 1}{col + 1}"].append(gram_rank(ctx.tau(gamma, part=col), RANK_THRESHOLD))
            gamma = _reduce(ctx, gamma)
    pf = [count_paths(ctx.F, n) for n in range(N + 1)]
    pe = [count_paths(ctx.G, n) for n in range(N + 1)]
    expected = {"11": pf, "12": pf, "21": pe, "22": pe}
    report = {
        "level_dims": dims,
        "expected": expected,
        "totals": {k: int(sum(v)) for k, v in dims.items()},
        "fock_dims": {
            "F": int(sum(pf)),
            "F_Xt": int(sum(pf)),
            "E_X": int(sum(pe)),
            "E": int(sum(pe)),
        },
        "match": dims == expected,
    }
    if not report["match"]:
        raise VerificationError(f"corner dimensions {dims} differ from {expected}")
    return report


# ---------------------------------------------------------------------------
# truncated Fock space of Z: first column and corner identities


class ZTensor:
    """An element of ``Z^{(x)m}`` in the matrix model: one 2x2 block per F-path of length ``m``."""

    def __init__(self, ctx, level, blocks):
        n = len(path_level(ctx.F, level))
        blocks = np.asarray(blocks, dtype=complex)
        if level < 1:
            raise MismatchError("tensor level must be >= 1")
        if blocks.shape != (n, 2, 2):
            raise MismatchError(f"expected {(n, 2, 2)} blocks, got {blocks.shape}")
        self.ctx, self.level, self.blocks = ctx, level, blocks

    @classmethod
    def random(cls, ctx, level, rng):
        n = len(path_level(ctx.F, level))
        return cls(ctx, level, _rand_c(rng, n, 2, 2))

    @classmethod
    def elementary(cls, ctx, zs):
        """``z_1 (x) ... (x) z_m``: the product of the factor blocks along each path."""
        lvl = path_level(ctx.F, len(zs))
        blocks = np.tile(np.eye(2, dtype=complex), (len(lvl), 1, 1))
        for k, z in enumerate(zs):
            blocks = blocks @ ctx.z_blocks(z)[lvl.edges[:, k]]
        return cls(ctx, len(zs), blocks)

    def tensor(self, other):
        F = self.ctx.F
        a, b = path_level(F, self.level), path_level(F, other.level)
        out = path_level(F, self.level + other.level)
        blocks = np.zeros((len(out), 2, 2), dtype=complex)
        for i in range(len(a)):
            head = tuple(int(t) for t in a.edges[i])
            for j in range(len(b)):
                t = out.find(head + tuple(int(s) for s in b.edges[j]))
                if t is not None:
                    blocks[t] = self.blocks[i] @ other.blocks[j]
        return ZTensor(self.ctx, self.level + other.level, blocks)

    def h1(self):
        """Upper-left corner as an ``F``-tensor."""
        return TensorElement(self.ctx.F, self.level, self.blocks[:, 0, 0])

    def k2(self):
        """Lower-right corner as an ``E``-tensor, via ``alpha^{-1}`` on paths."""
        ctx = self.ctx
        lf, lg = path_level(ctx.F, self.level), path_level(ctx.G, self.level)
        coeffs = np.zeros(len(lg), dtype=complex)
        for i, row in enumerate(lf.edges):
            coeffs[lg.find(tuple(int(ctx.alpha_inv[f]) for f in row))] = self.blocks[i, 1, 1]
        return TensorElement(ctx.G, self.level, coeffs)


def w_level(ctx, k):
    """``W_k: X (x) F^{(x)k} -> E^{(x)k} (x) X`` with ``W_k = (I_E (x) W_{k-1})(W_1 (x) I)``.

    Level 0 identifies ``X`` coordinate ``w`` with ``A (x) X`` at vertex
    ``beta^{-1}(w)``.
    """
    G, F = ctx.G, ctx.F
    if k == 0:
        M = np.zeros((G.n_vertices, F.n_vertices))
        M[ctx.beta_inv, np.arange(F.n_vertices)] = 1.0
        return M
    lg, lf = path_level(G, k), path_level(F, k)
    prev = w_level(ctx, k - 1) if k > 1 else None
    M = ctx.W[lg.edges[:, 0][:, None], lf.edges[:, 0][None, :]].astype(complex)
    if prev is not None:
        tg = path_level(G, k - 1)
        tf = path_level(F, k - 1)
        rg = np.array([tg.find(tuple(int(t) for t in row[1:])) for row in lg.edges], dtype=np.int64)
        rf = np.array([tf.find(tuple(int(t) for t in row[1:])) for row in lf.edges], dtype=np.int64)
        M = M * prev[rg[:, None], rf[None, :]]
    return M


class ZFockContext:
    """First column ``F'_N(Z) = [F_N(F); F_N(E) (x) X]`` in two coordinate systems.

    Matrix-model coordinates stack the F-path basis twice (top: ``F``,
    bottom: ``E (x) X`` transported along ``W_l``). ``transport`` maps the
    bottom half to ``E``-path coordinates.
    """

    def __init__(self, ctx, N):
        self.ctx, self.N = ctx, N
        self.fb = fock_basis(ctx.F, N)
        self.gb = fock_basis(ctx.G, N)
        D = self.fb.dim
        T = np.zeros((self.gb.dim, D), dtype=complex)
        for n in range(N + 1):
            T[self.gb.level_slice(n), self.fb.level_slice(n)] = w_level(ctx, n)
        self.transport = T
        self.dim = 2 * D
        self.p = np.zeros((2 * D, 2 * D))
        self.p[:D, :D] = np.eye(D)
        self.q = np.eye(2 * D) - self.p
        self.corner_dims = {"p": D, "q": self.gb.dim}

    def creation(self, xi):
        """``T_xi`` on the first column, with levels above ``N`` sent to zero."""
        F, fb, D = self.ctx.F, self.fb, self.fb.dim
        M = np.zeros((2 * D, 2 * D), dtype=complex)
        head = path_level(F, xi.level)
        by_source = {}
        for i in range(len(head)):
            by_source.setdefault(int(head.last_source[i]), []).append(i)
        for k in range(self.N - xi.level + 1):
            src, dst = fb.levels[k], fb.levels[k + xi.level]
            for j in range(len(src)):
                tail = tuple(int(t) for t in src.edges[j])
                col = int(fb.offsets[k]) + j
                for i in by_source.get(int(src.first_range[j]), []):
                    row = int(fb.offsets[k + xi.level]) + dst.find(tuple(int(t) for t in head.edges[i]) + tail)
                    M[np.ix_([row, D + row], [col, D + col])] += xi.blocks[i]
        return M

    def phi_inf(self, lam):
        D = self.fb.dim
        Lb = self.ctx.linking_blocks(lam)[self.fb.first_range]
        M = np.zeros((2 * D, 2 * D), dtype=complex)
        idx = np.arange(D)
        M[idx, idx] = Lb[:, 0, 0]
        M[idx, D + idx] = Lb[:, 0, 1]
        M[D + idx, idx] = Lb[:, 1, 0]
        M[D + idx, D + idx] = Lb[:, 1, 1]
        return M

    def p_corner(self, M):
        D = self.fb.dim
        return M[:D, :D]

    def q_corner(self, M):
        """``q M q`` in ``E``-path coordinates."""
        D = self.fb.dim
        T = self.transport
        return T @ M[D:, D:] @ T.conj().T


def corner_compression(fctx, xi, lam, columns=None):
    """Deviations of the four corner identities.

    ``p T_xi p = T_{h1}``, ``q T_xi q = T_{k2} (x) I_X``,
    ``p phi_inf(lam) p = phi_inf(b)`` and
    ``q phi_inf(lam) q = phi_inf(a) (x) I_X``. The creation identities are
    compared on input levels ``<= N - level(xi)``. ``columns`` restricts
    the comparison to chosen F-side basis indices and their transported
    E-side counterparts.
    """
    ctx, N = fctx.ctx, fctx.N
    if xi.level > N:
        raise MismatchError("tensor level exceeds truncation")
    T = fctx.creation(xi)
    P = fctx.phi_inf(lam)
    sel_f = np.ones(fctx.fb.dim, dtype=bool)
    if columns is not None:
        sel_f[:] = False
        sel_f[list(columns)] = True
    sel_g = np.abs(fctx.transport[:, sel_f]).sum(axis=1) > 0
    safe_f = sel_f & (fctx.fb.level_of <= N - xi.level)
    safe_g = sel_g & (fctx.gb.level_of <= N - xi.level)
    ref_p = tensor_creation(xi.h1(), N).to_dense()
    ref_q = tensor_creation(xi.k2(), N).to_dense()
    ref_b = phi_infinity(AlgebraElement(ctx.F, lam.b), N).to_dense()
    ref_a = phi_infinity(AlgebraElement(ctx.G, lam.a), N).to_dense()
    return {
        "pTp": _maxabs((fctx.p_corner(T) - ref_p)[:, safe_f]),
        "qTq": _maxabs((fctx.q_corner(T) - ref_q)[:, safe_g]),
        "pPhip": _maxabs((fctx.p_corner(P) - ref_b)[:, sel_f]),
        "qPhiq": _maxabs((fctx.q_corner(P) - ref_a)[:, sel_g]),
    }


def product_compression(fctx, xi1, xi2):
    """``p T_xi1 T_xi2 p`` against ``T`` of the upper-left corner of ``xi1 (x) xi2``."""
    N = fctx.N
    m = xi1.level + xi2.level
    if m > N:
        raise MismatchError("product level exceeds truncation")
    lhs = fctx.p_corner(fctx.creation(xi1) @ fctx.creation(xi2))
    rhs = tensor_creation(xi1.tensor(xi2).h1(), N).to_dense()
    safe = fctx.fb.level_of <= N - m
    return _maxabs((lhs - rhs)[:, safe])


def invariance_residual(ctx, rng, trials=10):
    """Largest second-column component produced from first-column inputs.

    ``phi_Z(lam)`` is applied through the block formulas to ``Z`` elements
    whose second column (``g``, ``e2``) vanishes; ``xi (x) z`` is formed
    for random ``xi`` in ``Z`` and the same kind of ``z``.
    """
    worst = 0.0
    for _ in range(trials):
        lam = ctx.random_linking(rng)
        z = ctx.random_z(rng)
        z = ctx.z(f1=z.f1, h=z.h)
        out = ctx.z_left_action(lam, z)
        worst = max(worst, _maxabs(out.g), _maxabs(out.e2))
        prod = ZTensor.elementary(ctx, [ctx.random_z(rng), z])
        worst = max(worst, _maxabs(prod.blocks[:, :, 1]))
    return worst


def projection_residuals(fctx):
    """``p + q = I`` and ``p q = 0`` on the first column."""
    I = np.eye(fctx.dim)
    return {"sum": _maxabs(fctx.p + fctx.q - I), "product": _maxabs(fctx.p @ fctx.q)}


def linking_report(cert, N, rng, trials=50):
    """All linking checks for one certificate, as one JSON-ready dictionary."""
    ctx = build_z(cert)
    fctx = ZFockContext(ctx, N)
    corner = {"pTp": 0.0, "qTq": 0.0, "pPhip": 0.0, "qPhiq": 0.0}
    prod = 0.0
    for _ in range(trials):
        m = int(rng.integers(1, N + 1)) if N >= 1 else 1
        xi = ZTensor.random(ctx, m, rng)
        res = corner_compression(fctx, xi, ctx.random_linking(rng))
        for k in corner:
            corner[k] = max(corner[k], res[k])
        if N >= 2:
            prod = max(prod, product_compression(fctx, ZTensor.random(ctx, 1, rng), ZTensor.random(ctx, 1, rng)))
    fock = z_fock_decomposition(ctx, min(N, 3))
    return {
        "corner_residual_max": max(corner.values()),
        "corner_residuals": corner,
        "product_residual": prod,
        "fock_dims": fock["fock_dims"],
        "fock_level_dims": fock["level_dims"],
        "fock_match": fock["match"],
        "invariance_residual": invariance_residual(ctx, rng),
        "matrix_model_residual": matrix_model_residual(ctx, rng),
        "projections": projection_residuals(fctx),
        "gram": ctx.gram_report,
    }
