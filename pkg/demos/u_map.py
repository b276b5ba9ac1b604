"""The U map from tensor powers of the dual correspondence.

Random intertwiners eta_1, ..., eta_n and vectors h are sent into
E^{(x)n} (x) H. The inner products of the images agree with the
balanced inner products computed through the commutant, and the images
span the whole target space.
"""

import numpy as np

from graphcorr.corpus import bundled_graph
from graphcorr.correspondence import CorrElement
from graphcorr.duality import (
    Intertwiner,
    Representation,
    balanced_inner,
    commutant_commutator_check,
    tensor_h_basis,
    u_map,
)
from graphcorr.oracles import random_intertwiner_span_rank

rng = np.random.default_rng(2)
g = bundled_graph("mixed4")
rep = Representation(g, [1, 2, 2, 1])
for n in (1, 2, 3):
    etas = [Intertwiner.random(rep, rng) for _ in range(n)]
    xis = [Intertwiner.random(rep, rng) for _ in range(n)]
    h, k = rng.standard_normal(rep.dim), rng.standard_normal(rep.dim)
    direct = np.vdot(u_map(etas, h), u_map(xis, k))
    err = abs(direct - balanced_inner(etas, h, xis, k))
    target = tensor_h_basis(rep, n).dim
    rank = random_intertwiner_span_rank(rep, rng, n, target + 4)
    print(f"n={n}: inner product error {err:.1e}, span {rank}/{target}")

eta = Intertwiner.random(rep, rng)
x = CorrElement(g, rng.standard_normal(g.n_edges))
print("commutator on safe levels:", commutant_commutator_check(eta, x, 3))
