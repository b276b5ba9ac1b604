"""Corners of the linking correspondence.

From a certificate between the 3-cycle and itself (rotating the vertices)
build the linking algebra L and the correspondence Z over it. On the
truncated Fock space of Z the projection p cuts out the Fock space of F
and q the Fock space of E tensored with X. Compressing creation operators
and the diagonal left action to these corners gives back the operators
of the two graphs.
"""

import numpy as np

from graphcorr.corpus import bundled_graph
from graphcorr.graph import GraphIsoCertificate
from graphcorr.linking import ZFockContext, ZTensor, build_z, corner_compression, z_fock_decomposition
from graphcorr.morita import build_certificate

rng = np.random.default_rng(1)
g = bundled_graph("threecycle")
rot = GraphIsoCertificate(beta={"v1": "v2", "v2": "v3", "v3": "v1"}, alpha={"e1": "e2", "e2": "e3", "e3": "e1"})
ctx = build_z(build_certificate(g, g, rot, rng))
print("Gram check of Z:", ctx.gram_report)

dec = z_fock_decomposition(ctx, 3)
print("corner dimensions per level:", dec["level_dims"])
print("path-count prediction:      ", dec["expected"])

fctx = ZFockContext(ctx, 3)
for level in (1, 2, 3):
    xi = ZTensor.random(ctx, level, rng)
    res = corner_compression(fctx, xi, ctx.random_linking(rng))
    print(f"level {level} tensor:", {k: f"{v:.1e}" for k, v in res.items()})
