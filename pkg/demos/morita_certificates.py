"""Deciding Morita equivalence of graph correspondences.

Two graph correspondences are equivalent exactly when the graphs are
isomorphic. A positive answer comes with a certificate: the vertex and
edge bijections, the induced correspondence isomorphism, and the chain
map W between the balanced tensor products, each checked numerically.
"""

import json

import numpy as np

from graphcorr.corpus import bundled_graph, shuffled_copy
from graphcorr.graph import validate_graph
from graphcorr.morita import morita_decide

rng = np.random.default_rng(0)

g = bundled_graph("mixed4")
h = shuffled_copy(g, rng)
print("mixed4 against a renamed, reordered copy")
cert = morita_decide(g, h, rng)
print(json.dumps(cert.to_dict(), indent=2, sort_keys=True))

print("\nloop against 2-cycle:", morita_decide(bundled_graph("loop"), bundled_graph("twocycle")))

# same in- and out-degrees everywhere, different cycle structure
c4 = validate_graph({"vertices": list("abcd"), "edges": [["1", "a", "b"], ["2", "b", "c"], ["3", "c", "d"], ["4", "d", "a"]]})
c22 = validate_graph({"vertices": list("abcd"), "edges": [["1", "a", "b"], ["2", "b", "a"], ["3", "c", "d"], ["4", "d", "c"]]})
print("4-cycle against two 2-cycles:", morita_decide(c4, c22))
