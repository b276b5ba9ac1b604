"""Ball membership on small graphs.

For the single loop with multiplicity 1 the ball is the open unit disc.
For a vertex with two loops it is the open Euclidean ball in C^2. For a
2-cycle each vertex constrains only the edge that ends there.
"""

import numpy as np

from graphcorr.corpus import bundled_graph
from graphcorr.duality import Intertwiner, Representation, ball_membership


def show(label, eta):
    inside, norm = ball_membership(eta)
    print(f"  {label:<28} norm={norm:.6f} inside={inside}")


loop = Representation(bundled_graph("loop"))
print("single loop, m = 1")
for z in (0.5, 0.999, 1.0, 0.6 + 0.8j, 1.2j):
    show(f"z = {z}", Intertwiner(loop, [np.array([[z]])]))

two = Representation(bundled_graph("two_loops"))
print("two loops at one vertex")
show("(0.6, 0.79)", Intertwiner(two, [np.array([[0.6]]), np.array([[0.79]])]))
show("(0.6, 0.8)", Intertwiner(two, [np.array([[0.6]]), np.array([[0.8]])]))

cyc = Representation(bundled_graph("twocycle"), [1, 2])
print("2-cycle, m = (1, 2)")
blocks = [np.array([[0.9], [0.0]]), np.array([[0.3, 0.4]])]
show("T_e1 = (0.9, 0)^t, T_e2 = (0.3 0.4)", Intertwiner(cyc, blocks))
blocks = [np.array([[0.9], [1.1]]), np.array([[0.3, 0.4]])]
show("T_e1 = (0.9, 1.1)^t", Intertwiner(cyc, blocks))
