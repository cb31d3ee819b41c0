"""
Wilson loops on a graph
=======================

Link variables on the theta graph (two vertices, three parallel edges) with
values in S3. We transport along walks, read off loop holonomies, and check
what a gauge transformation does to them.
"""
import numpy as np

from holonomy import groups, sampling
from holonomy.bundle import BundlePoint, apply_gauge, holonomy, holonomy_subbundle
from holonomy.paths import parse_walk

rng = np.random.default_rng(0)
S3 = groups.symmetric(3)
g = sampling.theta_graph()
field = sampling.random_field(rng, g, S3)
print("links:", {e: h.payload for e, h in field.links.items()})

# a loop at x: out along a, back along b
u = BundlePoint("x", S3.identity())
loop = parse_walk(g, "x: a b~")
print("holonomy of", loop, "=", holonomy(field, loop, u).payload)

# backtracks cancel, so a thin detour changes nothing
detour = parse_walk(g, "x: a c~ c b~")
print("with a detour:", holonomy(field, detour, u).payload)

# holonomy of a composite is the product, later loop on the left
other = parse_walk(g, "x: c b~")
both = parse_walk(g, "x: a b~ c b~")
print("H(other) H(loop) =", (holonomy(field, other, u) * holonomy(field, loop, u)).payload,
      " H(both) =", holonomy(field, both, u).payload)

# a gauge transformation conjugates the loop value by its frame at the base vertex
t = sampling.random_gauge(rng, g, S3)
gauged = apply_gauge(field, t)
tx = t.values["x"]
print("gauged:", holonomy(gauged, loop, u).payload,
      " t(x) H t(x)^-1 =", (tx * holonomy(field, loop, u) * tx.inverse()).payload)

# the points reachable from u by transport form a sub-bundle over the holonomy group
sub = holonomy_subbundle(field, u)
print("holonomy group order:", sub.phi_group.order, " fiber over y:", [h.payload for h in sub.fiber("y")])
