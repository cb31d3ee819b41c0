"""
From holonomies back to a field
===============================

A holonomy map assigns a group element to each chord of a spanning tree. The
spanning-tree gauge turns it back into link variables: tree links are the
identity, each chord carries its image. Inducing the map again returns the
input exactly.
"""
import numpy as np

from holonomy import groups, sampling
from holonomy.bundle import BundlePoint
from holonomy.category import induced_holonomy_map
from holonomy.reconstruction import basepoint_fixing_gauge, reconstruct

rng = np.random.default_rng(2)
G = groups.dihedral(4)
g = sampling.random_graph(rng, 5, 8)
print(f"{len(g.vertices)} vertices, {len(g.edges)} edges, {g.betti} independent loops")

H = sampling.random_holonomy_map(rng, g, G)
print("tree edges:", sorted(H.tree.edges))
print("chord images:", {e: h.payload for e, h in sorted(H.images.items())})

R = reconstruct(H)
back = induced_holonomy_map(R.field, R.basepoint, H.tree)
print("round trip exact:", back == H)

# any other field with the same holonomy map differs by a gauge that fixes the base frame
f = sampling.random_field(rng, g, G)
u = BundlePoint(g.vertices[0], G.identity())
Hf = induced_holonomy_map(f, u)
Rf = reconstruct(Hf)
t = basepoint_fixing_gauge(Rf.field, f, u.vertex)
print("relating gauge found:", t is not None, " frame at base:", t.values[u.vertex].payload)
