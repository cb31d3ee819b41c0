"""
Arrows between holonomy maps
============================

An arrow carries a graph isomorphism, a basepoint-change walk and a group
automorphism. Two categories share these arrows: one identifies walks up to
backtracking, the other up to the holonomy translation they induce. The
quotient between them is full, but it forgets information and has no section.
"""
import numpy as np

from holonomy import groups, sampling
from holonomy.category import (compose_iso, identity_iso, invert_iso, lift_star, make_iso,
                               q_not_faithful_witness, q_not_split_witness, quotient_Q)
from holonomy.reconstruction import apply_C

rng = np.random.default_rng(11)
S4 = groups.symmetric(4)
H = sampling.random_holonomy_map(rng, sampling.random_graph(rng, 3, 6), S4)

H2, psi, alpha, phi = sampling.random_arrow(rng, H)
a = make_iso(psi, alpha, phi, H, H2)
print("arrow alpha:", alpha, " canonical:", a.alpha)
print("a^-1 a is the identity:", compose_iso(invert_iso(a), a) == identity_iso(H))

# the reconstruction functor sends the arrow to a connection-preserving bundle map
m = apply_C(a)
print("frames of C(a):", {v: h.payload for v, h in sorted(m.frames.items())})

# the quotient Q collapses distinct walk classes with the same translation
w = q_not_faithful_witness(sampling.theta_graph(), groups.cyclic(2))
print("distinct upstairs, equal downstairs:", w["star_arrows_distinct"] and w["q_images_equal"])

rep = q_not_split_witness(sampling.figure_eight(), groups.quaternion8())
print(rep.to_text())

# every Hol arrow lifts, and the lift maps back onto it
print("Q(lift(a)) == a:", quotient_Q(lift_star(a)) == a)
