"""
Continuum potentials and their lattice shadows
==============================================

A gauge potential on the plane gives holonomies of closed curves through a
path-ordered exponential. For U(1) the answer is the enclosed flux, which we
can compare against; lattice link variables recover it as the mesh shrinks.
"""
import numpy as np

from holonomy import groups, smooth

# a = (0.3 + 0.2x - 0.7y, -0.1 + 1.1x + 0.4y) has constant curl 1.8
A = smooth.GaugePotential(2, "U1", "linear", [[0.3, 0.2, -0.7], [-0.1, 1.1, 0.4]])
rect = smooth.polygon((0, 0), (1, 0), (1, 0.5), (0, 0.5))
h = smooth.transport_ode(A, rect, 10_000)
print("rectangle holonomy angle:", h.value, " expected:", (-1.8 * 0.5) % (2 * np.pi))

# midpoint stepping is second order on curved paths; left-point is first order
crv = smooth.curve(smooth.cubic((0, 0), (0.6, 0.9), (1.1, -0.4), (0.3, 0.2)))
for scheme in ("midpoint", "left"):
    slope, errs = smooth.convergence_order(A, crv, scheme=scheme)
    print(f"{scheme:>8}: slope {slope:.3f}, errors {np.array(errs)}")

# SU(2) with a constant potential: transport around a loop and back is the identity
B = smooth.GaugePotential(2, "SU2", "constant", [[0.3, -0.5, 0.2], [0.7, 0.1, -0.4]])
loop = smooth.random_polygon_loop(np.random.default_rng(1), (0, 0), curved=True)
there = smooth.transport_ode(B, loop, 4096)
back = smooth.transport_ode(B, loop.inverted(), 4096)
print("SU2 loop:", np.round(there.payload, 6), " distance of round trip to 1:",
      groups.distance(there * back, B.descriptor.identity()))

# the holonomy of circles through the base point varies smoothly with the radius
print(smooth.circle_flux_derivative(A, smooth.circles()).to_text())

# lattice Wilson loops converge to the continuum value; a linear potential is exact
# on every mesh, so take a quadratic one
P = smooth.GaugePotential(2, "U1", "polynomial", [[0.3, 0.2, -0.7, 0.5, 0.1, -0.2],
                                                  [-0.1, 1.1, 0.4, 0.3, -0.6, 0.2]])
print(smooth.lattice_convergence(P).to_text())
