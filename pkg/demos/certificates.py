"""
Gauge equivalence with certificates
===================================

Two fields, possibly on relabelled graphs, are compared through their
holonomy maps. A positive answer comes with a certificate that anyone can
re-check from the raw fields; a negative one comes with witnesses.
"""
import json

import numpy as np

from holonomy import formats, groups, sampling
from holonomy.bundle import BundlePoint, GaugeField
from holonomy.reconstruction import EquivalenceCertificate, gauge_equivalent, verify_certificate

rng = np.random.default_rng(9)
G = groups.quaternion8()
g = sampling.random_graph(rng, 3, 6, extra_max=3)
f = sampling.random_field(rng, g, G)
u = BundlePoint(g.vertices[0], G.identity())

# a partner built to be holonomy-isomorphic: relabelled graph, automorphism, gauge
f2, u2, _ = sampling.holonomy_isomorphic_pair(rng, f, u)
cert = gauge_equivalent(f, u, f2, u2)
assert isinstance(cert, EquivalenceCertificate)
print("residuals:", cert.residuals)
print(verify_certificate(cert).to_text())

# the certificate survives serialization and is checked again from scratch
text = formats.dumps(formats.certificate_to_dict(cert))
again = formats.certificate_from_dict(json.loads(text))
print("re-verified from JSON:", verify_certificate(again).ok, f"({len(text)} bytes)")

# change one link of the target and the same certificate no longer holds
data = json.loads(text)
edge = sorted(data["dst"]["links"])[0]
data["dst"]["links"][edge] = "-1" if data["dst"]["links"][edge] != "-1" else "1"
print("tampered:", verify_certificate(formats.certificate_from_dict(data)).verdict)

# a flat field is never equivalent to one with nontrivial holonomy
flat = GaugeField(g, G, {e.name: G.identity() for e in g.edges})
res = gauge_equivalent(f, u, flat, BundlePoint(g.vertices[0], G.identity()))
print("vs flat:", res.reason, f"({len(res.witnesses)} witnesses)")
