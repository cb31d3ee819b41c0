"""Seeded property suites, one per result being exercised.

Every suite takes ``(seed, trials, tol)`` and returns a Report whose JSON form
depends only on those arguments.  ``trials=None`` means the acceptance size.
"""
from __future__ import annotations

import json
import math
from typing import Callable

import numpy as np

from . import formats, groups, sampling
from .bundle import (BundleMorphism, BundlePoint, GaugeField, _right_multiplying_transport, check_transport_laws,
                     holonomy, transport)
from .category import (compose_iso, compose_star, identity_iso, identity_star, induced_holonomy_map,
                       invert_iso, invert_star, lift_star, make_iso, make_star_iso, q_not_faithful_witness,
                       q_not_split_witness, quotient_Q)
from .errors import DiagramViolation
from .groups import GroupDescriptor, GroupHom
from .paths import GraphIso, compose, compose_all, invert, reduce, spanning_tree
from .reconstruction import (EquivalenceCertificate, Refutation, apply_C, basepoint_fixing_gauge,
                             essential_surjectivity_check, extract_hol_iso, faithfulness_check,
                             gauge_equivalent, reconstruct, verify_certificate)
from .report import Report, trial_rng


def group_kinds(tol: float = groups.DEFAULT_TOL) -> list[GroupDescriptor]:
    return [groups.cyclic(6), groups.symmetric(4), groups.dihedral(4), groups.quaternion8(),
            groups.U1(tol), groups.SU2(tol)]


def _kind(t: int, tol: float) -> GroupDescriptor:
    kinds = group_kinds(tol)
    return kinds[t % len(kinds)]


def _close(a, b, tol: float) -> bool:
    """Morphism or element equality: exact for finite groups, within tol otherwise."""
    if isinstance(a, BundleMorphism):
        return a.distance(b) <= (0.0 if a.phi.target.is_finite else tol)
    return groups.distance(a, b) <= (0.0 if a.group.is_finite else tol)


# --------------------------------------------------------------------------
# discrete bundle


def lemma1(seed: int = 0, trials: int | None = None, tol: float = groups.DEFAULT_TOL,
           block: int = 10) -> Report:
    """Transport laws (a)-(d) per group kind; a fresh random field every ``block`` trials."""
    trials = 1000 if trials is None else trials
    rep = Report("lemma1", seed=seed)
    for G in group_kinds(tol):
        name = repr(G)
        for b in range(math.ceil(trials / block)):
            rng = trial_rng(seed, "lemma1-field:" + name, b)
            field = sampling.random_field(rng, sampling.random_graph(rng), G)
            sub = check_transport_laws(field, min(block, trials - b * block), int(rng.integers(2**62)))
            rep.merge(sub, prefix=name + ":")
    # the harness must notice a transport that breaks right-equivariance
    rng = trial_rng(seed, "lemma1-fault", 0)
    G = groups.symmetric(4)
    field = sampling.random_field(rng, sampling.random_graph(rng, 3, 8), G)
    fault = check_transport_laws(field, 50, seed, transport_fn=_right_multiplying_transport)
    rep.notes["fault_fixture_failures"] = len(fault.failures)
    rep.check(len(fault.failures) > 0, prop="fault_fixture_detected")
    return rep


def lemma2(seed: int = 0, trials: int | None = None, tol: float = groups.DEFAULT_TOL) -> Report:
    """Holonomy under basepoint change along alpha, and the conjugation law for u.g."""
    trials = 500 if trials is None else trials
    rep = Report("lemma2", seed=seed)
    for G in group_kinds(tol):
        name = repr(G)
        for t in range(trials):
            rng = trial_rng(seed, "lemma2:" + name, t)
            g = sampling.random_graph(rng)
            field = sampling.random_field(rng, g, G)
            tree = spanning_tree(g)
            x = g.vertices[int(rng.integers(len(g.vertices)))]
            y = g.vertices[int(rng.integers(len(g.vertices)))]
            u = BundlePoint(x, G.random(rng))
            gamma = sampling.random_loop(rng, g, tree, x, int(rng.integers(0, 12)))
            alpha = sampling.random_walk_to(rng, g, tree, y, x, int(rng.integers(0, 8)))
            v = transport(field, invert(alpha), u)
            lhs = holonomy(field, gamma, u)
            rhs = holonomy(field, compose_all(invert(alpha), gamma, alpha), v)
            data = {"group": name, "gamma": str(gamma), "alpha": str(alpha)}
            if not G.is_finite:
                rep.residual(name + ":lemma2", groups.distance(lhs, rhs))
            rep.check(_close(lhs, rhs, tol), t, prop="lemma2", **data)

            h = G.random(rng)
            moved = holonomy(field, gamma, u.act(h))
            expected = h.inverse() * lhs * h
            if not G.is_finite:
                rep.residual(name + ":conjugation", groups.distance(moved, expected))
            rep.check(_close(moved, expected, tol), t, prop="basepoint_conjugation", h=repr(h.payload), **data)
            rep.trials += 1
    return rep


# --------------------------------------------------------------------------
# groupoids and the quotient functor


def _arrow(rng, H, star: bool, walk_len: int = 6):
    H2, psi, alpha, phi = sampling.random_arrow(rng, H, walk_len=walk_len)
    maker = make_star_iso if star else make_iso
    return maker(psi, alpha, phi, H, H2)


def _thin_variant(rng, a, star: bool):
    """The same arrow built from another representative of its class."""
    H = a.src
    alpha = a.alpha if star else a.witness
    w = sampling.insert_spur(rng, alpha)
    if not star and H.group.is_finite:
        loop = sampling.random_loop(rng, H.graph, H.tree, H.base, int(rng.integers(0, 6)))
        k = H.evaluate(loop).order()
        base = loop
        for _ in range(k - 1):
            loop = compose(base, loop)
        w = compose(loop, w)
    if star:
        return make_star_iso(a.psi, reduce(w), a.phi, a.src, a.dst)
    return make_iso(a.psi, w, a.phi, a.src, a.dst)


def prop1(seed: int = 0, trials: int | None = None, tol: float = groups.DEFAULT_TOL) -> Report:
    """Groupoid laws in Hol and Hol* on seeded composable triples."""
    trials = 200 if trials is None else trials
    rep = Report("prop1", seed=seed)
    for t in range(trials):
        rng = trial_rng(seed, "prop1", t)
        G = _kind(t, tol)
        H = sampling.random_holonomy_map(rng, sampling.random_graph(rng, 1, 7), G)
        for star, (comp, inv, ident) in ((False, (compose_iso, invert_iso, identity_iso)),
                                         (True, (compose_star, invert_star, identity_star))):
            cat = "hol*" if star else "hol"
            a = _arrow(rng, H, star)
            b = _arrow(rng, a.dst, star)
            c = _arrow(rng, b.dst, star)
            data = {"group": repr(G), "category": cat}
            rep.check(comp(c, comp(b, a)) == comp(comp(c, b), a), t, prop="associativity", **data)
            rep.check(comp(a, ident(a.src)) == a and comp(ident(a.dst), a) == a, t, prop="identity", **data)
            rep.check(comp(inv(a), a) == ident(a.src) and comp(a, inv(a)) == ident(a.dst), t,
                      prop="inverse", **data)
            a2 = _thin_variant(rng, a, star)
            congruent = a2 == a and comp(b, a2) == comp(b, a) and inv(a2) == inv(a)
            rep.check(congruent, t, prop="congruence", **data)
        rep.trials += 1
    return rep


def prop2(seed: int = 0, trials: int | None = None, tol: float = groups.DEFAULT_TOL) -> Report:
    """Q is a full functor; it is not faithful and does not split (witnesses on fixtures)."""
    trials = 200 if trials is None else trials
    rep = Report("prop2", seed=seed)
    for t in range(trials):
        rng = trial_rng(seed, "prop2", t)
        G = _kind(t, tol)
        H = sampling.random_holonomy_map(rng, sampling.random_graph(rng, 1, 7), G)
        a = _arrow(rng, H, True)
        b = _arrow(rng, a.dst, True)
        data = {"group": repr(G)}
        rep.check(quotient_Q(compose_star(b, a)) == compose_iso(quotient_Q(b), quotient_Q(a)), t,
                  prop="Q_composition", **data)
        rep.check(quotient_Q(identity_star(H)) == identity_iso(H), t, prop="Q_identity", **data)
        rep.check(quotient_Q(invert_star(a)) == invert_iso(quotient_Q(a)), t, prop="Q_inverse", **data)
        qa = quotient_Q(a)
        rep.check(quotient_Q(lift_star(qa)) == qa, t, prop="Q_full", **data)
        rep.trials += 1
    G = groups.symmetric(3)
    for name, graph in (("theta", sampling.theta_graph()), ("figure_eight", sampling.figure_eight())):
        w = q_not_faithful_witness(graph, G)
        rep.notes[f"{name}:not_faithful"] = w
        rep.check(w["star_arrows_distinct"] and w["q_images_equal"], prop="not_faithful_witness", graph=name)
        split = q_not_split_witness(graph, G)
        rep.merge(split, prefix=f"{name}:")
        rep.check(split.notes["hol_composite_is_identity"] and split.ok, prop="not_split_witness", graph=name)
    return rep


# --------------------------------------------------------------------------
# reconstruction


def _exhaustive_fields(g, G):
    names = [e.name for e in g.edges]
    elems = G.elements()
    for idx in np.ndindex(*([len(elems)] * len(names))):
        yield GaugeField(g, G, {n: elems[i] for n, i in zip(names, idx)})


def _small_graphs():
    from .paths import Edge, Graph

    yield "figure_eight", sampling.figure_eight()
    yield "theta", sampling.theta_graph()
    yield "path3", sampling.path_graph(3)
    yield "triangle_loop", Graph(["v0", "v1", "v2"], [Edge("a", "v0", "v1"), Edge("b", "v1", "v2"),
                                                       Edge("c", "v2", "v0"), Edge("d", "v1", "v1")])
    yield "pentagon", Graph([f"v{i}" for i in range(5)], [Edge(f"e{i}", f"v{i}", f"v{(i + 1) % 5}") for i in range(5)])


def roundtrip(seed: int = 0, trials: int | None = None, tol: float = groups.DEFAULT_TOL,
              exhaustive: bool = True) -> Report:
    """Induced map of the reconstruction equals the input; uniqueness up to basepoint-fixing gauge.

    Uniqueness is checked exhaustively: every field on the small graphs is
    compared with the reconstruction of its own holonomy map (a star
    comparison suffices since "related by a basepoint-fixing gauge" is an
    equivalence relation), and within every class of at most 4 fields all
    pairs are compared directly.
    """
    trials = 300 if trials is None else trials
    rep = Report("roundtrip", seed=seed)
    finite = [groups.cyclic(6), groups.symmetric(4), groups.dihedral(4), groups.quaternion8(),
              groups.cyclic(24), groups.dihedral(12)]
    for t in range(trials):
        rng = trial_rng(seed, "roundtrip", t)
        G = finite[t % len(finite)]
        H = sampling.random_holonomy_map(rng, sampling.random_graph(rng, 1, 12, extra_max=5), G)
        R = reconstruct(H)
        back = induced_holonomy_map(R.field, R.basepoint, H.tree)
        rep.check(back == H and back.images == H.images, t, prop="roundtrip", group=repr(G))
        rep.trials += 1
    if not exhaustive:
        return rep
    small = [groups.cyclic(2), groups.cyclic(4), groups.symmetric(3), groups.dihedral(4), groups.quaternion8()]
    for gname, g in _small_graphs():
        x = g.vertices[0]
        for G in small:
            if G.order ** len(g.edges) > 40000:
                continue
            classes: dict = {}
            count = 0
            for f in _exhaustive_fields(g, G):
                u = BundlePoint(x, G.identity())
                H = induced_holonomy_map(f, u)
                key = tuple(sorted((k, h.value) for k, h in H.images.items()))
                R = reconstruct(H)
                t_ok = basepoint_fixing_gauge(R.field, f, x) is not None
                rep.check(t_ok, None, prop="representation", graph=gname, group=repr(G),
                          links={k: repr(h.payload) for k, h in f.links.items()})
                classes.setdefault(key, []).append(f)
                count += 1
            pairs = 0
            for members in classes.values():
                if len(members) <= 4:
                    for i in range(len(members)):
                        for j in range(i + 1, len(members)):
                            pairs += 1
                            rep.check(basepoint_fixing_gauge(members[i], members[j], x) is not None, None,
                                      prop="representation_pairwise", graph=gname, group=repr(G))
            rep.count("exhaustive_fields", count)
            rep.count("exhaustive_classes", len(classes))
            rep.count("pairwise_comparisons", pairs)
    return rep


def _cert_roundtrip(cert: EquivalenceCertificate) -> EquivalenceCertificate:
    text = formats.dumps(formats.certificate_to_dict(cert))
    return formats.certificate_from_dict(json.loads(text))


def thm1(seed: int = 0, trials: int | None = None, tol: float = groups.DEFAULT_TOL) -> Report:
    """Holonomy-isomorphic pairs get certificates that re-verify from their serialized form."""
    trials = 200 if trials is None else trials
    rep = Report("thm1", seed=seed)
    vtol = 1e-8
    for t in range(trials):
        rng = trial_rng(seed, "thm1", t)
        G = _kind(t, tol)
        g = sampling.random_graph(rng, 1, 8)
        f = sampling.random_field(rng, g, G)
        u = BundlePoint(g.vertices[int(rng.integers(len(g.vertices)))], G.random(rng))
        f2, u2, _ = sampling.holonomy_isomorphic_pair(rng, f, u)
        res = gauge_equivalent(f, u, f2, u2)
        data = {"group": repr(G), "src": formats.field_to_dict(f), "dst": formats.field_to_dict(f2),
                "src_base": formats.point_to_dict(u), "dst_base": formats.point_to_dict(u2)}
        rep.trials += 1
        if isinstance(res, Refutation):
            rep.fail(t, prop="certificate_found", reason=res.reason, **data)
            continue
        if res.adjusted:
            rep.count("adjusted_extractions")
        ver = verify_certificate(_cert_roundtrip(res), tol=None if G.is_finite else vtol)
        for k, v in ver.residuals.items():
            rep.residual(f"{'finite' if G.is_finite else 'matrix'}:{k}", v)
        rep.check(ver.ok, t, prop="certificate_verifies", failures=ver.failures, **data)
    return rep


def _automorphism(rng, H):
    """A random self-arrow (id, beta, conj) of H with beta a loop at the base."""
    loop = sampling.random_loop(rng, H.graph, H.tree, H.base, int(rng.integers(0, 6)))
    c = H.evaluate(loop).inverse()
    return make_iso(GraphIso.identity(H.graph), loop, GroupHom.conjugation_by(c), H, H)


def _central_variant(rng, a):
    """Another representative of a's class, differing by a loop that centralizes the holonomy group."""
    H = a.src
    vals = list(H.images.values())
    for _ in range(8):
        loop = sampling.random_loop(rng, H.graph, H.tree, H.base, int(rng.integers(1, 8)))
        h = H.evaluate(loop)
        if not h.is_identity() and groups.centralizes(h, vals):
            try:
                return make_iso(a.psi, compose(loop, a.witness), a.phi, a.src, a.dst)
            except DiagramViolation:
                return None
    return None


def thm2(seed: int = 0, trials: int | None = None, tol: float = groups.DEFAULT_TOL,
         surjectivity_trials: int | None = None) -> Report:
    """Functor laws, fullness round-trip, faithfulness and essential surjectivity of C."""
    trials = 200 if trials is None else trials
    surj = (trials // 2 if trials else 0) if surjectivity_trials is None else surjectivity_trials
    rep = Report("thm2", seed=seed)
    for t in range(trials):
        rng = trial_rng(seed, "thm2", t)
        G = _kind(t, tol)
        H = sampling.random_holonomy_map(rng, sampling.random_graph(rng, 1, 7), G)
        a = _arrow(rng, H, False)
        b = _arrow(rng, a.dst, False)
        data = {"group": repr(G)}
        Ra, Rb = reconstruct(a.src), reconstruct(a.dst)
        ida = BundleMorphism.identity(Ra.field)
        rep.check(_close(apply_C(identity_iso(H)), ida, tol), t, prop="C_identity", **data)
        ma, mb = apply_C(a), apply_C(b)
        rep.check(_close(apply_C(compose_iso(b, a)), mb.compose(ma), tol), t, prop="C_composition", **data)

        # fullness: morphisms of the form C(a)
        ex = extract_hol_iso(ma, Ra.field, Ra.basepoint, Rb.field, Rb.basepoint)
        if ex.adjusted:
            rep.count("adjusted_extractions")
        rep.check(_close(apply_C(ex.holiso), ma, tol), t, prop="fullness_roundtrip", adjusted=ex.adjusted, **data)

        # connection-preserving morphisms not of that form are logged, not counted
        c = G.random(rng)
        if all(groups.centralizes(c, [h]) for h in Ra.field.links.values()) and not c.is_identity():
            extra = ma.compose(BundleMorphism(GraphIso.identity(Ra.field.graph), GroupHom.identity(G),
                                              {v: c for v in Ra.field.graph.vertices}))
            rep.count("other_morphisms")
            ex2 = extract_hol_iso(extra, Ra.field, Ra.basepoint, Rb.field, Rb.basepoint)
            if not _close(apply_C(ex2.holiso), extra, tol):
                rep.count("other_morphisms_not_in_image")

        # faithfulness on arrow pairs between the same objects
        a2 = compose_iso(a, _automorphism(rng, H)) if rng.random() < 0.7 else _thin_variant(rng, a, False)
        faithful = faithfulness_check(a, a2, trial=t)
        rep.failures.extend(dict(f, **data) for f in faithful.failures)
        rep.count("distinct_images", faithful.notes.get("distinct_images", 0))

        variant = _central_variant(rng, a) if G.is_finite else None
        if variant is not None:
            rep.count("class_representatives_compared")
            if apply_C(variant) != ma:
                rep.count("class_dependence")
        rep.trials += 1
    for t in range(surj):
        rng = trial_rng(seed, "thm2-surjective", t)
        G = _kind(t, tol)
        g = sampling.random_graph(rng, 1, 8)
        f = sampling.random_field(rng, g, G)
        u = BundlePoint(g.vertices[int(rng.integers(len(g.vertices)))], G.random(rng))
        sub = Report("essential_surjectivity")
        essential_surjectivity_check(f, u, sub, t)
        for k, v in sub.residuals.items():
            rep.residual(f"{'finite' if G.is_finite else 'matrix'}:surjectivity_{k}", v)
        for fl in sub.failures:
            rep.failures.append(dict(fl, group=repr(G)))
    rep.notes["surjectivity_trials"] = surj
    return rep


# --------------------------------------------------------------------------
# smooth side


def smooth_suite(seed: int = 0, trials: int | None = None, tol: float = 1e-6, steps: int = 10_000) -> Report:
    from . import smooth as S

    trials = 100 if trials is None else trials
    rep = Report("smooth", seed=seed)
    lin = S.GaugePotential(2, "U1", "linear", [[0.3, 0.2, -0.7], [-0.1, 1.1, 0.4]])
    poly = S.GaugePotential(2, "U1", "polynomial", [[0.3, 0.2, -0.7, 0.5, 0.1, -0.2],
                                                    [-0.1, 1.1, 0.4, 0.3, -0.6, 0.2]])
    su2 = S.GaugePotential(2, "SU2", "constant", [[0.3, -0.5, 0.2], [0.7, 0.1, -0.4]])

    # abelian closed forms: enclosed flux for the linear potential, exact line integrals otherwise
    U1 = groups.U1()
    rect = S.polygon((0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (0.0, 0.5))
    B = lin.coeffs[1][1] - lin.coeffs[0][2]
    err = groups.distance(S.transport_ode(lin, rect, steps), U1.element(-B * 0.5))
    rep.residual("flux_closed_form", err)
    rep.check(err < tol, prop="flux_closed_form", error=err)
    for t in range(10):
        rng = trial_rng(seed, "smooth-polygon", t)
        pts = [tuple(p) for p in rng.uniform(-1, 1, size=(int(rng.integers(3, 7)), 2))]
        crv = S.polygon(*pts)
        err = groups.distance(S.transport_ode(poly, crv, steps), U1.element(-S.line_integral_polygon(poly, crv)))
        rep.residual("line_integral_closed_form", err)
        rep.check(err < tol, t, prop="line_integral_closed_form", error=err)
        rev = groups.distance(S.transport_ode(poly, crv.inverted(), steps), S.transport_ode(poly, crv, steps).inverse())
        rep.residual("reversal", rev)
        rep.check(rev < tol, t, prop="reversal", error=rev)

    for name, A in (("u1_linear", lin), ("u1_polynomial", poly), ("su2_constant", su2)):
        r = S.axiom_check(A, (0.1, -0.2), seed, trials, steps=steps, tol=tol)
        rep.merge(r, prefix=name + ":")
    fault = S.axiom_check(poly, (0.1, -0.2), seed, 3, steps=steps, scheme="left", tol=tol)
    rep.notes["fault:convergence_slope"] = fault.notes.get("convergence_slope")
    rep.check(any(f.get("prop") == "convergence_order" for f in fault.failures), prop="fault_fixture_flagged")

    fam = S.circles(0.1, 1.0)
    deriv = S.circle_flux_derivative(lin, fam)
    rep.merge(deriv, prefix="circles:")
    for name, A, f, grid in (("circles_u1", lin, fam, 33), ("circles_poly", poly, fam, 33),
                             ("translations_su2", su2, S.translations(), 17),
                             ("zero", S.zero_potential(), fam, 17)):
        r = S.family_smoothness_check(A, f, grid=grid)
        r.notes.pop("derivative_field", None)
        rep.merge(r, prefix=name + ":")

    for name, A in (("su2_constant", su2), ("u1_polynomial", poly), ("u1_linear", lin)):
        r = S.lattice_convergence(A)
        rep.merge(r, prefix="lattice_" + name + ":")
    rep.merge(S.plaquette_flux_check(lin, 64), prefix="plaquette:")
    return rep


SUITES: dict[str, Callable[..., Report]] = {
    "lemma1": lemma1,
    "lemma2": lemma2,
    "prop1": prop1,
    "prop2": prop2,
    "roundtrip": roundtrip,
    "thm1": thm1,
    "thm2": thm2,
    "smooth": smooth_suite,
}


def run_suite(name: str, seed: int = 0, trials: int | None = None, tol: float | None = None) -> Report:
    fn = SUITES[name]
    if tol is None:
        return fn(seed=seed, trials=trials)
    return fn(seed=seed, trials=trials, tol=tol)
