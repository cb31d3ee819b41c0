"""Reconstruction of bundles from holonomy maps and the functor C.

Objects: a holonomy map H becomes the spanning-tree-gauge field with tree links
the identity and chord e carrying H's image of its chord generator, based at
(x, e).  Arrows: a holonomy isomorphism (Psi, alpha, phi) becomes the bundle
morphism fixed by z = transport(alpha^-1, u) |-> u', transported along tree
paths and extended equivariantly through phi.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from . import groups
from .bundle import (BundleMorphism, BundlePoint, GaugeField, GaugeTransformation, apply_gauge,
                     connection_residual, holonomy, transport, walk_product)
from .category import (HolIso, HolonomyMap, canonical_alpha, diagram_residual, induced_holonomy_map,
                       make_iso)
from .errors import EnumerationCapExceeded, SearchBoundsExceeded, WalkError
from .groups import GroupElement, GroupHom
from .paths import (GraphIso, ReducedWalk, Walk, compose, graph_isomorphisms, expand_word, format_walk,
                    invert, reduce, spanning_tree)
from .report import Report


@dataclass(frozen=True)
class ReconstructionResult:
    field: GaugeField
    basepoint: BundlePoint
    holonomy_map: HolonomyMap


def reconstruct(H: HolonomyMap) -> ReconstructionResult:
    G = H.group
    links = {e.name: H.images.get(e.name, G.identity()) for e in H.graph.edges}
    f = GaugeField(H.graph, G, links)
    return ReconstructionResult(f, BundlePoint(H.base, G.identity()), H)


def functor_on_arrow(a: HolIso, src: ReconstructionResult, dst: ReconstructionResult,
                     beta: Callable[[str, str], Walk] | None = None) -> BundleMorphism:
    """The bundle morphism C(a).

    ``beta(y, v)`` picks the walk from vertex(z) to v; the default is the tree
    path of the source map.  Any choice gives the same morphism.
    """
    if src.holonomy_map != a.src or dst.holonomy_map != a.dst:
        raise WalkError("reconstructions do not match the arrow's endpoints")
    f, f2 = src.field, dst.field
    u, u2 = src.basepoint, dst.basepoint
    z = transport(f, invert(a.witness), u)
    y = z.vertex
    tree = a.src.tree
    frames = {}
    for v in f.graph.vertices:
        b = tree.path(y, v) if beta is None else beta(y, v)
        there = transport(f2, a.psi.walk(b), u2).fiber
        here = transport(f, b, z).fiber
        frames[v] = there * a.phi(here).inverse()
    return BundleMorphism(a.psi, a.phi, frames)


def apply_C(a: HolIso) -> BundleMorphism:
    return functor_on_arrow(a, reconstruct(a.src), reconstruct(a.dst))


# --------------------------------------------------------------------------
# extraction (fullness direction)


@dataclass
class Extraction:
    holiso: HolIso
    adjusted: bool
    defect: GroupElement | None = None


def frame_defect(m: BundleMorphism, src: GaugeField, u: BundlePoint, dst: GaugeField, u2: BundlePoint,
                 alpha: Walk | None = None) -> GroupElement:
    """c with transport(alpha0, F^-1(u')) = u.c, alpha0 the tree path Psi^-1(x') -> x."""
    p = m.inverse()(u2)
    if alpha is None:
        alpha = spanning_tree(src.graph, u.vertex).path(p.vertex, u.vertex)
    return u.fiber.inverse() * transport(src, alpha, p).fiber


def _find_exact_lift(src: GaugeField, p: BundlePoint, u: BundlePoint) -> ReducedWalk | None:
    """A walk whose lift from p ends exactly at u, by BFS over bundle points (finite kinds)."""
    g = src.graph
    parent = {p: None}
    queue = deque([p])
    while queue:
        q = queue.popleft()
        if q == u:
            steps = []
            while parent[q] is not None:
                prev, s = parent[q]
                steps.append(s)
                q = prev
            return reduce(Walk(g, p.vertex, tuple(reversed(steps))))
        for s in g.steps_from(q.vertex):
            r = BundlePoint(g.step_end(s), src.link(s) * q.fiber)
            if r not in parent:
                parent[r] = (q, s)
                queue.append(r)
    return None


def _as_vectors(hs) -> np.ndarray:
    """Unit vectors for U1 (cos, sin) or SU2 (quaternion) elements; distance is Euclidean on both."""
    if hs[0].group.kind == "U1":
        th = np.array([h.value for h in hs])
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    return np.array([h.value for h in hs])


def _vec_mul(kind: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if kind == "U1":
        return np.stack([a[..., 0] * b[..., 0] - a[..., 1] * b[..., 1],
                         a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0]], axis=-1)
    from .smooth import _qmul

    return _qmul(a, b)


def _word_values(kind: str, letters: list, vecs: np.ndarray, depth: int, cap: int):
    """All reduced words up to ``depth`` letters with their values (later letters on the left)."""
    n = len(vecs)
    ident = np.zeros(vecs.shape[1])
    ident[0] = 1.0
    words, values = [()], [ident[None, :]]
    layer_w, layer_v = [()], ident[None, :]
    for _ in range(depth):
        nw, parents, idx = [], [], []
        for i, w in enumerate(layer_w):
            for j in range(n):
                if w and letters[j] == (letters[w[-1]][0], -letters[w[-1]][1]):
                    continue
                nw.append(w + (j,))
                parents.append(i)
                idx.append(j)
        if not nw or len(words) + len(nw) > cap:
            break
        layer_v = _vec_mul(kind, vecs[idx], layer_v[parents])
        layer_w = nw
        words.extend(nw)
        values.append(layer_v)
    return words, np.concatenate(values)


def _find_chord_word(H: HolonomyMap, target: GroupElement, depth: int = 4, cap: int = 6000):
    """A reduced chord word whose value under H is ``target`` (meet in the middle), or None."""
    G = H.group
    letters = [(e, s) for e in H.tree.chords for s in (1, -1)]
    if not letters:
        return [] if target.is_identity() else None
    elems = [H.images[e] if s > 0 else H.images[e].inverse() for e, s in letters]
    vecs = _as_vectors(elems)
    words, vals = _word_values(G.kind, letters, vecs, depth, cap)
    # first half w1 then w2: V(w2) V(w1) = T, i.e. V(w2) = T V(w1)^-1
    inv = vals.copy()
    if G.kind == "U1":
        inv[:, 1] *= -1
    else:
        inv[:, 1:] *= -1
    tv = _as_vectors([target])[0]
    need = _vec_mul(G.kind, np.broadcast_to(tv, inv.shape), inv)
    dots = vals @ need.T
    i2, i1 = np.unravel_index(int(np.argmax(dots)), dots.shape)
    if np.linalg.norm(vals[i2] - need[i1]) > G.tol:
        return None
    from .paths import reduce_word

    return reduce_word([letters[j] for j in words[i1]] + [letters[j] for j in words[i2]])


def extract_hol_iso(m: BundleMorphism, src: GaugeField, u: BundlePoint, dst: GaugeField,
                    u2: BundlePoint, H: HolonomyMap | None = None, H2: HolonomyMap | None = None) -> Extraction:
    if not _preserves(m, src, dst):
        raise WalkError("morphism does not preserve the connection")
    H = induced_holonomy_map(src, u) if H is None else H
    H2 = induced_holonomy_map(dst, u2) if H2 is None else H2
    p = m.inverse()(u2)
    if src.group.is_finite:
        beta = _find_exact_lift(src, p, u)
    else:
        beta = _matrix_lift(src, p, u, H)
    if beta is not None:
        return Extraction(make_iso(m.iso, beta, m.phi, H, H2), False)
    alpha0 = H.tree.path(p.vertex, u.vertex)
    c = frame_defect(m, src, u, dst, u2, alpha0)
    phi = m.phi.compose(GroupHom.conjugation_by(c.inverse()))
    return Extraction(make_iso(m.iso, alpha0, phi, H, H2), True, c)


def _matrix_lift(src: GaugeField, p: BundlePoint, u: BundlePoint, H: HolonomyMap) -> ReducedWalk | None:
    """beta = gamma . alpha0 with gamma a loop at x chosen so the lift of beta from p ends at u."""
    alpha0 = H.tree.path(p.vertex, u.vertex)
    c = u.fiber.inverse() * transport(src, alpha0, p).fiber
    if c.is_identity():
        return alpha0
    word = _find_chord_word(H, c.inverse())
    if word is None:
        return None
    beta = reduce(compose(expand_word(word, H.tree, u.vertex), alpha0))
    return beta if transport(src, beta, p) == u else None


def _preserves(m: BundleMorphism, src: GaugeField, dst: GaugeField) -> bool:
    r = connection_residual(m, src, dst)
    return r == 0.0 if dst.group.is_finite else r <= 100 * dst.group.tol


# --------------------------------------------------------------------------
# certificates and property checks


@dataclass
class EquivalenceCertificate:
    src: GaugeField
    src_base: BundlePoint
    dst: GaugeField
    dst_base: BundlePoint
    holiso: HolIso
    morphism: BundleMorphism
    residuals: dict = dc_field(default_factory=dict)
    adjusted: bool = False  # extraction fell back to phi o conj; a producer note, not serialized


def certificate_residuals(cert: EquivalenceCertificate) -> dict:
    a, m = cert.holiso, cert.morphism
    z = transport(cert.src, invert(a.witness), cert.src_base)
    fz = m(z)
    base = float("inf") if fz.vertex != cert.dst_base.vertex else groups.distance(fz.fiber, cert.dst_base.fiber)
    H = induced_holonomy_map(cert.src, cert.src_base)
    H2 = induced_holonomy_map(cert.dst, cert.dst_base)
    return {
        "connection": connection_residual(m, cert.src, cert.dst),
        "basepoint": base,
        "diagram": diagram_residual(a.psi, a.witness, a.phi, H, H2),
    }


def verify_certificate(cert: EquivalenceCertificate, tol: float | None = None) -> Report:
    """Recompute every residual from the raw fields; trusts nothing stored in the certificate."""
    rep = Report("verify")
    G2 = cert.dst.group
    if tol is None:
        tol = 0.0 if G2.is_finite else 1e-8
    try:
        res = certificate_residuals(cert)
    except (WalkError, KeyError, groups.GroupError) as exc:
        rep.fail(reason=f"malformed certificate: {exc}")
        return rep
    for k, v in sorted(res.items()):
        rep.residual(k, v)
        rep.check(v <= tol, prop=k, residual=v)
    a = cert.holiso
    rep.check(canonical_alpha(a.src, a.alpha).steps == a.alpha.steps, prop="alpha_canonical",
              alpha=format_walk(a.alpha))
    # stated residuals are producer claims; they must agree with the recomputation
    for k, v in sorted(cert.residuals.items()):
        rep.check(k in res and abs(v - res[k]) <= max(tol, 1e-12), prop="stated_residual", name=k,
                  stated=v, recomputed=res.get(k))
    rep.trials = 1
    return rep


def faithfulness_check(a: HolIso, a2: HolIso, report: Report | None = None, trial: int | None = None) -> Report:
    rep = report if report is not None else Report("faithfulness")
    ma, mb = apply_C(a), apply_C(a2)
    if ma == mb:
        rep.check(a == a2, trial, prop="faithful", a=repr(a), a2=repr(a2))
    else:
        rep.count("distinct_images")
    rep.trials += 1
    return rep


def tree_gauge(field: GaugeField, u: BundlePoint, H: HolonomyMap) -> GaugeTransformation:
    """t(v) = (W(T_v) c_u)^-1 with T_v the tree path x -> v; apply_gauge(field, t) is the reconstruction."""
    vals = {}
    for v in field.graph.vertices:
        vals[v] = (walk_product(field, H.tree.path(u.vertex, v)) * u.fiber).inverse()
    return GaugeTransformation(field.group, vals)


def essential_surjectivity_check(field: GaugeField, u: BundlePoint, report: Report | None = None,
                                 trial: int | None = None) -> tuple[Report, EquivalenceCertificate]:
    rep = report if report is not None else Report("essential_surjectivity")
    H = induced_holonomy_map(field, u)
    R = reconstruct(H)
    t = tree_gauge(field, u, H)
    m = BundleMorphism.from_gauge(field, t)
    from .category import identity_iso

    cert = EquivalenceCertificate(field, u, R.field, R.basepoint, identity_iso(H), m)
    cert.residuals = certificate_residuals(cert)
    tol = 0.0 if field.group.is_finite else 1e-8
    for k, v in cert.residuals.items():
        rep.residual(k, v)
        rep.check(v <= tol, trial, prop=k, residual=v)
    tree_ok = all(R.field.links[e].is_identity() for e in H.tree.edges)
    rep.check(tree_ok, trial, prop="tree_links_identity")
    regauged = apply_gauge(field, t)
    rep.residual("gauge_fixing", max((groups.distance(regauged.links[k], R.field.links[k])
                                       for k in R.field.links), default=0.0))
    rep.check(regauged == R.field, trial, prop="gauge_fixing")
    rep.trials += 1
    return rep, cert


def basepoint_fixing_gauge(f1: GaugeField, f2: GaugeField, x: str) -> GaugeTransformation | None:
    """The gauge transformation t with t(x) = e and apply_gauge(f1, t) = f2, if one exists."""
    tree = spanning_tree(f1.graph, x)
    G = f1.group
    vals = {x: G.identity()}
    queue = deque([x])
    while queue:
        a = queue.popleft()
        for s in f1.graph.steps_from(a):
            if s.edge not in tree.edges:
                continue
            b = f1.graph.step_end(s)
            if b in vals:
                continue
            vals[b] = f2.link(s) * vals[a] * f1.link(s).inverse()
            queue.append(b)
    t = GaugeTransformation(G, vals)
    return t if apply_gauge(f1, t) == f2 else None


# --------------------------------------------------------------------------
# gauge equivalence


@dataclass
class Refutation:
    reason: str
    witnesses: list = dc_field(default_factory=list)
    complete: bool = True


def _solve_frame(phi: GroupHom, A: Sequence[GroupElement], B: Sequence[GroupElement], G2) -> list[GroupElement]:
    """All g0 (finite) or one g0 (matrix) with g0 phi(A_i) g0^-1 = B_i."""
    pa = [phi(h) for h in A]
    if G2.is_finite:
        return [g0 for g0 in G2.elements() if all(g0 * a * g0.inverse() == b for a, b in zip(pa, B))]
    if G2.kind == "U1":
        return [G2.identity()] if all(a == b for a, b in zip(pa, B)) else []
    if not pa:
        return [G2.identity()]
    rows = [_right_matrix(a.value) - _left_matrix(b.value) for a, b in zip(pa, B)]
    M = np.vstack(rows)
    _, s, vt = np.linalg.svd(M)
    q = vt[-1]
    if s[-1] > 1e-7:
        return []
    g0 = G2.element(tuple(q / np.linalg.norm(q)))
    if all(g0 * a * g0.inverse() == b for a, b in zip(pa, B)):
        return [g0]
    return []


def _left_matrix(q):
    w, x, y, z = q
    return np.array([[w, -x, -y, -z], [x, w, -z, y], [y, z, w, -x], [z, -y, x, w]])


def _right_matrix(q):
    w, x, y, z = q
    return np.array([[w, -x, -y, -z], [x, w, z, -y], [y, -z, w, x], [z, y, -x, w]])


def _propagate_frames(src: GaugeField, dst: GaugeField, psi: GraphIso, phi: GroupHom, x: str,
                      g0: GroupElement) -> dict:
    tree = spanning_tree(src.graph, x)
    frames = {x: g0}
    queue = deque([x])
    while queue:
        a = queue.popleft()
        for s in src.graph.steps_from(a):
            if s.edge not in tree.edges:
                continue
            b = src.graph.step_end(s)
            if b in frames:
                continue
            frames[b] = dst.link(psi.step(s)) * frames[a] * phi(src.link(s)).inverse()
            queue.append(b)
    return frames


def _witness_loops(src: GaugeField, dst: GaugeField, H: HolonomyMap, psi: GraphIso, phi: GroupHom):
    # Psi carries loops at x to loops at Psi(x), which need not be the base of H';
    # conjugacy invariants do not depend on the point of the fiber
    gens = H.generators()
    loops = [g for _, g in gens]
    loops += [reduce(compose(b, a)) for (_, a), (_, b) in itertools.combinations(gens, 2)]
    for loop in loops:
        lhs = phi(walk_product(src, loop))
        rhs = walk_product(dst, psi.walk(loop))
        if not groups.same_conjugacy_invariant(lhs, rhs):
            return loop, lhs, rhs
    return None


def gauge_equivalent(src: GaugeField, u: BundlePoint, dst: GaugeField, u2: BundlePoint,
                     phi_candidates: Sequence[GroupHom] | None = None,
                     psi_candidates: Sequence[GraphIso] | None = None,
                     max_vertices: int = 10, max_group_order: int = 64,
                     max_graph_isos: int = 20000) -> EquivalenceCertificate | Refutation:
    """Decide whether the holonomy maps at u and u' are isomorphic and certify it.

    Raises SearchBoundsExceeded when a bound is hit (the answer is inconclusive).
    """
    H = induced_holonomy_map(src, u)
    H2 = induced_holonomy_map(dst, u2)
    G, G2 = src.group, dst.group
    if phi_candidates is None:
        try:
            phi_candidates = groups.isomorphism_search(G, G2, max_order=max_group_order)
        except EnumerationCapExceeded as exc:
            raise SearchBoundsExceeded(str(exc)) from None
    complete = G.is_finite and G2.is_finite
    if not phi_candidates:
        return Refutation("structure groups are not isomorphic", [], complete)
    if psi_candidates is None:
        psi_iter = graph_isomorphisms(src.graph, dst.graph, max_vertices=max_vertices)
    else:
        psi_iter = iter(psi_candidates)
        complete = False
    x = u.vertex
    gens = [loop for _, loop in H.generators()]
    A = [walk_product(src, loop) for loop in gens]
    witnesses = []
    seen = 0
    for psi in psi_iter:
        seen += 1
        if seen > max_graph_isos:
            raise SearchBoundsExceeded(f"more than {max_graph_isos} graph isomorphisms")
        B = [walk_product(dst, psi.walk(loop)) for loop in gens]
        for phi in phi_candidates:
            sols = _solve_frame(phi, A, B, G2)
            if not sols:
                w = _witness_loops(src, dst, H, psi, phi)
                entry = {"psi": psi, "phi": phi, "loop": None, "reason": "no simultaneous conjugator"}
                if w is not None:
                    entry.update(loop=w[0], src_value=w[1], dst_value=w[2], reason="conjugacy invariant differs")
                witnesses.append(entry)
                continue
            cert = None
            for g0 in sols:
                frames = _propagate_frames(src, dst, psi, phi, x, g0)
                m0 = BundleMorphism(psi, phi, frames)
                ex = extract_hol_iso(m0, src, u, dst, u2, H, H2)
                m = functor_on_arrow(ex.holiso, ReconstructionAdapter(src, u, H), ReconstructionAdapter(dst, u2, H2))
                cert = EquivalenceCertificate(src, u, dst, u2, ex.holiso, m)
                cert.residuals = certificate_residuals(cert)
                cert.adjusted = ex.adjusted
                if not ex.adjusted:
                    break
            return cert
    if seen == 0:
        return Refutation("graphs are not isomorphic", [], complete)
    return Refutation("no candidate (Psi, phi) admits a connection-preserving isomorphism", witnesses, complete)


def ReconstructionAdapter(field: GaugeField, u: BundlePoint, H: HolonomyMap) -> ReconstructionResult:
    """Treat an arbitrary (field, u) as the realization of its own holonomy map."""
    return ReconstructionResult(field, u, H)


def refutation_is_sound(ref: Refutation, src: GaugeField, u: BundlePoint, dst: GaugeField, u2: BundlePoint) -> bool:
    """Re-check every witness loop by direct transport, independently of the search."""
    for w in ref.witnesses:
        if w.get("loop") is None:
            continue
        psi, phi, loop = w["psi"], w["phi"], w["loop"]
        lhs = phi(holonomy(src, loop, u))
        moved = psi.walk(loop)
        rhs = holonomy(dst, moved, BundlePoint(moved.start, dst.group.identity()))
        if groups.same_conjugacy_invariant(lhs, rhs):
            return False
    return True
