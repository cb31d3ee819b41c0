"""Holonomy maps and the groupoids Hol and Hol*.

A holonomy map is stored by its values on the chord generators of a spanning
tree; evaluation goes through free reduction, so thin invariance and
multiplicativity hold by construction.  The smoothness axiom has no discrete
content and is exercised numerically in ``smooth``.

Arrows are triples (Psi, alpha, phi) with alpha running from Psi^-1(x') to x and
the diagram phi(H(gamma)) = H'(Psi(alpha^-1 . gamma . alpha)) on every chord
generator gamma.
"""
from __future__ import annotations

from typing import Mapping

from . import groups
from .bundle import BundlePoint, GaugeField, holonomy
from .errors import DescriptorMismatch, DiagramViolation, UnsuitableGraph, WalkError
from .groups import GroupDescriptor, GroupElement, GroupHom
from .paths import (Graph, GraphIso, ReducedWalk, Step, Tree, Walk, chord_generators, chord_loop,
                    compose, compose_all, identity_walk, invert, loop_decompose, reduce, spanning_tree)
from .report import Report

SMOOTHNESS_AXIOM = "vacuously satisfied (discrete)"


class HolonomyMap:
    __slots__ = ("graph", "base", "group", "tree", "images", "_phi")

    def __init__(self, graph: Graph, base: str, group: GroupDescriptor, tree: Tree,
                 images: Mapping[str, GroupElement]):
        if tree.graph != graph:
            raise WalkError("tree belongs to another graph")
        if not graph.has_vertex(base):
            raise WalkError(f"unknown base vertex {base!r}")
        if set(images) != set(tree.chords):
            raise WalkError(f"images must be given exactly on the chords {tree.chords}")
        for k, h in images.items():
            if h.group != group:
                raise DescriptorMismatch(f"image of {k!r} lives in {h.group!r}")
        self.graph = graph
        self.base = base
        self.group = group
        self.tree = tree
        self.images = {k: images[k] for k in tree.chords}
        self._phi = None

    smoothness = SMOOTHNESS_AXIOM

    def generators(self) -> list[tuple[str, ReducedWalk]]:
        return [(e, chord_loop(self.tree, self.base, e)) for e in self.tree.chords]

    def evaluate(self, loop: Walk) -> GroupElement:
        return evaluate(self, loop)

    def word_value(self, w: Walk) -> GroupElement:
        """Product of chord images along any walk (later steps on the left).

        On loops at the base this is the holonomy; on open walks it is the
        transport factor in the spanning-tree gauge.
        """
        g = self.group.identity()
        for s in w.steps:
            if s.edge in self.images:
                h = self.images[s.edge]
                g = (h if s.forward else h.inverse()) * g
        return g

    @property
    def image_group(self) -> groups.Subgroup:
        if self._phi is None:
            self._phi = groups.subgroup_generated(list(self.images.values()), self.group)
        return self._phi

    def __eq__(self, other):
        """Equality as maps on loops at the base."""
        if not isinstance(other, HolonomyMap):
            return NotImplemented
        if self.graph != other.graph or self.base != other.base or self.group != other.group:
            return False
        return all(other.evaluate(loop) == self.images[e] for e, loop in self.generators())

    def __hash__(self):
        return hash((self.graph, self.base, self.group))

    def __repr__(self):
        imgs = {k: v.payload for k, v in self.images.items()}
        return f"HolonomyMap(base={self.base!r}, group={self.group!r}, images={imgs})"


def evaluate(H: HolonomyMap, loop: Walk) -> GroupElement:
    if loop.graph != H.graph:
        raise WalkError("loop lives on another graph")
    if loop.start != H.base:
        raise WalkError(f"loop is based at {loop.start!r}, map is based at {H.base!r}")
    g = H.group.identity()
    for e, sign in loop_decompose(loop, H.tree, H.base):
        h = H.images[e]
        g = (h if sign > 0 else h.inverse()) * g
    return g


def induced_holonomy_map(field: GaugeField, u: BundlePoint, tree: Tree | None = None) -> HolonomyMap:
    if tree is None:
        tree = spanning_tree(field.graph, u.vertex)
    images = {}
    for e in tree.chords:
        images[e] = holonomy(field, chord_loop(tree, u.vertex, e), u)
    return HolonomyMap(field.graph, u.vertex, field.group, tree, images)


def flat_map(graph: Graph, group: GroupDescriptor, x: str) -> HolonomyMap:
    tree = spanning_tree(graph, x)
    return HolonomyMap(graph, x, group, tree, {e: group.identity() for e in tree.chords})


# --------------------------------------------------------------------------
# alpha classes


def _check_coterminal(H: HolonomyMap, alpha: Walk, beta: Walk) -> None:
    if alpha.end != H.base or beta.end != H.base:
        raise WalkError("alpha classes consist of walks ending at the base vertex")
    if alpha.start != beta.start:
        raise WalkError("walks must share their start vertex")


def alpha_equivalent(H: HolonomyMap, alpha: Walk, beta: Walk) -> bool:
    """H(alpha.g.alpha^-1) = H(beta.g.beta^-1) for every loop g at the common start.

    Decided by: H(beta . alpha^-1) commutes with every chord image.
    """
    _check_coterminal(H, alpha, beta)
    c = evaluate(H, reduce(compose(beta, invert(alpha))))
    return groups.centralizes(c, list(H.images.values()))


def _step_key(s: Step):
    return (s.edge, not s.forward)


def canonical_alpha(H: HolonomyMap, alpha: Walk) -> ReducedWalk:
    """Shortlex-least reduced walk in the class of alpha (finite kinds).

    Layered BFS over (vertex, spanning-tree transport value).  A shortest walk to
    a state is automatically reduced, and the least walk to a state in layer L
    extends the least walk to some state in layer L-1.
    """
    alpha = reduce(alpha)
    if not H.group.is_finite:
        return alpha
    G = H.group
    gens = list(H.images.values())
    central = [c for c in G.elements() if groups.centralizes(c, gens)]
    wa = H.word_value(alpha)
    targets = {(c * wa).value for c in central}
    y = alpha.start
    g = H.graph
    start = (y, G.identity().value)
    best = {start: ()}
    layer = [start]
    while layer:
        hits = [s for s in layer if s[0] == H.base and s[1] in targets]
        if hits:
            return ReducedWalk(g, y, best[hits[0]])
        nxt = []
        for state in layer:
            v, w = state
            for s in sorted(g.steps_from(v), key=_step_key):
                h = H.images.get(s.edge)
                val = w if h is None else ((h if s.forward else h.inverse()) * GroupElement(G, w)).value
                key = (g.step_end(s), val)
                if key not in best:
                    best[key] = best[state] + (s,)
                    nxt.append(key)
        layer = nxt
    raise AssertionError("alpha itself reaches a target state")


# --------------------------------------------------------------------------
# arrows


def _diagram_failures(psi: GraphIso, alpha: Walk, phi: GroupHom, H: HolonomyMap, H2: HolonomyMap):
    out = []
    for e, gamma in H.generators():
        lhs = phi(H.images[e])
        moved = psi.walk(reduce(compose_all(invert(alpha), gamma, alpha)))
        rhs = evaluate(H2, moved)
        if not lhs == rhs:
            out.append((e, groups.distance(lhs, rhs)))
    return out


def diagram_residual(psi: GraphIso, alpha: Walk, phi: GroupHom, H: HolonomyMap, H2: HolonomyMap) -> float:
    worst = 0.0
    for e, gamma in H.generators():
        lhs = phi(H.images[e])
        rhs = evaluate(H2, psi.walk(reduce(compose_all(invert(alpha), gamma, alpha))))
        worst = max(worst, groups.distance(lhs, rhs))
    return worst


def _validate(psi: GraphIso, alpha: Walk, phi: GroupHom, H: HolonomyMap, H2: HolonomyMap) -> ReducedWalk:
    if psi.source != H.graph or psi.target != H2.graph:
        raise WalkError("graph isomorphism is not typed H.graph -> H'.graph")
    if phi.source != H.group or phi.target != H2.group or not phi.iso:
        raise DescriptorMismatch("phi must be an isomorphism H.group -> H'.group")
    if alpha.graph != H.graph:
        raise WalkError("alpha lives on another graph")
    start = psi.inverse().vertex(H2.base)
    if alpha.start != start or alpha.end != H.base:
        raise WalkError(f"alpha must run from {start!r} to {H.base!r}, got {alpha.start!r} -> {alpha.end!r}")
    alpha = reduce(alpha)
    bad = _diagram_failures(psi, alpha, phi, H, H2)
    if bad:
        raise DiagramViolation(f"diagram fails on chord generator {bad[0][0]!r}", witness=bad[0][0])
    return alpha


class HolIso:
    """Arrow of Hol.

    ``alpha`` is the canonical representative of the class (finite kinds) and
    ``witness`` the representative the arrow was built from; the bundle
    morphism of the reconstruction functor is computed from the witness.
    """

    __slots__ = ("src", "dst", "psi", "alpha", "phi", "witness")

    def __init__(self, src, dst, psi, alpha, phi, witness):
        self.src, self.dst, self.psi, self.alpha, self.phi, self.witness = src, dst, psi, alpha, phi, witness

    def __eq__(self, other):
        if not isinstance(other, HolIso):
            return NotImplemented
        return (self.src == other.src and self.dst == other.dst and self.psi == other.psi
                and self.phi == other.phi and alpha_equivalent(self.src, self.alpha, other.alpha))

    def __hash__(self):
        return hash((self.psi, self.phi))

    def __repr__(self):
        return f"HolIso(vmap={self.psi.vmap}, alpha={self.alpha}, phi={self.phi!r})"


class HolStarIso:
    """Arrow of Hol*: the thin class of alpha is its reduced walk."""

    __slots__ = ("src", "dst", "psi", "alpha", "phi")

    def __init__(self, src, dst, psi, alpha, phi):
        self.src, self.dst, self.psi, self.alpha, self.phi = src, dst, psi, alpha, phi

    def __eq__(self, other):
        if not isinstance(other, HolStarIso):
            return NotImplemented
        return (self.src == other.src and self.dst == other.dst and self.psi == other.psi
                and self.phi == other.phi and self.alpha == other.alpha)

    def __hash__(self):
        return hash((self.psi, self.alpha.steps, self.phi))

    def __repr__(self):
        return f"HolStarIso(vmap={self.psi.vmap}, alpha={self.alpha}, phi={self.phi!r})"


def make_iso(psi: GraphIso, alpha: Walk, phi: GroupHom, H: HolonomyMap, H2: HolonomyMap) -> HolIso:
    alpha = _validate(psi, alpha, phi, H, H2)
    return HolIso(H, H2, psi, canonical_alpha(H, alpha), phi, alpha)


def make_star_iso(psi: GraphIso, alpha: Walk, phi: GroupHom, H: HolonomyMap, H2: HolonomyMap) -> HolStarIso:
    alpha = _validate(psi, alpha, phi, H, H2)
    return HolStarIso(H, H2, psi, alpha, phi)


def revalidate(a) -> bool:
    try:
        _validate(a.psi, a.alpha, a.phi, a.src, a.dst)
        if isinstance(a, HolIso):
            _validate(a.psi, a.witness, a.phi, a.src, a.dst)
    except (DiagramViolation, WalkError, DescriptorMismatch):
        return False
    return True


def identity_iso(H: HolonomyMap) -> HolIso:
    return make_iso(GraphIso.identity(H.graph), identity_walk(H.graph, H.base), GroupHom.identity(H.group), H, H)


def identity_star(H: HolonomyMap) -> HolStarIso:
    return make_star_iso(GraphIso.identity(H.graph), identity_walk(H.graph, H.base), GroupHom.identity(H.group), H, H)


def _composite_alpha(alpha_a: Walk, psi_a: GraphIso, alpha_b: Walk) -> ReducedWalk:
    # alpha_a . (Psi_a^-1 o alpha_b), with the second factor traversed first
    return reduce(compose(alpha_a, psi_a.inverse().walk(alpha_b)))


def _check_composable(b, a):
    if not (a.dst == b.src and a.dst.graph == b.src.graph and a.dst.base == b.src.base):
        raise WalkError("arrows are not composable: codomain(a) != domain(b)")


def compose_iso(b: HolIso, a: HolIso) -> HolIso:
    """b o a."""
    _check_composable(b, a)
    psi = b.psi.compose(a.psi)
    phi = b.phi.compose(a.phi)
    return make_iso(psi, _composite_alpha(a.witness, a.psi, b.witness), phi, a.src, b.dst)


def compose_star(b: HolStarIso, a: HolStarIso) -> HolStarIso:
    _check_composable(b, a)
    psi = b.psi.compose(a.psi)
    phi = b.phi.compose(a.phi)
    return make_star_iso(psi, _composite_alpha(a.alpha, a.psi, b.alpha), phi, a.src, b.dst)


def _inverse_alpha(psi: GraphIso, alpha: Walk) -> ReducedWalk:
    return reduce(invert(psi.walk(alpha)))


def invert_iso(a: HolIso) -> HolIso:
    return make_iso(a.psi.inverse(), _inverse_alpha(a.psi, a.witness), a.phi.inverse(), a.dst, a.src)


def invert_star(a: HolStarIso) -> HolStarIso:
    return make_star_iso(a.psi.inverse(), _inverse_alpha(a.psi, a.alpha), a.phi.inverse(), a.dst, a.src)


def quotient_Q(a: HolStarIso) -> HolIso:
    """Q(Psi, [alpha]~, phi) = (Psi, class of alpha, phi)."""
    return make_iso(a.psi, a.alpha, a.phi, a.src, a.dst)


def lift_star(a: HolIso) -> HolStarIso:
    """The Hol* arrow with a's stored canonical representative."""
    return make_star_iso(a.psi, a.alpha, a.phi, a.src, a.dst)


# --------------------------------------------------------------------------
# witnesses for the behaviour of Q


def _nontrivial_loop(graph: Graph, x: str) -> ReducedWalk:
    tree = spanning_tree(graph, x)
    gens = chord_generators(graph, tree, x)
    if not gens:
        raise UnsuitableGraph("graph is a tree: every pair of co-terminal reduced walks is equal")
    return gens[0]


def q_not_faithful_witness(graph: Graph, group: GroupDescriptor, x: str | None = None) -> dict:
    """Two distinct Hol* self-arrows of a flat map with equal Q-images."""
    x = graph.vertices[0] if x is None else x
    H = flat_map(graph, group, x)
    loop = _nontrivial_loop(graph, x)
    psi, phi = GraphIso.identity(graph), GroupHom.identity(group)
    a1 = make_star_iso(psi, identity_walk(graph, x), phi, H, H)
    a2 = make_star_iso(psi, loop, phi, H, H)
    return {
        "alpha1": str(a1.alpha),
        "alpha2": str(a2.alpha),
        "star_arrows_distinct": a1 != a2,
        "q_images_equal": quotient_Q(a1) == quotient_Q(a2),
    }


def q_not_split_witness(graph: Graph, group: GroupDescriptor, x: str | None = None,
                        spurs: int = 3) -> Report:
    """The obstruction to a splitting of Q on a flat map.

    alpha = alpha' = a chord-generator loop at x, so alpha and alpha'^-1 are not
    thinly equivalent.  In Hol the composite of (id, alpha, id) and (id, alpha', id)
    is the identity; in Hol* the composite of lifts built from any thin
    representatives of alpha and alpha' carries the nonempty class [alpha . alpha'].
    """
    import numpy as np

    from .sampling import insert_spur

    x = graph.vertices[0] if x is None else x
    rep = Report("prop2")
    H = flat_map(graph, group, x)
    alpha = _nontrivial_loop(graph, x)
    alpha2 = alpha
    psi, phi = GraphIso.identity(graph), GroupHom.identity(group)
    a = make_iso(psi, alpha, phi, H, H)
    a2 = make_iso(psi, alpha2, phi, H, H)
    hol_composite = compose_iso(a2, a)
    hol_is_identity = hol_composite == identity_iso(H)
    rep.check(hol_is_identity, prop="hol_composite_identity")
    rng = np.random.default_rng(0)
    reps1 = [alpha] + [insert_spur(rng, insert_spur(rng, alpha)) for _ in range(spurs)]
    reps2 = [alpha2] + [insert_spur(rng, alpha2) for _ in range(spurs)]
    composites = set()
    for r1 in reps1:
        for r2 in reps2:
            s = compose_star(make_star_iso(psi, reduce(r2), phi, H, H), make_star_iso(psi, reduce(r1), phi, H, H))
            composites.add(str(s.alpha))
            rep.check(len(s.alpha) > 0, prop="star_composite_nonempty", alpha=str(r1), alpha2=str(r2))
            rep.trials += 1
    # lifts (beta, beta^-1) of the same two Hol arrows would compose to the identity
    alt = compose_star(make_star_iso(psi, invert(alpha), phi, H, H), make_star_iso(psi, alpha, phi, H, H))
    rep.notes.update({
        "alpha": str(alpha),
        "alpha_prime": str(alpha2),
        "hol_composite_is_identity": hol_is_identity,
        "star_composite_alpha": sorted(composites),
        "alternative_lift_composite_empty": len(alt.alpha) == 0,
        "group": repr(group),
    })
    return rep
