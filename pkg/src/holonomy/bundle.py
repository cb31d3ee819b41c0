"""Discrete principal bundles with connection.

The total space is vertices x G with right action (v, g).h = (v, g.h).  A gauge
field assigns a group element to every edge; one forward step across e moves
(tail, g) to (head, U(e).g).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple

from . import groups
from .errors import DescriptorMismatch, GroupError, WalkError
from .groups import GroupDescriptor, GroupElement, GroupHom
from .paths import Graph, GraphIso, Step, Tree, Walk, chord_generators, compose, invert, spanning_tree
from .report import Report, trial_rng


class BundlePoint(NamedTuple):
    vertex: str
    fiber: GroupElement

    def act(self, h: GroupElement) -> BundlePoint:
        """Right action p.h."""
        return BundlePoint(self.vertex, self.fiber * h)

    def __eq__(self, other):
        return isinstance(other, tuple) and self.vertex == other[0] and self.fiber == other[1]

    def __ne__(self, other):
        return not self == other

    __hash__ = tuple.__hash__


class GaugeField:
    __slots__ = ("graph", "group", "links")

    def __init__(self, graph: Graph, group: GroupDescriptor, links: Mapping[str, GroupElement]):
        names = {e.name for e in graph.edges}
        if set(links) != names:
            missing = sorted(names - set(links))
            extra = sorted(set(links) - names)
            raise WalkError(f"link assignment mismatch: missing {missing}, unknown {extra}")
        for k, h in links.items():
            if h.group != group:
                raise DescriptorMismatch(f"link {k!r} lives in {h.group!r}, field group is {group!r}")
        self.graph = graph
        self.group = group
        self.links = dict(links)

    @classmethod
    def flat(cls, graph: Graph, group: GroupDescriptor) -> GaugeField:
        e = group.identity()
        return cls(graph, group, {edge.name: e for edge in graph.edges})

    def link(self, s: Step) -> GroupElement:
        """U(e) for a forward step, U(e)^-1 for a reverse one."""
        h = self.links[s.edge]
        return h if s.forward else h.inverse()

    def with_link(self, name: str, h: GroupElement) -> GaugeField:
        links = dict(self.links)
        links[name] = h
        return GaugeField(self.graph, self.group, links)

    def __eq__(self, other):
        if not isinstance(other, GaugeField):
            return NotImplemented
        return (self.graph == other.graph and self.group == other.group
                and all(self.links[k] == other.links[k] for k in self.links))

    def __hash__(self):
        return hash((self.graph, self.group))

    def __repr__(self):
        return f"GaugeField({self.graph!r}, {self.group!r})"


def point(field: GaugeField, vertex: str, fiber=None) -> BundlePoint:
    if not field.graph.has_vertex(vertex):
        raise WalkError(f"unknown vertex {vertex!r}")
    if fiber is None:
        fiber = field.group.identity()
    if fiber.group != field.group:
        raise DescriptorMismatch("bundle point fiber lives in another group")
    return BundlePoint(vertex, fiber)


def walk_product(field: GaugeField, w: Walk) -> GroupElement:
    """U(s_n) ... U(s_1), the left factor picked up along w."""
    g = field.group.identity()
    for s in w.steps:
        g = field.link(s) * g
    return g


def transport(field: GaugeField, w: Walk, p: BundlePoint) -> BundlePoint:
    if w.start != p.vertex:
        raise WalkError(f"walk starts at {w.start!r} but the point lies over {p.vertex!r}")
    g = p.fiber
    for s in w.steps:
        g = field.link(s) * g
    return BundlePoint(w.end, g)


TransportFn = Callable[[GaugeField, Walk, BundlePoint], BundlePoint]


def holonomy(field: GaugeField, loop: Walk, u: BundlePoint, transport_fn: TransportFn = transport) -> GroupElement:
    """The h with transport(loop, u) = u.h."""
    if not loop.is_loop:
        raise WalkError("holonomy needs a closed walk")
    if loop.start != u.vertex:
        raise WalkError(f"loop is based at {loop.start!r}, point lies over {u.vertex!r}")
    end = transport_fn(field, loop, u)
    return u.fiber.inverse() * end.fiber


# --------------------------------------------------------------------------
# gauge transformations and morphisms


class GaugeTransformation:
    __slots__ = ("group", "values")

    def __init__(self, group: GroupDescriptor, values: Mapping[str, GroupElement]):
        self.group = group
        self.values = dict(values)

    def __call__(self, v: str) -> GroupElement:
        return self.values[v]

    @classmethod
    def identity(cls, field: GaugeField) -> GaugeTransformation:
        e = field.group.identity()
        return cls(field.group, {v: e for v in field.graph.vertices})


def apply_gauge(field: GaugeField, t: GaugeTransformation) -> GaugeField:
    if t.group != field.group:
        raise DescriptorMismatch("gauge transformation and field use different groups")
    if set(t.values) != set(field.graph.vertices):
        raise WalkError("gauge transformation must be defined on every vertex")
    links = {}
    for e in field.graph.edges:
        links[e.name] = t(e.head) * field.links[e.name] * t(e.tail).inverse()
    return GaugeField(field.graph, field.group, links)


class BundleMorphism:
    """F(v, h) = (Psi v, g(v) phi(h))."""

    __slots__ = ("iso", "phi", "frames")

    def __init__(self, iso: GraphIso, phi: GroupHom, frames: Mapping[str, GroupElement]):
        if not phi.iso:
            raise GroupError("bundle morphisms need a group isomorphism")
        if set(frames) != set(iso.source.vertices):
            raise WalkError("frame map must be defined on every source vertex")
        for h in frames.values():
            if h.group != phi.target:
                raise DescriptorMismatch("frames must live in the target group")
        self.iso = iso
        self.phi = phi
        self.frames = dict(frames)

    @classmethod
    def identity(cls, field: GaugeField) -> BundleMorphism:
        e = field.group.identity()
        return cls(GraphIso.identity(field.graph), GroupHom.identity(field.group),
                   {v: e for v in field.graph.vertices})

    @classmethod
    def from_gauge(cls, field: GaugeField, t: GaugeTransformation) -> BundleMorphism:
        return cls(GraphIso.identity(field.graph), GroupHom.identity(field.group), t.values)

    def __call__(self, p: BundlePoint) -> BundlePoint:
        return BundlePoint(self.iso.vertex(p.vertex), self.frames[p.vertex] * self.phi(p.fiber))

    def compose(self, other: BundleMorphism) -> BundleMorphism:
        """self o other."""
        iso = self.iso.compose(other.iso)
        phi = self.phi.compose(other.phi)
        frames = {v: self.frames[other.iso.vertex(v)] * self.phi(g) for v, g in other.frames.items()}
        return BundleMorphism(iso, phi, frames)

    def inverse(self) -> BundleMorphism:
        inv_iso = self.iso.inverse()
        inv_phi = self.phi.inverse()
        frames = {w: inv_phi(self.frames[inv_iso.vertex(w)]).inverse() for w in inv_iso.source.vertices}
        return BundleMorphism(inv_iso, inv_phi, frames)

    def distance(self, other: BundleMorphism) -> float:
        """Largest frame discrepancy, or inf if Psi or phi differ."""
        if self.iso != other.iso or self.phi != other.phi:
            return float("inf")
        return max((groups.distance(self.frames[v], other.frames[v]) for v in self.frames), default=0.0)

    def __eq__(self, other):
        if not isinstance(other, BundleMorphism):
            return NotImplemented
        if self.iso != other.iso or self.phi != other.phi:
            return False
        return all(self.frames[v] == other.frames[v] for v in self.frames)

    def __hash__(self):
        return hash(self.iso)

    def __repr__(self):
        frames = {v: h.payload for v, h in self.frames.items()}
        return f"BundleMorphism(vmap={self.iso.vmap}, phi={self.phi!r}, frames={frames})"


def connection_residual(m: BundleMorphism, src: GaugeField, dst: GaugeField) -> float:
    """max over edges of d(U'(Psi e), g(head) phi(U(e)) g(tail)^-1)."""
    if m.iso.source != src.graph or m.iso.target != dst.graph:
        raise WalkError("morphism is not typed between these fields")
    worst = 0.0
    for e in src.graph.edges:
        lhs = dst.link(m.iso.step(Step(e.name, True)))
        rhs = m.frames[e.head] * m.phi(src.links[e.name]) * m.frames[e.tail].inverse()
        worst = max(worst, groups.distance(lhs, rhs))
    return worst


def morphism_preserves_connection(m: BundleMorphism, src: GaugeField, dst: GaugeField) -> bool:
    r = connection_residual(m, src, dst)
    return r == 0.0 if dst.group.is_finite else r <= dst.group.tol


# --------------------------------------------------------------------------
# holonomy sub-bundle


@dataclass(frozen=True)
class HolonomySubBundle:
    field: GaugeField
    u: BundlePoint
    phi_group: groups.Subgroup
    # finite kinds: every reachable point; matrix kinds: one reachable point per vertex
    points: frozenset | None
    representatives: dict

    def fiber(self, v: str) -> list[GroupElement]:
        if self.points is None:
            raise GroupError("matrix-kind sub-bundles are not enumerated")
        return sorted((p.fiber for p in self.points if p.vertex == v), key=lambda h: h.value)

    def __contains__(self, p: BundlePoint) -> bool:
        if self.points is not None:
            return p in self.points
        r = self.representatives[p.vertex]
        return r.fiber.inverse() * p.fiber in self.phi_group

    def factor(self, p: BundlePoint) -> tuple[BundlePoint, GroupElement]:
        """p = q.a with q in the sub-bundle."""
        q = self.representatives[p.vertex]
        return q, q.fiber.inverse() * p.fiber


def holonomy_subbundle(field: GaugeField, u: BundlePoint, tree: Tree | None = None) -> HolonomySubBundle:
    g = field.graph
    if tree is None:
        tree = spanning_tree(g)
    gens = [holonomy(field, loop, u) for loop in chord_generators(g, tree, u.vertex)]
    phi_group = groups.subgroup_generated(gens, field.group)
    reps = {}
    for v in g.vertices:
        reps[v] = transport(field, tree.path(u.vertex, v), u)
    if not field.group.is_finite:
        return HolonomySubBundle(field, u, phi_group, None, reps)
    seen = {u}
    frontier = [u]
    while frontier:
        nxt = []
        for p in frontier:
            for s in g.steps_from(p.vertex):
                q = BundlePoint(g.step_end(s), field.link(s) * p.fiber)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return HolonomySubBundle(field, u, phi_group, frozenset(seen), reps)


# --------------------------------------------------------------------------
# transport-law property check


def _right_multiplying_transport(field: GaugeField, w: Walk, p: BundlePoint) -> BundlePoint:
    """Fault fixture: links act on the right, which breaks right-equivariance."""
    if w.start != p.vertex:
        raise WalkError("basepoint mismatch")
    g = p.fiber
    for s in w.steps:
        g = g * field.link(s)
    return BundlePoint(w.end, g)


def check_transport_laws(field: GaugeField, trials: int, seed: int, transport_fn: TransportFn = transport,
                 max_len: int = 12, report: Report | None = None) -> Report:
    """Transport laws (a)-(d) on seeded random points, group elements, loops and co-terminal walk pairs."""
    from . import sampling

    rep = report if report is not None else Report("lemma1", seed=seed)
    g = field.graph
    tree = spanning_tree(g)
    G = field.group

    def same(a: BundlePoint, b: BundlePoint) -> bool:
        return a.vertex == b.vertex and a.fiber == b.fiber

    for t in range(trials):
        rng = trial_rng(seed, "lemma1:" + repr(G), t)
        x = g.vertices[int(rng.integers(len(g.vertices)))]
        u = BundlePoint(x, G.random(rng))
        h = G.random(rng)
        alpha = sampling.random_walk(rng, g, x, int(rng.integers(0, max_len + 1)))
        alpha2 = sampling.coterminal_variant(rng, field, tree, alpha)
        gamma = sampling.random_loop(rng, g, tree, x, int(rng.integers(0, max_len + 1)))
        if rng.random() < 0.5 and G.is_finite:
            # raise to the holonomy order so that (c) also meets its "true" side
            k = holonomy(field, gamma, u).order()
            base = gamma
            for _ in range(k - 1):
                gamma = compose(base, gamma)
        data = {"x": x, "alpha": str(alpha), "alpha2": str(alpha2), "gamma": str(gamma)}

        # (a)
        lhs = transport_fn(field, compose(invert(alpha), alpha2), u)
        rhs = transport_fn(field, invert(alpha), transport_fn(field, alpha2, u))
        if not G.is_finite:
            rep.residual("a", groups.distance(lhs.fiber, rhs.fiber))
        rep.check(same(lhs, rhs), t, prop="a", **data)

        # (b)
        back = same(transport_fn(field, invert(alpha), transport_fn(field, alpha2, u)), u)
        meet = same(transport_fn(field, alpha, u), transport_fn(field, alpha2, u))
        if back:
            rep.count("b_true_cases")
        rep.check(back == meet, t, prop="b", **data)

        # (c)
        hol = holonomy(field, gamma, u, transport_fn)
        fixed = same(transport_fn(field, gamma, u), u)
        if fixed:
            rep.count("c_true_cases")
        rep.check(hol.is_identity() == fixed, t, prop="c", **data)

        # (d)
        lhs = transport_fn(field, alpha, u.act(h))
        rhs = transport_fn(field, alpha, u).act(h)
        if not G.is_finite:
            rep.residual("d", groups.distance(lhs.fiber, rhs.fiber))
        rep.check(same(lhs, rhs), t, prop="d", h=repr(h.payload), **data)
        rep.trials += 1
    return rep
