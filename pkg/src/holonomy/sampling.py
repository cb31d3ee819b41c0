"""Seeded random instances for the property suites."""
from __future__ import annotations

import numpy as np

from .bundle import GaugeField, GaugeTransformation, holonomy, BundlePoint
from .groups import GroupDescriptor
from .paths import Edge, Graph, GraphIso, Step, Tree, Walk, compose


def random_graph(rng: np.random.Generator, n_min: int = 1, n_max: int = 10, extra_max: int = 4,
                 self_loops: bool = True) -> Graph:
    """Random tree with a few extra edges (parallel edges and self-loops allowed)."""
    n = int(rng.integers(n_min, n_max + 1))
    verts = [f"v{i}" for i in range(n)]
    pairs = []
    for i in range(1, n):
        j = int(rng.integers(i))
        pairs.append((verts[i], verts[j]) if rng.random() < 0.5 else (verts[j], verts[i]))
    for _ in range(int(rng.integers(0, extra_max + 1))):
        a, b = verts[int(rng.integers(n))], verts[int(rng.integers(n))]
        if a == b and not self_loops:
            continue
        pairs.append((a, b))
    order = rng.permutation(len(pairs))
    edges = [Edge(f"e{k:02d}", *pairs[i]) for k, i in enumerate(order)]
    return Graph(verts, edges)


def random_walk(rng: np.random.Generator, g: Graph, start: str, length: int) -> Walk:
    steps = []
    v = start
    for _ in range(length):
        options = g.steps_from(v)
        if not options:
            break
        s = options[int(rng.integers(len(options)))]
        steps.append(s)
        v = g.step_end(s)
    return Walk(g, start, steps)


def random_walk_to(rng: np.random.Generator, g: Graph, tree: Tree, start: str, end: str, length: int) -> Walk:
    w = random_walk(rng, g, start, length)
    return compose(tree.path(w.end, end), w)


def random_loop(rng: np.random.Generator, g: Graph, tree: Tree, x: str, length: int) -> Walk:
    return random_walk_to(rng, g, tree, x, x, length)


def insert_spur(rng: np.random.Generator, w: Walk) -> Walk:
    """Insert a back-and-forth step at a random position (thinly equivalent)."""
    g = w.graph
    i = int(rng.integers(len(w.steps) + 1))
    v = w.vertices_visited()[i]
    options = g.steps_from(v)
    if not options:
        return w
    s = options[int(rng.integers(len(options)))]
    return Walk(g, w.start, w.steps[:i] + (s, s.inverse()) + w.steps[i:])


def coterminal_variant(rng: np.random.Generator, field: GaugeField, tree: Tree, alpha: Walk) -> Walk:
    """A walk with alpha's endpoints: independent, thinly equivalent, or alpha after a trivial-holonomy loop."""
    g = field.graph
    kind = int(rng.integers(3))
    if kind == 0:
        return random_walk_to(rng, g, tree, alpha.start, alpha.end, int(rng.integers(0, 12)))
    if kind == 1:
        return insert_spur(rng, alpha)
    loop = random_loop(rng, g, tree, alpha.start, int(rng.integers(0, 8)))
    if field.group.is_finite:
        u = BundlePoint(alpha.start, field.group.identity())
        k = holonomy(field, loop, u).order()
        base = loop
        for _ in range(k - 1):
            loop = compose(base, loop)
    return compose(alpha, loop)


def random_field(rng: np.random.Generator, g: Graph, group: GroupDescriptor) -> GaugeField:
    return GaugeField(g, group, {e.name: group.random(rng) for e in g.edges})


def random_gauge(rng: np.random.Generator, g: Graph, group: GroupDescriptor) -> GaugeTransformation:
    return GaugeTransformation(group, {v: group.random(rng) for v in g.vertices})


def random_relabel(rng: np.random.Generator, g: Graph, prefix: str = "w") -> tuple[Graph, GraphIso]:
    """An isomorphic copy with fresh names, shuffled orientations; returns (copy, iso g -> copy)."""
    n = len(g.vertices)
    perm = rng.permutation(n)
    vmap = {v: f"{prefix}{int(perm[i])}" for i, v in enumerate(g.vertices)}
    eperm = rng.permutation(len(g.edges))
    edges, emap = [], {}
    for i, e in enumerate(g.edges):
        name = f"{prefix}e{int(eperm[i]):02d}"
        flip = bool(rng.random() < 0.5)
        a, b = vmap[e.tail], vmap[e.head]
        edges.append(Edge(name, b, a) if flip else Edge(name, a, b))
        emap[e.name] = (name, not flip)
    g2 = Graph(sorted(vmap.values(), key=lambda s: int(s[len(prefix):])), sorted(edges, key=lambda e: e.name))
    return g2, GraphIso(g, g2, vmap, emap)


def theta_graph() -> Graph:
    """Two vertices joined by three parallel edges."""
    return Graph(["x", "y"], [Edge("a", "x", "y"), Edge("b", "x", "y"), Edge("c", "x", "y")])


def figure_eight() -> Graph:
    return Graph(["x"], [Edge("a", "x", "x"), Edge("b", "x", "x")])


def path_graph(n: int = 3) -> Graph:
    verts = [f"v{i}" for i in range(n)]
    return Graph(verts, [Edge(f"t{i}", verts[i], verts[i + 1]) for i in range(n - 1)])


def step(edge: str, forward: bool = True) -> Step:
    return Step(edge, forward)


def random_phi(rng: np.random.Generator, G: GroupDescriptor):
    """A random automorphism of G (full search for finite kinds, catalog for matrix kinds)."""
    from .groups import GroupHom, isomorphism_search

    if G.kind == "SU2":
        return GroupHom(G, G, ("inner", G.random(rng).value))
    options = isomorphism_search(G, G)
    return options[int(rng.integers(len(options)))]


def random_holonomy_map(rng: np.random.Generator, g: Graph, G: GroupDescriptor, x: str | None = None):
    from .category import HolonomyMap
    from .paths import spanning_tree

    if x is None:
        x = g.vertices[int(rng.integers(len(g.vertices)))]
    tree = spanning_tree(g, x)
    return HolonomyMap(g, x, G, tree, {e: G.random(rng) for e in tree.chords})


def random_arrow(rng: np.random.Generator, H, relabel: bool = True, walk_len: int = 6, phi=None):
    """A fresh object H' and a valid arrow H -> H' (Psi, alpha, phi) built through the diagram."""
    from .category import HolonomyMap, evaluate
    from .paths import compose_all, invert, reduce, spanning_tree

    g = H.graph
    if relabel:
        g2, psi = random_relabel(rng, g, prefix="w" if not g.vertices[0].startswith("w") else "v")
    else:
        g2, psi = g, GraphIso.identity(g)
    if phi is None:
        phi = random_phi(rng, H.group)
    x2 = g2.vertices[int(rng.integers(len(g2.vertices)))]
    pinv = psi.inverse()
    y = pinv.vertex(x2)
    tree0 = spanning_tree(g, H.base)
    alpha = reduce(random_walk_to(rng, g, tree0, y, H.base, int(rng.integers(0, walk_len + 1))))
    tree2 = spanning_tree(g2, x2)
    images = {}
    for e in tree2.chords:
        from .paths import chord_loop

        back = pinv.walk(chord_loop(tree2, x2, e))
        images[e] = phi(evaluate(H, reduce(compose_all(alpha, back, invert(alpha)))))
    H2 = HolonomyMap(g2, x2, phi.target, tree2, images)
    return H2, psi, alpha, phi


def holonomy_isomorphic_pair(rng: np.random.Generator, field: GaugeField, u: BundlePoint):
    """(field', u') whose holonomy map at u' is the target of a random arrow out of the map at u."""
    from .bundle import apply_gauge
    from .category import induced_holonomy_map
    from .reconstruction import reconstruct

    H = induced_holonomy_map(field, u)
    H2, psi, alpha, phi = random_arrow(rng, H)
    R = reconstruct(H2)
    t = random_gauge(rng, R.field.graph, R.field.group)
    f2 = apply_gauge(R.field, t)
    return f2, BundlePoint(H2.base, t(H2.base)), (H2, psi, alpha, phi)
