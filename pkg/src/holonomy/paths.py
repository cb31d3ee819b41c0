"""Graphs, edge walks and thin equivalence.

A walk is a start vertex plus a word of signed edge steps.  Thin equivalence
on a graph is free reduction: cancel a step immediately followed by its own
reverse until none is left.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import DisconnectedGraph, GraphError, ParseError, SearchBoundsExceeded, WalkError


class Edge(NamedTuple):
    name: str
    tail: str
    head: str


class Step(NamedTuple):
    edge: str
    forward: bool = True

    def inverse(self) -> Step:
        return Step(self.edge, not self.forward)

    def __str__(self):
        return self.edge if self.forward else self.edge + "~"


class Graph:
    """Finite connected multigraph with oriented, uniquely named edges.  Self-loops allowed."""

    __slots__ = ("vertices", "edges", "_edges", "_out", "_hash")

    def __init__(self, vertices: Iterable[str], edges: Iterable):
        self.vertices = tuple(vertices)
        if not self.vertices:
            raise GraphError("a graph needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex identifier")
        vset = set(self.vertices)
        es = []
        for e in edges:
            e = Edge(*e)
            if e.tail not in vset or e.head not in vset:
                raise GraphError(f"edge {e.name!r} has an endpoint outside the vertex set")
            es.append(e)
        self.edges = tuple(es)
        self._edges = {e.name: e for e in es}
        if len(self._edges) != len(es):
            raise GraphError("duplicate edge name")
        out: dict[str, list[Step]] = {v: [] for v in self.vertices}
        for e in sorted(es, key=lambda e: e.name):
            out[e.tail].append(Step(e.name, True))
            out[e.head].append(Step(e.name, False))
        self._out = {v: tuple(s) for v, s in out.items()}
        self._hash = None
        if len(self._component(self.vertices[0])) != len(self.vertices):
            raise DisconnectedGraph("graph is not connected")

    def _component(self, v):
        seen = {v}
        queue = deque([v])
        while queue:
            a = queue.popleft()
            for s in self._out[a]:
                b = self.step_end(s)
                if b not in seen:
                    seen.add(b)
                    queue.append(b)
        return seen

    def edge(self, name: str) -> Edge:
        try:
            return self._edges[name]
        except KeyError:
            raise WalkError(f"unknown edge {name!r}") from None

    def has_vertex(self, v) -> bool:
        return v in self._out

    def steps_from(self, v: str) -> tuple:
        """Steps leaving v, ordered by edge name (forward before reverse for self-loops)."""
        return self._out[v]

    def step_start(self, s: Step) -> str:
        e = self.edge(s.edge)
        return e.tail if s.forward else e.head

    def step_end(self, s: Step) -> str:
        e = self.edge(s.edge)
        return e.head if s.forward else e.tail

    def degree(self, v: str) -> int:
        return len(self._out[v])

    @property
    def betti(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vertices, self.edges))
        return self._hash

    def __repr__(self):
        return f"Graph(|V|={len(self.vertices)}, |E|={len(self.edges)})"


class Walk:
    __slots__ = ("graph", "start", "steps", "end")

    def __init__(self, graph: Graph, start: str, steps: Sequence[Step] = ()):
        if not graph.has_vertex(start):
            raise WalkError(f"unknown vertex {start!r}")
        steps = tuple(s if isinstance(s, Step) else Step(*s) for s in steps)
        v = start
        for i, s in enumerate(steps):
            if graph.step_start(s) != v:
                raise WalkError(f"step {i} ({s}) does not start at {v!r}")
            v = graph.step_end(s)
        self.graph = graph
        self.start = start
        self.steps = steps
        self.end = v

    def __len__(self):
        return len(self.steps)

    @property
    def is_loop(self) -> bool:
        return self.start == self.end

    def is_reduced(self) -> bool:
        return all(b != a.inverse() for a, b in zip(self.steps, self.steps[1:]))

    def vertices_visited(self) -> list[str]:
        out = [self.start]
        for s in self.steps:
            out.append(self.graph.step_end(s))
        return out

    def __eq__(self, other):
        if not isinstance(other, Walk):
            return NotImplemented
        return self.start == other.start and self.steps == other.steps and self.graph == other.graph

    def __hash__(self):
        return hash((self.start, self.steps))

    def __repr__(self):
        return f"Walk({format_walk(self)!r})"

    def __str__(self):
        return format_walk(self)


class ReducedWalk(Walk):
    """A walk with no step immediately followed by its own reverse."""

    __slots__ = ()

    def __init__(self, graph, start, steps=()):
        super().__init__(graph, start, steps)
        if not self.is_reduced():
            raise WalkError("walk has a cancelling pair; use reduce()")


def identity_walk(graph: Graph, x: str) -> ReducedWalk:
    return ReducedWalk(graph, x, ())


def compose(w2: Walk, w1: Walk) -> Walk:
    """Concatenation with w1 traversed first."""
    if w1.end != w2.start:
        raise WalkError(f"cannot compose: first walk ends at {w1.end!r}, second starts at {w2.start!r}")
    return Walk(w1.graph, w1.start, w1.steps + w2.steps)


def compose_all(*walks: Walk) -> Walk:
    """compose_all(wn, ..., w1): the last argument is traversed first."""
    out = walks[-1]
    for w in reversed(walks[:-1]):
        out = compose(w, out)
    return out


def invert(w: Walk) -> Walk:
    steps = tuple(s.inverse() for s in reversed(w.steps))
    cls = ReducedWalk if isinstance(w, ReducedWalk) else Walk
    return cls(w.graph, w.end, steps)


def reduce(w: Walk) -> ReducedWalk:
    stack: list[Step] = []
    for s in w.steps:
        if stack and stack[-1] == s.inverse():
            stack.pop()
        else:
            stack.append(s)
    return ReducedWalk(w.graph, w.start, stack)


def reduce_word(word: Iterable[tuple]) -> list[tuple]:
    """Free reduction of a word of (letter, +1/-1) pairs."""
    stack: list[tuple] = []
    for letter, sign in word:
        if stack and stack[-1] == (letter, -sign):
            stack.pop()
        else:
            stack.append((letter, sign))
    return stack


# --------------------------------------------------------------------------
# spanning trees and the loop group


@dataclass(frozen=True)
class Tree:
    graph: Graph
    root: str
    edges: frozenset
    parent: dict  # vertex -> Step from parent vertex into it (root absent)

    @property
    def chords(self) -> list[str]:
        return sorted(e.name for e in self.graph.edges if e.name not in self.edges)

    def path_from_root(self, v: str) -> ReducedWalk:
        steps = []
        while v != self.root:
            s = self.parent[v]
            steps.append(s)
            v = self.graph.step_start(s)
        return ReducedWalk(self.graph, self.root, tuple(reversed(steps)))

    def path(self, a: str, b: str) -> ReducedWalk:
        """The unique reduced tree path from a to b."""
        return reduce(compose(self.path_from_root(b), invert(self.path_from_root(a))))

    def __eq__(self, other):
        if not isinstance(other, Tree):
            return NotImplemented
        return self.graph == other.graph and self.root == other.root and self.edges == other.edges

    def __hash__(self):
        return hash((self.graph, self.root, self.edges))


def spanning_tree(g: Graph, root: str | None = None) -> Tree:
    """Breadth-first spanning tree; incident edges are scanned in name order."""
    if root is None:
        root = g.vertices[0]
    if not g.has_vertex(root):
        raise GraphError(f"unknown root {root!r}")
    parent = {}
    seen = {root}
    queue = deque([root])
    while queue:
        a = queue.popleft()
        for s in g.steps_from(a):
            b = g.step_end(s)
            if b not in seen:
                seen.add(b)
                parent[b] = s
                queue.append(b)
    if len(seen) != len(g.vertices):
        raise DisconnectedGraph("graph is not connected")
    return Tree(g, root, frozenset(s.edge for s in parent.values()), parent)


def tree_from_edges(g: Graph, edge_names: Iterable[str], root: str | None = None) -> Tree:
    """Rebuild a Tree from an explicit edge list; rejects anything but a spanning tree."""
    names = frozenset(edge_names)
    if root is None:
        root = g.vertices[0]
    for n in names:
        g.edge(n)
    if len(names) != len(g.vertices) - 1:
        raise GraphError(f"a spanning tree needs {len(g.vertices) - 1} edges, got {len(names)}")
    parent = {}
    seen = {root}
    queue = deque([root])
    while queue:
        a = queue.popleft()
        for s in g.steps_from(a):
            if s.edge not in names:
                continue
            b = g.step_end(s)
            if b in seen:
                continue
            seen.add(b)
            parent[b] = s
            queue.append(b)
    # n - 1 edges that span cannot contain a cycle
    if len(seen) != len(g.vertices):
        raise GraphError("tree edges do not span the graph")
    return Tree(g, root, names, parent)


def chord_loop(tree: Tree, x: str, e: str) -> ReducedWalk:
    """treepath(x -> tail e) . e . treepath(head e -> x), reduced."""
    g = tree.graph
    edge = g.edge(e)
    w = compose_all(tree.path(edge.head, x), Walk(g, edge.tail, [Step(e, True)]), tree.path(x, edge.tail))
    return reduce(w)


def chord_generators(g: Graph, tree: Tree, x: str) -> list[ReducedWalk]:
    """One loop at x per chord, in chord-name order."""
    if not g.has_vertex(x):
        raise WalkError(f"unknown vertex {x!r}")
    return [chord_loop(tree, x, e) for e in tree.chords]


def loop_decompose(loop: Walk, tree: Tree, x: str | None = None) -> list[tuple[str, int]]:
    """Word in the chord generators (chord name, +1/-1) whose expansion reduces to reduce(loop)."""
    if x is not None and loop.start != x:
        raise WalkError(f"loop starts at {loop.start!r}, expected {x!r}")
    if not loop.is_loop:
        raise WalkError("walk is not closed")
    word = [(s.edge, 1 if s.forward else -1) for s in loop.steps if s.edge not in tree.edges]
    return reduce_word(word)


def expand_word(word: Sequence[tuple[str, int]], tree: Tree, x: str) -> ReducedWalk:
    """Substitute chord-generator loops for the letters of ``word`` and reduce."""
    out: Walk = identity_walk(tree.graph, x)
    for e, sign in word:
        gen = chord_loop(tree, x, e)
        out = compose(gen if sign > 0 else invert(gen), out)
    return reduce(out)


# --------------------------------------------------------------------------
# graph isomorphisms


class GraphIso:
    """Vertex bijection plus an edge map name -> (name', forward?).

    ``forward`` False means the edge is carried onto the reverse of its image.
    """

    __slots__ = ("source", "target", "vmap", "emap")

    def __init__(self, source: Graph, target: Graph, vmap: dict, emap: dict):
        self.source = source
        self.target = target
        self.vmap = dict(vmap)
        self.emap = {k: (v[0], bool(v[1])) for k, v in emap.items()}
        if set(self.vmap) != set(source.vertices) or sorted(self.vmap.values()) != sorted(target.vertices):
            raise GraphError("vertex map is not a bijection")
        if set(self.emap) != {e.name for e in source.edges} or \
                sorted(v[0] for v in self.emap.values()) != sorted(e.name for e in target.edges):
            raise GraphError("edge map is not a bijection")
        for e in source.edges:
            name, fwd = self.emap[e.name]
            t = target.edge(name)
            a, b = (t.tail, t.head) if fwd else (t.head, t.tail)
            if (self.vmap[e.tail], self.vmap[e.head]) != (a, b):
                raise GraphError(f"edge {e.name!r} is not carried onto an incident edge")

    @classmethod
    def identity(cls, g: Graph) -> GraphIso:
        return cls(g, g, {v: v for v in g.vertices}, {e.name: (e.name, True) for e in g.edges})

    def vertex(self, v: str) -> str:
        return self.vmap[v]

    def step(self, s: Step) -> Step:
        name, fwd = self.emap[s.edge]
        return Step(name, fwd == s.forward)

    def walk(self, w: Walk) -> Walk:
        if w.graph != self.source:
            raise WalkError("walk lives on a different graph")
        cls = ReducedWalk if isinstance(w, ReducedWalk) else Walk
        return cls(self.target, self.vmap[w.start], tuple(self.step(s) for s in w.steps))

    def inverse(self) -> GraphIso:
        vmap = {b: a for a, b in self.vmap.items()}
        emap = {name: (a, fwd) for a, (name, fwd) in self.emap.items()}
        return GraphIso(self.target, self.source, vmap, emap)

    def compose(self, other: GraphIso) -> GraphIso:
        """self o other (apply ``other`` first)."""
        if other.target != self.source:
            raise GraphError("composing graph isomorphisms with mismatched graphs")
        vmap = {v: self.vmap[w] for v, w in other.vmap.items()}
        emap = {}
        for a, (b, f1) in other.emap.items():
            c, f2 = self.emap[b]
            emap[a] = (c, f1 == f2)
        return GraphIso(other.source, self.target, vmap, emap)

    def is_identity(self) -> bool:
        return all(k == v for k, v in self.vmap.items()) and all(k == v[0] and v[1] for k, v in self.emap.items())

    def __eq__(self, other):
        if not isinstance(other, GraphIso):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.vmap == other.vmap and self.emap == other.emap)

    def __hash__(self):
        return hash((tuple(sorted(self.vmap.items())), tuple(sorted(self.emap.items()))))

    def __repr__(self):
        return f"GraphIso(vmap={self.vmap}, emap={self.emap})"


def _pair_key(e: Edge):
    return (e.tail, e.head) if e.tail <= e.head else (e.head, e.tail)


def graph_isomorphisms(g1: Graph, g2: Graph, max_vertices: int = 10) -> Iterator[GraphIso]:
    """Every isomorphism g1 -> g2 (orientation may flip), in a deterministic order.

    Brute force over vertex bijections with degree and edge-multiplicity pruning,
    then over permutations of parallel edges and orientations of self-loops.
    """
    n = len(g1.vertices)
    if n > max_vertices or len(g2.vertices) > max_vertices:
        raise SearchBoundsExceeded(f"graph isomorphism search is capped at {max_vertices} vertices")
    if n != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return
    bundles1: dict[tuple, list[Edge]] = {}
    for e in sorted(g1.edges, key=lambda e: e.name):
        bundles1.setdefault(_pair_key(e), []).append(e)
    bundles2: dict[tuple, list[Edge]] = {}
    for e in sorted(g2.edges, key=lambda e: e.name):
        bundles2.setdefault(_pair_key(e), []).append(e)

    def mult(bundles, a, b):
        key = (a, b) if a <= b else (b, a)
        return len(bundles.get(key, ()))

    verts1 = sorted(g1.vertices, key=lambda v: (-g1.degree(v), v))
    verts2 = sorted(g2.vertices)
    if sorted(g1.degree(v) for v in verts1) != sorted(g2.degree(v) for v in verts2):
        return

    def vertex_maps(i, vmap, used):
        if i == n:
            yield dict(vmap)
            return
        v = verts1[i]
        for w in verts2:
            if w in used or g1.degree(v) != g2.degree(w):
                continue
            if mult(bundles1, v, v) != mult(bundles2, w, w):
                continue
            if any(mult(bundles1, v, u) != mult(bundles2, w, vmap[u]) for u in verts1[:i]):
                continue
            vmap[v] = w
            used.add(w)
            yield from vertex_maps(i + 1, vmap, used)
            del vmap[v]
            used.discard(w)

    for vmap in vertex_maps(0, {}, set()):
        choices = []
        for key, es in sorted(bundles1.items()):
            a, b = vmap[key[0]], vmap[key[1]]
            targets = bundles2[(a, b) if a <= b else (b, a)]
            options = []
            for perm in itertools.permutations(targets):
                if key[0] == key[1]:
                    for flips in itertools.product((True, False), repeat=len(es)):
                        options.append([(e.name, (t.name, f)) for e, t, f in zip(es, perm, flips)])
                else:
                    options.append([(e.name, (t.name, vmap[e.tail] == t.tail)) for e, t in zip(es, perm)])
            choices.append(options)
        for combo in itertools.product(*choices):
            emap = dict(pair for part in combo for pair in part)
            yield GraphIso(g1, g2, vmap, emap)


# --------------------------------------------------------------------------
# walk literals: "x: a b~ c" or "x: a b⁻¹ c"

_REVERSE_SUFFIXES = ("⁻¹", "~")


def parse_walk(graph: Graph, text: str) -> Walk:
    if ":" not in text:
        raise ParseError("walk literal needs 'start: steps'", "walk")
    start, _, body = text.partition(":")
    start = start.strip()
    if not graph.has_vertex(start):
        raise ParseError(f"unknown start vertex {start!r}", "walk")
    steps = []
    for i, tok in enumerate(body.split()):
        fwd = True
        for suf in _REVERSE_SUFFIXES:
            if tok.endswith(suf):
                tok, fwd = tok[: -len(suf)], False
                break
        if tok not in {e.name for e in graph.edges}:
            raise ParseError(f"unknown edge {tok!r}", f"walk[{i}]")
        steps.append(Step(tok, fwd))
    try:
        return Walk(graph, start, steps)
    except WalkError as exc:
        raise ParseError(str(exc), "walk") from None


def format_walk(w: Walk) -> str:
    body = " ".join(str(s) for s in w.steps)
    return f"{w.start}: {body}" if body else f"{w.start}:"
