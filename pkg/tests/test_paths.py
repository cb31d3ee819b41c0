import math
from collections import Counter
from functools import lru_cache

import networkx as nx
import pytest
from hypothesis import given
from networkx.algorithms.isomorphism import MultiGraphMatcher

from holonomy import sampling
from holonomy.errors import DisconnectedGraph, GraphError, ParseError, SearchBoundsExceeded, WalkError
from holonomy.paths import (Edge, Graph, GraphIso, Step, Walk, chord_generators, compose, expand_word,
                            format_walk, graph_isomorphisms, identity_walk, invert, loop_decompose,
                            parse_walk, reduce, spanning_tree, tree_from_edges)

from conftest import rng_of, seeds


def _walk(g, start, *names):
    return Walk(g, start, [Step(n.rstrip("~"), not n.endswith("~")) for n in names])


def test_compose_examples():
    g = sampling.path_graph(3)
    x = identity_walk(g, "v0")
    assert compose(x, x) == x
    a = _walk(g, "v0", "t0")
    b = _walk(g, "v1", "t1")
    ab = compose(b, a)
    assert ab.start == "v0" and [s.edge for s in ab.steps] == ["t0", "t1"]
    w = compose(b, a)
    assert len(reduce(compose(invert(w), w))) == 0
    with pytest.raises(WalkError):
        compose(a, b)


def test_invert_examples():
    g = sampling.path_graph(3)
    assert invert(identity_walk(g, "v1")) == identity_walk(g, "v1")
    w = _walk(g, "v0", "t0", "t1")
    assert invert(w).steps == (Step("t1", False), Step("t0", False))
    assert invert(invert(w)) == w


def test_reduce_examples():
    g = sampling.figure_eight()
    assert len(reduce(_walk(g, "x", "a", "a~"))) == 0
    assert reduce(_walk(g, "x", "a", "b", "b~", "a")).steps == (Step("a"), Step("a"))


@lru_cache(maxsize=None)
def _fixpoints(word):
    """Every word reachable by cancelling adjacent inverse pairs until none is left, in any order."""
    out = set()
    for i in range(len(word) - 1):
        if word[i][0] == word[i + 1][0] and word[i][1] != word[i + 1][1]:
            out |= _fixpoints(word[:i] + word[i + 2:])
    return frozenset(out) if out else frozenset([word])


@given(seed=seeds)
def test_reduce_matches_all_orders_cancellation(seed):
    rng = rng_of(seed)
    g = sampling.random_graph(rng, 1, 4, extra_max=2)
    w = sampling.random_walk(rng, g, g.vertices[0], int(rng.integers(0, 17)))
    fp = _fixpoints(tuple(w.steps))
    assert fp == {reduce(w).steps}


@given(seed=seeds)
def test_reduce_long_walks_against_random_order_cancellation(seed):
    rng = rng_of(seed)
    g = sampling.random_graph(rng, 1, 5)
    w = sampling.random_walk(rng, g, g.vertices[0], int(rng.integers(0, 41)))
    word = list(w.steps)
    while True:
        spots = [i for i in range(len(word) - 1) if word[i + 1] == word[i].inverse()]
        if not spots:
            break
        i = spots[int(rng.integers(len(spots)))]
        del word[i:i + 2]
    assert reduce(w).steps == tuple(word)


@given(seed=seeds)
def test_reduction_laws(seed):
    rng = rng_of(seed)
    g = sampling.random_graph(rng, 1, 6)
    w1 = sampling.random_walk(rng, g, g.vertices[0], int(rng.integers(0, 12)))
    w2 = sampling.random_walk(rng, g, w1.end, int(rng.integers(0, 12)))
    w3 = sampling.random_walk(rng, g, w2.end, int(rng.integers(0, 6)))
    assert reduce(compose(w2, w1)) == reduce(compose(reduce(w2), reduce(w1)))
    assert reduce(reduce(w1)) == reduce(w1)
    assert len(reduce(compose(invert(w1), w1))) == 0
    # congruence: a spur-inserted copy stays thinly equal after composing
    b = sampling.insert_spur(rng, w2)
    assert reduce(b) == reduce(w2)
    assert reduce(compose(w3, b)) == reduce(compose(w3, w2))


def test_graph_validation():
    with pytest.raises(GraphError):
        Graph([], [])
    with pytest.raises(GraphError):
        Graph(["x", "x"], [])
    with pytest.raises(GraphError):
        Graph(["x"], [Edge("a", "x", "y")])
    with pytest.raises(GraphError):
        Graph(["x"], [Edge("a", "x", "x"), Edge("a", "x", "x")])
    with pytest.raises(DisconnectedGraph):
        Graph(["x", "y"], [])
    with pytest.raises(WalkError):
        _walk(sampling.path_graph(3), "v0", "t1")


def test_spanning_tree_examples():
    assert len(spanning_tree(Graph(["x"], [])).edges) == 0
    assert spanning_tree(sampling.path_graph(3)).edges == {"t0", "t1"}
    th = spanning_tree(sampling.theta_graph())
    assert len(th.edges) == 1 and len(th.chords) == 2
    assert spanning_tree(sampling.theta_graph()) == th


@given(seed=seeds)
def test_spanning_tree_is_a_tree(seed):
    rng = rng_of(seed)
    g = sampling.random_graph(rng, 1, 12)
    root = g.vertices[int(rng.integers(len(g.vertices)))]
    t = spanning_tree(g, root)
    assert len(t.edges) == len(g.vertices) - 1
    nxg = nx.MultiGraph()
    nxg.add_nodes_from(g.vertices)
    nxg.add_edges_from((e.tail, e.head) for e in g.edges if e.name in t.edges)
    assert nx.is_tree(nxg)
    for v in g.vertices:
        assert t.path(root, v).end == v and t.path(root, v).is_reduced()
    assert tree_from_edges(g, t.edges, root).parent == t.parent


def test_tree_from_edges_rejects_non_trees():
    g = sampling.theta_graph()
    with pytest.raises(GraphError):
        tree_from_edges(g, ["a", "b"])


def test_chord_generator_examples():
    assert chord_generators(sampling.path_graph(4), spanning_tree(sampling.path_graph(4)), "v0") == []
    one = Graph(["x"], [Edge("a", "x", "x")])
    gens = chord_generators(one, spanning_tree(one), "x")
    assert [g.steps for g in gens] == [(Step("a"),)]
    th = sampling.theta_graph()
    for x in th.vertices:
        assert len(chord_generators(th, spanning_tree(th), x)) == 2


@given(seed=seeds)
def test_chord_count_is_betti(seed):
    rng = rng_of(seed)
    g = sampling.random_graph(rng, 1, 12)
    t = spanning_tree(g)
    assert len(chord_generators(g, t, g.vertices[-1])) == len(g.edges) - len(g.vertices) + 1 == g.betti


@given(seed=seeds)
def test_loop_decompose_roundtrip(seed):
    rng = rng_of(seed)
    g = sampling.random_graph(rng, 1, 12)
    t = spanning_tree(g)
    x = g.vertices[int(rng.integers(len(g.vertices)))]
    loop = sampling.random_loop(rng, g, t, x, int(rng.integers(0, 20)))
    word = loop_decompose(loop, t, x)
    assert expand_word(word, t, x) == reduce(loop)


def test_loop_decompose_examples():
    th = sampling.theta_graph()
    t = spanning_tree(th)
    assert loop_decompose(identity_walk(th, "x"), t, "x") == []
    for gen in chord_generators(th, t, "x"):
        assert len(loop_decompose(gen, t, "x")) == 1
    with pytest.raises(WalkError):
        loop_decompose(identity_walk(th, "y"), t, "x")


def test_walk_literals():
    th = sampling.theta_graph()
    w = parse_walk(th, "x: a b⁻¹ c c~")
    assert w.steps == (Step("a"), Step("b", False), Step("c"), Step("c", False))
    assert parse_walk(th, format_walk(w)) == w
    assert parse_walk(th, "y:") == identity_walk(th, "y")
    for bad in ("a b", "z: a", "x: q", "x: a a"):
        with pytest.raises(ParseError):
            parse_walk(th, bad)


# graph isomorphisms against networkx


def _nx(g):
    m = nx.MultiGraph()
    m.add_nodes_from(g.vertices)
    m.add_edges_from((e.tail, e.head) for e in g.edges)
    return m


def _expected_count(g, vmap_count):
    """Edge-level isomorphisms per vertex map: permute parallel edges, flip self-loops."""
    per = 1
    for (a, b), m in Counter(tuple(sorted((e.tail, e.head))) for e in g.edges).items():
        per *= math.factorial(m) * (2 ** m if a == b else 1)
    return vmap_count * per


@given(seed=seeds)
def test_graph_isomorphisms_match_networkx(seed):
    rng = rng_of(seed)
    g1 = sampling.random_graph(rng, 1, 6, extra_max=3)
    if rng.random() < 0.5:
        g2, _ = sampling.random_relabel(rng, g1)
    else:
        g2 = sampling.random_graph(rng, len(g1.vertices), len(g1.vertices), extra_max=3)
    ours = list(graph_isomorphisms(g1, g2))
    theirs = list(MultiGraphMatcher(_nx(g1), _nx(g2)).isomorphisms_iter())
    assert {tuple(sorted(p.vmap.items())) for p in ours} == {tuple(sorted(m.items())) for m in theirs}
    assert len(ours) == len(set(ours)) == _expected_count(g1, len(theirs))
    for p in ours:
        assert p.inverse().compose(p).is_identity()


def test_graph_iso_rejects_non_incident_maps():
    th = sampling.theta_graph()
    with pytest.raises(GraphError):
        GraphIso(th, th, {"x": "y", "y": "x"}, {"a": ("a", True), "b": ("b", True), "c": ("c", True)})
    swap = GraphIso(th, th, {"x": "y", "y": "x"}, {"a": ("a", False), "b": ("c", False), "c": ("b", False)})
    w = parse_walk(th, "x: a b~")
    assert format_walk(swap.walk(w)) == "y: a~ c"


def test_graph_iso_search_bound():
    g = sampling.path_graph(12)
    with pytest.raises(SearchBoundsExceeded):
        next(graph_isomorphisms(g, g, max_vertices=10))
