import pytest
from hypothesis import given

from holonomy import groups, sampling
from holonomy.bundle import BundlePoint, GaugeField, holonomy
from holonomy.category import (HolonomyMap, SMOOTHNESS_AXIOM, alpha_equivalent, canonical_alpha,
                               compose_iso, compose_star, evaluate, flat_map, identity_iso, identity_star,
                               induced_holonomy_map, invert_iso, invert_star, lift_star, make_iso,
                               make_star_iso, q_not_faithful_witness, q_not_split_witness, quotient_Q,
                               revalidate)
from holonomy.errors import DiagramViolation, UnsuitableGraph, WalkError
from holonomy.groups import GroupHom
from holonomy.paths import (Edge, Graph, GraphIso, Step, Walk, compose, compose_all, identity_walk,
                            invert, reduce, spanning_tree)
from holonomy.reconstruction import apply_C

from conftest import field_of, finite_kinds, kinds, rng_of, seeds

S3 = groups.symmetric(3)


def _reduced_walks(g, start, max_len, end=None):
    """Every reduced walk from start of length <= max_len, shortlex order (forward steps first)."""
    out = []
    layer = [Walk(g, start, ())]
    for _ in range(max_len + 1):
        nxt = []
        for w in layer:
            if end is None or w.end == end:
                out.append(w)
            for s in sorted(g.steps_from(w.end), key=lambda s: (s.edge, not s.forward)):
                if w.steps and s == w.steps[-1].inverse():
                    continue
                nxt.append(Walk(g, start, w.steps + (s,)))
        layer = nxt
    return out


def _equivalent_by_definition(H, alpha, beta, max_len):
    for gp in _reduced_walks(H.graph, alpha.start, max_len, end=alpha.start):
        ha = evaluate(H, reduce(compose_all(alpha, gp, invert(alpha))))
        hb = evaluate(H, reduce(compose_all(beta, gp, invert(beta))))
        if ha != hb:
            return False
    return True


def test_evaluate_examples():
    rng = rng_of(0)
    f = sampling.random_field(rng, sampling.theta_graph(), S3)
    u = BundlePoint("x", S3.identity())
    H = induced_holonomy_map(f, u)
    assert evaluate(H, identity_walk(f.graph, "x")).is_identity()
    for e, loop in H.generators():
        assert evaluate(H, loop) == H.images[e]
    with pytest.raises(WalkError):
        evaluate(H, identity_walk(f.graph, "y"))
    assert H.smoothness == SMOOTHNESS_AXIOM
    assert all(h.is_identity() for h in flat_map(f.graph, S3, "x").images.values())


def test_theta_generator_images_by_hand():
    g = sampling.theta_graph()
    gg, hh, kk = S3.element((1, 0, 2)), S3.element((0, 2, 1)), S3.element((1, 2, 0))
    f = GaugeField(g, S3, {"a": kk, "b": gg, "c": hh})
    H = induced_holonomy_map(f, BundlePoint("x", S3.identity()))
    # tree edge a; chord loop for b runs x -a-> y -b~-> x
    assert spanning_tree(g).edges == {"a"}
    assert H.images["b"] == gg.inverse() * kk
    assert H.images["c"] == hh.inverse() * kk


@given(G=kinds, seed=seeds)
def test_evaluate_matches_transport(G, seed):
    rng, f = field_of(seed, G, n_max=12)
    x = f.graph.vertices[int(rng.integers(len(f.graph.vertices)))]
    u = BundlePoint(x, G.random(rng))
    H = induced_holonomy_map(f, u)
    loop = sampling.random_loop(rng, f.graph, spanning_tree(f.graph), x, int(rng.integers(0, 15)))
    assert groups.distance(evaluate(H, loop), holonomy(f, loop, u)) < 1e-9


@given(seed=seeds)
def test_base_change_conjugates_images(seed):
    rng, f = field_of(seed, S3)
    x = f.graph.vertices[0]
    g = S3.random(rng)
    H1 = induced_holonomy_map(f, BundlePoint(x, S3.identity()))
    H2 = induced_holonomy_map(f, BundlePoint(x, g))
    for e in H1.images:
        assert H2.images[e] == g.inverse() * H1.images[e] * g
    # (id, id_x, conj_{g^-1}) is a valid arrow H1 -> H2
    a = make_iso(GraphIso.identity(f.graph), identity_walk(f.graph, x),
                 GroupHom.conjugation_by(g.inverse()), H1, H2)
    assert revalidate(a)


@given(seed=seeds)
def test_alpha_criterion_matches_definition(seed):
    rng = rng_of(seed)
    g = sampling.theta_graph()
    H = sampling.random_holonomy_map(rng, g, S3, "x")
    tree = spanning_tree(g, "x")
    a = reduce(sampling.random_walk_to(rng, g, tree, "y", "x", int(rng.integers(0, 6))))
    b = reduce(sampling.random_walk_to(rng, g, tree, "y", "x", int(rng.integers(0, 6))))
    assert alpha_equivalent(H, a, b) == _equivalent_by_definition(H, a, b, 8)


def test_alpha_examples():
    g = sampling.theta_graph()
    tree = spanning_tree(g, "x")
    a = tree.path("y", "x")
    assert alpha_equivalent(flat_map(g, S3, "x"), a, a)
    rng = rng_of(3)
    H = flat_map(g, S3, "x")
    for _ in range(10):
        b = reduce(sampling.random_walk_to(rng, g, tree, "y", "x", 6))
        assert alpha_equivalent(H, a, b)
    with pytest.raises(WalkError):
        alpha_equivalent(H, a, identity_walk(g, "x"))


@pytest.mark.parametrize("seed", range(8))
def test_canonical_alpha_is_shortlex_least(seed):
    rng = rng_of(seed)
    g = sampling.theta_graph()
    H = sampling.random_holonomy_map(rng, g, S3, "x")
    tree = spanning_tree(g, "x")
    a = reduce(sampling.random_walk_to(rng, g, tree, "y", "x", 5))
    first = next(w for w in _reduced_walks(g, "y", 8, end="x") if alpha_equivalent(H, a, w))
    assert canonical_alpha(H, a).steps == first.steps


def test_make_iso_examples():
    rng = rng_of(5)
    H = sampling.random_holonomy_map(rng, sampling.theta_graph(), S3, "x")
    one = identity_iso(H)
    assert one.psi.is_identity() and len(one.alpha) == 0 and one.phi == GroupHom.identity(S3)
    # a non-central conjugation cannot fix generic S3 images
    c = next(h for h in S3.elements() if not groups.centralizes(h, list(H.images.values())))
    with pytest.raises(DiagramViolation) as err:
        make_iso(GraphIso.identity(H.graph), identity_walk(H.graph, "x"), GroupHom.conjugation_by(c), H, H)
    assert err.value.witness in H.images
    with pytest.raises(WalkError):
        make_iso(GraphIso.identity(H.graph), identity_walk(H.graph, "y"), GroupHom.identity(S3), H, H)


def _chain(rng, G, n=3, star=False):
    g = sampling.random_graph(rng, 1, 6, extra_max=3)
    H = sampling.random_holonomy_map(rng, g, G)
    arrows = []
    for _ in range(n):
        H2, psi, alpha, phi = sampling.random_arrow(rng, H)
        arrows.append((make_star_iso if star else make_iso)(psi, alpha, phi, H, H2))
        H = H2
    return arrows


@given(G=kinds, seed=seeds)
def test_groupoid_laws_hol(G, seed):
    a, b, c = _chain(rng_of(seed), G)
    assert compose_iso(c, compose_iso(b, a)) == compose_iso(compose_iso(c, b), a)
    assert compose_iso(a, identity_iso(a.src)) == a
    assert compose_iso(identity_iso(a.dst), a) == a
    assert compose_iso(invert_iso(a), a) == identity_iso(a.src)
    assert compose_iso(a, invert_iso(a)) == identity_iso(a.dst)
    assert revalidate(compose_iso(b, a))


@given(G=kinds, seed=seeds)
def test_groupoid_laws_hol_star(G, seed):
    a, b, c = _chain(rng_of(seed), G, star=True)
    assert compose_star(c, compose_star(b, a)) == compose_star(compose_star(c, b), a)
    assert compose_star(a, identity_star(a.src)) == a
    assert compose_star(identity_star(a.dst), a) == a
    assert compose_star(invert_star(a), a) == identity_star(a.src)


@given(G=finite_kinds, seed=seeds)
def test_hol_equality_is_a_congruence(G, seed):
    rng = rng_of(seed)
    a, b = _chain(rng, G, n=2)
    H = a.src
    gens = H.generators()
    if not gens:
        return
    e, gamma = gens[int(rng.integers(len(gens)))]
    # gamma^k has trivial holonomy, so gamma^k . alpha is another representative
    k = H.images[e].order()
    loop = identity_walk(H.graph, H.base)
    for _ in range(k):
        loop = compose(gamma, loop)
    a2 = make_iso(a.psi, reduce(compose(loop, a.witness)), a.phi, H, a.dst)
    assert a2 == a and a == a2
    assert compose_iso(b, a2) == compose_iso(b, a)
    assert invert_iso(a2) == invert_iso(a)


def test_mismatched_composition():
    rng = rng_of(1)
    a, b = _chain(rng, S3, n=2)
    with pytest.raises(WalkError):
        compose_iso(a, b)


@given(G=kinds, seed=seeds)
def test_quotient_is_a_full_functor(G, seed):
    a, b = _chain(rng_of(seed), G, n=2, star=True)
    assert quotient_Q(compose_star(b, a)) == compose_iso(quotient_Q(b), quotient_Q(a))
    assert quotient_Q(identity_star(a.src)) == identity_iso(a.src)
    h = quotient_Q(a)
    assert quotient_Q(lift_star(h)) == h


def test_q_not_faithful_on_theta():
    w = q_not_faithful_witness(sampling.theta_graph(), groups.cyclic(2))
    assert w["star_arrows_distinct"] and w["q_images_equal"]


@pytest.mark.parametrize("graph,group", [
    (sampling.theta_graph(), groups.cyclic(2)),
    (sampling.theta_graph(), S3),
    (sampling.figure_eight(), groups.quaternion8()),
], ids=["theta-C2", "theta-S3", "eight-Q8"])
def test_q_not_split_witness(graph, group):
    rep = q_not_split_witness(graph, group)
    assert rep.ok
    assert rep.notes["hol_composite_is_identity"]
    assert all(len(a.split()) > 1 for a in rep.notes["star_composite_alpha"])


def test_q_witness_rejects_trees():
    with pytest.raises(UnsuitableGraph):
        q_not_split_witness(sampling.path_graph(3), S3)
    with pytest.raises(UnsuitableGraph):
        q_not_faithful_witness(sampling.path_graph(3), S3)


def test_class_dependence_on_one_loop_z2():
    """Two representatives of one Hol arrow give bundle morphisms that differ by a central frame."""
    Z2 = groups.cyclic(2)
    g = Graph(["x"], [Edge("a", "x", "x")])
    H = HolonomyMap(g, "x", Z2, spanning_tree(g), {"a": Z2.element(1)})
    psi, phi = GraphIso.identity(g), GroupHom.identity(Z2)
    a1 = make_iso(psi, identity_walk(g, "x"), phi, H, H)
    a2 = make_iso(psi, Walk(g, "x", [Step("a")]), phi, H, H)
    assert a1 == a2
    m1, m2 = apply_C(a1), apply_C(a2)
    assert m1.frames["x"].payload == 0
    assert m2.frames["x"].payload == 1
    assert m1 != m2
