"""Group arithmetic against independent matrix representations."""
import itertools
import math

import numpy as np
import pytest
from hypothesis import given

from holonomy import groups
from holonomy.errors import DescriptorMismatch, GroupError
from holonomy.groups import GroupHom

from conftest import ALL_KINDS, FINITE, kinds, rng_of, seeds
from oracles import matrix

def test_advertised_orders():
    assert groups.cyclic(7).order == 7
    assert groups.symmetric(4).order == 24
    assert groups.dihedral(5).order == 10
    assert groups.quaternion8().order == 8


def test_tolerance_rules():
    with pytest.raises(GroupError):
        groups.GroupDescriptor("cyclic", 3, tol=1e-9)
    with pytest.raises(GroupError):
        groups.GroupDescriptor("U1", tol=-1.0)
    assert groups.SU2().tol > 0
    with pytest.raises(GroupError):
        groups.GroupDescriptor("lie", 2)


def test_cyclic_example():
    G = groups.cyclic(5)
    assert (G.element(3) * G.element(4)).payload == 2


def test_su2_inverse_example():
    G = groups.SU2()
    q = G.random(rng_of(3))
    assert groups.distance(q * q.inverse(), G.identity()) < 1e-9


def test_descriptor_mismatch():
    with pytest.raises(DescriptorMismatch):
        groups.cyclic(4).element(1) * groups.cyclic(5).element(1)


def test_payload_normalization():
    U = groups.U1()
    assert 0 <= U.element(-1.0).value < 2 * math.pi
    assert U.element(7.0) == U.element(7.0 - 2 * math.pi)
    S = groups.SU2()
    q = S.element((1 + 1e-12, 0, 0, 0))
    assert abs(np.linalg.norm(q.value) - 1) < 1e-15
    with pytest.raises(GroupError):
        S.element((2.0, 0, 0, 0))


@pytest.mark.parametrize("G", FINITE, ids=repr)
def test_finite_tables_match_matrices(G):
    for a, b in itertools.product(G.elements(), repeat=2):
        assert np.allclose(matrix(a * b), matrix(a) @ matrix(b))
    for a in G.elements():
        assert np.allclose(matrix(a.inverse()), np.linalg.inv(matrix(a)))


@pytest.mark.parametrize("G", [groups.U1(), groups.SU2()], ids=repr)
@given(seed=seeds)
def test_matrix_kinds_match_matrices(G, seed):
    rng = rng_of(seed)
    a, b = G.random(rng), G.random(rng)
    assert np.allclose(matrix(a * b), matrix(a) @ matrix(b), atol=1e-12)
    assert np.allclose(matrix(a.inverse()), np.linalg.inv(matrix(a)), atol=1e-12)


def _close(a, b):
    return groups.distance(a, b) <= (0 if a.group.is_finite else a.group.tol)


@given(G=kinds, seed=seeds)
def test_group_laws(G, seed):
    rng = rng_of(seed)
    a, b, c = G.random(rng), G.random(rng), G.random(rng)
    e = G.identity()
    assert _close((a * b) * c, a * (b * c))
    assert _close(e * a, a) and _close(a * e, a)
    assert _close(a * a.inverse(), e)


def test_subgroup_examples():
    S3 = groups.symmetric(3)
    sub = groups.subgroup_generated([S3.element((1, 0, 2))])
    assert sub.order == 2
    C6 = groups.cyclic(6)
    assert {h.payload for h in groups.enumerate_subgroup([C6.element(2)])} == {0, 2, 4}
    Q = groups.quaternion8()
    assert groups.subgroup_generated([Q.element("i"), Q.element("j")]).order == 8


def _closure_oracle(G, gens):
    """Naive fixpoint: multiply everything by everything until nothing new appears."""
    table = {tuple(matrix(h).round(9).ravel()): h for h in [G.identity()] + list(gens)}
    while True:
        new = {}
        for a in list(table.values()):
            for b in list(table.values()):
                h = a * b
                key = tuple(matrix(h).round(9).ravel())
                if key not in table:
                    new[key] = h
        if not new:
            return {h.value for h in table.values()}
        table.update(new)


@pytest.mark.parametrize("G", FINITE, ids=repr)
@given(seed=seeds)
def test_subgroup_generated_matches_closure_and_is_idempotent(G, seed):
    rng = rng_of(seed)
    gens = [G.random(rng) for _ in range(int(rng.integers(0, 3)))]
    sub = groups.subgroup_generated(gens, G)
    assert set(sub.elements) == _closure_oracle(G, gens)
    again = groups.subgroup_generated(sub.element_list(), G)
    assert again.elements == sub.elements


def test_subgroup_cap():
    with pytest.raises(groups.EnumerationCapExceeded):
        groups.subgroup_generated(groups.symmetric(4).generators(), cap=10)
    with pytest.raises(GroupError):
        groups.enumerate_subgroup([groups.U1().element(1.0)])


def test_centralizes_examples():
    S3 = groups.symmetric(3)
    assert groups.centralizes(S3.identity(), S3.elements())
    assert not groups.centralizes(S3.element((1, 2, 0)), [S3.element((1, 0, 2))])
    U = groups.U1()
    rng = rng_of(0)
    assert all(groups.centralizes(U.random(rng), [U.random(rng), U.random(rng)]) for _ in range(20))


@pytest.mark.parametrize("G", FINITE, ids=repr)
def test_centralizer_matches_direct_products(G):
    for h in G.elements():
        expect = {c.value for c in G.elements() if np.allclose(matrix(c) @ matrix(h), matrix(h) @ matrix(c))}
        assert set(groups.centralizer(G, [h])) == expect


def _brute_isomorphisms(src, dst):
    """Every bijection that respects the full multiplication table."""
    if src.order != dst.order:
        return 0
    A, B = src.elements(), dst.elements()
    count = 0
    for perm in itertools.permutations(range(len(B))):
        f = {a.value: B[perm[i]] for i, a in enumerate(A)}
        if all(f[(a * b).value] == f[a.value] * f[b.value] for a in A for b in A):
            count += 1
    return count


@pytest.mark.parametrize("src,dst", [
    (groups.cyclic(4), groups.cyclic(4)),
    (groups.cyclic(4), groups.dihedral(2)),
    (groups.symmetric(3), groups.symmetric(3)),
    (groups.symmetric(3), groups.dihedral(3)),
    (groups.cyclic(6), groups.symmetric(3)),
    (groups.cyclic(6), groups.cyclic(6)),
    (groups.dihedral(2), groups.dihedral(2)),
], ids=repr)
def test_isomorphism_search_matches_bijection_oracle(src, dst):
    found = groups.isomorphism_search(src, dst)
    assert len(found) == _brute_isomorphisms(src, dst)
    assert len(set(tuple(h._table) for h in found)) == len(found)


def test_isomorphism_search_examples():
    assert len(groups.isomorphism_search(groups.cyclic(4), groups.cyclic(4))) == 2
    assert groups.isomorphism_search(groups.cyclic(4), groups.dihedral(2)) == []
    U = groups.U1()
    rules = sorted(h.rule[0] for h in groups.isomorphism_search(U, U))
    assert rules == ["conjugation", "identity"]
    # |Aut(Q8)| = 24 and |Aut(D4)| = 8
    assert len(groups.isomorphism_search(groups.quaternion8(), groups.quaternion8())) == 24
    assert len(groups.isomorphism_search(groups.dihedral(4), groups.dihedral(4))) == 8


def test_isomorphism_search_cap():
    with pytest.raises(GroupError):
        groups.isomorphism_search(groups.symmetric(5), groups.symmetric(5), max_order=64)


@given(G=kinds, seed=seeds)
def test_homs_are_multiplicative(G, seed):
    from holonomy.sampling import random_phi

    rng = rng_of(seed)
    phi = random_phi(rng, G)
    a, b = G.random(rng), G.random(rng)
    assert _close(phi(a * b), phi(a) * phi(b))
    inv = phi.inverse()
    assert _close(inv(phi(a)), a)
    assert _close(phi.compose(inv)(b), b)


def test_bad_generator_images_rejected():
    # a transposition has order 2, which does not divide 3
    C3 = groups.cyclic(3)
    S3 = groups.symmetric(3)
    with pytest.raises(GroupError):
        GroupHom.from_images(C3, S3, [S3.element((1, 0, 2))])


def test_conjugation_hom():
    S3 = groups.symmetric(3)
    c = S3.element((1, 2, 0))
    phi = GroupHom.conjugation_by(c)
    for h in S3.elements():
        assert phi(h) == c * h * c.inverse()
    S = groups.SU2()
    q, h = S.random(rng_of(1)), S.random(rng_of(2))
    assert groups.distance(GroupHom.conjugation_by(q)(h), q * h * q.inverse()) < 1e-12


@pytest.mark.parametrize("G", ALL_KINDS, ids=repr)
def test_conjugacy_invariant_is_class_function(G):
    rng = rng_of(5)
    for _ in range(20):
        a, g = G.random(rng), G.random(rng)
        assert groups.same_conjugacy_invariant(a, g * a * g.inverse())
