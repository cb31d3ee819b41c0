"""Structure groups.

Finite kinds (cyclic, symmetric, dihedral, quaternion8) are exact and backed by
a cached Cayley table; elements carry an index into it.  The matrix kinds U1
(unit complex numbers, stored as an angle) and SU2 (unit quaternions
``(w, x, y, z)``) compare within the descriptor tolerance.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DescriptorMismatch, EnumerationCapExceeded, GroupError

FINITE_KINDS = ("cyclic", "symmetric", "dihedral", "quaternion8")
MATRIX_KINDS = ("U1", "SU2")
DEFAULT_TOL = 1e-9
ENUMERATION_CAP = 10**6
TWO_PI = 2.0 * math.pi

_Q8_LABELS = ("1", "-1", "i", "-i", "j", "-j", "k", "-k")


@dataclass(frozen=True)
class GroupDescriptor:
    kind: str
    n: int = 0
    tol: float = 0.0

    def __post_init__(self):
        if self.kind in FINITE_KINDS:
            if self.tol != 0:
                raise GroupError(f"finite group {self.kind} must have tolerance 0")
            if self.kind == "quaternion8":
                object.__setattr__(self, "n", 0)
            elif self.n < 1:
                raise GroupError(f"{self.kind}(n) needs n >= 1, got {self.n}")
        elif self.kind in MATRIX_KINDS:
            if self.n != 0:
                raise GroupError(f"{self.kind} takes no size parameter")
            if self.tol == 0:
                object.__setattr__(self, "tol", DEFAULT_TOL)
            if not self.tol > 0:
                raise GroupError("matrix group tolerance must be positive")
        else:
            raise GroupError(f"unknown group kind {self.kind!r}")

    def __repr__(self):
        if self.kind == "quaternion8":
            return "quaternion8"
        if self.kind in MATRIX_KINDS:
            return f"{self.kind}(tol={self.tol:g})"
        return f"{self.kind}({self.n})"

    @property
    def is_finite(self) -> bool:
        return self.kind in FINITE_KINDS

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise GroupError(f"{self!r} is infinite")
        return len(_table(self).payloads)

    def identity(self) -> GroupElement:
        if self.kind == "U1":
            return GroupElement(self, 0.0)
        if self.kind == "SU2":
            return GroupElement(self, (1.0, 0.0, 0.0, 0.0))
        return GroupElement(self, 0)

    def elements(self) -> list[GroupElement]:
        if not self.is_finite:
            raise GroupError(f"cannot enumerate {self!r}")
        return [GroupElement(self, i) for i in range(self.order)]

    def generators(self) -> list[GroupElement]:
        """Fixed generating set used for homomorphism tables."""
        if not self.is_finite:
            raise GroupError(f"{self!r} has no finite generating set")
        t = _table(self)
        return [GroupElement(self, i) for i in t.generators]

    def element(self, payload) -> GroupElement:
        """Build an element from its native encoding (see ``GroupElement.payload``)."""
        if self.kind == "U1":
            return GroupElement(self, _wrap_angle(float(payload)))
        if self.kind == "SU2":
            q = np.asarray(payload, dtype=float)
            if q.shape != (4,) or not np.all(np.isfinite(q)):
                raise GroupError(f"SU2 element needs a finite 4-vector, got {payload!r}")
            norm = float(np.linalg.norm(q))
            if abs(norm - 1.0) > max(self.tol, 1e-6):
                raise GroupError(f"SU2 element must have unit norm, got {norm}")
            if abs(norm - 1.0) > 4e-16:  # renormalizing a unit vector again would move its last bits
                q = q / norm
            return GroupElement(self, tuple(float(c) for c in q))
        key = _normalize_payload(self, payload)
        try:
            return GroupElement(self, _table(self).index[key])
        except KeyError:
            raise GroupError(f"{payload!r} is not an element of {self!r}") from None

    def random(self, rng: np.random.Generator) -> GroupElement:
        if self.kind == "U1":
            return GroupElement(self, float(rng.uniform(0.0, TWO_PI)))
        if self.kind == "SU2":
            q = rng.normal(size=4)
            q /= np.linalg.norm(q)
            return GroupElement(self, tuple(float(c) for c in q))
        return GroupElement(self, int(rng.integers(self.order)))


def cyclic(n: int) -> GroupDescriptor:
    return GroupDescriptor("cyclic", n)


def symmetric(n: int) -> GroupDescriptor:
    return GroupDescriptor("symmetric", n)


def dihedral(n: int) -> GroupDescriptor:
    """Dihedral group of order 2n."""
    return GroupDescriptor("dihedral", n)


def quaternion8() -> GroupDescriptor:
    return GroupDescriptor("quaternion8")


def U1(tol: float = DEFAULT_TOL) -> GroupDescriptor:
    return GroupDescriptor("U1", tol=tol)


def SU2(tol: float = DEFAULT_TOL) -> GroupDescriptor:
    return GroupDescriptor("SU2", tol=tol)


class GroupElement:
    """An element of the group described by ``group``.

    ``value`` is a table index for finite kinds, an angle in [0, 2pi) for U1 and
    a unit quaternion tuple for SU2.
    """

    __slots__ = ("group", "value")

    def __init__(self, group: GroupDescriptor, value):
        self.group = group
        self.value = value

    def __mul__(self, other: GroupElement) -> GroupElement:
        return multiply(self, other)

    def inverse(self) -> GroupElement:
        return inverse(self)

    def __pow__(self, k: int) -> GroupElement:
        base = self if k >= 0 else self.inverse()
        out = self.group.identity()
        for _ in range(abs(k)):
            out = out * base
        return out

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        if self.group != other.group:
            return False
        if self.group.is_finite:
            return self.value == other.value
        return distance(self, other) <= self.group.tol

    def __hash__(self):
        if self.group.is_finite:
            return hash((self.group, self.value))
        return hash(self.group)

    def __repr__(self):
        return f"{self.group!r}[{self.payload!r}]"

    @property
    def payload(self):
        """Native encoding: residue, permutation tuple, ("rot"|"ref", k), label, angle or quaternion."""
        if not self.group.is_finite:
            return self.value
        return _table(self.group).payloads[self.value]

    def is_identity(self) -> bool:
        return self == self.group.identity()

    def order(self) -> int:
        if not self.group.is_finite:
            raise GroupError("element order is only tracked for finite kinds")
        return _table(self.group).orders[self.value]


def _check_same(a: GroupElement, b: GroupElement) -> None:
    if a.group is not b.group and a.group != b.group:
        raise DescriptorMismatch(f"{a.group!r} vs {b.group!r}")


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    _check_same(a, b)
    g = a.group
    if g.is_finite:
        return GroupElement(g, _table(g).mul[a.value][b.value])
    if g.kind == "U1":
        return GroupElement(g, _wrap_angle(a.value + b.value))
    return GroupElement(g, _qnormalize(_qmul(a.value, b.value)))


def inverse(a: GroupElement) -> GroupElement:
    g = a.group
    if g.is_finite:
        return GroupElement(g, _table(g).inv[a.value])
    if g.kind == "U1":
        return GroupElement(g, _wrap_angle(-a.value))
    w, x, y, z = a.value
    return GroupElement(g, (w, -x, -y, -z))


def conjugate(g: GroupElement, h: GroupElement) -> GroupElement:
    """g h g^-1."""
    return g * h * g.inverse()


def distance(a: GroupElement, b: GroupElement) -> float:
    """Natural metric: |angle difference| for U1, Euclidean quaternion distance for SU2, 0/1 for finite."""
    _check_same(a, b)
    if a.group.is_finite:
        return 0.0 if a.value == b.value else 1.0
    if a.group.kind == "U1":
        d = abs(a.value - b.value) % TWO_PI
        return min(d, TWO_PI - d)
    return math.sqrt(sum((p - q) ** 2 for p, q in zip(a.value, b.value)))


def conjugacy_invariant(a: GroupElement):
    """A conjugation-invariant label: the class (as a frozenset of indices) for
    finite kinds, the angle for U1 (abelian) and the real part for SU2."""
    g = a.group
    if g.is_finite:
        t = _table(g)
        return frozenset(t.mul[t.mul[k][a.value]][t.inv[k]] for k in range(len(t.payloads)))
    if g.kind == "U1":
        return a.value
    return a.value[0]


def same_conjugacy_invariant(a: GroupElement, b: GroupElement) -> bool:
    if a.group.is_finite:
        return conjugacy_invariant(a) == conjugacy_invariant(b)
    if a.group.kind == "U1":
        return distance(a, b) <= a.group.tol
    return abs(a.value[0] - b.value[0]) <= a.group.tol


# --------------------------------------------------------------------------
# subgroups and centralizers


@dataclass(frozen=True)
class Subgroup:
    """Subgroup generated by ``generators``.

    For finite kinds ``elements`` holds the full (index) set; for matrix kinds
    it is None and membership falls back to a bounded word search.
    """

    group: GroupDescriptor
    generators: tuple
    elements: frozenset | None = None

    @property
    def order(self) -> int:
        if self.elements is None:
            raise GroupError("matrix-kind subgroups are not enumerated")
        return len(self.elements)

    def element_list(self) -> list[GroupElement]:
        if self.elements is None:
            raise GroupError("matrix-kind subgroups are not enumerated")
        return [GroupElement(self.group, i) for i in sorted(self.elements)]

    def __contains__(self, g: GroupElement) -> bool:
        if self.elements is not None:
            return g.value in self.elements
        return _bounded_word_member(self.generators, g, depth=16)

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        if self.group != other.group:
            return False
        if self.elements is not None and other.elements is not None:
            return self.elements == other.elements
        return all(h in other for h in self.generators) and all(h in self for h in other.generators)

    def __hash__(self):
        return hash((self.group, self.elements))


def subgroup_generated(gens: Sequence[GroupElement], group: GroupDescriptor | None = None,
                       cap: int = ENUMERATION_CAP) -> Subgroup:
    gens = list(gens)
    if group is None:
        if not gens:
            raise GroupError("need a group descriptor when the generator list is empty")
        group = gens[0].group
    for h in gens:
        if h.group != group:
            raise DescriptorMismatch(f"{h.group!r} vs {group!r}")
    if not group.is_finite:
        return Subgroup(group, tuple(gens), None)
    t = _table(group)
    gen_idx = sorted({h.value for h in gens})
    seen = {t.identity}
    queue = deque([t.identity])
    while queue:
        a = queue.popleft()
        for s in gen_idx:
            b = t.mul[a][s]
            if b not in seen:
                seen.add(b)
                if len(seen) > cap:
                    raise EnumerationCapExceeded(f"subgroup exceeds {cap} elements")
                queue.append(b)
    return Subgroup(group, tuple(gens), frozenset(seen))


def enumerate_subgroup(gens: Sequence[GroupElement], group: GroupDescriptor | None = None,
                       cap: int = ENUMERATION_CAP) -> list[GroupElement]:
    sub = subgroup_generated(gens, group, cap)
    if sub.elements is None:
        raise GroupError(f"cannot enumerate a subgroup of {sub.group!r}")
    return sub.element_list()


def centralizes(c: GroupElement, gens: Iterable[GroupElement]) -> bool:
    for g in gens:
        _check_same(c, g)
        if not (c * g == g * c):
            return False
    return True


def centralizer(group: GroupDescriptor, gens: Sequence[GroupElement]) -> frozenset:
    """Index set of the centralizer of ``gens`` (finite kinds only)."""
    return frozenset(c.value for c in group.elements() if centralizes(c, gens))


def _bounded_word_member(gens, g, depth):
    group = g.group
    frontier = [group.identity()]
    letters = list(gens) + [h.inverse() for h in gens]
    seen = []
    for _ in range(depth + 1):
        nxt = []
        for a in frontier:
            if a == g:
                return True
            if any(a == b for b in seen):
                continue
            seen.append(a)
            nxt.extend(a * s for s in letters)
        frontier = nxt
        if len(frontier) > 20000:
            frontier = frontier[:20000]
    return False


# --------------------------------------------------------------------------
# homomorphisms


class GroupHom:
    """A homomorphism ``source -> target``.

    Finite kinds carry the images of ``source.generators()``; matrix kinds use
    the catalog: ``("identity",)``, ``("conjugation",)`` (complex conjugation
    on U1) or ``("inner", q)`` (h -> q h q^-1 on SU2).
    """

    __slots__ = ("source", "target", "rule", "iso", "_table")

    def __init__(self, source: GroupDescriptor, target: GroupDescriptor, rule: tuple, iso: bool = True):
        self.source = source
        self.target = target
        self.rule = rule
        self.iso = iso
        self._table = None
        if source.is_finite:
            if not target.is_finite or rule[0] != "images":
                raise GroupError("finite homs are given by generator images")
            table = _extend(source, target, tuple(rule[1]))
            if table is None:
                raise GroupError("generator images do not respect the group relations")
            self._table = table
            if iso and len(set(table)) != len(table) or iso and source.order != target.order:
                raise GroupError("hom flagged iso is not bijective")
        else:
            if source != target and not (source.kind == target.kind):
                raise GroupError("catalog homs only map a matrix group to itself")
            tag = rule[0]
            if tag == "identity":
                pass
            elif tag == "conjugation" and source.kind == "U1":
                pass
            elif tag == "inner" and source.kind == "SU2":
                q = tuple(float(c) for c in rule[1])
                norm = math.sqrt(sum(c * c for c in q))
                self.rule = ("inner", tuple(c / norm for c in q))
            else:
                raise GroupError(f"unknown catalog hom {rule!r} on {source!r}")

    @classmethod
    def from_images(cls, source: GroupDescriptor, target: GroupDescriptor,
                    images: Sequence[GroupElement], iso: bool | None = None) -> GroupHom:
        idx = tuple(h.value for h in images)
        table = _extend(source, target, idx)
        if table is None:
            raise GroupError("generator images do not respect the group relations")
        bij = source.order == target.order and len(set(table)) == len(table)
        if iso is None:
            iso = bij
        return cls(source, target, ("images", idx), iso)

    @classmethod
    def identity(cls, group: GroupDescriptor) -> GroupHom:
        if group.is_finite:
            return cls(group, group, ("images", tuple(h.value for h in group.generators())))
        return cls(group, group, ("identity",))

    @classmethod
    def conjugation_by(cls, c: GroupElement) -> GroupHom:
        """The inner automorphism h -> c h c^-1."""
        g = c.group
        if g.is_finite:
            return cls(g, g, ("images", tuple(conjugate(c, h).value for h in g.generators())))
        if g.kind == "U1":
            return cls(g, g, ("identity",))
        return cls(g, g, ("inner", c.value))

    def __call__(self, h: GroupElement) -> GroupElement:
        if h.group != self.source:
            raise DescriptorMismatch(f"hom source {self.source!r} applied to {h.group!r}")
        if self._table is not None:
            return GroupElement(self.target, self._table[h.value])
        tag = self.rule[0]
        if tag == "identity":
            return GroupElement(self.target, h.value)
        if tag == "conjugation":
            return GroupElement(self.target, _wrap_angle(-h.value))
        q = self.rule[1]
        qi = (q[0], -q[1], -q[2], -q[3])
        return GroupElement(self.target, _qnormalize(_qmul(_qmul(q, h.value), qi)))

    def compose(self, other: GroupHom) -> GroupHom:
        """self o other (apply ``other`` first)."""
        if other.target != self.source:
            raise DescriptorMismatch("composing homs with mismatched groups")
        iso = self.iso and other.iso
        if other.source.is_finite:
            images = [self(other(s)) for s in other.source.generators()]
            return GroupHom.from_images(other.source, self.target, images, iso=iso)
        a, b = self.rule, other.rule
        if a[0] == "identity":
            return GroupHom(other.source, self.target, b, iso)
        if b[0] == "identity":
            return GroupHom(other.source, self.target, a, iso)
        if a[0] == "conjugation":
            return GroupHom(other.source, self.target, ("identity",), iso)
        return GroupHom(other.source, self.target, ("inner", _qmul(a[1], b[1])), iso)

    def inverse(self) -> GroupHom:
        if not self.iso:
            raise GroupError("only isomorphisms can be inverted")
        if self.source.is_finite:
            pre = {v: k for k, v in enumerate(self._table)}
            images = [GroupElement(self.source, pre[s.value]) for s in self.target.generators()]
            return GroupHom.from_images(self.target, self.source, images, iso=True)
        if self.rule[0] == "inner":
            q = self.rule[1]
            return GroupHom(self.target, self.source, ("inner", (q[0], -q[1], -q[2], -q[3])))
        return GroupHom(self.target, self.source, self.rule)

    def __eq__(self, other):
        if not isinstance(other, GroupHom):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        if self._table is not None:
            return self._table == other._table
        a, b = _catalog_normal(self), _catalog_normal(other)
        if a[0] != b[0]:
            return False
        if a[0] != "inner":
            return True
        tol = self.source.tol
        d1 = math.dist(a[1], b[1])
        d2 = math.dist(a[1], tuple(-c for c in b[1]))
        return min(d1, d2) <= tol

    def __hash__(self):
        return hash((self.source, self.target, self._table))

    def __repr__(self):
        if self._table is not None:
            imgs = [GroupElement(self.target, i).payload for i in self.rule[1]]
            return f"GroupHom({self.source!r}->{self.target!r}, gens->{imgs})"
        return f"GroupHom({self.source!r}->{self.target!r}, {self.rule!r})"

    def is_homomorphism_on(self, pairs) -> bool:
        return all(self(a * b) == self(a) * self(b) for a, b in pairs)


def _catalog_normal(h: GroupHom):
    if h.rule[0] == "inner":
        q = h.rule[1]
        if math.dist(q, (1.0, 0, 0, 0)) <= h.source.tol or math.dist(q, (-1.0, 0, 0, 0)) <= h.source.tol:
            return ("identity",)
    return h.rule


def isomorphism_search(src: GroupDescriptor, dst: GroupDescriptor, max_order: int = 64) -> list[GroupHom]:
    """All isomorphisms src -> dst (finite kinds, by generator-image backtracking),
    or the catalog entries for matrix kinds."""
    if not src.is_finite or not dst.is_finite:
        if src.is_finite != dst.is_finite or src.kind != dst.kind:
            return []
        if src.kind == "U1":
            return [GroupHom(src, dst, ("identity",)), GroupHom(src, dst, ("conjugation",))]
        return [GroupHom(src, dst, ("identity",))]
    if src.order > max_order or dst.order > max_order:
        raise EnumerationCapExceeded(f"isomorphism search is capped at order {max_order}")
    if src.order != dst.order:
        return []
    ts, td = _table(src), _table(dst)
    if sorted(ts.orders) != sorted(td.orders):
        return []
    candidates = [[j for j in range(len(td.payloads)) if td.orders[j] == ts.orders[s]] for s in ts.generators]
    found = []
    for images in itertools.product(*candidates):
        table = _extend(src, dst, tuple(images))
        if table is not None and len(set(table)) == len(table):
            found.append(GroupHom(src, dst, ("images", tuple(images)), True))
    return found


@lru_cache(maxsize=4096)
def _extend(source: GroupDescriptor, target: GroupDescriptor, images: tuple):
    """Extend generator images to a full index map, or None if not a hom."""
    ts, tt = _table(source), _table(target)
    if len(images) != len(ts.generators):
        return None
    m = [None] * len(ts.payloads)
    m[ts.identity] = tt.identity
    queue = deque([ts.identity])
    while queue:
        a = queue.popleft()
        for s, img in zip(ts.generators, images):
            b = ts.mul[a][s]
            val = tt.mul[m[a]][img]
            if m[b] is None:
                m[b] = val
                queue.append(b)
            elif m[b] != val:
                return None
    if any(v is None for v in m):
        return None
    return tuple(m)


# --------------------------------------------------------------------------
# finite tables


@dataclass(frozen=True)
class _Table:
    payloads: tuple
    index: dict
    mul: tuple
    inv: tuple
    orders: tuple
    identity: int
    generators: tuple


def _normalize_payload(g: GroupDescriptor, payload):
    if g.kind == "cyclic":
        if isinstance(payload, bool) or not isinstance(payload, (int, np.integer)):
            raise GroupError(f"cyclic element must be an integer, got {payload!r}")
        return int(payload) % g.n
    if g.kind == "symmetric":
        return tuple(int(i) for i in payload)
    if g.kind == "dihedral":
        if isinstance(payload, dict):
            if len(payload) != 1:
                raise GroupError(f"dihedral element needs one of rot/ref, got {payload!r}")
            (tag, k), = payload.items()
        else:
            tag, k = payload
        if tag not in ("rot", "ref"):
            raise GroupError(f"dihedral tag must be rot or ref, got {tag!r}")
        return (tag, int(k) % g.n)
    return str(payload)


@lru_cache(maxsize=None)
def _table(g: GroupDescriptor) -> _Table:
    if g.kind == "cyclic":
        payloads = tuple(range(g.n))

        def op(a, b):
            return (a + b) % g.n

        gens = [1] if g.n > 1 else []
    elif g.kind == "symmetric":
        payloads = tuple(itertools.permutations(range(g.n)))

        def op(a, b):
            return tuple(a[i] for i in b)

        gens = []
        if g.n > 1:
            gens.append((1, 0) + tuple(range(2, g.n)))
            cycle = tuple(range(1, g.n)) + (0,)
            if cycle != gens[0]:
                gens.append(cycle)
    elif g.kind == "dihedral":
        n = g.n
        payloads = tuple(("rot", k) for k in range(n)) + tuple(("ref", k) for k in range(n))

        def op(a, b):
            # (k, f) stands for r^k s^f with s r s = r^-1
            k1, f1 = a[1], a[0] == "ref"
            k2, f2 = b[1], b[0] == "ref"
            k = (k1 - k2 if f1 else k1 + k2) % n
            return ("ref" if f1 != f2 else "rot", k)

        gens = ([("rot", 1)] if n > 1 else []) + [("ref", 0)]
    else:
        payloads = _Q8_LABELS
        basis = {"1": 0, "i": 1, "j": 2, "k": 3}
        names = "1ijk"
        # basis products: (sign, basis)
        prod = {
            (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
            (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
            (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
            (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
        }

        def split(label):
            return (-1, basis[label[1:]]) if label.startswith("-") else (1, basis[label])

        def op(a, b):
            sa, ba = split(a)
            sb, bb = split(b)
            s, bc = prod[(ba, bb)]
            s *= sa * sb
            return ("" if s > 0 else "-") + names[bc]

        gens = ["i", "j"]
    index = {p: i for i, p in enumerate(payloads)}
    size = len(payloads)
    mul = tuple(tuple(index[op(a, b)] for b in payloads) for a in payloads)
    identity = next(i for i in range(size) if all(mul[i][j] == j for j in range(size)))
    inv = tuple(next(j for j in range(size) if mul[i][j] == identity) for i in range(size))
    orders = []
    for i in range(size):
        k, a = 1, i
        while a != identity:
            a = mul[a][i]
            k += 1
        orders.append(k)
    return _Table(payloads, index, mul, inv, tuple(orders), identity, tuple(index[p] for p in gens))


# --------------------------------------------------------------------------
# small numeric helpers


def _wrap_angle(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    if t >= TWO_PI:
        t -= TWO_PI
    return t


def _qmul(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def _qnormalize(q):
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)
