"""JSON file formats for every value the CLI reads or writes.

Each ``*_to_dict`` has a matching ``*_from_dict`` that rejects unknown and
missing fields; errors carry a JSON-path location such as ``$.edges[2].head``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

from . import groups
from .bundle import BundleMorphism, BundlePoint, GaugeField
from .category import HolIso, HolonomyMap, canonical_alpha, induced_holonomy_map
from .errors import HolonomyError, ParseError
from .groups import GroupDescriptor, GroupElement, GroupHom
from .paths import Edge, Graph, GraphIso, format_walk, parse_walk, tree_from_edges
from .report import Report


class _Reader:
    """A dict plus its location, for precise complaints."""

    def __init__(self, data, loc: str = "$"):
        if not isinstance(data, dict):
            raise ParseError(f"expected an object, got {type(data).__name__}", loc)
        self.data = data
        self.loc = loc

    def expect(self, required, optional=()):
        for k in self.data:
            if k not in required and k not in optional:
                raise ParseError(f"unknown field {k!r}", self.loc)
        for k in required:
            if k not in self.data:
                raise ParseError(f"missing field {k!r}", self.loc)
        return self

    def at(self, key: str) -> str:
        return f"{self.loc}.{key}"

    def get(self, key, kind=None, default=None):
        if key not in self.data:
            return default
        v = self.data[key]
        if kind is not None and not _isinstance(v, kind):
            raise ParseError(f"expected {_kind_name(kind)}, got {type(v).__name__}", self.at(key))
        return v

    def sub(self, key) -> _Reader:
        return _Reader(self.data[key], self.at(key))


def _isinstance(v, kind):
    if kind is int:
        return isinstance(v, int) and not isinstance(v, bool)
    if kind is float:
        return isinstance(v, (int, float)) and not isinstance(v, bool)
    return isinstance(v, kind)


def _kind_name(kind):
    return {int: "integer", float: "number", str: "string", list: "array", dict: "object", bool: "boolean"}.get(
        kind, str(kind))


def _wrap(loc: str):
    """Re-raise domain errors from constructors as located parse errors."""

    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, et, ev, tb):
            if ev is not None and isinstance(ev, HolonomyError) and not isinstance(ev, ParseError):
                raise ParseError(str(ev), loc) from ev
            return False

    return _Ctx()


# --------------------------------------------------------------------------
# groups


def group_to_dict(G: GroupDescriptor) -> dict:
    if G.kind == "quaternion8":
        return {"kind": "quaternion8"}
    if G.is_finite:
        return {"kind": G.kind, "n": G.n}
    return {"kind": G.kind, "tol": G.tol}


def group_from_dict(data, loc: str = "$") -> GroupDescriptor:
    r = _Reader(data, loc)
    kind = r.expect(["kind"], ["n", "tol"]).get("kind", str)
    with _wrap(loc):
        if kind == "quaternion8":
            r.expect(["kind"])
            return groups.quaternion8()
        if kind in ("cyclic", "symmetric", "dihedral"):
            r.expect(["kind", "n"])
            return GroupDescriptor(kind, r.get("n", int))
        if kind in ("U1", "SU2"):
            r.expect(["kind"], ["tol"])
            return GroupDescriptor(kind, tol=float(r.get("tol", float, groups.DEFAULT_TOL)))
    raise ParseError(f"unknown group kind {kind!r}", r.at("kind"))


def element_to_json(h: GroupElement):
    p = h.payload
    if h.group.kind == "dihedral":
        return {p[0]: p[1]}
    if h.group.kind in ("symmetric", "SU2"):
        return list(p)
    return p


def element_from_json(G: GroupDescriptor, v, loc: str = "$") -> GroupElement:
    ok = {
        "cyclic": lambda x: _isinstance(x, int),
        "symmetric": lambda x: isinstance(x, list) and all(_isinstance(i, int) for i in x),
        "dihedral": lambda x: isinstance(x, dict) and len(x) == 1 and all(_isinstance(i, int) for i in x.values()),
        "quaternion8": lambda x: isinstance(x, str),
        "U1": lambda x: _isinstance(x, float) and math.isfinite(x),
        "SU2": lambda x: isinstance(x, list) and len(x) == 4 and all(_isinstance(i, float) for i in x),
    }[G.kind]
    if not ok(v):
        raise ParseError(f"{v!r} is not a {G.kind} element encoding", loc)
    with _wrap(loc):
        return G.element(v)


def hom_to_dict(phi: GroupHom) -> dict:
    if phi.source.is_finite:
        return {"images": [element_to_json(phi(s)) for s in phi.source.generators()]}
    if phi.rule[0] == "inner":
        return {"rule": "inner", "q": list(phi.rule[1])}
    return {"rule": phi.rule[0]}


def hom_from_dict(data, source: GroupDescriptor, target: GroupDescriptor, loc: str = "$") -> GroupHom:
    r = _Reader(data, loc)
    with _wrap(loc):
        if source.is_finite:
            r.expect(["images"])
            imgs = r.get("images", list)
            if len(imgs) != len(source.generators()):
                raise ParseError(f"expected {len(source.generators())} generator images", r.at("images"))
            elems = [element_from_json(target, v, f"{r.at('images')}[{i}]") for i, v in enumerate(imgs)]
            return GroupHom.from_images(source, target, elems)
        r.expect(["rule"], ["q"])
        rule = r.get("rule", str)
        if rule == "inner":
            r.expect(["rule", "q"])
            q = element_from_json(groups.SU2(), r.get("q"), r.at("q")).value
            return GroupHom(source, target, ("inner", q))
        r.expect(["rule"])
        return GroupHom(source, target, (rule,))


# --------------------------------------------------------------------------
# graphs and walks


def graph_to_dict(g: Graph) -> dict:
    return {"vertices": list(g.vertices), "edges": [{"name": e.name, "tail": e.tail, "head": e.head} for e in g.edges]}


def graph_from_dict(data, loc: str = "$") -> Graph:
    r = _Reader(data, loc).expect(["vertices", "edges"])
    verts = r.get("vertices", list)
    for i, v in enumerate(verts):
        if not isinstance(v, str):
            raise ParseError("vertex identifiers are strings", f"{r.at('vertices')}[{i}]")
    edges = []
    for i, e in enumerate(r.get("edges", list)):
        er = _Reader(e, f"{r.at('edges')}[{i}]").expect(["name", "tail", "head"])
        edges.append(Edge(er.get("name", str), er.get("tail", str), er.get("head", str)))
    with _wrap(loc):
        return Graph(verts, edges)


def graph_iso_to_dict(psi: GraphIso) -> dict:
    return {"vertices": dict(psi.vmap),
            "edges": {k: {"edge": v[0], "forward": v[1]} for k, v in psi.emap.items()}}


def graph_iso_from_dict(data, source: Graph, target: Graph, loc: str = "$") -> GraphIso:
    r = _Reader(data, loc).expect(["vertices", "edges"])
    vmap = r.get("vertices", dict)
    emap = {}
    for k, v in r.get("edges", dict).items():
        er = _Reader(v, f"{r.at('edges')}.{k}").expect(["edge", "forward"])
        emap[k] = (er.get("edge", str), er.get("forward", bool))
    with _wrap(loc):
        return GraphIso(source, target, vmap, emap)


def walk_from_json(g: Graph, v, loc: str = "$"):
    if not isinstance(v, str):
        raise ParseError("walks are written as 'start: step step~ ...'", loc)
    try:
        return parse_walk(g, v)
    except ParseError as exc:
        raise ParseError(str(exc), loc) from None


def parse_basepoint(G: GroupDescriptor, g: Graph, text: str, loc: str = "base") -> BundlePoint:
    """'x:e' (identity fiber) or 'x:<element JSON>' such as 'x:3', 'x:[1,0,2]', 'x:i'."""
    if ":" not in text:
        raise ParseError("basepoint literal needs 'vertex:fiber'", loc)
    v, _, fib = text.partition(":")
    v, fib = v.strip(), fib.strip()
    if not g.has_vertex(v):
        raise ParseError(f"unknown vertex {v!r}", loc)
    if fib == "e":
        return BundlePoint(v, G.identity())
    try:
        val = json.loads(fib)
    except json.JSONDecodeError:
        val = fib
    return BundlePoint(v, element_from_json(G, val, loc))


def point_to_dict(p: BundlePoint) -> dict:
    return {"vertex": p.vertex, "fiber": element_to_json(p.fiber)}


def point_from_dict(data, G: GroupDescriptor, g: Graph, loc: str = "$") -> BundlePoint:
    r = _Reader(data, loc).expect(["vertex", "fiber"])
    v = r.get("vertex", str)
    if not g.has_vertex(v):
        raise ParseError(f"unknown vertex {v!r}", r.at("vertex"))
    return BundlePoint(v, element_from_json(G, r.get("fiber"), r.at("fiber")))


# --------------------------------------------------------------------------
# fields, holonomy maps, certificates


def field_to_dict(f: GaugeField) -> dict:
    return {"graph": graph_to_dict(f.graph), "group": group_to_dict(f.group),
            "links": {k: element_to_json(h) for k, h in f.links.items()}}


def field_from_dict(data, loc: str = "$") -> GaugeField:
    r = _Reader(data, loc).expect(["graph", "group", "links"])
    g = graph_from_dict(r.get("graph"), r.at("graph"))
    G = group_from_dict(r.get("group"), r.at("group"))
    links = {k: element_from_json(G, v, f"{r.at('links')}.{k}") for k, v in r.get("links", dict).items()}
    with _wrap(r.at("links")):
        return GaugeField(g, G, links)


def map_to_dict(H: HolonomyMap) -> dict:
    return {"graph": graph_to_dict(H.graph), "base": H.base, "group": group_to_dict(H.group),
            "tree": sorted(H.tree.edges), "images": {k: element_to_json(h) for k, h in H.images.items()}}


def map_from_dict(data, loc: str = "$") -> HolonomyMap:
    r = _Reader(data, loc).expect(["graph", "base", "group", "tree", "images"])
    g = graph_from_dict(r.get("graph"), r.at("graph"))
    G = group_from_dict(r.get("group"), r.at("group"))
    base = r.get("base", str)
    tree_names = r.get("tree", list)
    with _wrap(r.at("tree")):
        tree = tree_from_edges(g, tree_names, base if g.has_vertex(base) else None)
    images = {k: element_from_json(G, v, f"{r.at('images')}.{k}") for k, v in r.get("images", dict).items()}
    with _wrap(loc):
        return HolonomyMap(g, base, G, tree, images)


def morphism_to_dict(m: BundleMorphism) -> dict:
    return {"iso": graph_iso_to_dict(m.iso), "phi": hom_to_dict(m.phi),
            "frames": {v: element_to_json(h) for v, h in m.frames.items()}}


def morphism_from_dict(data, src: GaugeField, dst: GaugeField, loc: str = "$") -> BundleMorphism:
    r = _Reader(data, loc).expect(["iso", "phi", "frames"])
    iso = graph_iso_from_dict(r.get("iso"), src.graph, dst.graph, r.at("iso"))
    phi = hom_from_dict(r.get("phi"), src.group, dst.group, r.at("phi"))
    frames = {v: element_from_json(dst.group, h, f"{r.at('frames')}.{v}") for v, h in r.get("frames", dict).items()}
    with _wrap(loc):
        return BundleMorphism(iso, phi, frames)


def holiso_to_dict(a: HolIso) -> dict:
    return {"psi": graph_iso_to_dict(a.psi), "alpha": format_walk(a.alpha), "witness": format_walk(a.witness),
            "phi": hom_to_dict(a.phi)}


def holiso_from_dict(data, H: HolonomyMap, H2: HolonomyMap, loc: str = "$", check_alpha: bool = False) -> HolIso:
    """Rebuild an arrow without validating the diagram (verifiers recompute it)."""
    r = _Reader(data, loc).expect(["psi", "alpha", "witness", "phi"])
    psi = graph_iso_from_dict(r.get("psi"), H.graph, H2.graph, r.at("psi"))
    phi = hom_from_dict(r.get("phi"), H.group, H2.group, r.at("phi"))
    alpha = walk_from_json(H.graph, r.get("alpha"), r.at("alpha"))
    witness = walk_from_json(H.graph, r.get("witness"), r.at("witness"))
    if check_alpha:
        with _wrap(r.at("alpha")):
            alpha = canonical_alpha(H, alpha)
    return HolIso(H, H2, psi, alpha, phi, witness)


def certificate_to_dict(cert) -> dict:
    return {
        "src": field_to_dict(cert.src), "src_base": point_to_dict(cert.src_base),
        "dst": field_to_dict(cert.dst), "dst_base": point_to_dict(cert.dst_base),
        "holiso": holiso_to_dict(cert.holiso), "morphism": morphism_to_dict(cert.morphism),
        "residuals": {k: float(v) for k, v in sorted(cert.residuals.items())},
    }


def certificate_from_dict(data, loc: str = "$"):
    from .reconstruction import EquivalenceCertificate

    r = _Reader(data, loc).expect(["src", "src_base", "dst", "dst_base", "holiso", "morphism"], ["residuals"])
    src = field_from_dict(r.get("src"), r.at("src"))
    dst = field_from_dict(r.get("dst"), r.at("dst"))
    u = point_from_dict(r.get("src_base"), src.group, src.graph, r.at("src_base"))
    u2 = point_from_dict(r.get("dst_base"), dst.group, dst.graph, r.at("dst_base"))
    with _wrap(loc):
        H = induced_holonomy_map(src, u)
        H2 = induced_holonomy_map(dst, u2)
    a = holiso_from_dict(r.get("holiso"), H, H2, r.at("holiso"))
    m = morphism_from_dict(r.get("morphism"), src, dst, r.at("morphism"))
    res = r.get("residuals", dict, {})
    return EquivalenceCertificate(src, u, dst, u2, a, m, dict(res))


def refutation_to_dict(ref) -> dict:
    out = []
    for w in ref.witnesses:
        entry = {"reason": w["reason"], "psi": graph_iso_to_dict(w["psi"]), "phi": hom_to_dict(w["phi"])}
        if w.get("loop") is not None:
            entry.update(loop=format_walk(w["loop"]), src_value=element_to_json(w["src_value"]),
                         dst_value=element_to_json(w["dst_value"]))
        out.append(entry)
    return {"reason": ref.reason, "complete": ref.complete, "witnesses": out}


# --------------------------------------------------------------------------
# smooth side


def potential_to_dict(A) -> dict:
    return {"dim": A.dim, "group": A.group, "catalog": A.catalog, "coeffs": [list(row) for row in A.coeffs]}


def potential_from_dict(data, loc: str = "$"):
    from .smooth import GaugePotential

    r = _Reader(data, loc).expect(["dim", "group", "catalog"], ["coeffs"])
    if r.get("catalog") != "zero":
        r.expect(["dim", "group", "catalog", "coeffs"])
    coeffs = r.get("coeffs", list, [])
    for i, row in enumerate(coeffs):
        if not isinstance(row, list) or not all(_isinstance(c, float) for c in row):
            raise ParseError("coefficient rows are arrays of numbers", f"{r.at('coeffs')}[{i}]")
    with _wrap(loc):
        return GaugePotential(r.get("dim", int), r.get("group", str), r.get("catalog", str), coeffs)


_SEGMENT_FIELDS = {"line": ["from", "to"], "arc": ["center", "radius", "start", "end"], "cubic": ["points"]}


def curve_to_list(crv) -> list:
    out = []
    for s in crv.segments:
        if s.kind == "line":
            out.append({"type": "line", "from": list(s.data[0]), "to": list(s.data[1])})
        elif s.kind == "arc":
            out.append({"type": "arc", "center": list(s.data[0]), "radius": s.data[1],
                        "start": s.data[2], "end": s.data[3]})
        else:
            out.append({"type": "cubic", "points": [list(p) for p in s.data]})
    return out


def _point(v, loc):
    if not isinstance(v, list) or not all(_isinstance(c, float) for c in v):
        raise ParseError("points are arrays of numbers", loc)
    return v


def curve_from_list(data, loc: str = "$"):
    from . import smooth

    if not isinstance(data, list):
        raise ParseError("a curve file is an array of segments", loc)
    segs = []
    for i, s in enumerate(data):
        sl = f"{loc}[{i}]"
        r = _Reader(s, sl)
        kind = r.get("type", str)
        if kind not in _SEGMENT_FIELDS:
            raise ParseError(f"unknown segment type {kind!r}", r.at("type"))
        r.expect(["type"] + _SEGMENT_FIELDS[kind])
        if kind == "line":
            segs.append(smooth.line(_point(r.get("from"), r.at("from")), _point(r.get("to"), r.at("to"))))
        elif kind == "arc":
            segs.append(smooth.arc(_point(r.get("center"), r.at("center")), r.get("radius", float),
                                   r.get("start", float), r.get("end", float)))
        else:
            pts = r.get("points", list)
            if len(pts) != 4:
                raise ParseError("cubic segments need 4 control points", r.at("points"))
            segs.append(smooth.cubic(*[_point(p, f"{r.at('points')}[{j}]") for j, p in enumerate(pts)]))
    with _wrap(loc):
        return smooth.PiecewiseSmoothCurve(tuple(segs))


# --------------------------------------------------------------------------
# reports


def report_from_dict(data, loc: str = "$") -> Report:
    r = _Reader(data, loc).expect(["suite", "seed", "trials", "verdict", "failures", "residuals", "notes"])
    rep = Report(r.get("suite", str), r.get("seed"), r.get("trials", int), list(r.get("failures", list)),
                 dict(r.get("residuals", dict)), dict(r.get("notes", dict)))
    if rep.verdict != r.get("verdict", str):
        raise ParseError("verdict disagrees with the failure list", r.at("verdict"))
    return rep


# --------------------------------------------------------------------------
# files


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1)


def read_json(path) -> object:
    """Load a JSON file; syntax errors become ParseError with line and column."""
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc.reason}", f"{path}:byte {exc.start}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj) + "\n")


_LOADERS = {
    "group": group_from_dict,
    "graph": graph_from_dict,
    "field": field_from_dict,
    "map": map_from_dict,
    "certificate": certificate_from_dict,
    "potential": potential_from_dict,
    "curve": curve_from_list,
    "report": report_from_dict,
}

_DUMPERS = {
    "group": group_to_dict,
    "graph": graph_to_dict,
    "field": field_to_dict,
    "map": map_to_dict,
    "certificate": certificate_to_dict,
    "potential": potential_to_dict,
    "curve": curve_to_list,
    "report": Report.to_dict,
}


def load(kind: str, path):
    return _LOADERS[kind](read_json(path), "$")


def save(kind: str, path, obj) -> None:
    write_json(path, _DUMPERS[kind](obj))


def to_dict(kind: str, obj):
    return _DUMPERS[kind](obj)


def from_dict(kind: str, data):
    return _LOADERS[kind](data, "$")
