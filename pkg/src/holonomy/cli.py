"""Command-line entry point ``hol``.

Exit status: 0 pass, 1 fail / nothing found, 2 usage, 3 parse error,
4 search bound hit (inconclusive), 5 file I/O, 6 other domain error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import formats, groups
from .errors import HolonomyError, ParseError, SearchBoundsExceeded, UnsuitableGraph, WalkError
from .report import Report

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_PARSE, EXIT_BOUNDS, EXIT_IO, EXIT_DOMAIN = range(7)


def fixture_dir() -> Path:
    env = os.environ.get("HOL_FIXTURES")
    return Path(env) if env else Path(__file__).parent / "fixtures"


def resolve(path: str) -> Path:
    """A path as given, or else a bundled fixture of that name (".json" optional)."""
    p = Path(path)
    if p.exists():
        return p
    for cand in (fixture_dir() / path, fixture_dir() / (path + ".json")):
        if cand.exists():
            return cand
    raise FileNotFoundError(path)


def _load(kind: str, path: str):
    return formats.load(kind, resolve(path))


class _Out:
    def __init__(self, args):
        self.fmt = args.format
        self.report_path = getattr(args, "report", None)

    def value(self, obj, text: str | None = None) -> None:
        if self.fmt == "json":
            print(json.dumps(obj, sort_keys=True))
        else:
            print(text if text is not None else json.dumps(obj, sort_keys=True, indent=1))

    def report(self, rep: Report) -> int:
        if self.report_path:
            Path(self.report_path).write_text(rep.to_json() + "\n")
        print(rep.to_json() if self.fmt == "json" else rep.to_text())
        return EXIT_PASS if rep.ok else EXIT_FAIL


# --------------------------------------------------------------------------
# commands


def cmd_eval(args, out: _Out) -> int:
    from .bundle import holonomy

    field = _load("field", args.field)
    base = formats.parse_basepoint(field.group, field.graph, args.base, "--base")
    loop = formats.walk_from_json(field.graph, args.loop, "--loop")
    if not loop.is_loop or loop.start != base.vertex:
        raise ParseError(f"loop must be closed at the base vertex {base.vertex!r}", "--loop")
    h = holonomy(field, loop, base)
    out.value(formats.element_to_json(h), repr(h))
    return EXIT_PASS


def cmd_reconstruct(args, out: _Out) -> int:
    from .reconstruction import reconstruct

    H = _load("map", args.map)
    R = reconstruct(H)
    data = formats.field_to_dict(R.field)
    if args.out:
        formats.write_json(args.out, data)
        out.value({"basepoint": formats.point_to_dict(R.basepoint), "out": args.out},
                  f"wrote {args.out}; basepoint {R.basepoint.vertex}:e")
    else:
        out.value(data)
    return EXIT_PASS


def cmd_iso_find(args, out: _Out) -> int:
    from .reconstruction import EquivalenceCertificate, gauge_equivalent, reconstruct

    if args.src and args.dst:
        H1, H2 = _load("map", args.src), _load("map", args.dst)
        R1, R2 = reconstruct(H1), reconstruct(H2)
        f1, u1, f2, u2 = R1.field, R1.basepoint, R2.field, R2.basepoint
    elif args.src_field and args.dst_field:
        f1, f2 = _load("field", args.src_field), _load("field", args.dst_field)
        u1 = formats.parse_basepoint(f1.group, f1.graph, args.src_base or f"{f1.graph.vertices[0]}:e", "--src-base")
        u2 = formats.parse_basepoint(f2.group, f2.graph, args.dst_base or f"{f2.graph.vertices[0]}:e", "--dst-base")
    else:
        raise _Usage("iso-find needs --src/--dst maps or --src-field/--dst-field fields")
    res = gauge_equivalent(f1, u1, f2, u2, max_vertices=args.max_vertices, max_group_order=args.max_group_order)
    if not isinstance(res, EquivalenceCertificate):
        data = formats.refutation_to_dict(res)
        if args.out:
            formats.write_json(args.out, data)
        if args.src:
            out.value(data, "none found (within search bounds)")
        else:
            out.value(data, f"not equivalent: {res.reason} ({len(res.witnesses)} witnesses, "
                            f"{'complete' if res.complete else 'within supplied candidates'})")
        return EXIT_FAIL
    if args.src:
        data = formats.holiso_to_dict(res.holiso)
    else:
        data = formats.certificate_to_dict(res)
    if args.out:
        formats.write_json(args.out, data)
        out.value({"out": args.out, "residuals": res.residuals}, f"wrote {args.out}")
    else:
        out.value(data)
    return EXIT_PASS


def cmd_iso_apply(args, out: _Out) -> int:
    cert = _load("certificate", args.cert)
    m = cert.morphism
    if args.point:
        p = formats.parse_basepoint(cert.src.group, cert.src.graph, args.point, "--point")
        q = m(p)
        out.value(formats.point_to_dict(q), f"{q.vertex}:{json.dumps(formats.element_to_json(q.fiber))}")
    elif args.walk:
        w = formats.walk_from_json(cert.src.graph, args.walk, "--walk")
        out.value(formats.format_walk(m.iso.walk(w)))
    elif args.field_out:
        formats.save("field", args.field_out, pushforward(cert))
        out.value({"out": args.field_out}, f"wrote {args.field_out}")
    else:
        raise _Usage("iso-apply needs --point, --walk or --field-out")
    return EXIT_PASS


def pushforward(cert):
    """The field on the target graph that the certificate's morphism carries the source field to."""
    from .bundle import GaugeField

    m, src = cert.morphism, cert.src
    links = {}
    for e in src.graph.edges:
        v = m.frames[e.head] * m.phi(src.links[e.name]) * m.frames[e.tail].inverse()
        name, forward = m.iso.emap[e.name]
        links[name] = v if forward else v.inverse()
    return GaugeField(cert.dst.graph, cert.dst.group, links)


def cmd_q_check(args, out: _Out) -> int:
    from .category import q_not_faithful_witness, q_not_split_witness

    g = _load("graph", args.graph)
    G = _load("group", args.group)
    rep = q_not_split_witness(g, G)
    rep.notes["not_faithful"] = q_not_faithful_witness(g, G)
    return out.report(rep)


def cmd_props(args, out: _Out) -> int:
    from .suites import run_suite

    rep = run_suite(args.suite, seed=args.seed, trials=args.trials, tol=args.tol)
    return out.report(rep)


def cmd_verify(args, out: _Out) -> int:
    from .reconstruction import verify_certificate

    cert = _load("certificate", args.cert)
    rep = verify_certificate(cert, tol=args.tol)
    return out.report(rep)


def cmd_smooth(args, out: _Out) -> int:
    from . import smooth

    A = _load("potential", args.potential)
    if args.smooth_cmd == "holonomy":
        crv = _load("curve", args.curve)
        h = smooth.transport_ode(A, crv, args.steps)
        err = smooth.richardson_error(A, crv, args.steps)
        out.value({"element": formats.element_to_json(h), "richardson_error": err},
                  f"{h!r}  (Richardson error estimate {err:.2e})")
        return EXIT_PASS
    if args.smooth_cmd == "family":
        b = tuple(float(c) for c in args.basepoint.split(","))
        fam = smooth.circles(basepoint=b) if args.family == "circles" else smooth.translations(basepoint=b)
        return out.report(smooth.family_smoothness_check(A, fam, grid=args.grid))
    box = tuple(float(c) for c in args.box.split(","))
    if len(box) != 4:
        raise ParseError("box is x0,y0,x1,y1", "--box")
    f = smooth.lattice_discretize(A, box, args.res)
    if args.out:
        formats.save("field", args.out, f)
    rep = smooth.lattice_convergence(A)
    if A.group == "U1" and A.catalog != "zero":
        rep.merge(smooth.plaquette_flux_check(A, args.res, box), prefix="plaquette:")
    return out.report(rep)


# --------------------------------------------------------------------------
# parser


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--max-group-order", type=int, default=64)
    common.add_argument("--max-vertices", type=int, default=10)
    common.add_argument("--report", help="also write the structured report to this path")

    p = argparse.ArgumentParser(prog="hol", description="Holonomy maps, gauge fields and their equivalence.")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("eval", parents=[common], help="holonomy of a loop")
    s.add_argument("--field", required=True)
    s.add_argument("--loop", required=True)
    s.add_argument("--base", required=True)
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("reconstruct", parents=[common], help="spanning-tree-gauge field of a holonomy map")
    s.add_argument("--map", required=True)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_reconstruct)

    s = sub.add_parser("iso-find", parents=[common], help="find a holonomy isomorphism or a certificate")
    s.add_argument("--src")
    s.add_argument("--dst")
    s.add_argument("--src-field")
    s.add_argument("--src-base", default=None)
    s.add_argument("--dst-field")
    s.add_argument("--dst-base", default=None)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_iso_find)

    s = sub.add_parser("iso-apply", parents=[common], help="apply a certificate's bundle morphism")
    s.add_argument("--cert", required=True)
    s.add_argument("--point")
    s.add_argument("--walk")
    s.add_argument("--field-out")
    s.set_defaults(fn=cmd_iso_apply)

    s = sub.add_parser("q-check", parents=[common], help="witnesses that Q is not faithful and does not split")
    s.add_argument("--graph", default="theta.graph")
    s.add_argument("--group", default="s3.group")
    s.set_defaults(fn=cmd_q_check)

    s = sub.add_parser("props", parents=[common], help="run a property suite")
    from .suites import SUITES

    s.add_argument("--suite", required=True, choices=sorted(SUITES))
    s.set_defaults(fn=cmd_props)

    s = sub.add_parser("verify", parents=[common], help="re-verify a certificate file")
    s.add_argument("cert")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("smooth", help="continuum potentials")
    ssub = s.add_subparsers(dest="smooth_cmd", required=True)
    h = ssub.add_parser("holonomy", parents=[common])
    h.add_argument("--potential", required=True)
    h.add_argument("--curve", required=True)
    h.add_argument("--steps", type=int, default=4096)
    f = ssub.add_parser("family", parents=[common])
    f.add_argument("--potential", required=True)
    f.add_argument("--family", choices=("circles", "translations"), default="circles")
    f.add_argument("--grid", type=int, default=33)
    f.add_argument("--basepoint", default="0,0")
    la = ssub.add_parser("lattice", parents=[common])
    la.add_argument("--potential", required=True)
    la.add_argument("--box", default="0,0,1,1")
    la.add_argument("--res", type=int, default=64)
    la.add_argument("--out")
    for q in (h, f, la):
        q.set_defaults(fn=cmd_smooth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    out = _Out(args)
    try:
        return args.fn(args, out)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SearchBoundsExceeded as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_BOUNDS
    except groups.EnumerationCapExceeded as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_BOUNDS
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except UnsuitableGraph as exc:
        print(f"unsuitable graph: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (HolonomyError, WalkError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
