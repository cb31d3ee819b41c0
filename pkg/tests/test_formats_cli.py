import json
import os
import shutil
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given

from holonomy import formats, groups, sampling
from holonomy.bundle import BundlePoint, holonomy
from holonomy.category import induced_holonomy_map
from holonomy.cli import main
from holonomy.errors import ParseError
from holonomy.paths import parse_walk
from holonomy.reconstruction import verify_certificate

from conftest import field_of, kinds, seeds

FIX = Path(formats.__file__).parent / "fixtures"
KIND = {"group": "group", "graph": "graph", "field": "field", "map": "map", "cert": "certificate",
        "potential": "potential", "curve": "curve"}


def _kind(path):
    return KIND[path.name.split(".")[-2]]


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


# --------------------------------------------------------------------------
# file formats


@pytest.mark.parametrize("path", sorted(FIX.glob("*.json")), ids=lambda p: p.name)
def test_fixture_roundtrip(path):
    kind = _kind(path)
    data = json.loads(path.read_text())
    obj = formats.from_dict(kind, data)
    assert formats.to_dict(kind, obj) == data
    if kind in ("group", "graph", "field", "map"):
        assert formats.from_dict(kind, formats.to_dict(kind, obj)) == obj


@given(G=kinds, seed=seeds)
def test_random_field_and_map_roundtrip(G, seed):
    rng, f = field_of(seed, G)
    text = formats.dumps(formats.field_to_dict(f))
    f2 = formats.field_from_dict(json.loads(text))
    assert f2.graph == f.graph
    assert all(groups.distance(f2.links[e], f.links[e]) == 0.0 for e in f.links)
    H = induced_holonomy_map(f, BundlePoint(f.graph.vertices[0], G.random(rng)))
    H2 = formats.map_from_dict(json.loads(formats.dumps(formats.map_to_dict(H))))
    assert H2 == H


def test_report_roundtrip():
    rep = verify_certificate(formats.load("certificate", FIX / "theta_s3.cert.json"))
    assert formats.from_dict("report", rep.to_dict()).to_json() == rep.to_json()


@pytest.mark.parametrize("name,field", [
    ("theta.graph.json", "edges"),
    ("theta_s3.field.json", "links"),
    ("theta_s3.map.json", "tree"),
    ("theta_s3.cert.json", "morphism"),
    ("u1_linear.potential.json", "coeffs"),
])
def test_missing_field_is_named(name, field):
    data = json.loads((FIX / name).read_text())
    del data[field]
    with pytest.raises(ParseError) as err:
        formats.from_dict(_kind(FIX / name), data)
    assert repr(field) in str(err.value)


def test_nested_errors_carry_a_location():
    data = json.loads((FIX / "theta.graph.json").read_text())
    data["edges"][2]["colour"] = "red"
    with pytest.raises(ParseError) as err:
        formats.graph_from_dict(data)
    assert "colour" in str(err.value) and "$.edges[2]" in str(err.value)
    data = json.loads((FIX / "theta_s3.field.json").read_text())
    data["links"]["b"] = [0, 0, 1]
    with pytest.raises(ParseError) as err:
        formats.field_from_dict(data)
    assert "$.links.b" in str(err.value)


def test_truncated_file_reports_position(tmp_path):
    text = (FIX / "theta_s3.field.json").read_text()
    p = tmp_path / "cut.json"
    p.write_text(text[: len(text) // 2])
    with pytest.raises(ParseError) as err:
        formats.load("field", p)
    assert str(p) in str(err.value)
    p.write_bytes(b"\xff\xfe{}")
    with pytest.raises(ParseError):
        formats.load("field", p)


# --------------------------------------------------------------------------
# verify and tampering


def test_verify_genuine_certificate(capsys):
    code, out, _ = run(capsys, "verify", str(FIX / "theta_s3.cert.json"))
    assert code == 0 and "pass" in out


def test_single_bit_flips_are_rejected(tmp_path):
    """Every byte, low two bits: the flips that keep digits digits and letters letters."""
    src = (FIX / "theta_s3.cert.json").read_bytes()
    p = tmp_path / "t.json"
    outcomes = set()
    for i in range(len(src)):
        for bit in (0, 1):
            b = bytearray(src)
            b[i] ^= 1 << bit
            p.write_bytes(bytes(b))
            try:
                ok = verify_certificate(formats.load("certificate", p)).ok
            except ParseError:
                outcomes.add("parse")
                continue
            assert not ok, (i, bit, bytes(b[i - 20:i + 5]))
            outcomes.add("fail")
    # both layers fire: malformed input and well-formed but wrong content
    assert outcomes == {"parse", "fail"}


def test_tampered_link_fails_verification(tmp_path, capsys):
    data = json.loads((FIX / "theta_s3.cert.json").read_text())
    data["dst"]["links"]["we02"] = [1, 0, 2]
    p = tmp_path / "bad.json"
    formats.write_json(p, data)
    code, out, _ = run(capsys, "verify", str(p), "--format", "json")
    assert code == 1
    rep = json.loads(out)
    assert rep["verdict"] == "fail" and rep["failures"]


# --------------------------------------------------------------------------
# commands


def test_eval(capsys):
    f = formats.load("field", FIX / "theta_s3.field.json")
    loop = parse_walk(f.graph, "x: a b~")
    expect = holonomy(f, loop, BundlePoint("x", f.group.identity()))
    code, out, _ = run(capsys, "eval", "--field", "theta_s3.field", "--loop", "x: a b~", "--base", "x:e",
                       "--format", "json")
    assert code == 0 and json.loads(out) == list(expect.payload)
    code, _, err = run(capsys, "eval", "--field", "theta_s3.field", "--loop", "y: a~ b", "--base", "x:e")
    assert code == 3 and "base vertex" in err


def test_reconstruct_then_induce(tmp_path, capsys):
    out_path = tmp_path / "r.json"
    code, _, _ = run(capsys, "reconstruct", "--map", "theta_s3.map", "--out", str(out_path))
    assert code == 0
    H = formats.load("map", FIX / "theta_s3.map.json")
    R = formats.load("field", out_path)
    assert induced_holonomy_map(R, BundlePoint(H.base, H.group.identity()), H.tree) == H


def test_iso_find_and_apply(tmp_path, capsys):
    cert = tmp_path / "c.json"
    code, _, _ = run(capsys, "iso-find", "--src-field", "theta_s3.field", "--dst-field",
                     "theta_s3_partner.field", "--out", str(cert))
    assert code == 0
    assert run(capsys, "verify", str(cert))[0] == 0
    code, out, _ = run(capsys, "iso-apply", "--cert", str(cert), "--walk", "x: a b~", "--format", "json")
    assert code == 0 and json.loads(out).startswith("w0:")
    fo = tmp_path / "push.json"
    assert run(capsys, "iso-apply", "--cert", str(cert), "--field-out", str(fo))[0] == 0
    assert formats.load("field", fo) == formats.load("field", FIX / "theta_s3_partner.field.json")
    assert run(capsys, "iso-apply", "--cert", str(cert))[0] == 2


def test_iso_find_refutes(tmp_path, capsys):
    # same graph and group, a different holonomy group
    f = formats.load("field", FIX / "theta_s3.field.json")
    flat = formats.field_from_dict({**formats.field_to_dict(f), "links": {"a": [0, 1, 2], "b": [0, 1, 2],
                                                                          "c": [0, 1, 2]}})
    p = tmp_path / "flat.json"
    formats.save("field", p, flat)
    code, out, _ = run(capsys, "iso-find", "--src-field", "theta_s3.field", "--dst-field", str(p))
    assert code == 1 and "not equivalent" in out


def test_q_check(capsys):
    code, out, _ = run(capsys, "q-check", "--format", "json")
    assert code == 0 and json.loads(out)["verdict"] == "pass"
    code, _, err = run(capsys, "q-check", "--graph", "tree.graph")
    assert code == 6 and "unsuitable graph" in err


def test_props_example(capsys):
    code, out, _ = run(capsys, "props", "--suite", "prop1", "--trials", "100", "--seed", "7")
    assert code == 0 and "pass" in out


def test_props_json_is_the_report(tmp_path, capsys):
    from holonomy.suites import run_suite

    rp = tmp_path / "rep.json"
    code, out, _ = run(capsys, "props", "--suite", "lemma2", "--trials", "10", "--seed", "3", "--format", "json",
                       "--report", str(rp))
    rep = run_suite("lemma2", seed=3, trials=10, tol=None)
    assert code == 0
    assert out == rep.to_json() + "\n"
    assert rp.read_text() == rep.to_json() + "\n"


def test_smooth_commands(tmp_path, capsys):
    code, out, _ = run(capsys, "smooth", "holonomy", "--potential", "u1_linear.potential", "--curve",
                       "rectangle.curve", "--steps", "4096", "--format", "json")
    assert code == 0
    # curl of (0.3 + 0.2x - 0.7y, -0.1 + 1.1x + 0.4y) is 1.8; the rectangle has area 0.5
    h = groups.U1().element(json.loads(out)["element"])
    assert groups.distance(h, groups.U1().element(-0.9)) < 1e-6
    code, _, _ = run(capsys, "smooth", "family", "--potential", "u1_linear.potential", "--grid", "17")
    assert code == 0
    fo = tmp_path / "lat.json"
    code, _, _ = run(capsys, "smooth", "lattice", "--potential", "u1_linear.potential", "--res", "16",
                     "--out", str(fo))
    assert code == 0 and len(formats.load("field", fo).graph.vertices) == 17 * 17
    assert run(capsys, "smooth", "lattice", "--potential", "u1_linear.potential", "--box", "0,1")[0] == 3


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "eval", "--field", "theta_s3.field")[0] == 2
    assert run(capsys, "iso-find")[0] == 2
    assert run(capsys, "verify", str(tmp_path / "nope.json"))[0] == 5
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "verify", str(bad))[0] == 3
    code, _, err = run(capsys, "iso-find", "--src-field", "theta_s3.field", "--dst-field", "theta_s3.field",
                       "--max-vertices", "1")
    assert code == 4 and "inconclusive" in err


def test_fixture_directory_override(tmp_path, monkeypatch, capsys):
    shutil.copy(FIX / "tree.graph.json", tmp_path / "mine.graph.json")
    shutil.copy(FIX / "s3.group.json", tmp_path / "s3.group.json")
    monkeypatch.setenv("HOL_FIXTURES", str(tmp_path))
    code, _, err = run(capsys, "q-check", "--graph", "mine.graph")
    assert code == 6
    assert run(capsys, "eval", "--field", "theta_s3.field", "--loop", "x:", "--base", "x:e")[0] == 5


def test_subprocess_determinism_across_hash_seeds():
    outs = []
    for hs in ("0", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=hs)
        r = subprocess.run([sys.executable, "-m", "holonomy.cli", "props", "--suite", "thm1", "--trials", "6",
                            "--seed", "11", "--format", "json"], capture_output=True, env=env, check=False)
        assert r.returncode == 0, r.stderr
        outs.append(r.stdout)
    assert outs[0] == outs[1]


def test_theta_graph_fixture_matches_sampler():
    assert formats.load("graph", FIX / "theta.graph.json") == sampling.theta_graph()
