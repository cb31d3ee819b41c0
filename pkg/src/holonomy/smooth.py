"""Continuum gauge potentials on chart domains.

Transport along a curve is the ordered product of per-step exponentials
exp(-A(midpoint) . dx), later steps multiplying on the left, so it composes
with the discrete convention of ``bundle.transport``.  U1 values are handled as
real phases (A = i a, transport = exp(-i int a.dx)); SU2 values as unit
quaternions with A_k a pure-imaginary quaternion per axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from . import groups
from .bundle import GaugeField
from .errors import NumericalError
from .groups import GroupDescriptor, GroupElement
from .paths import Edge, Graph
from .report import Report, trial_rng

CATALOG = ("zero", "constant", "linear", "polynomial")


def monomials(dim: int, degree: int = 2) -> list[tuple]:
    out = [()]
    for d in range(1, degree + 1):
        out.extend(combinations_with_replacement(range(dim), d))
    return out


@dataclass(frozen=True)
class GaugePotential:
    """A = sum_k A_k dx_k.

    U1: ``coeffs[k]`` is a constant (catalog "constant") or the coefficients of
    a polynomial a_k(x) over ``monomials(dim)`` (graded, degree <= 2; "linear"
    keeps the first 1 + dim).  SU2: only "constant", ``coeffs[k]`` an
    imaginary quaternion (b, c, d).
    """

    dim: int
    group: str
    catalog: str
    coeffs: tuple = ()

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise NumericalError("potentials live on 2- or 3-dimensional charts")
        if self.group not in ("U1", "SU2"):
            raise NumericalError(f"unsupported group {self.group!r}")
        if self.catalog not in CATALOG:
            raise NumericalError(f"unknown catalog entry {self.catalog!r}")
        c = tuple(tuple(float(v) for v in np.atleast_1d(row)) for row in self.coeffs)
        if self.catalog == "zero":
            c = ()
        elif len(c) != self.dim:
            raise NumericalError(f"need one coefficient row per axis ({self.dim})")
        if self.group == "SU2" and self.catalog not in ("zero", "constant"):
            raise NumericalError("SU2 potentials are constant in the catalog")
        width = {"constant": 3 if self.group == "SU2" else 1, "linear": 1 + self.dim,
                 "polynomial": len(monomials(self.dim))}.get(self.catalog)
        for row in c:
            if len(row) != width:
                raise NumericalError(f"{self.catalog} rows need {width} coefficients, got {len(row)}")
            if not all(math.isfinite(v) for v in row):
                raise NumericalError("non-finite potential coefficient")
        object.__setattr__(self, "coeffs", c)

    @property
    def descriptor(self) -> GroupDescriptor:
        return groups.U1() if self.group == "U1" else groups.SU2()

    def components(self, pts: np.ndarray) -> np.ndarray:
        """A_k at points (m, dim): shape (m, dim) for U1, (m, dim, 3) for SU2."""
        pts = np.atleast_2d(pts)
        m = pts.shape[0]
        if self.catalog == "zero":
            return np.zeros((m, self.dim) if self.group == "U1" else (m, self.dim, 3))
        if self.group == "SU2":
            return np.broadcast_to(np.array(self.coeffs), (m, self.dim, 3))
        if self.catalog == "constant":
            return np.broadcast_to(np.array([r[0] for r in self.coeffs]), (m, self.dim))
        monos = monomials(self.dim)[: len(self.coeffs[0])]
        basis = np.stack([np.prod(pts[:, list(mo)], axis=1) if mo else np.ones(m) for mo in monos], axis=1)
        out = basis @ np.array(self.coeffs).T
        if not np.all(np.isfinite(out)):
            raise NumericalError("potential is not finite on the curve")
        return out

    def curl_xy(self, pts: np.ndarray) -> np.ndarray:
        """d a_y/dx - d a_x/dy for U1 potentials (the flux density in the xy-plane)."""
        pts = np.atleast_2d(pts)
        if self.group != "U1" or self.catalog in ("zero", "constant"):
            return np.zeros(pts.shape[0])
        h = 1e-6
        ex, ey = np.zeros(self.dim), np.zeros(self.dim)
        ex[0], ey[1] = h, h
        day_dx = (self.components(pts + ex)[:, 1] - self.components(pts - ex)[:, 1]) / (2 * h)
        dax_dy = (self.components(pts + ey)[:, 0] - self.components(pts - ey)[:, 0]) / (2 * h)
        return day_dx - dax_dy


def zero_potential(dim: int = 2, group: str = "U1") -> GaugePotential:
    return GaugePotential(dim, group, "zero")


# --------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class Segment:
    """One analytic piece on t in [0, 1]: "line" (from, to), "arc" (center,
    radius, start, end angles, in the first two coordinates) or "cubic"
    (four Bezier control points)."""

    kind: str
    data: tuple

    def points(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)[:, None]
        if self.kind == "line":
            p0, p1 = (np.array(p) for p in self.data)
            return p0 + t * (p1 - p0)
        if self.kind == "arc":
            c, r, a0, a1 = np.array(self.data[0]), self.data[1], self.data[2], self.data[3]
            ang = a0 + t[:, 0] * (a1 - a0)
            out = np.tile(c, (len(ang), 1))
            out[:, 0] += r * np.cos(ang)
            out[:, 1] += r * np.sin(ang)
            return out
        p = [np.array(q) for q in self.data]
        s = 1 - t
        return s**3 * p[0] + 3 * s**2 * t * p[1] + 3 * s * t**2 * p[2] + t**3 * p[3]

    def derivative(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)[:, None]
        if self.kind == "line":
            p0, p1 = (np.array(p) for p in self.data)
            return np.broadcast_to(p1 - p0, (t.shape[0], len(p0))).copy()
        if self.kind == "arc":
            c, r, a0, a1 = np.array(self.data[0]), self.data[1], self.data[2], self.data[3]
            ang = a0 + t[:, 0] * (a1 - a0)
            out = np.zeros((len(ang), len(c)))
            out[:, 0] = -r * np.sin(ang) * (a1 - a0)
            out[:, 1] = r * np.cos(ang) * (a1 - a0)
            return out
        p = [np.array(q) for q in self.data]
        s = 1 - t
        return 3 * s**2 * (p[1] - p[0]) + 6 * s * t * (p[2] - p[1]) + 3 * t**2 * (p[3] - p[2])

    @property
    def start(self) -> np.ndarray:
        return self.points(np.array([0.0]))[0]

    @property
    def end(self) -> np.ndarray:
        return self.points(np.array([1.0]))[0]

    def reversed(self) -> Segment:
        if self.kind == "line":
            return Segment("line", (self.data[1], self.data[0]))
        if self.kind == "arc":
            c, r, a0, a1 = self.data
            return Segment("arc", (c, r, a1, a0))
        return Segment("cubic", tuple(reversed(self.data)))

    def length_estimate(self) -> float:
        pts = self.points(np.linspace(0, 1, 33))
        return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))


def line(p0, p1) -> Segment:
    return Segment("line", (tuple(map(float, p0)), tuple(map(float, p1))))


def arc(center, radius: float, start: float, end: float) -> Segment:
    return Segment("arc", (tuple(map(float, center)), float(radius), float(start), float(end)))


def cubic(p0, p1, p2, p3) -> Segment:
    return Segment("cubic", tuple(tuple(map(float, p)) for p in (p0, p1, p2, p3)))


@dataclass(frozen=True)
class PiecewiseSmoothCurve:
    segments: tuple
    joint_tol: float = 1e-9

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise NumericalError("a curve needs at least one segment")
        dims = {len(s.start) for s in segs}
        if len(dims) != 1:
            raise NumericalError("segments live in different dimensions")
        for i, (a, b) in enumerate(zip(segs, segs[1:])):
            if np.linalg.norm(a.end - b.start) > self.joint_tol:
                raise NumericalError(f"curve is discontinuous at joint {i}")
        object.__setattr__(self, "segments", segs)

    @property
    def start(self) -> np.ndarray:
        return self.segments[0].start

    @property
    def end(self) -> np.ndarray:
        return self.segments[-1].end

    @property
    def closed(self) -> bool:
        return bool(np.linalg.norm(self.start - self.end) <= self.joint_tol)

    def then(self, other: PiecewiseSmoothCurve) -> PiecewiseSmoothCurve:
        """Traverse self, then other."""
        return PiecewiseSmoothCurve(self.segments + other.segments, self.joint_tol)

    def inverted(self) -> PiecewiseSmoothCurve:
        return PiecewiseSmoothCurve(tuple(s.reversed() for s in reversed(self.segments)), self.joint_tol)


def curve(*segments: Segment) -> PiecewiseSmoothCurve:
    return PiecewiseSmoothCurve(tuple(segments))


def polygon(*pts) -> PiecewiseSmoothCurve:
    """Closed polygon through pts (first point repeated at the end)."""
    pts = [tuple(map(float, p)) for p in pts]
    return curve(*[line(a, b) for a, b in zip(pts, pts[1:] + pts[:1])])


# --------------------------------------------------------------------------
# transport


def _qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ], axis=-1)


def _qexp(v: np.ndarray) -> np.ndarray:
    """exp of pure-imaginary quaternions v (..., 3)."""
    th = np.linalg.norm(v, axis=-1)
    safe = np.where(th > 0, th, 1.0)
    s = np.where(th > 0, np.sin(th) / safe, 1.0)
    return np.concatenate([np.cos(th)[..., None], v * s[..., None]], axis=-1)


def ordered_product(qs: np.ndarray) -> np.ndarray:
    """q_n ... q_1 for an (n, 4) array, by pairwise reduction."""
    qs = np.asarray(qs, dtype=float)
    if len(qs) == 0:
        return np.array([1.0, 0.0, 0.0, 0.0])
    while len(qs) > 1:
        if len(qs) % 2:
            qs = np.concatenate([qs, [[1.0, 0.0, 0.0, 0.0]]])
        qs = _qmul(qs[1::2], qs[0::2])
        qs /= np.linalg.norm(qs, axis=-1, keepdims=True)
    return qs[0]


def _segment_generators(A: GaugePotential, seg: Segment, steps: int, scheme: str) -> np.ndarray:
    """Per-step Lie-algebra increments -A . dx: (steps,) phases or (steps, 3) imaginary quaternions."""
    t = np.linspace(0.0, 1.0, steps + 1)
    if scheme == "midpoint":
        pts = seg.points(t)
        dx = np.diff(pts, axis=0)
        mid = seg.points(0.5 * (t[:-1] + t[1:]))
    elif scheme == "left":
        # first-order fault fixture: Euler step with the left endpoint
        mid = seg.points(t[:-1])
        dx = seg.derivative(t[:-1]) / steps
    else:
        raise NumericalError(f"unknown scheme {scheme!r}")
    comps = A.components(mid)
    if A.group == "U1":
        return -np.einsum("md,md->m", comps, dx)
    return -np.einsum("mdk,md->mk", comps, dx)


def transport_ode(A: GaugePotential, crv: PiecewiseSmoothCurve, steps: int, scheme: str = "midpoint") -> GroupElement:
    """Parallel transport along crv with ``steps`` steps per segment."""
    if steps < 1:
        raise NumericalError("need at least one step per segment")
    G = A.descriptor
    if A.group == "U1":
        total = 0.0
        for seg in crv.segments:
            if seg.length_estimate() == 0.0:
                continue
            total += float(np.sum(_segment_generators(A, seg, steps, scheme)))
        if not math.isfinite(total):
            raise NumericalError("transport produced a non-finite phase")
        return G.element(total)
    q = np.array([1.0, 0.0, 0.0, 0.0])
    for seg in crv.segments:
        if seg.length_estimate() == 0.0:
            continue
        qs = _qexp(_segment_generators(A, seg, steps, scheme))
        q = _qmul(ordered_product(qs), q)
        q /= np.linalg.norm(q)
    if not np.all(np.isfinite(q)):
        raise NumericalError("transport produced a non-finite quaternion")
    return G.element(tuple(q))


def element_vector(h: GroupElement) -> np.ndarray:
    """Coordinates used for distances and difference quotients."""
    if h.group.kind == "U1":
        return np.array([h.value])
    return np.array(h.value)


def richardson_error(A: GaugePotential, crv: PiecewiseSmoothCurve, steps: int, order: int = 2,
                     scheme: str = "midpoint") -> float:
    """Estimated error of transport_ode at ``steps`` from the comparison with 2*steps."""
    a = transport_ode(A, crv, steps, scheme)
    b = transport_ode(A, crv, 2 * steps, scheme)
    return groups.distance(a, b) * (2**order) / (2**order - 1)


def convergence_order(A: GaugePotential, crv: PiecewiseSmoothCurve, steps=(16, 32, 64, 128, 256),
                      scheme: str = "midpoint", reference_steps: int = 1 << 15) -> tuple[float | None, list]:
    """Log-log slope of error vs step count against a fine reference; None when the scheme is exact."""
    ref = transport_ode(A, crv, reference_steps, scheme="midpoint")
    errs = [groups.distance(transport_ode(A, crv, n, scheme), ref) for n in steps]
    if max(errs) < 1e-12:
        return None, errs
    x = np.log(np.array(steps, dtype=float))
    y = np.log(np.maximum(np.array(errs), 1e-300))
    slope = -np.polyfit(x, y, 1)[0]
    return float(slope), errs


def line_integral_polygon(A: GaugePotential, crv: PiecewiseSmoothCurve) -> float:
    """Closed-form int a.dx over line segments of a U1 potential (Simpson's rule is exact up to degree 3)."""
    total = 0.0
    for seg in crv.segments:
        if seg.kind != "line":
            raise NumericalError("closed-form line integrals are only provided for straight segments")
        p0, p1 = np.array(seg.data[0]), np.array(seg.data[1])
        d = p1 - p0
        vals = A.components(np.stack([p0, 0.5 * (p0 + p1), p1])) @ d
        total += (vals[0] + 4 * vals[1] + vals[2]) / 6.0
    return float(total)


# --------------------------------------------------------------------------
# axioms (1) and (2) on sampled curves


def random_polygon_loop(rng: np.random.Generator, base, n_pts: int = 3, scale: float = 0.5,
                        curved: bool = True) -> PiecewiseSmoothCurve:
    base = np.asarray(base, dtype=float)
    pts = [base] + [base + rng.uniform(-scale, scale, size=base.shape) for _ in range(n_pts)] + [base]
    segs = []
    for a, b in zip(pts, pts[1:]):
        if curved and rng.random() < 0.4:
            bend = rng.uniform(-scale, scale, size=base.shape) * 0.5
            segs.append(cubic(a, a + (b - a) / 3 + bend, a + 2 * (b - a) / 3 - bend, b))
        else:
            segs.append(line(a, b))
    return curve(*segs)


def insert_spur_curve(rng: np.random.Generator, crv: PiecewiseSmoothCurve, scale: float = 0.3) -> PiecewiseSmoothCurve:
    """Insert an out-and-back straight excursion at a random joint."""
    i = int(rng.integers(len(crv.segments) + 1))
    p = crv.segments[i - 1].end if i > 0 else crv.start
    q = p + rng.uniform(-scale, scale, size=p.shape)
    out = (line(p, q), line(q, p))
    return PiecewiseSmoothCurve(crv.segments[:i] + out + crv.segments[i:])


def axiom_check(A: GaugePotential, basepoint, seed: int, trials: int, steps: int = 10_000,
                scheme: str = "midpoint", tol: float = 1e-6, order_check: bool = True) -> Report:
    """Thin invariance (spur insertion) and multiplicativity on seeded random loops, plus an
    integrator accuracy and convergence-order audit."""
    rep = Report("smooth_axioms", seed=seed)
    base = np.asarray(basepoint, dtype=float)
    for t in range(trials):
        rng = trial_rng(seed, "smooth_axioms", t)
        g1 = random_polygon_loop(rng, base)
        g2 = random_polygon_loop(rng, base)
        spurred = insert_spur_curve(rng, g1)
        h1 = transport_ode(A, g1, steps, scheme)
        h2 = transport_ode(A, g2, steps, scheme)
        hs = transport_ode(A, spurred, steps, scheme)
        hc = transport_ode(A, g2.then(g1), steps, scheme)  # g1 . g2, g2 traversed first
        thin = groups.distance(hs, h1)
        mult = groups.distance(hc, h1 * h2)
        acc = richardson_error(A, g1, steps, scheme=scheme)
        rep.residual("thin", thin)
        rep.residual("multiplicative", mult)
        rep.residual("accuracy", acc)
        rep.check(thin <= max(tol, 10 * acc), t, prop="thin")
        rep.check(mult <= tol, t, prop="multiplicative")
        rep.check(acc <= tol, t, prop="accuracy")
        rep.trials += 1
    if order_check and A.catalog != "zero":
        pad = [0.0] * (len(base) - 2)
        ctrl = [base + np.array(list(d) + pad) for d in ((0.6, 0.9), (1.1, -0.4), (0.3, 0.2))]
        slope, errs = convergence_order(A, curve(cubic(base, *ctrl)), scheme=scheme)
        rep.notes["convergence_slope"] = slope
        if slope is not None:
            rep.check(abs(slope - 2.0) <= 0.2, None, prop="convergence_order", slope=slope,
                      flag="integrator converges below second order")
    return rep


# --------------------------------------------------------------------------
# axiom (3): smooth families


@dataclass(frozen=True)
class LoopFamily:
    """Catalog family of closed curves at a fixed basepoint.

    "circles": parameter r, the circle of radius r through the basepoint with
    center basepoint + (r, 0), traversed counterclockwise.
    "translations": parameter s (dim 2), a lasso: straight line to basepoint + s,
    a counterclockwise circle of radius ``rho`` there, and back.
    """

    name: str
    lower: tuple
    upper: tuple
    basepoint: tuple = (0.0, 0.0)
    rho: float = 0.2

    def __call__(self, params) -> PiecewiseSmoothCurve:
        b = np.asarray(self.basepoint, dtype=float)
        params = np.atleast_1d(np.asarray(params, dtype=float))
        pad = [0.0] * (len(b) - 2)
        if self.name == "circles":
            r = float(params[0])
            c = b + np.array([r, 0.0] + pad)
            return curve(arc(c, r, math.pi, 3 * math.pi))
        if self.name == "translations":
            s = np.array(list(params[:2]) + pad)
            p = b + s
            c = p + np.array([self.rho, 0.0] + pad)
            return curve(line(b, p), arc(c, self.rho, math.pi, 3 * math.pi), line(p, b))
        raise NumericalError(f"unknown loop family {self.name!r}")

    @property
    def ndim(self) -> int:
        return len(self.lower)


def circles(lower: float = 0.1, upper: float = 1.0, basepoint=(0.0, 0.0)) -> LoopFamily:
    return LoopFamily("circles", (lower,), (upper,), tuple(basepoint))


def translations(lower=(-0.5, -0.5), upper=(0.5, 0.5), basepoint=(0.0, 0.0), rho: float = 0.2) -> LoopFamily:
    return LoopFamily("translations", tuple(lower), tuple(upper), tuple(basepoint), rho)


def _family_values(A: GaugePotential, fam: LoopFamily, axes: list, steps: int) -> np.ndarray:
    grid = np.meshgrid(*axes, indexing="ij")
    shape = grid[0].shape
    flat = np.stack([g.ravel() for g in grid], axis=1)
    vals = [element_vector(transport_ode(A, fam(p), steps)) for p in flat]
    out = np.array(vals).reshape(shape + (len(vals[0]),))
    if A.group == "U1":
        for ax in range(len(axes)):
            out = np.unwrap(out, axis=ax)
    return out


def family_smoothness_check(A: GaugePotential, fam: LoopFamily, grid: int = 33, steps: int = 2048,
                            ratio_min: float = 2.0, noise: float = 1e-9) -> Report:
    """Sample H o psi on a grid and test that difference quotients settle as the grid refines.

    For each axis the central first difference is computed with spacings h, 2h
    and 4h at shared points.  For a C^3 map the changes e1 = |D(h) - D(2h)| and
    e2 = |D(2h) - D(4h)| shrink like h^2, so e2/e1 is about 4; a ratio at
    least ``ratio_min`` (or both changes at the noise floor) passes.
    """
    rep = Report("family_smoothness")
    axes = [np.linspace(lo, hi, grid) for lo, hi in zip(fam.lower, fam.upper)]
    vals = _family_values(A, fam, axes, steps)
    rep.trials = int(np.prod([len(a) for a in axes]))
    derivs = {}
    for ax in range(fam.ndim):
        h = axes[ax][1] - axes[ax][0]
        v = np.moveaxis(vals, ax, 0)
        n = v.shape[0]
        idx = np.arange(4, n - 4)
        if len(idx) == 0:
            rep.fail(prop="grid_too_coarse", axis=ax)
            continue
        d_h = (v[idx + 1] - v[idx - 1]) / (2 * h)
        d_2h = (v[idx + 2] - v[idx - 2]) / (4 * h)
        d_4h = (v[idx + 4] - v[idx - 4]) / (8 * h)
        d2 = (v[2:] - 2 * v[1:-1] + v[:-2]) / h**2
        e1 = float(np.max(np.abs(d_h - d_2h)))
        e2 = float(np.max(np.abs(d_2h - d_4h)))
        ratio = e2 / e1 if e1 > noise else float("inf")
        rep.residual(f"axis{ax}_dq_change", e1)
        rep.notes[f"axis{ax}_ratio"] = None if math.isinf(ratio) else ratio
        rep.notes[f"axis{ax}_second_difference_max"] = float(np.max(np.abs(d2)))
        derivs[ax] = (axes[ax][idx] if fam.ndim == 1 else None, d_h)
        stable = e2 <= noise or ratio >= ratio_min
        rep.check(stable and bool(np.all(np.isfinite(d2))), None, prop="grid_stable", axis=ax, e1=e1, e2=e2)
    if fam.ndim == 1:
        pts, d = derivs.get(0, (None, None))
        if pts is not None:
            rep.notes["derivative_field"] = [[float(p)] + [float(c) for c in np.atleast_1d(row)] for p, row in zip(pts, d)]
    return rep


def circle_flux_derivative(A: GaugePotential, fam: LoopFamily, grid: int = 33, steps: int = 2048) -> Report:
    """Compare d(phase)/dr on the circle family with -2 pi r B for a constant flux density B."""
    rep = Report("circle_flux_derivative")
    r = np.linspace(fam.lower[0], fam.upper[0], grid)
    vals = _family_values(A, fam, [r], steps)[:, 0]
    h = r[1] - r[0]
    d = (vals[2:] - vals[:-2]) / (2 * h)
    centers = np.stack([np.array(fam.basepoint) + np.array([rr, 0.0] + [0.0] * (len(fam.basepoint) - 2))
                        for rr in r[1:-1]])
    B = A.curl_xy(centers)
    expected = -2 * math.pi * r[1:-1] * B
    err = float(np.max(np.abs(d - expected)))
    rep.residual("derivative", err)
    rep.check(err <= 1e-4, prop="flux_derivative", max_error=err)
    rep.trials = len(d)
    return rep


# --------------------------------------------------------------------------
# lattice


def lattice_graph(resolution: int) -> Graph:
    n = resolution
    verts = [f"{i},{j}" for i in range(n + 1) for j in range(n + 1)]
    edges = []
    for i in range(n + 1):
        for j in range(n + 1):
            if i < n:
                edges.append(Edge(f"x:{i},{j}", f"{i},{j}", f"{i + 1},{j}"))
            if j < n:
                edges.append(Edge(f"y:{i},{j}", f"{i},{j}", f"{i},{j + 1}"))
    return Graph(verts, edges)


def lattice_discretize(A: GaugePotential, box=(0.0, 0.0, 1.0, 1.0), resolution: int = 16,
                       steps_per_link: int = 8) -> GaugeField:
    """Grid graph on the box; each link is the transport along its straight edge."""
    if resolution < 2:
        raise NumericalError("resolution must be at least 2")
    if A.dim != 2:
        raise NumericalError("lattices are built on 2-dimensional charts")
    x0, y0, x1, y1 = map(float, box)
    n = resolution
    g = lattice_graph(n)
    G = A.descriptor
    xs = np.linspace(x0, x1, n + 1)
    ys = np.linspace(y0, y1, n + 1)
    names, p0, p1 = [], [], []
    for e in g.edges:
        i, j = map(int, e.tail.split(","))
        a, b = map(int, e.head.split(","))
        names.append(e.name)
        p0.append((xs[i], ys[j]))
        p1.append((xs[a], ys[b]))
    p0, p1 = np.array(p0), np.array(p1)
    k = steps_per_link
    t = (np.arange(k) + 0.5) / k
    mids = p0[:, None, :] + t[None, :, None] * (p1 - p0)[:, None, :]
    dx = (p1 - p0) / k
    comps = A.components(mids.reshape(-1, 2))
    links = {}
    if A.group == "U1":
        phase = -np.einsum("lkd,ld->l", comps.reshape(len(names), k, 2), dx)
        for name, ph in zip(names, phase):
            links[name] = G.element(float(ph))
    else:
        gens = -np.einsum("lkdq,ld->lkq", comps.reshape(len(names), k, 2, 3), dx)
        qs = _qexp(gens)
        acc = qs[:, 0]
        for s in range(1, k):
            acc = _qmul(qs[:, s], acc)
        acc /= np.linalg.norm(acc, axis=-1, keepdims=True)
        for name, q in zip(names, acc):
            links[name] = G.element(tuple(q))
    return GaugeField(g, G, links)


def staircase_triangle_walk(g: Graph, resolution: int, alternate: bool = True):
    """Loop at (0,0): along the bottom edge, up the right edge, back to the origin near the diagonal.

    The return trip passes cell corners on the diagonal.  With ``alternate`` the
    corner used in each cell switches sides, so the excess areas cancel in pairs
    and the Wilson loop approaches the continuum triangle at second order; the
    one-sided staircase is first order.
    """
    from .paths import Step, Walk

    n = resolution
    steps = [Step(f"x:{i},0", True) for i in range(n)]
    steps += [Step(f"y:{n},{j}", True) for j in range(n)]
    for i in range(n, 0, -1):
        if alternate and i % 2 == 0:
            steps += [Step(f"y:{i},{i - 1}", False), Step(f"x:{i - 1},{i - 1}", False)]
        else:
            steps += [Step(f"x:{i - 1},{i}", False), Step(f"y:{i - 1},{i - 1}", False)]
    return Walk(g, "0,0", steps)


def lattice_convergence(A: GaugePotential, resolutions=(4, 8, 16, 32, 64), steps: int = 20000,
                        alternate: bool = True) -> Report:
    """Wilson loop of the staircase triangle against the continuum triangle (0,0)->(1,0)->(1,1)."""
    from .bundle import BundlePoint, holonomy

    rep = Report("lattice_convergence")
    tri = polygon((0.0, 0.0), (1.0, 0.0), (1.0, 1.0))
    ref = transport_ode(A, tri, steps)
    errs = []
    for n in resolutions:
        f = lattice_discretize(A, (0, 0, 1, 1), n)
        w = staircase_triangle_walk(f.graph, n, alternate)
        h = holonomy(f, w, BundlePoint("0,0", f.group.identity()))
        errs.append(groups.distance(h, ref))
    rep.notes["errors"] = errs
    rep.notes["resolutions"] = list(resolutions)
    if max(errs) < 1e-12:
        rep.notes["slope"] = None
    else:
        slope = -np.polyfit(np.log(resolutions), np.log(np.maximum(errs, 1e-300)), 1)[0]
        rep.notes["slope"] = float(slope)
        rep.check(slope >= 1.0, prop="lattice_slope", slope=float(slope))
    rep.trials = len(resolutions)
    return rep


def plaquette_flux_check(A: GaugePotential, resolution: int = 64, box=(0.0, 0.0, 1.0, 1.0)) -> Report:
    """Every plaquette phase against -(enclosed flux) for a U1 potential with constant curl."""
    from .bundle import BundlePoint, holonomy
    from .paths import Step, Walk

    rep = Report("plaquette_flux")
    f = lattice_discretize(A, box, resolution)
    x0, y0, x1, y1 = box
    hx, hy = (x1 - x0) / resolution, (y1 - y0) / resolution
    worst = 0.0
    for i in range(resolution):
        for j in range(resolution):
            w = Walk(f.graph, f"{i},{j}", [Step(f"x:{i},{j}"), Step(f"y:{i + 1},{j}"),
                                          Step(f"x:{i},{j + 1}", False), Step(f"y:{i},{j}", False)])
            h = holonomy(f, w, BundlePoint(f"{i},{j}", f.group.identity()))
            c = np.array([[x0 + (i + 0.5) * hx, y0 + (j + 0.5) * hy]])
            flux = float(A.curl_xy(c)[0]) * hx * hy
            expected = f.group.element(-flux)
            rel = groups.distance(h, expected) / max(abs(flux), 1e-300)
            worst = max(worst, rel)
    rep.residual("relative", worst)
    rep.check(worst < 1e-3, prop="plaquette_flux", relative_error=worst)
    rep.trials = resolution * resolution
    return rep
