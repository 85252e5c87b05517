"""Hyperbolic-plane primitives in the Poincare disk model.

Points live strictly inside the open unit disk.  Distances use the
closed-form acosh expression in disk coordinates, which keeps good
relative accuracy near the rim.  Structural operations (lines,
perpendicular feet, reflections, hypercycles) run in hyperboloid
coordinates, and incidence predicates are evaluated through the
Beltrami-Klein model, where geodesics are Euclidean chords.

All on-line / on-arc predicates share the tolerance ``EPS_GEOM``,
overridable through the ``HYPERTSP_EPS`` environment variable.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property

EPS_GEOM = float(os.environ.get("HYPERTSP_EPS", "1e-9"))

# Euclidean norms above 1 - BOUNDARY_GUARD are rejected at construction:
# the distance formula cancels catastrophically there.
BOUNDARY_GUARD = 1e-6

Vec3 = tuple[float, float, float]


class GeometryError(ValueError):
    """Domain error for hyperbolic primitives."""


class DegenerateSegmentsError(GeometryError):
    """Two collinear segments overlap in more than a single point."""


@dataclass(frozen=True)
class PoincarePoint:
    """A point of the hyperbolic plane, in Poincare disk coordinates."""

    x: float
    y: float

    def __post_init__(self) -> None:
        n2 = self.x * self.x + self.y * self.y
        if not n2 < 1.0:
            raise GeometryError(f"point ({self.x}, {self.y}) is not inside the unit disk")
        if n2 > (1.0 - BOUNDARY_GUARD) ** 2:
            raise GeometryError(f"point ({self.x}, {self.y}) is too close to the ideal boundary")

    def norm2(self) -> float:
        return self.x * self.x + self.y * self.y


@dataclass(frozen=True)
class KleinPoint:
    """The same point in Beltrami-Klein coordinates (geodesics are chords)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not self.x * self.x + self.y * self.y < 1.0:
            raise GeometryError(f"Klein point ({self.x}, {self.y}) is not inside the unit disk")


def poincare_to_klein(p: PoincarePoint) -> KleinPoint:
    """k = 2p / (1 + |p|^2)."""
    s = 1.0 + p.norm2()
    return KleinPoint(2.0 * p.x / s, 2.0 * p.y / s)


def klein_to_poincare(k: KleinPoint) -> PoincarePoint:
    """p = k / (1 + sqrt(1 - |k|^2))."""
    s = 1.0 + math.sqrt(1.0 - (k.x * k.x + k.y * k.y))
    return PoincarePoint(k.x / s, k.y / s)


def hyp_distance(p: PoincarePoint, q: PoincarePoint) -> float:
    """Hyperbolic distance, acosh(1 + 2|p-q|^2 / ((1-|p|^2)(1-|q|^2)))."""
    dx = p.x - q.x
    dy = p.y - q.y
    num = dx * dx + dy * dy
    den = (1.0 - p.norm2()) * (1.0 - q.norm2())
    arg = 1.0 + 2.0 * num / den
    return math.acosh(arg) if arg > 1.0 else 0.0


def angle_of_parallelism(d: float) -> float:
    """arctan(1 / sinh(d)); strictly decreasing from pi/2 to 0 on d > 0."""
    if d <= 0.0:
        raise GeometryError(f"angle of parallelism needs d > 0, got {d}")
    if d > 700.0:
        # 1/sinh(d) ~ 2 exp(-d), avoids sinh overflow
        return math.atan(2.0 * math.exp(-d))
    return math.atan(1.0 / math.sinh(d))


def hypercycle_arc_length(base_len: float, offset: float) -> float:
    """Length of the equidistant arc over a base geodesic of length base_len."""
    return base_len * math.cosh(offset)


# ---------------------------------------------------------------------------
# hyperboloid coordinates
#
# A point maps to x with <x,x> = 1, x0 > 0, where <u,v> = u0 v0 - u1 v1 - u2 v2.
# A line is the zero set of <x,u> for a unit spacelike normal u (<u,u> = -1);
# sinh of the signed point-line distance is <x,u>.

def _hyperboloid(p: PoincarePoint) -> Vec3:
    n2 = p.norm2()
    d = 1.0 - n2
    return ((1.0 + n2) / d, 2.0 * p.x / d, 2.0 * p.y / d)


def _from_hyperboloid(v: Vec3) -> PoincarePoint:
    s = 1.0 + v[0]
    return PoincarePoint(v[1] / s, v[2] / s)


def _mdot(u: Vec3, v: Vec3) -> float:
    return u[0] * v[0] - u[1] * v[1] - u[2] * v[2]


def _unitize(v: tuple[float, float]) -> tuple[float, float]:
    n = math.hypot(v[0], v[1])
    if not 0.5 < n < 2.0:
        raise GeometryError(f"not a boundary direction: {v}")
    return (v[0] / n, v[1] / n)


@dataclass(frozen=True)
class HLine:
    """A hyperbolic line, stored as its ordered pair of ideal endpoints.

    Endpoints are unit vectors on the boundary circle, canonically ordered
    so that ``ideal_a < ideal_b`` as coordinate pairs.  ``side_of_line`` is
    +1 on the left of the line directed from ``ideal_a`` to ``ideal_b``.
    """

    ideal_a: tuple[float, float]
    ideal_b: tuple[float, float]

    @staticmethod
    def from_ideal_points(a: tuple[float, float], b: tuple[float, float]) -> "HLine":
        a = _unitize(a)
        b = _unitize(b)
        if (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 < 1e-24:
            raise GeometryError("ideal endpoints coincide")
        if b < a:
            a, b = b, a
        return HLine(a, b)

    @staticmethod
    def through(p: PoincarePoint, q: PoincarePoint) -> "HLine":
        """The unique line through two distinct interior points."""
        xp = _hyperboloid(p)
        xq = _hyperboloid(q)
        # Euclidean cross product spans the plane of the geodesic
        n = (
            xp[1] * xq[2] - xp[2] * xq[1],
            xp[2] * xq[0] - xp[0] * xq[2],
            xp[0] * xq[1] - xp[1] * xq[0],
        )
        u = (n[0], -n[1], -n[2])
        s2 = -(u[0] * u[0] - u[1] * u[1] - u[2] * u[2])
        if s2 <= 1e-28:
            raise GeometryError("line through coincident points is undefined")
        return HLine.from_ideal_points(*_ideal_endpoints_of_normal(u))

    @cached_property
    def normal(self) -> Vec3:
        """Unit spacelike normal; <x, normal> > 0 on the positive side."""
        ax, ay = self.ideal_a
        bx, by = self.ideal_b
        n = (ax * by - ay * bx, ay - by, bx - ax)
        u = (n[0], -n[1], -n[2])
        s = math.sqrt(-(u[0] * u[0] - u[1] * u[1] - u[2] * u[2]))
        return (u[0] / s, u[1] / s, u[2] / s)

    @cached_property
    def _frame(self) -> tuple[Vec3, Vec3]:
        """(m, w): a base point on the line and the unit tangent toward ideal_b.

        Parameterizes the line as gamma(s) = cosh(s) m + sinh(s) w by arc length.
        """
        u = self.normal
        lam = u[0]  # <origin, u> with origin = (1,0,0)
        scale = math.sqrt(1.0 + lam * lam)
        m = ((1.0 + lam * u[0]) / scale, lam * u[1] / scale, lam * u[2] / scale)
        b_null = (1.0, self.ideal_b[0], self.ideal_b[1])
        d = _mdot(m, b_null)
        w = (b_null[0] / d - m[0], b_null[1] / d - m[1], b_null[2] / d - m[2])
        return m, w


def _ideal_endpoints_of_normal(u: Vec3) -> tuple[tuple[float, float], tuple[float, float]]:
    """Intersect the Klein chord {u1 x + u2 y = u0} with the unit circle."""
    q2 = u[1] * u[1] + u[2] * u[2]
    bx = u[1] * u[0] / q2
    by = u[2] * u[0] / q2
    t = math.sqrt(max(q2 - u[0] * u[0], 0.0) / q2) / math.sqrt(q2)
    dx = -u[2]
    dy = u[1]
    return (bx + t * dx, by + t * dy), (bx - t * dx, by - t * dy)


def side_of_line(p: PoincarePoint, line: HLine) -> int:
    """-1, 0 or +1; zero iff p lies on the line within EPS_GEOM."""
    s = _mdot(_hyperboloid(p), line.normal)
    if abs(s) <= math.sinh(EPS_GEOM):
        return 0
    return 1 if s > 0.0 else -1


def signed_line_distance(p: PoincarePoint, line: HLine) -> float:
    """Signed distance from p to the line; sign matches side_of_line."""
    return math.asinh(_mdot(_hyperboloid(p), line.normal))


def perpendicular_foot(p: PoincarePoint, line: HLine) -> PoincarePoint:
    """The point of the line nearest to p."""
    x = _hyperboloid(p)
    u = line.normal
    lam = _mdot(x, u)
    scale = math.sqrt(1.0 + lam * lam)
    f = ((x[0] + lam * u[0]) / scale, (x[1] + lam * u[1]) / scale, (x[2] + lam * u[2]) / scale)
    return _from_hyperboloid(f)


def reflect_through_point(p: PoincarePoint, c: PoincarePoint) -> PoincarePoint:
    """Point reflection (half-turn) about c; c is the midpoint of p and its image."""
    x = _hyperboloid(p)
    xc = _hyperboloid(c)
    lam = 2.0 * _mdot(x, xc)
    return _from_hyperboloid((lam * xc[0] - x[0], lam * xc[1] - x[1], lam * xc[2] - x[2]))


def line_foot_param(line: HLine, p: PoincarePoint) -> float:
    """Arc-length parameter of the perpendicular foot of p, in the line's frame."""
    m, w = line._frame
    x = _hyperboloid(p)
    return math.atanh(-_mdot(x, w) / _mdot(x, m))


def line_point_at(line: HLine, s: float) -> PoincarePoint:
    """The point of the line at arc-length parameter s."""
    m, w = line._frame
    ch, sh = math.cosh(s), math.sinh(s)
    return _from_hyperboloid((ch * m[0] + sh * w[0], ch * m[1] + sh * w[1], ch * m[2] + sh * w[2]))


def hypercycle_point(line: HLine, s: float, offset: float, side: int) -> PoincarePoint:
    """The point at distance ``offset`` from the line, above parameter s, on ``side``."""
    m, w = line._frame
    u = line.normal
    ch, sh = math.cosh(s), math.sinh(s)
    g = (ch * m[0] + sh * w[0], ch * m[1] + sh * w[1], ch * m[2] + sh * w[2])
    co, so = math.cosh(offset), math.sinh(offset)
    return _from_hyperboloid(
        (co * g[0] - side * so * u[0], co * g[1] - side * so * u[1], co * g[2] - side * so * u[2])
    )


def geodesic_point_toward_ideal(p: PoincarePoint, ideal: tuple[float, float], dist: float) -> PoincarePoint:
    """Walk distance ``dist`` from p along the geodesic ray toward an ideal point."""
    x = _hyperboloid(p)
    a = (1.0, ideal[0], ideal[1])
    d = _mdot(x, a)
    v = (a[0] / d - x[0], a[1] / d - x[1], a[2] / d - x[2])
    ch, sh = math.cosh(dist), math.sinh(dist)
    return _from_hyperboloid((ch * x[0] + sh * v[0], ch * x[1] + sh * v[1], ch * x[2] + sh * v[2]))


@dataclass(frozen=True)
class HSegment:
    """A geodesic segment with distinct endpoints."""

    a: PoincarePoint
    b: PoincarePoint

    def __post_init__(self) -> None:
        if hyp_distance(self.a, self.b) <= 1e-12:
            raise GeometryError("degenerate zero-length segment")

    def length(self) -> float:
        return hyp_distance(self.a, self.b)


def segments_cross(s1: HSegment, s2: HSegment) -> bool:
    """True iff the open segments meet in exactly one interior point.

    Segments that merely share an endpoint do not cross.  Collinear
    segments overlapping in more than a point raise
    DegenerateSegmentsError.
    """
    l1 = HLine.through(s1.a, s1.b)
    l2 = HLine.through(s2.a, s2.b)
    d1 = side_of_line(s2.a, l1)
    d2 = side_of_line(s2.b, l1)
    d3 = side_of_line(s1.a, l2)
    d4 = side_of_line(s1.b, l2)
    if d1 == 0 and d2 == 0 and d3 == 0 and d4 == 0:
        sa, sb = sorted((line_foot_param(l1, s1.a), line_foot_param(l1, s1.b)))
        sc, sd = sorted((line_foot_param(l1, s2.a), line_foot_param(l1, s2.b)))
        if min(sb, sd) - max(sa, sc) > EPS_GEOM:
            raise DegenerateSegmentsError("collinear segments overlap")
        return False
    return d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0 and d1 != d2 and d3 != d4


def segment_crosses_line(seg: HSegment, line: HLine) -> bool:
    """True iff the segment endpoints lie strictly on opposite sides."""
    return side_of_line(seg.a, line) * side_of_line(seg.b, line) < 0


def segment_hypercycle_intersections(
    seg: HSegment, line: HLine, offset: float, side: int
) -> list[tuple[float, PoincarePoint]]:
    """Intersections of a segment with one equidistant arc of a line.

    Returns (segment arc-length parameter, point) pairs, sorted by
    parameter.  Solves A cosh s + B sinh s = side*sinh(offset) along the
    segment via the substitution w = exp(s).
    """
    xa = _hyperboloid(seg.a)
    xb = _hyperboloid(seg.b)
    u = line.normal
    length = hyp_distance(seg.a, seg.b)
    sh_l = math.sinh(length)
    ch_l = math.cosh(length)
    v = ((xb[0] - ch_l * xa[0]) / sh_l, (xb[1] - ch_l * xa[1]) / sh_l, (xb[2] - ch_l * xa[2]) / sh_l)
    a = _mdot(xa, u)
    b = _mdot(v, u)
    c = side * math.sinh(offset)

    ws: list[float] = []
    if abs(a + b) < 1e-300:
        if abs(c) > 1e-300:
            ws.append((a - b) / (2.0 * c))
    else:
        disc = c * c - (a * a - b * b)
        if disc >= 0.0:
            r = math.sqrt(disc)
            ws.extend(((c + r) / (a + b), (c - r) / (a + b)))

    tol = 1e-10
    out: list[tuple[float, PoincarePoint]] = []
    for w in ws:
        if w <= 0.0:
            continue
        s = math.log(w)
        if -tol <= s <= length + tol:
            ch, sh = math.cosh(s), math.sinh(s)
            pt = _from_hyperboloid(
                (ch * xa[0] + sh * v[0], ch * xa[1] + sh * v[1], ch * xa[2] + sh * v[2])
            )
            out.append((s, pt))
    out.sort(key=lambda t: t[0])
    # collapse a tangential double root
    if len(out) == 2 and out[1][0] - out[0][0] < 1e-12:
        out.pop()
    return out


# ---------------------------------------------------------------------------
# Mobius translations, used for angle bookkeeping around a given point

def _as_complex(p: PoincarePoint) -> complex:
    return complex(p.x, p.y)


def mobius_to_origin(center: PoincarePoint, z: complex) -> complex:
    """Disk automorphism sending ``center`` to 0."""
    c = _as_complex(center)
    return (z - c) / (1.0 - c.conjugate() * z)


def mobius_from_origin(center: PoincarePoint, w: complex) -> complex:
    """Inverse of mobius_to_origin."""
    c = _as_complex(center)
    return (w + c) / (1.0 + c.conjugate() * w)


def mobius_ideal_from_origin(center: PoincarePoint, angle: float) -> tuple[float, float]:
    """Image of the ideal point exp(i*angle) under mobius_from_origin."""
    w = mobius_from_origin(center, complex(math.cos(angle), math.sin(angle)))
    n = abs(w)
    return (w.real / n, w.imag / n)
