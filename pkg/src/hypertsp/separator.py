"""Balanced separators with an empty double cone, and the corridor region R.

The separator is a hyperbolic line through a centerpoint of the input,
chosen so that an open double cone of half-angle pi/(2n) around it
contains no input point.  Around the core segment of that line we build
a geodesically convex corridor of half-width rho, bounded by two
perpendicular chords and two hypercycle arcs; the solver enumerates tour
segments by how they interact with this corridor.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import geometry
from .geometry import (
    EPS_GEOM,
    GeometryError,
    HLine,
    HSegment,
    KleinPoint,
    PoincarePoint,
    geodesic_point_toward_ideal,
    hyp_distance,
    klein_to_poincare,
    line_foot_param,
    mobius_ideal_from_origin,
    mobius_to_origin,
    poincare_to_klein,
    segment_hypercycle_intersections,
    side_of_line,
    signed_line_distance,
)

_RADON_TRIALS = 48
_CANDIDATE_SEED = 0x5EED


@dataclass(frozen=True)
class DoubleCone:
    """Open double cone: apex, axis line, and half-angle in radians."""

    apex: PoincarePoint
    axis: HLine
    half_angle: float

    def __post_init__(self) -> None:
        if not 0.0 < self.half_angle < math.pi / 2:
            raise GeometryError(f"cone half-angle out of range: {self.half_angle}")
        if abs(signed_line_distance(self.apex, self.axis)) > 10 * EPS_GEOM:
            raise GeometryError("cone apex does not lie on its axis")

    def contains_open(self, p: PoincarePoint) -> bool:
        """Membership in the open cone interior (the apex itself is excluded)."""
        w = mobius_to_origin(self.apex, complex(p.x, p.y))
        if abs(w) < 1e-14:
            return False
        ax = mobius_to_origin(self.apex, complex(*self.axis.ideal_a))
        delta = (math.atan2(w.imag, w.real) - math.atan2(ax.imag, ax.real)) % math.pi
        delta = min(delta, math.pi - delta)
        return delta < self.half_angle


@dataclass(frozen=True)
class HypercycleArc:
    """One boundary arc of the corridor: equidistant curve segment of the axis."""

    base: HLine
    offset: float
    side: int
    endpoints: tuple[PoincarePoint, PoincarePoint]

    def __post_init__(self) -> None:
        for p in self.endpoints:
            d = signed_line_distance(p, self.base)
            if abs(d - self.side * self.offset) > 1e2 * EPS_GEOM:
                raise GeometryError("arc endpoint is not on the hypercycle")

    @cached_property
    def _params(self) -> tuple[float, float]:
        return (
            line_foot_param(self.base, self.endpoints[0]),
            line_foot_param(self.base, self.endpoints[1]),
        )

    def total_length(self) -> float:
        s0, s1 = self._params
        return abs(s1 - s0) * math.cosh(self.offset)


def arc_position(p: PoincarePoint, arc: HypercycleArc) -> float:
    """Arc-length position of p along the arc, measured from its first endpoint."""
    d = signed_line_distance(p, arc.base)
    if abs(d - arc.side * arc.offset) > 1e2 * EPS_GEOM:
        raise GeometryError("point is not on the hypercycle arc")
    s0, s1 = arc._params
    s = line_foot_param(arc.base, p)
    direction = 1.0 if s1 >= s0 else -1.0
    pos = (s - s0) * direction * math.cosh(arc.offset)
    if pos < -1e2 * EPS_GEOM or pos > arc.total_length() + 1e2 * EPS_GEOM:
        raise GeometryError("point is outside the arc's extent")
    return pos


class SegmentClass(Enum):
    CROSSES = "crosses"
    ENTERING = "entering"
    INSIDE = "inside"
    OTHER = "other"
    DISJOINT = "disjoint"


@dataclass(frozen=True)
class SeparatorRegion:
    """The corridor R around the separator's core segment t-t'.

    Fields follow the construction: apex cone, core endpoints t and
    t_prime on the axis, half-width rho, the four corners where the
    bounding perpendicular lines meet the hypercycles, the two boundary
    arcs, and the point count n that fixed the cone's half-angle.
    """

    cone: DoubleCone
    t: PoincarePoint
    t_prime: PoincarePoint
    rho: float
    a_t: PoincarePoint
    b_t: PoincarePoint
    a_t_prime: PoincarePoint
    b_t_prime: PoincarePoint
    arc_ab: HypercycleArc
    arc_ba: HypercycleArc
    n: int
    line_ab: HLine
    line_ab_prime: HLine

    @property
    def axis(self) -> HLine:
        return self.cone.axis

    @cached_property
    def _between_signs(self) -> tuple[int, int]:
        q = self.cone.apex
        sa = side_of_line(q, self.line_ab)
        sb = side_of_line(q, self.line_ab_prime)
        if sa == 0 or sb == 0:
            raise GeometryError("degenerate corridor: apex on a bounding line")
        return sa, sb

    def contains(self, p: PoincarePoint) -> bool:
        """Closed membership test for the corridor."""
        if abs(signed_line_distance(p, self.axis)) > self.rho + EPS_GEOM:
            return False
        sa, sb = self._between_signs
        da = side_of_line(p, self.line_ab)
        db = side_of_line(p, self.line_ab_prime)
        return da in (0, sa) and db in (0, sb)

    def qt_distance(self) -> float:
        return hyp_distance(self.cone.apex, self.t)


@dataclass(frozen=True)
class SeparatorBounds:
    """Closed-form corridor bounds: point capacity and crossing capacity."""

    n_in: float
    s_cr: float


def bounds_formula(n: float, alpha: float, rho: float) -> SeparatorBounds:
    """n_in = 1 + 2(ln n + 1)/(alpha - 2 rho); s_cr = 2 + 2(ln n + 1) cosh(rho)/rho."""
    if alpha <= 2.0 * rho:
        raise GeometryError(f"alpha={alpha} must exceed twice rho={rho}")
    ln1 = math.log(n) + 1.0
    return SeparatorBounds(
        n_in=1.0 + 2.0 * ln1 / (alpha - 2.0 * rho),
        s_cr=2.0 + 2.0 * ln1 * math.cosh(rho) / rho,
    )


def bounds(region: SeparatorRegion, alpha: float) -> SeparatorBounds:
    return bounds_formula(float(region.n), alpha, region.rho)


def qt_length(n: int) -> float:
    """Distance from the apex to each core endpoint: arcsinh(1/tan(pi/2n))."""
    if n < 2:
        raise GeometryError(f"qt_length needs n >= 2, got {n}")
    return math.asinh(1.0 / math.tan(math.pi / (2.0 * n)))


def rho_choice(alpha: float) -> float:
    """Half-width of the corridor: min(0.3*alpha, 1.2), always below alpha/2."""
    return min(0.3 * alpha, 1.2)


# ---------------------------------------------------------------------------
# centerpoint

def _max_open_halfplane_count(qx: float, qy: float, xs: np.ndarray, ys: np.ndarray) -> int:
    """Largest number of points strictly inside an open halfplane bounded at q.

    Sweeps the supporting direction; points coinciding with q lie on every
    boundary line and never count.
    """
    dx = xs - qx
    dy = ys - qy
    mask = dx * dx + dy * dy > 1e-28
    ang = np.arctan2(dy[mask], dx[mask])
    k = int(ang.size)
    if k == 0:
        return 0
    a = np.sort(ang)
    ext = np.concatenate([a, a + 2.0 * math.pi])
    hi = np.searchsorted(ext, a + math.pi, side="right")
    lo = np.searchsorted(ext, a, side="right")
    c1 = hi - lo
    return int(max(c1.max(), (k - c1).max()))


def _is_centerpoint(q: tuple[float, float], xs: np.ndarray, ys: np.ndarray, n_total: int) -> bool:
    if q[0] * q[0] + q[1] * q[1] >= 1.0:
        return False
    return _max_open_halfplane_count(q[0], q[1], xs, ys) <= (2 * n_total) // 3


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _radon_point(pts: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Radon point of four planar points: a point in both hulls of a partition."""
    for i in range(4):
        tri = [pts[j] for j in range(4) if j != i]
        d1 = _orient(tri[0], tri[1], pts[i])
        d2 = _orient(tri[1], tri[2], pts[i])
        d3 = _orient(tri[2], tri[0], pts[i])
        if (d1 >= 0 and d2 >= 0 and d3 >= 0) or (d1 <= 0 and d2 <= 0 and d3 <= 0):
            return pts[i]
    for (i, j), (k, l) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
        p, r = pts[i], (pts[j][0] - pts[i][0], pts[j][1] - pts[i][1])
        q, s = pts[k], (pts[l][0] - pts[k][0], pts[l][1] - pts[k][1])
        den = r[0] * s[1] - r[1] * s[0]
        if abs(den) < 1e-30:
            continue
        t = ((q[0] - p[0]) * s[1] - (q[1] - p[1]) * s[0]) / den
        u = ((q[0] - p[0]) * r[1] - (q[1] - p[1]) * r[0]) / den
        if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
            return (p[0] + t * r[0], p[1] + t * r[1])
    return (
        sum(p[0] for p in pts) / 4.0,
        sum(p[1] for p in pts) / 4.0,
    )


def _centerpoint_lp(klein: np.ndarray) -> tuple[float, float] | None:
    """Chebyshev-center LP over every halfplane holding more than 2n/3 points.

    The binding halfplanes are supported by directions normal to point
    pairs; feasibility of the closed system certifies the centerpoint
    property, re-checked by the sweep afterwards.
    """
    from scipy.optimize import linprog

    n = klein.shape[0]
    m = (2 * n) // 3 + 1
    ii, jj = np.triu_indices(n, k=1)
    d = klein[jj] - klein[ii]
    norms = np.hypot(d[:, 0], d[:, 1])
    keep = norms > 1e-15
    normals = np.stack([-d[keep, 1], d[keep, 0]], axis=1) / norms[keep, None]
    dirs = np.concatenate([normals, -normals], axis=0)

    rows = []
    rhs = []
    chunk = 4096
    for lo in range(0, dirs.shape[0], chunk):
        u = dirs[lo : lo + chunk]
        proj = u @ klein.T
        # m-th largest projection per direction
        vm = np.partition(proj, proj.shape[1] - m, axis=1)[:, proj.shape[1] - m]
        rows.append(u)
        rhs.append(vm)
    u_all = np.concatenate(rows, axis=0)
    v_all = np.concatenate(rhs, axis=0)

    a_ub = np.column_stack([-u_all[:, 0], -u_all[:, 1], np.ones(u_all.shape[0])])
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=a_ub,
        b_ub=-v_all,
        bounds=[(-1.0, 1.0), (-1.0, 1.0), (None, None)],
        method="highs",
    )
    if not res.success:
        return None
    return (float(res.x[0]), float(res.x[1]))


def centerpoint(points: Sequence[PoincarePoint]) -> PoincarePoint:
    """A point q such that every line through q is a 2/3-balanced separator.

    Candidates (coordinate median, centroid, iterated Radon points of the
    Klein coordinates) are validated by an exact sweep; if none
    validates, an exact LP fallback over pair-supported halfplanes runs.
    """
    if not points:
        raise GeometryError("centerpoint of an empty point set")
    if len(points) == 1:
        return points[0]

    klein = np.array([(k.x, k.y) for k in map(poincare_to_klein, points)])
    xs, ys = klein[:, 0], klein[:, 1]
    n = len(points)

    def finish(c: tuple[float, float]) -> PoincarePoint:
        return klein_to_poincare(KleinPoint(c[0], c[1]))

    cands: list[tuple[float, float]] = [
        (float(np.median(xs)), float(np.median(ys))),
        (float(xs.mean()), float(ys.mean())),
    ]
    for c in cands:
        if _is_centerpoint(c, xs, ys, n):
            return finish(c)

    rng = random.Random(_CANDIDATE_SEED ^ n)
    base = [tuple(row) for row in klein]
    for _ in range(_RADON_TRIALS):
        pool = list(base)
        rng.shuffle(pool)
        while len(pool) >= 4:
            batch = [pool.pop() for _ in range(4)]
            pool.insert(rng.randrange(len(pool) + 1), _radon_point(batch))
        c = pool[0] if len(pool) == 1 else _radon_point(pool + pool[: 4 - len(pool)])
        if _is_centerpoint(c, xs, ys, n):
            return finish(c)

    c = _centerpoint_lp(klein)
    if c is not None and _is_centerpoint(c, xs, ys, n):
        return finish(c)
    raise GeometryError("certified centerpoint search failed")


# ---------------------------------------------------------------------------
# empty cone and corridor construction

def _direction_angles(points: Iterable[PoincarePoint], q: PoincarePoint) -> list[float]:
    angles = []
    for p in points:
        w = mobius_to_origin(q, complex(p.x, p.y))
        if abs(w) < 1e-12:
            raise GeometryError("an input point coincides with the centerpoint")
        angles.append(math.atan2(w.imag, w.real) % math.pi)
    return angles


def empty_cone_line(points: Sequence[PoincarePoint], q: PoincarePoint) -> DoubleCone:
    """The widest-gap axis through q with an empty open double cone.

    The n lines through q and each input point leave an angular gap of at
    least pi/n; the cone takes the bisector of the first widest gap and
    half-angle pi/(2n).
    """
    n = len(points)
    if n == 0:
        raise GeometryError("empty point set")
    angles = sorted(_direction_angles(points, q))
    best_gap = -1.0
    best_mid = 0.0
    for i, a in enumerate(angles):
        nxt = angles[i + 1] if i + 1 < n else angles[0] + math.pi
        gap = nxt - a
        if gap > best_gap + 1e-15:
            best_gap = gap
            best_mid = (a + nxt) / 2.0 % math.pi
    half = math.pi / (2.0 * n)
    axis = HLine.from_ideal_points(
        mobius_ideal_from_origin(q, best_mid),
        mobius_ideal_from_origin(q, best_mid + math.pi),
    )
    cone = DoubleCone(apex=q, axis=axis, half_angle=half)
    for p in points:
        if cone.contains_open(p):
            raise GeometryError("constructed cone is not empty of input points")
    return cone


def _perturb_coincident_centerpoint(
    points: Sequence[PoincarePoint], q: PoincarePoint
) -> PoincarePoint:
    """Nudge q off a coinciding input point, keeping balance certified.

    Tries steps of EPS_GEOM (escalating) in 16 directions, preferring the
    direction that maximizes the smallest angular gap of the point
    directions seen from the moved q.
    """
    klein = np.array([(k.x, k.y) for k in map(poincare_to_klein, points)])
    xs, ys = klein[:, 0], klein[:, 1]
    n = len(points)
    for scale in (1.0, 16.0, 256.0):
        step = math.tanh(EPS_GEOM * scale / 2.0)
        ranked = []
        for k in range(16):
            theta = 2.0 * math.pi * k / 16.0
            w = complex(step * math.cos(theta), step * math.sin(theta))
            z = geometry.mobius_from_origin(q, w)
            try:
                q2 = PoincarePoint(z.real, z.imag)
                angles = sorted(_direction_angles(points, q2))
            except GeometryError:
                continue
            gaps = [
                (angles[i + 1] if i + 1 < n else angles[0] + math.pi) - angles[i]
                for i in range(len(angles))
            ]
            ranked.append((min(gaps), q2))
        for _, q2 in sorted(ranked, key=lambda t: -t[0]):
            kq = poincare_to_klein(q2)
            if _is_centerpoint((kq.x, kq.y), xs, ys, n):
                return q2
    raise GeometryError("could not perturb the centerpoint off an input point")


def build_region(
    points: Sequence[PoincarePoint],
    alpha: float,
    *,
    boundary_subset: Sequence[PoincarePoint] | None = None,
) -> SeparatorRegion:
    """Construct the corridor R for an alpha-spaced point set.

    With ``boundary_subset`` given, the centerpoint (hence the balance
    guarantee) is taken over that subset, while the cone's half-angle and
    emptiness still refer to the full point set.
    """
    n = len(points)
    if n < 2:
        raise GeometryError("corridor construction needs at least two points")
    q = centerpoint(points if boundary_subset is None else boundary_subset)
    if any(hyp_distance(q, p) < 1e-12 for p in points):
        q = _perturb_coincident_centerpoint(points, q)
    cone = empty_cone_line(points, q)

    qt = qt_length(n)
    rho = min(rho_choice(alpha), alpha / 2.0 - EPS_GEOM)
    if rho <= 0.0:
        raise GeometryError(f"alpha={alpha} leaves no room for a positive corridor width")

    s_ideal = cone.axis.ideal_a
    ws = mobius_to_origin(q, complex(*s_ideal))
    theta_s = math.atan2(ws.imag, ws.real)
    half = cone.half_angle

    r = math.tanh(qt / 2.0)
    zt = geometry.mobius_from_origin(q, complex(r * math.cos(theta_s), r * math.sin(theta_s)))
    zt2 = geometry.mobius_from_origin(q, complex(-r * math.cos(theta_s), -r * math.sin(theta_s)))
    t = PoincarePoint(zt.real, zt.imag)
    t_prime = PoincarePoint(zt2.real, zt2.imag)

    ideal_a = mobius_ideal_from_origin(q, theta_s + half)
    ideal_b = mobius_ideal_from_origin(q, theta_s - half)
    ideal_a2 = mobius_ideal_from_origin(q, theta_s + half + math.pi)
    ideal_b2 = mobius_ideal_from_origin(q, theta_s - half + math.pi)
    line_ab = HLine.from_ideal_points(ideal_a, ideal_b)
    line_ab_prime = HLine.from_ideal_points(ideal_a2, ideal_b2)

    a_t = geodesic_point_toward_ideal(t, ideal_a, rho)
    b_t = geodesic_point_toward_ideal(t, ideal_b, rho)
    a_t_prime = geodesic_point_toward_ideal(t_prime, ideal_a2, rho)
    b_t_prime = geodesic_point_toward_ideal(t_prime, ideal_b2, rho)

    side_a = side_of_line(a_t, cone.axis)
    if side_a == 0:
        raise GeometryError("degenerate corridor corner")
    arc_ab = HypercycleArc(base=cone.axis, offset=rho, side=side_a, endpoints=(a_t, b_t_prime))
    arc_ba = HypercycleArc(base=cone.axis, offset=rho, side=-side_a, endpoints=(b_t, a_t_prime))

    region = SeparatorRegion(
        cone=cone,
        t=t,
        t_prime=t_prime,
        rho=rho,
        a_t=a_t,
        b_t=b_t,
        a_t_prime=a_t_prime,
        b_t_prime=b_t_prime,
        arc_ab=arc_ab,
        arc_ba=arc_ba,
        n=n,
        line_ab=line_ab,
        line_ab_prime=line_ab_prime,
    )
    _validate_region(region, points)
    return region


def build_region_for_boundary(
    points: Sequence[PoincarePoint], boundary_subset: Sequence[PoincarePoint], alpha: float
) -> SeparatorRegion:
    """Corridor whose separating line is balanced for the given subset."""
    return build_region(points, alpha, boundary_subset=boundary_subset)


def _validate_region(region: SeparatorRegion, points: Sequence[PoincarePoint]) -> None:
    q = region.cone.apex
    qt = region.qt_distance()
    identity = math.sinh(qt) * math.tan(math.pi / (2.0 * region.n))
    if abs(identity - 1.0) > 1e-6:
        raise GeometryError(f"core length identity violated: {identity}")
    if abs(hyp_distance(q, region.t_prime) - qt) > 1e2 * EPS_GEOM:
        raise GeometryError("core endpoints are not symmetric about the apex")
    for corner, anchor in (
        (region.a_t, region.t),
        (region.b_t, region.t),
        (region.a_t_prime, region.t_prime),
        (region.b_t_prime, region.t_prime),
    ):
        if abs(hyp_distance(corner, anchor) - region.rho) > 1e2 * EPS_GEOM:
            raise GeometryError("corner is not at distance rho from its core endpoint")
        if abs(abs(signed_line_distance(corner, region.axis)) - region.rho) > 1e2 * EPS_GEOM:
            raise GeometryError("corner is not at distance rho from the axis")
    sa, sb = region._between_signs
    for p in points:
        if side_of_line(p, region.line_ab) != sa or side_of_line(p, region.line_ab_prime) != sb:
            raise GeometryError("an input point escapes the slab between the bounding lines")


# ---------------------------------------------------------------------------
# segment classification against the corridor

def _arc_hits(seg: HSegment, region: SeparatorRegion, arc: HypercycleArc) -> list[tuple[float, PoincarePoint]]:
    hits = segment_hypercycle_intersections(seg, region.axis, region.rho, arc.side)
    sa, sb = region._between_signs
    out = []
    for s, pt in hits:
        if side_of_line(pt, region.line_ab) in (0, sa) and side_of_line(pt, region.line_ab_prime) in (0, sb):
            out.append((s, pt))
    return out


def classify_segment(seg: HSegment, region: SeparatorRegion) -> SegmentClass:
    """Corridor interaction class of a segment.

    Inside / entering by endpoint count; crossing iff the segment meets
    both boundary arcs; a segment meeting one arc twice is recorded as
    OTHER and everything else is DISJOINT.
    """
    inside = int(region.contains(seg.a)) + int(region.contains(seg.b))
    if inside == 2:
        return SegmentClass.INSIDE
    if inside == 1:
        return SegmentClass.ENTERING
    hits_ab = _arc_hits(seg, region, region.arc_ab)
    hits_ba = _arc_hits(seg, region, region.arc_ba)
    if hits_ab and hits_ba:
        return SegmentClass.CROSSES
    if len(hits_ab) == 2 or len(hits_ba) == 2:
        return SegmentClass.OTHER
    return SegmentClass.DISJOINT


def crossing_arc_points(
    seg: HSegment, region: SeparatorRegion
) -> tuple[tuple[PoincarePoint, float], tuple[PoincarePoint, float]] | None:
    """For a crossing segment, its (point, arc position) on each boundary arc.

    Returns ((point on arc_ab, position), (point on arc_ba, position)), or
    None if the segment does not cross the corridor.
    """
    hits_ab = _arc_hits(seg, region, region.arc_ab)
    hits_ba = _arc_hits(seg, region, region.arc_ba)
    if not (hits_ab and hits_ba):
        return None
    p_ab = hits_ab[0][1]
    p_ba = hits_ba[0][1]
    return (p_ab, arc_position(p_ab, region.arc_ab)), (p_ba, arc_position(p_ba, region.arc_ba))
