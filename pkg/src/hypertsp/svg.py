"""Deterministic SVG rendering of instances and separator diagnostics.

Everything is drawn in the Poincare disk: hyperbolic lines and
hypercycles are circular arcs meeting the ideal boundary, emitted as SVG
arc paths with fixed 6-decimal formatting so repeated renders are
byte-identical.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional

from .geometry import HLine, PoincarePoint, _from_hyperboloid, _hyperboloid
from .separator import HypercycleArc, SeparatorRegion
from .tour import Instance, Tour

_SIZE = 640
_MARGIN = 30
_SCALE = (_SIZE - 2 * _MARGIN) / 2.0
_CENTER = _SIZE / 2.0


def _screen(x: float, y: float) -> tuple[float, float]:
    return (_CENTER + _SCALE * x, _CENTER - _SCALE * y)


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def _move_line(p: tuple[float, float], q: tuple[float, float]) -> str:
    return f"M {_fmt(p[0])} {_fmt(p[1])} L {_fmt(q[0])} {_fmt(q[1])}"


def _arc_path_through(
    start: tuple[float, float], end: tuple[float, float], mid: tuple[float, float]
) -> str:
    """SVG path from start to end passing through mid (all screen coords)."""
    ax, ay = start
    bx, by = mid
    cx, cy = end
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-9:
        return _move_line(start, end)
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    r = math.hypot(ax - ux, ay - uy)
    a0 = math.atan2(ay - uy, ax - ux)
    a1 = math.atan2(cy - uy, cx - ux)
    am = math.atan2(by - uy, bx - ux)
    span_ccw = (a1 - a0) % (2.0 * math.pi)
    mid_ccw = (am - a0) % (2.0 * math.pi)
    if mid_ccw <= span_ccw:
        sweep = 1
        large = 1 if span_ccw > math.pi else 0
    else:
        sweep = 0
        span = 2.0 * math.pi - span_ccw
        large = 1 if span > math.pi else 0
    return (
        f"M {_fmt(start[0])} {_fmt(start[1])} "
        f"A {_fmt(r)} {_fmt(r)} 0 {large} {sweep} {_fmt(end[0])} {_fmt(end[1])}"
    )


def _hyp_midpoint(p: PoincarePoint, q: PoincarePoint) -> PoincarePoint:
    a = _hyperboloid(p)
    b = _hyperboloid(q)
    s = (a[0] + b[0], a[1] + b[1], a[2] + b[2])
    norm = math.sqrt(s[0] * s[0] - s[1] * s[1] - s[2] * s[2])
    return _from_hyperboloid((s[0] / norm, s[1] / norm, s[2] / norm))


def line_path(line: HLine) -> str:
    """Full hyperbolic line as an SVG path between its ideal endpoints."""
    a, b = line.ideal_a, line.ideal_b
    dot = a[0] * b[0] + a[1] * b[1]
    sa = _screen(*a)
    sb = _screen(*b)
    if dot < -1.0 + 1e-12:
        return _move_line(sa, sb)
    # the in-disk arc passes through the line's closest point to the origin
    from .geometry import line_point_at

    mid = line_point_at(line, 0.0)
    return _arc_path_through(sa, sb, _screen(mid.x, mid.y))


def segment_path(p: PoincarePoint, q: PoincarePoint) -> str:
    """Geodesic segment as an SVG arc through the hyperbolic midpoint."""
    mid = _hyp_midpoint(p, q)
    return _arc_path_through(_screen(p.x, p.y), _screen(q.x, q.y), _screen(mid.x, mid.y))


def hypercycle_arc_path(arc: HypercycleArc) -> str:
    """Equidistant arc as an SVG circular arc through its own midpoint."""
    from .geometry import hypercycle_point, line_foot_param

    s0 = line_foot_param(arc.base, arc.endpoints[0])
    s1 = line_foot_param(arc.base, arc.endpoints[1])
    mid = hypercycle_point(arc.base, (s0 + s1) / 2.0, arc.offset, arc.side)
    return _arc_path_through(
        _screen(arc.endpoints[0].x, arc.endpoints[0].y),
        _screen(arc.endpoints[1].x, arc.endpoints[1].y),
        _screen(mid.x, mid.y),
    )


def render_separator_svg(
    inst: Instance,
    region: SeparatorRegion,
    tour: Optional[Tour] = None,
) -> str:
    """Self-contained SVG of the instance, the separator and the corridor."""
    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
        f'viewBox="0 0 {_SIZE} {_SIZE}">'
    )
    parts.append(f'<rect width="{_SIZE}" height="{_SIZE}" fill="white"/>')
    parts.append(
        f'<circle id="unit-circle" cx="{_fmt(_CENTER)}" cy="{_fmt(_CENTER)}" '
        f'r="{_fmt(_SCALE)}" fill="none" stroke="black" stroke-width="1.5"/>'
    )

    if tour is not None:
        for i, j in tour.edges():
            parts.append(
                f'<path class="tour-edge" d="{segment_path(inst.points[i], inst.points[j])}" '
                'fill="none" stroke="#888888" stroke-width="1"/>'
            )

    q = region.cone.apex
    from .geometry import mobius_ideal_from_origin, mobius_to_origin

    ws = mobius_to_origin(q, complex(*region.axis.ideal_a))
    theta = math.atan2(ws.imag, ws.real)
    half = region.cone.half_angle
    for k, delta in enumerate((half, -half)):
        ray = HLine.from_ideal_points(
            mobius_ideal_from_origin(q, theta + delta),
            mobius_ideal_from_origin(q, theta + delta + math.pi),
        )
        parts.append(
            f'<path id="cone-{k}" class="cone" d="{line_path(ray)}" fill="none" '
            'stroke="#2e8b57" stroke-width="0.8" stroke-dasharray="6 3"/>'
        )

    parts.append(
        f'<path id="separator-line" d="{line_path(region.axis)}" fill="none" '
        'stroke="#d62728" stroke-width="1.6"/>'
    )
    parts.append(
        f'<path id="arc-ab" class="region-arc" d="{hypercycle_arc_path(region.arc_ab)}" '
        'fill="none" stroke="#1f77b4" stroke-width="1.6"/>'
    )
    parts.append(
        f'<path id="arc-ba" class="region-arc" d="{hypercycle_arc_path(region.arc_ba)}" '
        'fill="none" stroke="#1f77b4" stroke-width="1.6"/>'
    )
    parts.append(
        f'<path id="side-ab" class="region-side" d="{segment_path(region.a_t, region.b_t)}" '
        'fill="none" stroke="#1f77b4" stroke-width="1.2"/>'
    )
    parts.append(
        f'<path id="side-ab-prime" class="region-side" '
        f'd="{segment_path(region.a_t_prime, region.b_t_prime)}" '
        'fill="none" stroke="#1f77b4" stroke-width="1.2"/>'
    )

    sq = _screen(q.x, q.y)
    parts.append(
        f'<circle id="centerpoint" cx="{_fmt(sq[0])}" cy="{_fmt(sq[1])}" r="4" fill="#d62728"/>'
    )
    for idx, p in enumerate(inst.points):
        sp = _screen(p.x, p.y)
        parts.append(
            f'<circle class="pt" id="pt-{idx}" cx="{_fmt(sp[0])}" cy="{_fmt(sp[1])}" '
            'r="3" fill="black"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
