import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypertsp.geometry import (
    EPS_GEOM,
    DegenerateSegmentsError,
    GeometryError,
    HLine,
    HSegment,
    KleinPoint,
    PoincarePoint,
    angle_of_parallelism,
    hyp_distance,
    hypercycle_arc_length,
    hypercycle_point,
    klein_to_poincare,
    line_foot_param,
    line_point_at,
    perpendicular_foot,
    poincare_to_klein,
    reflect_through_point,
    segment_crosses_line,
    segments_cross,
    side_of_line,
)

from conftest import disk_point

X_AXIS = HLine.from_ideal_points((1.0, 0.0), (-1.0, 0.0))


def pt(rad, ang):
    e = math.tanh(rad / 2.0)
    return PoincarePoint(e * math.cos(ang), e * math.sin(ang))


points_strategy = st.builds(
    pt,
    st.floats(min_value=0.0, max_value=4.0, allow_nan=False),
    st.floats(min_value=0.0, max_value=2.0 * math.pi, allow_nan=False),
)


class TestDistance:
    def test_identity(self):
        p = PoincarePoint(0.0, 0.0)
        assert hyp_distance(p, p) == 0.0

    def test_ln3(self):
        d = hyp_distance(PoincarePoint(0.0, 0.0), PoincarePoint(0.5, 0.0))
        assert abs(d - math.log(3.0)) < 1e-12

    def test_off_axis_closed_form(self):
        # independent evaluation of the disk metric for (0.5,0) vs (0,0.5)
        expected = math.acosh(1.0 + 2.0 * 0.5 / (0.75 * 0.75))
        d = hyp_distance(PoincarePoint(0.5, 0.0), PoincarePoint(0.0, 0.5))
        assert abs(d - expected) < 1e-12
        assert abs(d - 1.6807) < 1e-3

    def test_domain_error(self):
        with pytest.raises(GeometryError):
            PoincarePoint(1.0, 0.0)
        with pytest.raises(GeometryError):
            PoincarePoint(0.9999999, 0.0)  # inside, but past the rim guard

    @given(points_strategy, points_strategy)
    @settings(deadline=None)
    def test_symmetry(self, p, q):
        assert hyp_distance(p, q) == hyp_distance(q, p)

    @given(points_strategy, points_strategy, points_strategy)
    @settings(deadline=None)
    def test_triangle_inequality(self, p, q, r):
        assert hyp_distance(p, r) <= hyp_distance(p, q) + hyp_distance(q, r) + 1e-9

    def test_model_consistency_after_klein_roundtrip(self, rng):
        for _ in range(300):
            p, q = disk_point(rng), disk_point(rng)
            p2 = klein_to_poincare(poincare_to_klein(p))
            q2 = klein_to_poincare(poincare_to_klein(q))
            assert abs(hyp_distance(p, q) - hyp_distance(p2, q2)) < 1e-9


class TestKleinConversion:
    def test_center_fixed(self):
        k = poincare_to_klein(PoincarePoint(0.0, 0.0))
        assert (k.x, k.y) == (0.0, 0.0)

    def test_half_maps_to_eight_tenths(self):
        k = poincare_to_klein(PoincarePoint(0.5, 0.0))
        assert abs(k.x - 0.8) < 1e-15 and k.y == 0.0

    @given(points_strategy)
    @settings(deadline=None)
    def test_roundtrip(self, p):
        back = klein_to_poincare(poincare_to_klein(p))
        assert abs(back.x - p.x) < 1e-12 and abs(back.y - p.y) < 1e-12

    def test_collinearity_preserved(self):
        # three points on one geodesic stay on one Euclidean chord
        line = HLine.from_ideal_points((math.cos(0.3), math.sin(0.3)), (-0.6, -0.8))
        pts = [line_point_at(line, s) for s in (-0.7, 0.2, 1.1)]
        ks = [poincare_to_klein(p) for p in pts]
        area = (ks[1].x - ks[0].x) * (ks[2].y - ks[0].y) - (ks[1].y - ks[0].y) * (
            ks[2].x - ks[0].x
        )
        assert abs(area) < 1e-12


class TestAngleOfParallelism:
    def test_sinh_one(self):
        d = math.log(1.0 + math.sqrt(2.0))
        assert abs(angle_of_parallelism(d) - math.pi / 4.0) < 1e-12

    def test_small_d_limit(self):
        assert angle_of_parallelism(1e-12) == pytest.approx(math.pi / 2.0, abs=1e-6)

    def test_d_five(self):
        assert abs(angle_of_parallelism(5.0) - math.atan(1.0 / math.sinh(5.0))) < 1e-15
        assert angle_of_parallelism(5.0) == pytest.approx(0.013476, abs=1e-6)

    def test_monotone_and_identity(self):
        prev = math.pi / 2.0
        for d in np.linspace(0.05, 8.0, 60):
            a = angle_of_parallelism(float(d))
            assert a < prev
            assert abs(math.tan(a) * math.sinh(d) - 1.0) < 1e-12
            prev = a

    def test_domain(self):
        with pytest.raises(GeometryError):
            angle_of_parallelism(0.0)
        with pytest.raises(GeometryError):
            angle_of_parallelism(-1.0)


class TestHypercycleLength:
    def test_zero_offset(self):
        assert hypercycle_arc_length(3.7, 0.0) == 3.7

    def test_direct_formula(self):
        assert abs(hypercycle_arc_length(2.0, 1.2) - 2.0 * math.cosh(1.2)) < 1e-15

    def test_against_chord_quadrature(self, rng):
        # chord sums along the equidistant curve converge to b*cosh(rho)
        for _ in range(20):
            b = rng.uniform(0.1, 3.0)
            rho = rng.uniform(0.0, 2.0)
            n = 4000
            pts = [hypercycle_point(X_AXIS, -b / 2 + b * k / n, rho, 1) for k in range(n + 1)]
            total = sum(hyp_distance(a, c) for a, c in zip(pts, pts[1:]))
            want = hypercycle_arc_length(b, rho)
            assert abs(total - want) / want < 1e-6


class TestCircleGrowth:
    @pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 4.0])
    def test_circumference(self, r):
        # inscribed polygon perimeter; chord error scales with (sinh(r)/n)^2
        n = 250_000
        e = math.tanh(r / 2.0)
        ang = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        xs, ys = e * np.cos(ang), e * np.sin(ang)
        dx = np.diff(np.append(xs, xs[0]))
        dy = np.diff(np.append(ys, ys[0]))
        w = 1.0 - (xs * xs + ys * ys)
        w2 = np.roll(w, -1)
        arg = 1.0 + 2.0 * (dx * dx + dy * dy) / (w * w2)
        total = float(np.arccosh(np.clip(arg, 1.0, None)).sum())
        want = 2.0 * math.pi * math.sinh(r)
        assert abs(total - want) / want < 1e-6


def _euclidean_chord_intersection(a, b, c, d):
    """Independent Klein-chord crossing test: solve the 2x2 linear system."""
    r = (b[0] - a[0], b[1] - a[1])
    s = (d[0] - c[0], d[1] - c[1])
    den = r[0] * s[1] - r[1] * s[0]
    if abs(den) < 1e-14:
        return None
    t = ((c[0] - a[0]) * s[1] - (c[1] - a[1]) * s[0]) / den
    u = ((c[0] - a[0]) * r[1] - (c[1] - a[1]) * r[0]) / den
    if 1e-12 < t < 1 - 1e-12 and 1e-12 < u < 1 - 1e-12:
        return (a[0] + t * r[0], a[1] + t * r[1])
    return None


def _kc(p):
    k = poincare_to_klein(p)
    return (k.x, k.y)


class TestSegmentsCross:
    def test_perpendicular_diameters(self):
        s1 = HSegment(PoincarePoint(-0.5, 0.0), PoincarePoint(0.5, 0.0))
        s2 = HSegment(PoincarePoint(0.0, -0.5), PoincarePoint(0.0, 0.5))
        assert segments_cross(s1, s2)

    def test_self_is_degenerate(self):
        s = HSegment(PoincarePoint(-0.5, 0.0), PoincarePoint(0.5, 0.0))
        with pytest.raises(DegenerateSegmentsError):
            segments_cross(s, s)

    def test_shared_endpoint_is_not_crossing(self):
        o = PoincarePoint(0.0, 0.0)
        s1 = HSegment(o, PoincarePoint(0.5, 0.0))
        s2 = HSegment(o, PoincarePoint(0.0, 0.5))
        assert not segments_cross(s1, s2)

    def test_regular_quadrilateral_sides(self):
        # non-adjacent sides of a regular hyperbolic quadrilateral never cross
        e = math.tanh(0.9 / 2.0)
        corners = [
            PoincarePoint(e * math.cos(a), e * math.sin(a))
            for a in (math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4)
        ]
        sides = [HSegment(corners[k], corners[(k + 1) % 4]) for k in range(4)]
        for i, j in ((0, 2), (1, 3)):
            assert not segments_cross(sides[i], sides[j])
            assert (
                _euclidean_chord_intersection(
                    _kc(sides[i].a), _kc(sides[i].b), _kc(sides[j].a), _kc(sides[j].b)
                )
                is None
            )

    def test_agrees_with_independent_routine(self, rng):
        agree = 0
        for _ in range(10_000):
            p = [disk_point(rng, 0.9) for _ in range(4)]
            try:
                s1 = HSegment(p[0], p[1])
                s2 = HSegment(p[2], p[3])
                got = segments_cross(s1, s2)
                assert got == segments_cross(s2, s1)
            except DegenerateSegmentsError:
                continue
            want = (
                _euclidean_chord_intersection(_kc(p[0]), _kc(p[1]), _kc(p[2]), _kc(p[3]))
                is not None
            )
            assert got == want
            agree += 1
        assert agree > 9900


class TestPerpendicularFoot:
    def test_point_on_line(self):
        p = line_point_at(X_AXIS, 0.4)
        f = perpendicular_foot(p, X_AXIS)
        assert hyp_distance(p, f) < 1e-9

    def test_symmetry_case(self):
        f = perpendicular_foot(PoincarePoint(0.0, 0.5), X_AXIS)
        assert abs(f.x) < 1e-12 and abs(f.y) < 1e-12

    def test_minimizes_distance(self, rng):
        for _ in range(50):
            a = rng.uniform(0, 2 * math.pi)
            b = rng.uniform(0, 2 * math.pi)
            if abs(math.cos(a) - math.cos(b)) + abs(math.sin(a) - math.sin(b)) < 1e-3:
                continue
            line = HLine.from_ideal_points(
                (math.cos(a), math.sin(a)), (math.cos(b), math.sin(b))
            )
            p = disk_point(rng)
            f = perpendicular_foot(p, line)
            base = hyp_distance(p, f)
            assert abs(line_foot_param(line, f) - line_foot_param(line, p)) < 1e-9
            s0 = line_foot_param(line, f)
            for k in range(100):
                s = s0 + rng.uniform(-4.0, 4.0)
                assert hyp_distance(p, line_point_at(line, s)) >= base - 1e-9


class TestReflectThroughPoint:
    def test_fixed_point(self):
        p = PoincarePoint(0.3, -0.2)
        r = reflect_through_point(p, p)
        assert hyp_distance(p, r) < 1e-9

    def test_through_origin_is_negation(self):
        r = reflect_through_point(PoincarePoint(0.5, 0.0), PoincarePoint(0.0, 0.0))
        assert abs(r.x + 0.5) < 1e-12 and abs(r.y) < 1e-12

    def test_midpoint_property(self, rng):
        for _ in range(1000):
            p, c = disk_point(rng), disk_point(rng)
            image = reflect_through_point(p, c)
            d1 = hyp_distance(p, c)
            d2 = hyp_distance(image, c)
            assert abs(d1 - d2) < 1e-9
            # c lies on the segment p-image: distances add up
            assert abs(hyp_distance(p, image) - (d1 + d2)) < 1e-9


class TestSideOfLine:
    def test_on_line(self):
        assert side_of_line(line_point_at(X_AXIS, -0.8), X_AXIS) == 0

    def test_left_convention(self):
        assert side_of_line(PoincarePoint(0.0, 0.3), X_AXIS) == 1
        assert side_of_line(PoincarePoint(0.0, -0.3), X_AXIS) == -1

    def test_consistent_with_crossing(self, rng):
        for _ in range(1000):
            a = rng.uniform(0, 2 * math.pi)
            b = rng.uniform(0, 2 * math.pi)
            if abs(math.cos(a) - math.cos(b)) + abs(math.sin(a) - math.sin(b)) < 1e-3:
                continue
            line = HLine.from_ideal_points(
                (math.cos(a), math.sin(a)), (math.cos(b), math.sin(b))
            )
            p, q = disk_point(rng), disk_point(rng)
            s1, s2 = side_of_line(p, line), side_of_line(q, line)
            if s1 * s2 == -1:
                assert segment_crosses_line(HSegment(p, q), line)
