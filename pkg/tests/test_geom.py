import random
from fractions import Fraction as F

import pytest

from peglab.geom import (
    CylCurve,
    GeometryError,
    PLFunction,
    Polyline,
    Pt,
    area_under,
    area_under_clipped,
    cyl_is_simple,
    genericity_failure,
    homology_degree,
    is_simple,
    lipschitz_constant,
    perturb_generic,
    signed_area,
    winding_number,
)

UNIT_SQUARE = Polyline((Pt(0, 0), Pt(1, 0), Pt(1, 1), Pt(0, 1)), closed=True)


def star_polygon(rng, n_min=8, n_max=24):
    """Random simple CCW polygon: lattice directions sorted by angle, random radii."""
    pts = {}
    n = rng.randint(n_min, n_max)
    while len(pts) < n:
        x = rng.randint(-20, 20)
        y = rng.randint(-20, 20)
        if (x, y) == (0, 0):
            continue
        g = __import__("math").gcd(abs(x), abs(y))
        key = (x // g, y // g)
        if key not in pts:
            pts[key] = F(rng.randint(1, 40), rng.randint(1, 8))

    def half(v):
        x, y = v
        return 0 if (y > 0 or (y == 0 and x > 0)) else 1

    def angle_lt(u, v):
        hu, hv = half(u), half(v)
        if hu != hv:
            return hu < hv
        return u[0] * v[1] - u[1] * v[0] > 0

    dirs = list(pts)
    # insertion sort with the exact comparator
    ordered = []
    for d in dirs:
        i = 0
        while i < len(ordered) and angle_lt(ordered[i], d):
            i += 1
        ordered.insert(i, d)
    verts = tuple(Pt(F(dx) * pts[(dx, dy)], F(dy) * pts[(dx, dy)]) for dx, dy in ordered)
    return Polyline(verts, closed=True)


class TestAreaUnder:
    def test_ccw_unit_square(self):
        assert area_under(UNIT_SQUARE) == -1

    def test_identity_graph(self):
        assert area_under(Polyline((Pt(0, 0), Pt(1, 1)))) == F(1, 2)

    def test_forward_then_backward_cancels(self):
        rng = random.Random(7)
        vs = [Pt(F(rng.randint(-9, 9), 2), F(rng.randint(-9, 9), 3)) for _ in range(6)]
        path = Polyline(tuple(vs))
        both = path.concat(path.reversed_())
        assert area_under(both) == 0

    def test_rejects_too_short(self):
        with pytest.raises(GeometryError):
            Polyline((Pt(0, 0),))

    def test_additive_under_concat_and_negates_under_reversal(self):
        rng = random.Random(11)
        for _ in range(25):
            a = [Pt(F(rng.randint(-20, 20), 4), F(rng.randint(-20, 20), 4)) for _ in range(5)]
            b = [a[-1]] + [Pt(F(rng.randint(-20, 20), 4), F(rng.randint(-20, 20), 4)) for _ in range(4)]
            try:
                p1, p2 = Polyline(tuple(a)), Polyline(tuple(b))
            except GeometryError:
                continue
            assert area_under(p1.concat(p2)) == area_under(p1) + area_under(p2)
            assert area_under(p1.reversed_()) == -area_under(p1)


class TestSignedArea:
    def test_ccw_unit_square(self):
        assert signed_area(UNIT_SQUARE) == 1

    def test_cw_unit_square(self):
        assert signed_area(UNIT_SQUARE.reversed_()) == -1

    def test_ccw_triangle(self):
        tri = Polyline((Pt(0, 0), Pt(2, 0), Pt(0, 2)), closed=True)
        assert signed_area(tri) == 2

    def test_rejects_bowtie(self):
        bowtie = Polyline((Pt(0, 0), Pt(1, 1), Pt(1, 0), Pt(0, 1)), closed=True)
        with pytest.raises(GeometryError):
            signed_area(bowtie)

    def test_negates_area_under_on_simple_closed(self):
        rng = random.Random(3)
        for _ in range(50):
            poly = star_polygon(rng)
            assert is_simple(poly)
            assert area_under(poly) == -signed_area(poly)


class TestIsSimple:
    def test_unit_square(self):
        assert is_simple(UNIT_SQUARE)

    def test_bowtie(self):
        assert not is_simple(Polyline((Pt(0, 0), Pt(1, 1), Pt(1, 0), Pt(0, 1)), closed=True))

    def test_open_zigzag(self):
        assert is_simple(Polyline((Pt(0, 0), Pt(1, 0), Pt(1, 1))))

    def test_doubling_back_not_simple(self):
        assert not is_simple(Polyline((Pt(0, 0), Pt(2, 0), Pt(1, 0))))

    def test_repeated_vertex_not_simple(self):
        assert not is_simple(Polyline((Pt(0, 0), Pt(2, 0), Pt(2, 2), Pt(0, 0), Pt(-1, 2))))

    def test_touch_in_edge_interior_not_simple(self):
        assert not is_simple(Polyline((Pt(0, 0), Pt(4, 0), Pt(4, 2), Pt(2, 0), Pt(2, -2))))

    def test_float_path_matches_exact(self):
        rng = random.Random(5)
        for _ in range(10):
            poly = star_polygon(rng, 20, 40)
            fl = Polyline(tuple(Pt(float(p.x), float(p.y)) for p in poly.vertices), closed=True)
            # star polygons have > 64 edges rarely; force both branches on a big one
            assert is_simple(poly) == is_simple(fl)

    def test_float_vectorized_branch(self):
        import math

        n = 200
        pts = [Pt(math.cos(2 * math.pi * k / n) * (2 + 0.5 * math.sin(7 * k)),
                  math.sin(2 * math.pi * k / n) * (2 + 0.5 * math.sin(7 * k)))
               for k in range(n)]
        assert is_simple(Polyline(tuple(pts), closed=True))
        crossing = list(pts)
        crossing[10] = Pt(-crossing[10].x * 3, -crossing[10].y * 3)
        assert not is_simple(Polyline(tuple(crossing), closed=True))


class TestWindingNumber:
    def test_interior(self):
        assert winding_number(UNIT_SQUARE, Pt(F(1, 2), F(1, 2))) == 1

    def test_exterior(self):
        assert winding_number(UNIT_SQUARE, Pt(2, 2)) == 0

    def test_double_traversal(self):
        twice = Polyline((Pt(0, 0), Pt(1, 0), Pt(1, 1), Pt(0, 1),
                          Pt(0, 0), Pt(1, 0), Pt(1, 1), Pt(0, 1)), closed=True)
        # degenerate as a simple curve but fine for winding
        assert winding_number(twice, Pt(F(1, 2), F(1, 2))) == 2

    def test_rejects_on_curve(self):
        with pytest.raises(GeometryError):
            winding_number(UNIT_SQUARE, Pt(F(1, 2), 0))

    def test_against_even_odd_oracle(self):
        # independent point-in-polygon oracle: even-odd rule on a rightward ray
        def even_odd_inside(poly, p):
            cnt = 0
            for a, b in poly.edges():
                if (a.y > p.y) != (b.y > p.y):
                    x_at = a.x + (b.x - a.x) * (p.y - a.y) / (b.y - a.y)
                    if x_at > p.x:
                        cnt ^= 1
            return cnt == 1

        rng = random.Random(17)
        for _ in range(30):
            poly = star_polygon(rng)
            for _ in range(10):
                p = Pt(F(rng.randint(-300, 300), 7), F(rng.randint(-300, 300), 11))
                try:
                    w = winding_number(poly, p)
                except GeometryError:
                    continue
                assert (w == 1) == even_odd_inside(poly, p)
                assert w in (0, 1)


class TestHomologyDegree:
    def test_standard_graph(self):
        c = CylCurve(3, Polyline((Pt(0, 0), Pt(3, 0))))
        assert homology_degree(c) == 1

    def test_backwards(self):
        c = CylCurve(3, Polyline((Pt(3, 5), Pt(0, 5))))
        assert homology_degree(c) == -1

    def test_double_wrap(self):
        c = CylCurve(3, Polyline((Pt(0, 0), Pt(2, 1), Pt(6, 0))))
        assert homology_degree(c) == 2

    def test_rejects_bad_displacement(self):
        with pytest.raises(GeometryError):
            CylCurve(3, Polyline((Pt(0, 0), Pt(2, 0)))).degree
        with pytest.raises(GeometryError):
            CylCurve(3, Polyline((Pt(0, 0), Pt(3, 1)))).degree

    def test_invariant_under_rebase(self):
        c = CylCurve(4, Polyline((Pt(0, 0), Pt(1, 2), Pt(3, -1), Pt(4, 0))))
        for j in range(3):
            assert homology_degree(c.rebase(j)) == 1


class TestLipschitz:
    def test_half_slope(self):
        f = PLFunction((0, 1), (0, F(1, 2)))
        assert lipschitz_constant(f) == F(1, 2)

    def test_tent(self):
        f = PLFunction((-1, 0, 1), (0, F(1, 2), 0))
        assert lipschitz_constant(f) == F(1, 2)

    def test_constant(self):
        f = PLFunction((0, 5), (3, 3))
        assert lipschitz_constant(f) == 0

    def test_circular_wrap_segment_counts(self):
        f = PLFunction((0, 1), (0, 2), period=4)
        # wrap from (1,2) back to (4,0): slope -2/3
        assert lipschitz_constant(f) == 2

    def test_interval_at_clamps(self):
        f = PLFunction((0, 1), (1, 3))
        assert f.at(-10) == 1
        assert f.at(10) == 3
        assert f.at(F(1, 2)) == 2


class TestPerturbGeneric:
    def curves(self):
        a = CylCurve(4, Polyline((Pt(0, 0), Pt(2, 1), Pt(4, 0))))
        b = CylCurve(4, Polyline((Pt(0, 2), Pt(2, 3), Pt(4, 2))))
        return [a, b]

    def test_deterministic(self):
        out1 = perturb_generic(self.curves(), seed=9, magnitude=F(1, 100))
        out2 = perturb_generic(self.curves(), seed=9, magnitude=F(1, 100))
        assert [c.lift.vertices for c in out1] == [c.lift.vertices for c in out2]

    def test_within_magnitude_and_generic(self):
        mag = F(1, 50)
        out = perturb_generic(self.curves(), seed=1, magnitude=mag)
        for before, after in zip(self.curves(), out):
            for p, q in zip(before.vertices_one_period(), after.vertices_one_period()):
                assert abs(p.x - q.x) <= mag and abs(p.y - q.y) <= mag
        assert genericity_failure(out) is None

    def test_forces_distinct_abscissae(self):
        shared = [CylCurve(4, Polyline((Pt(0, 0), Pt(2, 1), Pt(4, 0)))),
                  CylCurve(4, Polyline((Pt(0, 3), Pt(2, 4), Pt(4, 3))))]
        assert genericity_failure(shared) is not None
        out = perturb_generic(shared, seed=2, magnitude=F(1, 64))
        xs = [v.x % 4 for c in out for v in c.vertices_one_period()]
        assert len(set(xs)) == len(xs)


class TestCylSimple:
    def test_graph_simple(self):
        c = CylCurve(4, Polyline((Pt(0, 0), Pt(1, 1), Pt(3, -1), Pt(4, 0))))
        assert cyl_is_simple(c)

    def test_cross_period_intersection(self):
        # tall zigzag whose tail collides with the next period's head
        c = CylCurve(2, Polyline((Pt(0, 0), Pt(F(5, 2), 1), Pt(F(1, 2), 2), Pt(2, 0))))
        assert not cyl_is_simple(c)

    def test_self_intersecting_lift(self):
        c = CylCurve(6, Polyline((Pt(0, 0), Pt(4, 2), Pt(2, 2), Pt(3, -1), Pt(6, 0))))
        assert not cyl_is_simple(c)


class TestStripClip:
    def test_graph_strip(self):
        # y = x on [0,4]; strip [1,3]: integral = (1+3)/2*2 = 4
        p = Polyline((Pt(0, 0), Pt(4, 4)))
        assert area_under_clipped(p, 1, 3) == 4

    def test_matches_full_area(self):
        rng = random.Random(23)
        poly = star_polygon(rng)
        xs = [v.x for v in poly.vertices]
        lo, hi = min(xs) - 1, max(xs) + 1
        assert area_under_clipped(poly, lo, hi) == area_under(poly)
