"""Exact piecewise-linear geometry in the plane and on a cylinder.

Coordinates may be ints, fractions.Fraction, or floats.  With int/Fraction
coordinates every predicate and integral in this module is exact; with float
coordinates the sign-branching predicates accept an absolute tolerance
(default 0, i.e. raw float signs).
"""
from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence, Union

Scalar = Union[int, Fraction, float]

NUMERIC_TOL = 1e-9


class GeometryError(ValueError):
    """Invalid or degenerate geometric input."""


def is_exact(v: Scalar) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


class Pt(NamedTuple):
    x: Scalar
    y: Scalar

    def __add__(self, other):  # type: ignore[override]
        return Pt(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Pt(self.x - other.x, self.y - other.y)

    def scale(self, s: Scalar) -> "Pt":
        return Pt(self.x * s, self.y * s)


def cross(u: Pt, v: Pt) -> Scalar:
    return u.x * v.y - u.y * v.x

def dot(u: Pt, v: Pt) -> Scalar:
    return u.x * v.x + u.y * v.y

def orient(o: Pt, a: Pt, b: Pt) -> Scalar:
    """Twice the signed area of triangle (o, a, b)."""
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def _sgn(v: Scalar, tol: Scalar = 0) -> int:
    if v > tol:
        return 1
    if v < -tol:
        return -1
    return 0


def on_segment(p: Pt, a: Pt, b: Pt, tol: Scalar = 0) -> bool:
    """p lies on the closed segment [a, b]."""
    if _sgn(orient(a, b, p), tol) != 0:
        return False
    return (min(a.x, b.x) - tol <= p.x <= max(a.x, b.x) + tol
            and min(a.y, b.y) - tol <= p.y <= max(a.y, b.y) + tol)


def segments_intersect(p1: Pt, p2: Pt, q1: Pt, q2: Pt, tol: Scalar = 0) -> bool:
    """Closed segments [p1,p2] and [q1,q2] share at least one point."""
    d1 = _sgn(orient(q1, q2, p1), tol)
    d2 = _sgn(orient(q1, q2, p2), tol)
    d3 = _sgn(orient(p1, p2, q1), tol)
    d4 = _sgn(orient(p1, p2, q2), tol)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    if d1 == 0 and on_segment(p1, q1, q2, tol):
        return True
    if d2 == 0 and on_segment(p2, q1, q2, tol):
        return True
    if d3 == 0 and on_segment(q1, p1, p2, tol):
        return True
    if d4 == 0 and on_segment(q2, p1, p2, tol):
        return True
    return False


def segment_intersection_point(p1: Pt, p2: Pt, q1: Pt, q2: Pt):
    """Proper-crossing point of two segments, with the parameter on [p1,p2].

    Returns (point, t) with point = p1 + t*(p2-p1), or None when the segments
    do not meet in exactly one point computable by a transversal solve
    (parallel/collinear configurations return None).
    """
    d = cross(p2 - p1, q2 - q1)
    if d == 0:
        return None
    t = cross(q1 - p1, q2 - q1) / d
    u = cross(q1 - p1, p2 - p1) / d
    if 0 <= t <= 1 and 0 <= u <= 1:
        return p1 + (p2 - p1).scale(t), t
    return None


@dataclass(frozen=True)
class Polyline:
    """Piecewise-linear path; closure (last vertex back to first) is implicit."""

    vertices: tuple
    closed: bool = False

    def __post_init__(self):
        vs = tuple(Pt(*v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        if len(vs) < 2:
            raise GeometryError("polyline needs at least 2 vertices")
        for a, b in zip(vs, vs[1:]):
            if a == b:
                raise GeometryError("consecutive vertices must be distinct")
        if self.closed and vs[0] == vs[-1]:
            raise GeometryError("closed polyline must not repeat the first vertex")

    def edges(self) -> Iterator[tuple]:
        vs = self.vertices
        for a, b in zip(vs, vs[1:]):
            yield a, b
        if self.closed:
            yield vs[-1], vs[0]

    @property
    def n_edges(self) -> int:
        return len(self.vertices) - 1 + (1 if self.closed else 0)

    def reversed_(self) -> "Polyline":
        return Polyline(tuple(reversed(self.vertices)), self.closed)

    def translate(self, dx: Scalar, dy: Scalar) -> "Polyline":
        return Polyline(tuple(Pt(p.x + dx, p.y + dy) for p in self.vertices), self.closed)

    def concat(self, other: "Polyline") -> "Polyline":
        """Join two open paths; other must start where self ends."""
        if self.closed or other.closed:
            raise GeometryError("can only concatenate open polylines")
        if self.vertices[-1] != other.vertices[0]:
            raise GeometryError("paths are not contiguous")
        return Polyline(self.vertices + other.vertices[1:], False)


def area_under(curve: Polyline) -> Scalar:
    """Riemann-Stieltjes integral of y dx along the polyline (exact trapezoid sum)."""
    total = 0
    for a, b in curve.edges():
        total += (a.y + b.y) * (b.x - a.x)
    return total / 2 if isinstance(total, float) else Fraction(total, 2)


def is_simple(curve: Polyline, tol: Scalar = 0) -> bool:
    """No two non-adjacent edges meet; adjacent edges share only their vertex.

    Pairwise O(n^2) scan with exact predicates for exact coordinates.  Float
    coordinates of length >= 64 edges are dispatched to a vectorized scan.
    """
    edges = list(curve.edges())
    n = len(edges)
    if n >= 64 and not all(is_exact(c) for p in curve.vertices for c in p):
        return _is_simple_float(curve, tol)
    for i in range(n):
        a1, a2 = edges[i]
        for j in range(i + 1, n):
            b1, b2 = edges[j]
            adjacent = (j == i + 1) or (curve.closed and i == 0 and j == n - 1)
            if adjacent:
                shared, tip1, tip2 = (
                    (a2, a1, b2) if j == i + 1 else (a1, a2, b1)
                )
                if _sgn(orient(shared, tip1, tip2), tol) == 0 and \
                        _sgn(dot(tip1 - shared, tip2 - shared), tol) > 0:
                    return False
            elif segments_intersect(a1, a2, b1, b2, tol):
                return False
    return True


def _is_simple_float(curve: Polyline, tol: float) -> bool:
    import numpy as np

    vs = np.array([(float(p.x), float(p.y)) for p in curve.vertices])
    if curve.closed:
        starts = vs
        ends = np.roll(vs, -1, axis=0)
    else:
        starts = vs[:-1]
        ends = vs[1:]
    n = len(starts)

    def d(o1, o2, p):
        return ((o2[:, 0] - o1[:, 0]) * (p[:, 1] - o1[:, 1])
                - (o2[:, 1] - o1[:, 1]) * (p[:, 0] - o1[:, 0]))

    block = 128
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        for i in range(i0, i1):
            j = np.arange(i + 2, n)
            if curve.closed and i == 0 and n > 2:
                j = j[j != n - 1]
            if len(j) == 0:
                continue
            p1 = np.broadcast_to(starts[i], (len(j), 2))
            p2 = np.broadcast_to(ends[i], (len(j), 2))
            q1, q2 = starts[j], ends[j]
            d1 = d(q1, q2, p1)
            d2 = d(q1, q2, p2)
            d3 = d(p1, p2, q1)
            d4 = d(p1, p2, q2)
            hit = (d1 * d2 <= tol * tol) & (d3 * d4 <= tol * tol)
            if hit.any():
                # re-verify candidates with the scalar predicate (rules out
                # bounding cases where a product is zero but boxes miss)
                for jj in j[hit]:
                    if segments_intersect(Pt(*starts[i]), Pt(*ends[i]),
                                          Pt(*starts[jj]), Pt(*ends[jj]), tol):
                        return False
    # adjacent pairs: collinear doubling back
    for i in range(n - 1 + (1 if curve.closed else 0)):
        a1, a2 = Pt(*starts[i]), Pt(*ends[i])
        k = (i + 1) % n
        b1, b2 = Pt(*starts[k]), Pt(*ends[k])
        if _sgn(orient(a2, a1, b2), tol) == 0 and _sgn(dot(a1 - a2, b2 - a2), tol) > 0:
            return False
    return True


def signed_area(curve: Polyline, tol: Scalar = 0) -> Scalar:
    """Shoelace area of a closed simple polyline; positive iff anticlockwise."""
    if not curve.closed:
        raise GeometryError("signed_area needs a closed polyline")
    if not is_simple(curve, tol):
        raise GeometryError("signed_area needs a simple polyline")
    total = 0
    for a, b in curve.edges():
        total += a.x * b.y - b.x * a.y
    return total / 2 if isinstance(total, float) else Fraction(total, 2)


def winding_number(curve: Polyline, p: Pt, tol: Scalar = 0) -> int:
    """Signed crossings of the upward ray from p with a closed polyline."""
    if not curve.closed:
        raise GeometryError("winding_number needs a closed polyline")
    p = Pt(*p)
    for a, b in curve.edges():
        if on_segment(p, a, b, tol):
            raise GeometryError("point lies on the curve")
    w = 0
    for a, b in curve.edges():
        if a.y <= p.y < b.y and _sgn(orient(a, b, p), tol) > 0:
            w += 1
        elif b.y <= p.y < a.y and _sgn(orient(a, b, p), tol) < 0:
            w -= 1
    return w


@dataclass(frozen=True)
class PLFunction:
    """Piecewise-linear function given by breakpoints and values.

    With period=None the domain is [breakpoints[0], breakpoints[-1]] and
    evaluation outside clamps to the boundary values (the constant
    extension).  With a period L the breakpoints live in [0, L) and
    evaluation wraps, interpolating across the seam.
    """

    breakpoints: tuple
    values: tuple
    period: Scalar = None

    def __post_init__(self):
        bs, vs = tuple(self.breakpoints), tuple(self.values)
        object.__setattr__(self, "breakpoints", bs)
        object.__setattr__(self, "values", vs)
        if len(bs) != len(vs) or not bs:
            raise GeometryError("breakpoints and values must match and be nonempty")
        if any(b2 <= b1 for b1, b2 in zip(bs, bs[1:])):
            raise GeometryError("breakpoints must be strictly increasing")
        if self.period is None:
            if len(bs) < 2:
                raise GeometryError("interval PLFunction needs >= 2 breakpoints")
        else:
            if self.period <= 0:
                raise GeometryError("period must be positive")
            if bs[0] < 0 or bs[-1] >= self.period:
                raise GeometryError("circular breakpoints must lie in [0, L)")

    @property
    def t0(self) -> Scalar:
        return self.breakpoints[0]

    @property
    def t1(self) -> Scalar:
        return self.breakpoints[-1]

    def at(self, t: Scalar) -> Scalar:
        bs, vs = self.breakpoints, self.values
        if self.period is not None:
            t = t % self.period
            i = bisect.bisect_right(bs, t) - 1
            if i < 0:
                # before the first breakpoint: interpolate across the seam
                a, fa = bs[-1] - self.period, vs[-1]
                b, fb = bs[0], vs[0]
            elif i == len(bs) - 1:
                a, fa = bs[-1], vs[-1]
                b, fb = bs[0] + self.period, vs[0]
            else:
                a, fa = bs[i], vs[i]
                b, fb = bs[i + 1], vs[i + 1]
            if t == a:
                return fa
            return fa + (fb - fa) * (t - a) / (b - a)
        if t <= bs[0]:
            return vs[0]
        if t >= bs[-1]:
            return vs[-1]
        i = bisect.bisect_right(bs, t) - 1
        a, b, fa, fb = bs[i], bs[i + 1], vs[i], vs[i + 1]
        if t == a:
            return fa
        return fa + (fb - fa) * (t - a) / (b - a)

    def graph(self) -> Polyline:
        """Graph over one fundamental domain, as an open polyline."""
        pts = [Pt(b, v) for b, v in zip(self.breakpoints, self.values)]
        if self.period is not None:
            pts.append(Pt(self.breakpoints[0] + self.period, self.values[0]))
        return Polyline(tuple(pts))


def lipschitz_constant(f: PLFunction) -> Scalar:
    """Maximum |slope| over the segments (including the wrap segment)."""
    best = 0
    pairs = list(zip(zip(f.breakpoints, f.values), zip(f.breakpoints[1:], f.values[1:])))
    if f.period is not None:
        pairs.append(((f.breakpoints[-1], f.values[-1]),
                      (f.breakpoints[0] + f.period, f.values[0])))
    for (b1, v1), (b2, v2) in pairs:
        s = abs(v2 - v1) / (b2 - b1) if isinstance(v2 - v1, float) else abs(Fraction(v2 - v1, 1) / (b2 - b1))
        if s > best:
            best = s
    return best


@dataclass(frozen=True)
class CylCurve:
    """Closed curve on the cylinder of circumference L, stored as one lift period.

    The lift is an open polyline whose displacement is exactly (degree*L, 0).
    """

    L: Scalar
    lift: Polyline

    def __post_init__(self):
        if self.L <= 0:
            raise GeometryError("circumference must be positive")
        if self.lift.closed:
            raise GeometryError("lift must be an open polyline")
        self.degree  # validates

    @property
    def degree(self) -> int:
        disp = self.lift.vertices[-1] - self.lift.vertices[0]
        exact = is_exact(disp.x) and is_exact(disp.y) and is_exact(self.L)
        if exact:
            if disp.y != 0:
                raise GeometryError("lift displacement must be horizontal")
            d = Fraction(disp.x) / Fraction(self.L)
            if d.denominator != 1:
                raise GeometryError("lift displacement must be an integer multiple of L")
            return int(d)
        tol = NUMERIC_TOL * float(self.L)
        if abs(disp.y) > tol:
            raise GeometryError("lift displacement must be horizontal")
        d = float(disp.x) / float(self.L)
        if abs(d - round(d)) > NUMERIC_TOL:
            raise GeometryError("lift displacement must be an integer multiple of L")
        return int(round(d))

    def vertices_one_period(self) -> tuple:
        return self.lift.vertices[:-1]

    def translate(self, dx: Scalar, dy: Scalar) -> "CylCurve":
        return CylCurve(self.L, self.lift.translate(dx, dy))

    def reflect_y(self) -> "CylCurve":
        return CylCurve(self.L, Polyline(
            tuple(Pt(p.x, -p.y) for p in self.lift.vertices)))

    def rebase(self, j: int) -> "CylCurve":
        """Cyclically reparameterize so vertex j of the period starts the lift."""
        vs = self.vertices_one_period()
        n = len(vs)
        j %= n
        shift = Pt(self.degree * self.L, 0)
        new = list(vs[j:]) + [v + shift for v in vs[:j]] + [vs[j] + shift]
        return CylCurve(self.L, Polyline(tuple(new)))


def homology_degree(curve: CylCurve) -> int:
    """Degree of the curve against the horizontal generator of the cylinder."""
    return curve.degree


def cyl_area_under(curve: CylCurve) -> Scalar:
    """Integral of y dx over one period of the curve."""
    return area_under(curve.lift)


def area_under_clipped(curve: Polyline, x_lo: Scalar, x_hi: Scalar) -> Scalar:
    """Integral of y dx over the parts of the polyline with x in [x_lo, x_hi]."""
    if x_hi <= x_lo:
        raise GeometryError("empty strip")
    total = Fraction(0)
    for a, b in curve.edges():
        if a.x == b.x:
            continue
        lo, hi = (a, b) if a.x < b.x else (b, a)
        sign = 1 if a.x < b.x else -1
        cl = max(lo.x, x_lo)
        ch = min(hi.x, x_hi)
        if cl >= ch:
            continue
        slope = Fraction(hi.y - lo.y, 1) / (hi.x - lo.x)
        y_cl = lo.y + slope * (cl - lo.x)
        y_ch = lo.y + slope * (ch - lo.x)
        total += sign * Fraction(y_cl + y_ch, 2) * (ch - cl)
    return total


def cyl_is_simple(curve: CylCurve, tol: Scalar = 0) -> bool:
    """Simplicity of the projected curve on the cylinder.

    Checks the lift against itself and against enough period translates to
    cover the lift's x-span.  The junction pair, where the lift's last edge
    meets the first edge of the next period, is adjacent along the infinite
    chain and only its collinear double-back is forbidden.
    """
    if not is_simple(curve.lift, tol):
        return False
    vs = curve.lift.vertices
    span = max(p.x for p in vs) - min(p.x for p in vs)
    K = int(math.ceil(float(span) / float(curve.L))) + 1
    edges = list(curve.lift.edges())
    n = len(edges)
    d = curve.degree
    for k in range(1, K + 1):
        sh = Pt(k * curve.L, 0)
        for i in range(n):
            a1, a2 = edges[i]
            for j in range(n):
                b1, b2 = edges[j][0] + sh, edges[j][1] + sh
                junction = (d > 0 and k == d and i == n - 1 and j == 0) or \
                           (d < 0 and k == -d and i == 0 and j == n - 1)
                if junction:
                    shared, tip1, tip2 = (a2, a1, b2) if d > 0 else (a1, a2, b1)
                    if _sgn(orient(shared, tip1, tip2), tol) == 0 and \
                            _sgn(dot(tip1 - shared, tip2 - shared), tol) > 0:
                        return False
                    continue
                if segments_intersect(a1, a2, b1, b2, tol):
                    return False
    return True


def _direction_pairs_generic(dirs: Sequence[Pt]) -> bool:
    """No two directions differ by a multiple of pi/4 (includes parallel/orthogonal)."""
    for i in range(len(dirs)):
        for j in range(i + 1, len(dirs)):
            c = cross(dirs[i], dirs[j])
            d = dot(dirs[i], dirs[j])
            if c == 0 or d == 0 or c == d or c == -d:
                return False
    return True


def genericity_failure(curves: Sequence[CylCurve]):
    """Reason the configuration is not in general position, or None.

    General position: all vertex abscissae distinct mod L, no vertical edge,
    no two edge directions differing by a multiple of pi/4.
    """
    L = curves[0].L
    xs = []
    dirs = []
    for c in curves:
        if c.L != L:
            return "mismatched circumferences"
        xs.extend(v.x % L for v in c.vertices_one_period())
        for a, b in c.lift.edges():
            if a.x == b.x:
                return "vertical edge"
            dirs.append(b - a)
    if len(set(xs)) != len(xs):
        return "shared vertex abscissa"
    if not _direction_pairs_generic(dirs):
        return "edge directions differ by a multiple of pi/4"
    return None


def perturb_generic(curves: Sequence[CylCurve], seed: int, magnitude: Scalar,
                    max_retries: int = 64) -> list:
    """Deterministically jitter vertices into general position.

    Jitter offsets live on the rational grid of spacing magnitude / 2**32, so
    exact inputs stay exact.  Redraws with a derived seed until the general
    position checks pass; raises after the retry budget.
    """
    if magnitude <= 0:
        raise GeometryError("magnitude must be positive")
    mag = Fraction(magnitude) if not isinstance(magnitude, float) else Fraction(magnitude).limit_denominator(10**12)
    for attempt in range(max_retries):
        rng = random.Random(seed * 1000003 + attempt)

        def jit():
            return mag * Fraction(rng.randrange(-(2**31), 2**31), 2**32)

        out = []
        for c in curves:
            base = c.vertices_one_period()
            moved = [Pt(p.x + jit(), p.y + jit()) for p in base]
            closing = moved[0] + Pt(c.degree * c.L, 0)
            out.append(CylCurve(c.L, Polyline(tuple(moved) + (closing,))))
        if genericity_failure(out) is None:
            return out
    raise GeometryError("could not reach general position within retry budget")
