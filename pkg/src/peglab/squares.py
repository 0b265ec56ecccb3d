"""Squares traversing curve families: the conserved area sum, the
contraction-mapping inscribed-square finder, its trapezoid generalization,
and joint-inscription cycles on the cylinder.

The fixed-point iteration runs in float arithmetic; everything cycle- and
verdict-shaped (sigma124 cycles, joint inscription, area sums) is exact
rational arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .geom import (
    CylCurve,
    GeometryError,
    PLFunction,
    Polyline,
    Pt,
    Scalar,
    area_under,
    cyl_area_under,
    genericity_failure,
    is_exact,
    lipschitz_constant,
    segment_intersection_point,
    on_segment,
)


class NonConvergenceError(RuntimeError):
    """The fixed-point iteration did not reach the tolerance."""


class DegeneracyError(GeometryError):
    """General position failed where a transversal configuration is required."""


class NoCrossingError(RuntimeError):
    """No sign change on the parameter grid; retry with a finer grid."""


@dataclass(frozen=True)
class SquareQuad:
    """A possibly degenerate square: vertices anticlockwise from (x, y).

    Vertices are (x,y), (x+a,y+b), (x+a-b,y+a+b), (x-b,y+a); non-degenerate
    iff (a, b) != (0, 0).
    """

    x: Scalar
    y: Scalar
    a: Scalar
    b: Scalar

    def vertices(self):
        x, y, a, b = self.x, self.y, self.a, self.b
        return (Pt(x, y), Pt(x + a, y + b), Pt(x + a - b, y + a + b), Pt(x - b, y + a))

    @property
    def degenerate(self) -> bool:
        return self.a == 0 and self.b == 0

    @property
    def side(self) -> float:
        return math.hypot(float(self.a), float(self.b))


def square_vertices(q: SquareQuad):
    """The four vertices in anticlockwise order."""
    return q.vertices()


@dataclass(frozen=True)
class SquareTrace:
    """Continuous piecewise-linear family of squares, sampled on a grid."""

    grid: tuple
    x: tuple
    y: tuple
    a: tuple
    b: tuple

    def __post_init__(self):
        n = len(self.grid)
        if n < 2:
            raise GeometryError("trace needs at least 2 grid points")
        if not (len(self.x) == len(self.y) == len(self.a) == len(self.b) == n):
            raise GeometryError("trace component lists must share the grid length")

    def quads(self):
        return [SquareQuad(x, y, a, b).vertices()
                for x, y, a, b in zip(self.x, self.y, self.a, self.b)]

    def curves(self):
        """The four vertex paths as open polylines (consecutive duplicates merged).

        Raises for paths that degenerate to a single point; use quads() and
        the residual functions for such traces.
        """
        quads = self.quads()
        out = []
        for i in range(4):
            pts = [quads[0][i]]
            for q in quads[1:]:
                if q[i] != pts[-1]:
                    pts.append(q[i])
            out.append(Polyline(tuple(pts)))
        return tuple(out)


def _path_area(points) -> Scalar:
    """Trapezoid sum of y dx along a sampled path (duplicates contribute 0)."""
    total = 0
    for a, b in zip(points, points[1:]):
        total += (a.y + b.y) * (b.x - a.x)
    return total / 2 if isinstance(total, float) else Fraction(total, 2)


def conserved_residual(trace: SquareTrace) -> Scalar:
    """Alternating area sum minus the change of (a^2 - b^2)/2 along the trace.

    Identically zero for every piecewise-linear trace in exact arithmetic.
    """
    quads = trace.quads()
    lhs = 0
    for i, sign in enumerate((1, -1, 1, -1)):
        lhs += sign * _path_area([q[i] for q in quads])
    a0, a1 = trace.a[0], trace.a[-1]
    b0, b1 = trace.b[0], trace.b[-1]
    rhs = (a1 * a1 - b1 * b1) - (a0 * a0 - b0 * b0)
    rhs = rhs / 2 if isinstance(rhs, float) else Fraction(rhs, 2)
    return lhs - rhs


def trapezoid_conserved_residual(trace: SquareTrace, s: Scalar, r: Scalar) -> Scalar:
    """Weighted conserved identity for the equilateral-trapezoid family.

    The family (x,y), (x+a,y+b), (x+(s+1)a-rb, y+(s+1)b+ra),
    (x-sa-rb, y-sb+ra) satisfies
    (2s+1)*A1 - (2s+1)*A2 + A3 - A4 = r(2s+1)/2 * [(a^2-b^2)]_start^end.
    """
    quads = []
    for x, y, a, b in zip(trace.x, trace.y, trace.a, trace.b):
        quads.append((Pt(x, y),
                      Pt(x + a, y + b),
                      Pt(x + (s + 1) * a - r * b, y + (s + 1) * b + r * a),
                      Pt(x - s * a - r * b, y - s * b + r * a)))
    w = 2 * s + 1
    areas = [_path_area([q[i] for q in quads]) for i in range(4)]
    lhs = w * areas[0] - w * areas[1] + areas[2] - areas[3]
    a0, a1 = trace.a[0], trace.a[-1]
    b0, b1 = trace.b[0], trace.b[-1]
    rhs = r * w * ((a1 * a1 - b1 * b1) - (a0 * a0 - b0 * b0))
    rhs = rhs / 2 if isinstance(rhs, float) else Fraction(rhs, 2)
    return lhs - rhs


def solve_vertex_fixed_point(f: PLFunction, g: PLFunction, t: Scalar,
                             tol: float = 1e-12, max_iter: int = 200):
    """Unique (a, b) with a = g(t-b) - f(t), b = f(t+a) - f(t).

    f and g evaluate with constant extension outside their breakpoints, so
    the map is a contraction whenever both Lipschitz constants are < 1;
    convergence is geometric with that ratio.
    """
    ft = float(f.at(t))
    t = float(t)
    a = b = 0.0
    for _ in range(max_iter):
        na = float(g.at(t - b)) - ft
        nb = float(f.at(t + a)) - ft
        if abs(na - a) + abs(nb - b) < tol:
            return na, nb
        a, b = na, nb
    raise NonConvergenceError(
        "fixed point did not converge; Lipschitz constant >= 1 input?")


def solve_trapezoid_fixed_point(f: PLFunction, g: PLFunction, t: Scalar,
                                s: Scalar, r: Scalar,
                                tol: float = 1e-12, max_iter: int = 200):
    """Fixed point of b = f(t+a)-f(t), a = (g(t-sa-rb) - f(t) + s*b)/r."""
    ft = float(f.at(t))
    t, s, r = float(t), float(s), float(r)
    a = b = 0.0
    for _ in range(max_iter):
        na = (float(g.at(t - s * a - r * b)) - ft + s * b) / r
        nb = float(f.at(t + a)) - ft
        if abs(na - a) + abs(nb - b) < tol:
            return na, nb
        a, b = na, nb
    raise NonConvergenceError(
        "trapezoid fixed point did not converge; Lipschitz bound violated?")


def _validate_two_graph_input(f: PLFunction, g: PLFunction, lip_bound: float = 1.0):
    if f.period is not None or g.period is not None:
        raise GeometryError("expected interval-domain functions")
    if f.t0 != g.t0 or f.t1 != g.t1:
        raise GeometryError("f and g must share their domain")
    if f.at(f.t0) != g.at(g.t0) or f.at(f.t1) != g.at(g.t1):
        raise GeometryError("f and g must agree at the endpoints")
    if float(lipschitz_constant(f)) >= lip_bound or float(lipschitz_constant(g)) >= lip_bound:
        raise GeometryError("Lipschitz constants must be < %g" % lip_bound)


@dataclass(frozen=True)
class InscriptionResult:
    square: SquareQuad
    residuals: tuple          # vertex distance to its assigned graph
    bracket: tuple            # (t_lo, t_hi) parameter bracket

    def max_residual(self) -> float:
        return max(self.residuals)


def trace_square_family(f: PLFunction, g: PLFunction, n: int,
                        fp_tol: float = 1e-12, max_iter: int = 200):
    """Square family over a uniform grid of n intervals on [t0, t1].

    Returns (trace, (gamma1, gamma2, gamma3, gamma4)).  gamma1 and gamma2 lie
    on the graph of f, gamma4 on the graph of g; gamma3 is the free vertex
    path whose crossings with the graph of g are inscribed squares.
    """
    _validate_two_graph_input(f, g)
    t0, t1 = float(f.t0), float(f.t1)
    grid, xs, ys, as_, bs = [], [], [], [], []
    for k in range(n + 1):
        t = t0 + (t1 - t0) * k / n
        a, b = solve_vertex_fixed_point(f, g, t, fp_tol, max_iter)
        grid.append(t)
        xs.append(t)
        ys.append(float(f.at(t)))
        as_.append(a)
        bs.append(b)
    trace = SquareTrace(tuple(grid), tuple(xs), tuple(ys), tuple(as_), tuple(bs))
    return trace, trace.curves()


def _vertex_residuals(f: PLFunction, g: PLFunction, q: SquareQuad):
    v1, v2, v3, v4 = q.vertices()
    return (abs(v1.y - float(f.at(v1.x))),
            abs(v2.y - float(f.at(v2.x))),
            abs(v3.y - float(g.at(v3.x))),
            abs(v4.y - float(g.at(v4.x))))


def _graph_offset(g: PLFunction, t: float, a: float, b: float, ft: float) -> float:
    x3 = t + a - b
    y3 = ft + a + b
    return y3 - float(g.at(x3))


def find_inscribed_square(f: PLFunction, g: PLFunction, n: int = 256,
                          tol: float = 1e-12, all_brackets: bool = False,
                          fp_tol: float = 1e-12, max_iter: int = 200):
    """Locate inscribed squares as zero crossings of the free vertex offset.

    Scans the n-interval grid for sign changes of h(t) = y3(t) - g(x3(t)),
    refines each bracket by bisection (re-solving the fixed point at every
    probe) until the bracket width drops below tol, and verifies the square.
    With all_brackets=True returns every refined bracket ordered by t;
    otherwise returns the one with the smallest |h| residual, ties broken by
    smaller t.
    """
    _validate_two_graph_input(f, g)
    t0, t1 = float(f.t0), float(f.t1)

    def solve(t):
        a, b = solve_vertex_fixed_point(f, g, t, fp_tol, max_iter)
        return a, b, _graph_offset(g, t, a, b, float(f.at(t)))

    ts = [t0 + (t1 - t0) * k / n for k in range(n + 1)]
    sols = [solve(t) for t in ts]
    brackets = []
    for k in range(n):
        h1, h2 = sols[k][2], sols[k + 1][2]
        if h1 == 0.0 and 0 < k:
            a, b = sols[k][0], sols[k][1]
            if abs(a) + abs(b) > 0:
                brackets.append((ts[k], ts[k]))
            continue
        if h1 * h2 < 0:
            brackets.append((ts[k], ts[k + 1]))
    if not brackets:
        raise NoCrossingError("no crossing found at this resolution; increase n")

    results = []
    for lo, hi in brackets:
        hlo = solve(lo)[2]
        while hi - lo > tol:
            mid = (lo + hi) / 2
            hm = solve(mid)[2]
            if hm == 0.0:
                lo = hi = mid
                break
            if (hlo < 0) != (hm < 0):
                hi = mid
            else:
                lo, hlo = mid, hm
        t = (lo + hi) / 2
        a, b, h = solve(t)
        q = SquareQuad(t, float(f.at(t)), a, b)
        results.append(InscriptionResult(q, _vertex_residuals(f, g, q), (lo, hi)))
    if all_brackets:
        return results
    return min(results, key=lambda r: (abs(_graph_offset(
        g, r.square.x, r.square.a, r.square.b, r.square.y)), r.square.x))


def find_inscribed_trapezoid(f: PLFunction, g: PLFunction, s: Scalar, r: Scalar,
                             n: int = 256, tol: float = 1e-12,
                             all_brackets: bool = False,
                             fp_tol: float = 1e-12, max_iter: int = 200):
    """Inscribed copy, up to similarity, of the trapezoid (0,0),(1,0),(s+1,r),(-s,r).

    Same bracketing strategy as find_inscribed_square with the displaced third
    and fourth vertices; s=0, r=1 reproduces the square search exactly.
    """
    if s < 0 or r <= 0:
        raise GeometryError("need s >= 0 and r > 0")
    alpha = math.atan2(float(r), float(s))
    _validate_two_graph_input(f, g, lip_bound=math.tan(alpha / 2))
    t0, t1 = float(f.t0), float(f.t1)
    sf, rf = float(s), float(r)

    def vertex3(t, a, b, ft):
        return t + (sf + 1) * a - rf * b, ft + (sf + 1) * b + rf * a

    def solve(t):
        a, b = solve_trapezoid_fixed_point(f, g, t, sf, rf, fp_tol, max_iter)
        x3, y3 = vertex3(t, a, b, float(f.at(t)))
        return a, b, y3 - float(g.at(x3))

    ts = [t0 + (t1 - t0) * k / n for k in range(n + 1)]
    sols = [solve(t) for t in ts]
    brackets = []
    for k in range(n):
        h1, h2 = sols[k][2], sols[k + 1][2]
        if h1 == 0.0 and 0 < k and abs(sols[k][0]) + abs(sols[k][1]) > 0:
            brackets.append((ts[k], ts[k]))
        elif h1 * h2 < 0:
            brackets.append((ts[k], ts[k + 1]))
    if not brackets:
        raise NoCrossingError("no crossing found at this resolution; increase n")

    results = []
    for lo, hi in brackets:
        hlo = solve(lo)[2]
        while hi - lo > tol:
            mid = (lo + hi) / 2
            hm = solve(mid)[2]
            if hm == 0.0:
                lo = hi = mid
                break
            if (hlo < 0) != (hm < 0):
                hi = mid
            else:
                lo, hlo = mid, hm
        t = (lo + hi) / 2
        a, b, h = solve(t)
        ft = float(f.at(t))
        x3, y3 = vertex3(t, a, b, ft)
        x4, y4 = t - sf * a - rf * b, ft - sf * b + rf * a
        residuals = (0.0,
                     abs(ft + b - float(f.at(t + a))),
                     abs(y3 - float(g.at(x3))),
                     abs(y4 - float(g.at(x4))))
        q = SquareQuad(t, ft, a, b)
        results.append(InscriptionResult(q, residuals, (lo, hi)))
    if all_brackets:
        return results
    return min(results, key=lambda res: (res.residuals[2], res.square.x))


# ---------------------------------------------------------------------------
# joint inscription cycles on the cylinder
# ---------------------------------------------------------------------------

# basis of the square slice {(x,y),(x+a,y+b),(x+a-b,y+a+b),(x-b,y+a)} inside
# (R^2)^4, in coordinates (x1,y1,...,x4,y4)
_SLICE_BASIS = (
    (1, 0, 1, 0, 1, 0, 1, 0),   # d/dx
    (0, 1, 0, 1, 0, 1, 0, 1),   # d/dy
    (0, 0, 1, 0, 1, 1, 0, 1),   # d/da
    (0, 0, 0, 1, -1, 1, -1, 0),  # d/db
)


def _det(mat):
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    m = [[Fraction(v) for v in row] for row in mat]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c] != 0:
                factor = m[r][c] * inv
                m[r] = [a - factor * b for a, b in zip(m[r], m[c])]
    return det


@dataclass(frozen=True)
class CycleState:
    """Point of a joint-inscription cycle: base vertex plus side vector."""

    x: Fraction
    y: Fraction
    a: Fraction
    b: Fraction

    def key(self, L: Fraction):
        return (self.x % L, self.y, self.a, self.b)

    def third_vertex(self) -> Pt:
        return Pt(self.x + self.a - self.b, self.y + self.a + self.b)


@dataclass(frozen=True)
class SquareCycle:
    """One stitched component of the joint-inscription 1-cycle."""

    L: Fraction
    states: tuple            # CycleState, closed: last == first + (degree*L,0,0,0)
    degree: int

    def gamma3(self) -> CylCurve:
        pts = [s.third_vertex() for s in self.states]
        cleaned = [pts[0]]
        for p in pts[1:]:
            if p != cleaned[-1]:
                cleaned.append(p)
        if len(cleaned) < 2:
            raise DegeneracyError("third-vertex trace is a single point")
        return CylCurve(self.L, Polyline(tuple(cleaned)))


@dataclass(frozen=True)
class _Segment:
    start: CycleState
    end: CycleState
    tangent: tuple           # direction in (x, y, a, b) slice coordinates
    dirs: tuple              # (d1, d2, d4) edge direction vectors


def _orientation_sign(seg: _Segment, forward: bool) -> int:
    """Sign of the intersection orientation for traversal along the segment.

    The tangent is completed inside the square slice by dropping its largest
    coordinate; the sign of det[W-basis | slice complement] in Cyl^4, fixed
    to +1 on the diagonal cycle over Graph_{0,L}, orients the cycle.
    """
    tau = seg.tangent if forward else tuple(-t for t in seg.tangent)
    i = max(range(4), key=lambda k: abs(tau[k]))
    if tau[i] == 0:
        raise DegeneracyError("zero tangent on a cycle segment")
    s4 = 1 if (tau[i] > 0) == (i % 2 == 0) else -1
    d1, d2, d4 = seg.dirs
    w_cols = [
        (d1.x, d1.y, 0, 0, 0, 0, 0, 0),
        (0, 0, d2.x, d2.y, 0, 0, 0, 0),
        (0, 0, 0, 0, 1, 0, 0, 0),
        (0, 0, 0, 0, 0, 1, 0, 0),
        (0, 0, 0, 0, 0, 0, d4.x, d4.y),
    ]
    v_cols = [_SLICE_BASIS[k] for k in range(4) if k != i]
    cols = w_cols + v_cols
    mat = [[cols[c][r] for c in range(8)] for r in range(8)]
    d = _det(mat)
    if d == 0:
        raise DegeneracyError("non-transverse edge triple")
    return s4 * (1 if d > 0 else -1)


def _edge_triple_segments(L, e1, e2, e4, shifts2, shifts4):
    """Solution segments of the square constraints over one edge triple.

    Unknowns are the edge parameters (u1, u2, u4) in [0,1]^3; p2 - p1 = (a,b)
    and p4 - p1 = (-b, a) give two affine equations; period shifts k2, k4
    enter only through the two x-coordinate equations.
    """
    (P1, Q1), (P2, Q2), (P4, Q4) = e1, e2, e4
    D1, D2, D4 = Q1 - P1, Q2 - P2, Q4 - P4
    segments = []
    for k2 in shifts2:
        for k4 in shifts4:
            # rows: coefficients of (u1, u2, u4); rhs constants
            r1 = (-D1.x + D1.y, D2.x, -D4.y)
            c1 = -(P2.x + k2 * L - P1.x - P4.y + P1.y)
            r2 = (-D1.x - D1.y, D2.y, D4.x)
            c2 = -(P4.x + k4 * L - P1.x + P2.y - P1.y)
            minors = [r1[1] * r2[2] - r1[2] * r2[1],
                      r1[2] * r2[0] - r1[0] * r2[2],
                      r1[0] * r2[1] - r1[1] * r2[0]]
            if all(m == 0 for m in minors):
                # rank <= 1: inconsistent triples just miss; consistent ones
                # carry a 2-parameter family, which general position forbids
                indep = _rank1_consistent(r1, c1, r2, c2)
                if indep:
                    raise DegeneracyError("degenerate edge triple")
                continue
            w = tuple(Fraction(m) for m in minors)   # kernel of the 2x3 system
            u0 = _particular_solution(r1, c1, r2, c2, minors)
            # clip the line u0 + t*w to the unit cube
            tmin, tmax = None, None
            ok = True
            for ui, wi in zip(u0, w):
                if wi == 0:
                    if not (0 <= ui <= 1):
                        ok = False
                        break
                    continue
                t1 = (0 - ui) / wi
                t2 = (1 - ui) / wi
                a, b = (t1, t2) if t1 <= t2 else (t2, t1)
                tmin = a if tmin is None else max(tmin, a)
                tmax = b if tmax is None else min(tmax, b)
            if not ok or tmin is None or tmax is None or tmin >= tmax:
                continue

            def state(t):
                u1 = u0[0] + t * w[0]
                u2 = u0[1] + t * w[1]
                u4 = u0[2] + t * w[2]
                p1 = P1 + D1.scale(u1)
                y2 = P2.y + D2.y * u2
                y4 = P4.y + D4.y * u4
                return CycleState(Fraction(p1.x), Fraction(p1.y),
                                  Fraction(y4 - p1.y), Fraction(y2 - p1.y))

            tangent = (w[0] * D1.x, w[0] * D1.y,
                       w[2] * D4.y - w[0] * D1.y,
                       w[1] * D2.y - w[0] * D1.y)
            if all(v == 0 for v in tangent):
                raise DegeneracyError("stationary solution segment")
            segments.append(_Segment(state(tmin), state(tmax),
                                     tangent, (D1, D2, D4)))
    return segments


def _rank1_consistent(r1, c1, r2, c2) -> bool:
    """Both rows proportional: do the constants match the proportion?"""
    nz = [(a, b) for a, b in zip(r1, r2) if a != 0 or b != 0]
    if not nz:
        return c1 == 0 and c2 == 0
    a, b = nz[0]
    if a != 0:
        return all(y * a == b * x for x, y in nz) and c2 * a == b * c1
    return all(x == 0 for x, _ in nz) and c1 == 0


def _particular_solution(r1, c1, r2, c2, minors):
    """One solution of the rank-2 system, zeroing the kernel's largest slot."""
    k = max(range(3), key=lambda i: abs(minors[i]))
    idx = [i for i in range(3) if i != k]
    a11, a12 = r1[idx[0]], r1[idx[1]]
    a21, a22 = r2[idx[0]], r2[idx[1]]
    det = a11 * a22 - a12 * a21
    ui = [Fraction(0)] * 3
    ui[idx[0]] = Fraction(c1 * a22 - c2 * a12, 1) / det
    ui[idx[1]] = Fraction(a11 * c2 - a21 * c1, 1) / det
    return tuple(ui)


def _shift_range(target_lo, target_hi, lo, hi, L):
    """Integers k with [lo + kL, hi + kL] meeting [target_lo, target_hi]."""
    kmin = math.ceil(Fraction(target_lo - hi) / Fraction(L))
    kmax = math.floor(Fraction(target_hi - lo) / Fraction(L))
    return range(kmin, kmax + 1)


def sigma124_cycle(s1: CylCurve, s2: CylCurve, s4: CylCurve,
                   perturb_on_degeneracy: bool = False, seed: int = 0):
    """Joint-inscription cycle over three of the four square vertices.

    Intersects s1 x s2 x Cyl x s4 with the square slice: for every edge
    triple the two linear vertex constraints cut a segment out of the
    3-parameter domain; segments are stitched into closed components by
    exact endpoint matching.  Returns a list of SquareCycle with orientation
    fixed so that the component degrees sum to the homology degree 1.
    """
    curves = [s1, s2, s4]
    L = Fraction(s1.L)
    for c in curves:
        if not all(is_exact(v) for p in c.lift.vertices for v in p) or not is_exact(c.L):
            raise GeometryError("sigma124_cycle requires exact rational curves")
        if Fraction(c.L) != L:
            raise GeometryError("curves must share the circumference")
        if c.degree != 1:
            raise GeometryError("curves must have degree 1")

    def lifted_edges(c):
        return [(Pt(Fraction(a.x), Fraction(a.y)), Pt(Fraction(b.x), Fraction(b.y)))
                for a, b in c.lift.edges()]

    E1, E2, E4 = (lifted_edges(c) for c in curves)
    try:
        segs = []
        for e1 in E1:
            x1lo, x1hi = min(e1[0].x, e1[1].x), max(e1[0].x, e1[1].x)
            y1lo, y1hi = min(e1[0].y, e1[1].y), max(e1[0].y, e1[1].y)
            for e2 in E2:
                for e4 in E4:
                    # x2 + k2 L = x1 + (y4 - y1)
                    tlo = x1lo + min(e4[0].y, e4[1].y) - y1hi
                    thi = x1hi + max(e4[0].y, e4[1].y) - y1lo
                    s2r = _shift_range(tlo, thi, min(e2[0].x, e2[1].x),
                                       max(e2[0].x, e2[1].x), L)
                    # x4 + k4 L = x1 - (y2 - y1)
                    tlo4 = x1lo - max(e2[0].y, e2[1].y) + y1lo
                    thi4 = x1hi - min(e2[0].y, e2[1].y) + y1hi
                    s4r = _shift_range(tlo4, thi4, min(e4[0].x, e4[1].x),
                                       max(e4[0].x, e4[1].x), L)
                    if s2r and s4r:
                        segs.extend(_edge_triple_segments(L, e1, e2, e4, s2r, s4r))
        return _stitch_cycles(L, segs)
    except DegeneracyError:
        if not perturb_on_degeneracy:
            raise
        from .geom import perturb_generic

        scale = max(abs(v) for c in curves for p in c.lift.vertices for v in p) or 1
        moved = perturb_generic(curves, seed * 1000003 + 1, Fraction(scale, 10**6))
        return sigma124_cycle(*moved, perturb_on_degeneracy=False)


def _stitch_cycles(L, segs: Sequence[_Segment]):
    segs = [s for s in segs if s.start != s.end]
    incidence = {}
    for idx, s in enumerate(segs):
        incidence.setdefault(s.start.key(L), []).append((idx, 0))
        incidence.setdefault(s.end.key(L), []).append((idx, 1))
    for key, ends in incidence.items():
        if len(ends) != 2:
            raise DegeneracyError(
                "segment endpoints meet %d-fold at %s" % (len(ends), (key,)))
    used = [False] * len(segs)
    cycles = []
    for start_idx in range(len(segs)):
        if used[start_idx]:
            continue
        idx, entry_end = start_idx, 0
        states = []
        shift = Fraction(0)       # running multiple of L aligning lift coords
        degree_x = Fraction(0)
        forward_first = None
        while True:
            used[idx] = True
            seg = segs[idx]
            forward = entry_end == 0
            if forward_first is None:
                forward_first = (idx, forward)
            a, b = (seg.start, seg.end) if forward else (seg.end, seg.start)
            if states:
                shift = states[-1].x - a.x
                if shift % L != 0:
                    raise DegeneracyError("stitch junction misaligned across periods")
            states.append(CycleState(a.x + shift, a.y, a.a, a.b))
            states.append(CycleState(b.x + shift, b.y, b.a, b.b))
            exit_state = b
            key = exit_state.key(L)
            nxt = [(i, e) for (i, e) in incidence[key] if i != idx]
            if not nxt:
                # the partner is this segment's own other end (1-segment loop)
                nxt = [(i, e) for (i, e) in incidence[key]
                       if (i, e) != (idx, 1 if forward else 0)]
            idx, entry_end = nxt[0]
            if used[idx]:
                if idx != start_idx:
                    raise DegeneracyError("cycle stitching re-entered mid-component")
                first = states[0]
                closing = states[-1]
                dx = closing.x - first.x
                m = Fraction(dx) / L
                if m.denominator != 1:
                    raise DegeneracyError("component does not close up over L")
                break
        m = int(m)
        # orientation: the det rule on the first traversed segment
        sidx, fwd = forward_first
        sign = _orientation_sign(segs[sidx], fwd)
        if sign < 0:
            states = list(reversed(states))
            m = -m
        dedup = [states[0]]
        for st in states[1:]:
            if st != dedup[-1]:
                dedup.append(st)
        cycles.append(SquareCycle(L, tuple(dedup), m))
    return cycles


def joint_inscribe(s1: CylCurve, s2: CylCurve, s3: CylCurve, s4: CylCurve):
    """Witness square with vertex i on curve i, or None.

    Degenerate squares (a = b = 0) count as witnesses.  The third-vertex
    traces of sigma124_cycle(s1, s2, s4) are intersected with s3 by exact
    segment intersection on the cylinder.
    """
    L = Fraction(s1.L)
    cycles = sigma124_cycle(s1, s2, s4)
    e3 = [(Pt(Fraction(a.x), Fraction(a.y)), Pt(Fraction(b.x), Fraction(b.y)))
          for a, b in s3.lift.edges()]
    for cyc in cycles:
        states = cyc.states
        for s_a, s_b in zip(states, states[1:]):
            p, q = s_a.third_vertex(), s_b.third_vertex()
            for (c, d) in e3:
                lo, hi = min(p.x, q.x), max(p.x, q.x)
                for k in _shift_range(lo, hi, min(c.x, d.x), max(c.x, d.x), L):
                    cs, ds = c + Pt(k * L, 0), d + Pt(k * L, 0)
                    if p == q:
                        if on_segment(p, cs, ds):
                            return SquareQuad(s_a.x % L, s_a.y, s_a.a, s_a.b)
                        continue
                    t = _common_point_parameter(p, q, cs, ds)
                    if t is None:
                        continue
                    st = CycleState(
                        s_a.x + (s_b.x - s_a.x) * t,
                        s_a.y + (s_b.y - s_a.y) * t,
                        s_a.a + (s_b.a - s_a.a) * t,
                        s_a.b + (s_b.b - s_a.b) * t)
                    return SquareQuad(st.x % L, st.y, st.a, st.b)
    return None


def _common_point_parameter(p: Pt, q: Pt, c: Pt, d: Pt):
    """Parameter t on [p,q] of some point shared with segment [c,d], or None."""
    hit = segment_intersection_point(p, q, c, d)
    if hit is not None:
        return hit[1]
    if not segments_intersect(p, q, c, d):
        return None
    # parallel or collinear contact
    if on_segment(p, c, d):
        return Fraction(0)
    if on_segment(q, c, d):
        return Fraction(1)
    for e in (c, d):
        if on_segment(e, p, q):
            den = (q.x - p.x) if q.x != p.x else (q.y - p.y)
            num = (e.x - p.x) if q.x != p.x else (e.y - p.y)
            return Fraction(num) / Fraction(den)
    return None


def area_ineq_value(s1: CylCurve, s2: CylCurve, s3: CylCurve, s4: CylCurve) -> Scalar:
    """Alternating sum of the areas under the four curves over one period."""
    for c in (s1, s2, s3, s4):
        if c.degree != 1:
            raise GeometryError("curves must have degree 1")
    return (cyl_area_under(s1) - cyl_area_under(s2)
            + cyl_area_under(s3) - cyl_area_under(s4))
