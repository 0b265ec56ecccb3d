"""Gentle-pinch map between periodic and bounded planar sets.

phi_n(x, y) = (n*tanh(x/n), y*sech^2(x/n)) squeezes the plane into the strip
|x| < n, almost preserving squares on bounded-height sets for large n.
Float arithmetic throughout (the map is transcendental); downstream square
searches on compressed curves are diagnostic, not exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geom import CylCurve, GeometryError, Polyline, Pt


@dataclass(frozen=True)
class PinchParams:
    n: int
    periods: int = 3

    def __post_init__(self):
        if self.n < 1 or self.periods < 1:
            raise GeometryError("need n >= 1 and periods >= 1")


def _sech2(t: float) -> float:
    c = math.cosh(t)
    return 1.0 / (c * c)


def phi_n(p: Pt, n: int) -> Pt:
    """The pinch map; output x lies in (-n, n)."""
    x, y = float(p.x), float(p.y)
    return Pt(n * math.tanh(x / n), y * _sech2(x / n))


def phi_n_inv(p: Pt, n: int) -> Pt:
    """Inverse of phi_n on the strip |x| < n."""
    x, y = float(p.x), float(p.y)
    if abs(x) >= n:
        raise GeometryError("inverse pinch needs |x| < n")
    return Pt(n / 2 * math.log((n + x) / (n - x)), y / (1 - x * x / (n * n)))


_MAX_SUBDIV = 2 ** 14


def _densify_edge(a: Pt, b: Pt, n: int, chord_tol: float):
    """Subdivision count making the mapped edge deviate < chord_tol from its chords."""
    k = 1
    while k < _MAX_SUBDIV:
        worst = 0.0
        for i in range(k):
            p = Pt(a.x + (b.x - a.x) * (i + 0.5) / k, a.y + (b.y - a.y) * (i + 0.5) / k)
            q0 = phi_n(Pt(a.x + (b.x - a.x) * i / k, a.y + (b.y - a.y) * i / k), n)
            q1 = phi_n(Pt(a.x + (b.x - a.x) * (i + 1) / k, a.y + (b.y - a.y) * (i + 1) / k), n)
            mid = phi_n(p, n)
            chord = Pt((q0.x + q1.x) / 2, (q0.y + q1.y) / 2)
            worst = max(worst, math.hypot(mid.x - chord.x, mid.y - chord.y))
        if worst < chord_tol:
            return k
        k *= 2
    return _MAX_SUBDIV


def compress_curve(curve: CylCurve, params: PinchParams) -> Polyline:
    """Pinch `periods` periods of the lift into the strip, plus the two limit points.

    Periods are taken centered around the stored lift; each input edge is
    subdivided until its image's chord deviation is below 1e-6 * n.  The
    output runs from (-n, 0) through the mapped vertices to (n, 0).
    """
    n = params.n
    chord_tol = 1e-6 * n
    L = float(curve.L)
    base = [Pt(float(p.x), float(p.y)) for p in curve.lift.vertices]
    lo = -(params.periods // 2)
    offsets = range(lo, lo + params.periods)
    chain = []
    for j in offsets:
        seg = [Pt(p.x + j * L * curve.degree, p.y) for p in base]
        chain.extend(seg if not chain else seg[1:])
    out = [Pt(float(-n), 0.0)]
    for a, b in zip(chain, chain[1:]):
        k = _densify_edge(a, b, n, chord_tol)
        for i in range(k):
            q = phi_n(Pt(a.x + (b.x - a.x) * i / k, a.y + (b.y - a.y) * i / k), n)
            if q != out[-1]:
                out.append(q)
    last = phi_n(chain[-1], n)
    if last != out[-1]:
        out.append(last)
    out.append(Pt(float(n), 0.0))
    return Polyline(tuple(out))
