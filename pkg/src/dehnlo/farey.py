"""Farey graph distance and balls around the longitude ``0/1``.

Distances are computed by moving one endpoint to ``1/0`` with an element of
SL(2, Z) and walking the continued fraction ladder of the other endpoint.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import gcd

from .slopes import LONGITUDE, MERIDIAN, Slope, distance


@dataclass(frozen=True)
class FareyBallQuery:
    center: Slope
    radius: int
    denominator_bound: int


def adjacent(a: Slope, b: Slope) -> bool:
    return distance(a, b) == 1


def _ext_gcd(a: int, b: int):
    # returns (g, x, y) with a*x + b*y == g
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        k, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    return a, x0, y0


def _to_infinity(a: Slope, b: Slope) -> tuple[int, int]:
    """Image of ``b`` under a matrix in SL(2, Z) sending ``a`` to ``1/0``."""
    p, q = a.p, a.q
    # find x, y with p*y - q*x == 1
    g, s, t = _ext_gcd(p, -q)
    if g < 0:
        s, t = -s, -t
    y, x = s, t
    return y * b.p - x * b.q, -q * b.p + p * b.q


def _partial_quotients(num: int, den: int) -> list[int]:
    out = []
    while den:
        k, r = divmod(num, den)
        out.append(k)
        num, den = den, r
    return out


def _distance_from_infinity(num: int, den: int) -> int:
    if den < 0:
        num, den = -num, -den
    if den == 0:
        return 0
    if den == 1:
        return 1
    a = _partial_quotients(num, den)
    # d_prev2 is the distance to the convergent before d_prev
    d_prev2, d_prev = 0, 1
    for ak in a[1:]:
        d = d_prev + 1
        if ak == 1 and d_prev2 + 1 < d:
            d = d_prev2 + 1
        d_prev2, d_prev = d_prev, d
    return d_prev


def fg_distance(a: Slope, b: Slope) -> int:
    """Path distance in the Farey graph."""
    if a == b:
        return 0
    num, den = _to_infinity(a, b)
    return _distance_from_infinity(num, den)


def ball_membership(r: Slope, k: int) -> bool:
    return fg_distance(LONGITUDE, r) <= k


def farey_vertices(bound: int) -> list[Slope]:
    """Reduced slopes with ``|p| <= bound`` and ``1 <= q <= bound``, plus ``1/0``."""
    out = [Slope(p, q) for q in range(1, bound + 1)
           for p in range(-bound, bound + 1) if gcd(p, q) == 1]
    out.append(MERIDIAN)
    return out


def ball_enumerate(k: int, denominator_bound: int) -> list[Slope]:
    """Slopes within Farey distance ``k`` of ``0/1`` with entries bounded by the bound.

    Both ``|p|`` and ``q`` are bounded, since the balls of radius two and more
    contain every integer.  Sorted by value with ``1/0`` last.
    """
    if k < 0:
        raise ValueError("radius must be non-negative")
    if denominator_bound < 1:
        raise ValueError("bound must be positive")
    out = [s for s in farey_vertices(denominator_bound) if fg_distance(LONGITUDE, s) <= k]
    return sorted(out, key=Slope.sort_key)


# -- brute force referee -------------------------------------------------------

def bounded_neighbors(s: Slope, bound: int) -> list[Slope]:
    """All ``a/b`` with ``|a| <= bound``, ``0 <= b <= bound`` and ``|p*b - q*a| == 1``."""
    p, q = s.p, s.q
    out = []
    if q == 0:
        return [Slope(a, 1) for a in range(-bound, bound + 1)]
    if q == 1:
        out.append(MERIDIAN)
    for b in range(1, bound + 1):
        # solve p*b - q*a = e for a, e in {1, -1}
        for e in (1, -1):
            t = p * b - e
            if t % q == 0:
                a = t // q
                if abs(a) <= bound:
                    out.append(Slope(a, b))
    return out


def farey_bfs_all(source: Slope, bound: int) -> dict[Slope, int]:
    """BFS distances from ``source`` inside the bounded vertex set."""
    dist = {source: 0}
    todo = deque([source])
    while todo:
        v = todo.popleft()
        for u in bounded_neighbors(v, bound):
            if u not in dist:
                dist[u] = dist[v] + 1
                todo.append(u)
    return dist


def farey_bfs_distance(a: Slope, b: Slope, bound: int | None = None) -> int:
    if bound is None:
        bound = max(abs(a.p), a.q, abs(b.p), b.q, 1)
    d = farey_bfs_all(a, bound).get(b)
    if d is None:
        raise ValueError(f"{b} unreachable from {a} within bound {bound}")
    return d
