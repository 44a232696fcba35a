"""Exact slope arithmetic on a torus.

A slope is a reduced pair ``p/q`` identified with its negation.  Storage keeps
``q > 0``; the meridian is ``1/0`` and the longitude ``0/1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
import re


class SlopeError(ValueError):
    pass


class ZeroPair(SlopeError):
    pass


class MeridianInput(SlopeError):
    pass


@dataclass(frozen=True, order=False)
class Slope:
    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if p == 0 and q == 0:
            raise ZeroPair("(0, 0) is not a slope")
        g = gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def is_meridian(self) -> bool:
        return self.q == 0

    @property
    def is_integral(self) -> bool:
        return self.q == 1

    def value(self) -> Fraction:
        if self.q == 0:
            raise MeridianInput("1/0 has no rational value")
        return Fraction(self.p, self.q)

    def __neg__(self) -> "Slope":
        return Slope(-self.p, self.q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"

    def __repr__(self) -> str:
        return f"Slope({self.p}/{self.q})"

    def sort_key(self):
        """Order by rational value with the meridian last."""
        if self.q == 0:
            return (1, Fraction(0))
        return (0, Fraction(self.p, self.q))


MERIDIAN = Slope(1, 0)
LONGITUDE = Slope(0, 1)


def slope_new(p: int, q: int) -> Slope:
    return Slope(p, q)


def from_fraction(x) -> Slope:
    x = Fraction(x)
    return Slope(x.numerator, x.denominator)


_SLOPE_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_slope(text: str, allow_meridian: bool = True) -> Slope:
    """Parse ``"p/q"`` or ``"p"``; the sign may only sit on ``p``."""
    m = _SLOPE_RE.match(text)
    if not m:
        raise SlopeError(f"not a slope: {text!r}")
    p = int(m.group(1))
    q = int(m.group(2)) if m.group(2) is not None else 1
    s = Slope(p, q)
    if s.is_meridian and not allow_meridian:
        raise MeridianInput("1/0 is not allowed here")
    return s


def det2(a: int, b: int, c: int, d: int) -> int:
    return a * d - b * c


def distance(a: Slope, b: Slope) -> int:
    """Absolute algebraic intersection number of two slopes."""
    return abs(det2(a.p, b.p, a.q, b.q))


@dataclass(frozen=True)
class HomologyClass:
    """The class ``a*mu0 + b*lambda0`` on a companion boundary torus."""
    a: int
    b: int

    def divisor(self) -> int:
        return gcd(self.a, self.b)

    def primitive(self) -> "HomologyClass":
        g = self.divisor()
        if g == 0:
            raise ZeroPair("zero class")
        return HomologyClass(self.a // g, self.b // g)

    def slope(self) -> Slope:
        return Slope(self.a, self.b)

    def scale(self, k: int) -> "HomologyClass":
        return HomologyClass(k * self.a, k * self.b)

    def __str__(self) -> str:
        return f"{self.a}*mu0 + {self.b}*lambda0"


def satellite_image(r: Slope, w: int) -> Slope:
    """Slope on the companion boundary of the longitude of the filled pattern space.

    For surgery slope ``p/q`` on a satellite with winding number ``w`` this is
    ``1/0`` when ``w == 0`` and ``p/(q*w^2)`` otherwise.
    """
    if r.is_meridian:
        raise MeridianInput("satellite_image needs a rational slope")
    if w < 0:
        raise ValueError("winding number must be non-negative")
    if w == 0:
        return MERIDIAN
    return Slope(r.p, r.q * w * w)


def longitude_class(p: int, q: int, w: int) -> HomologyClass:
    """Primitive class ``(p*mu0 + q*w^2*lambda0) / gcd(p, w^2)``."""
    if p == 0 and q == 0:
        raise ZeroPair("(0, 0) is not a slope")
    if gcd(p, q) != 1:
        raise SlopeError(f"{p}/{q} is not reduced")
    if w == 0:
        return HomologyClass(1, 0)
    w2 = w * w
    g = gcd(p, w2)
    return HomologyClass(p // g, q * w2 // g)
