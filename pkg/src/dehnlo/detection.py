"""Slope detection facts on a knot exterior.

Facts are symbolic slope sets evaluated lazily; nothing infinite is ever
materialized.  Filling-based detection (a slope whose filling is already known
to be LO or NLS) lives in the engine, which owns the sub-queries.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .knots import KnotExpr, Tri, Unknot, fdtc_sign, is_fibred, is_persistently_foliar
from .slopes import LONGITUDE, MERIDIAN, Slope, distance

PROPERTIES = ("LO", "NLS", "CTF")


@dataclass(frozen=True)
class DetectionFact:
    property: str
    kind: str  # "finite", "distance-one" or "interval"
    provenance: str
    slopes: frozenset = frozenset()
    lo: Optional[Fraction] = None  # None is -infinity
    hi: Optional[Fraction] = None  # None is +infinity
    lo_open: bool = True
    hi_open: bool = True
    conjectural: bool = False

    def contains(self, s: Slope) -> bool:
        if self.kind == "finite":
            return s in self.slopes
        if self.kind == "distance-one":
            return distance(s, LONGITUDE) == 1
        if s.is_meridian:
            return False
        x = s.value()
        if self.lo is not None and (x < self.lo or (self.lo_open and x == self.lo)):
            return False
        if self.hi is not None and (x > self.hi or (self.hi_open and x == self.hi)):
            return False
        return True


def _strong_facts(expr: KnotExpr) -> list[DetectionFact]:
    out = []
    if is_persistently_foliar(expr) == Tri.YES:
        out.append(DetectionFact("CTF", "interval", "Def:persistently-foliar"))
    if is_fibred(expr) == Tri.YES:
        sign = fdtc_sign(expr)
        if sign == "positive":
            out.append(DetectionFact("CTF", "interval", "Prop:fdtc-interval", hi=Fraction(1)))
        elif sign == "negative":
            out.append(DetectionFact("CTF", "interval", "Prop:fdtc-interval", lo=Fraction(-1)))
        elif sign == "zero":
            out.append(DetectionFact("CTF", "interval", "Prop:fdtc-interval"))
    return out


def facts(expr: KnotExpr, assume_conjecture: bool = False) -> list[DetectionFact]:
    """Every detection fact known for the exterior of a non-trivial knot."""
    if isinstance(expr, Unknot):
        return []
    out = [DetectionFact(p, "finite", "Prop:longitude-detected", slopes=frozenset({LONGITUDE}))
           for p in PROPERTIES]
    out.append(DetectionFact("LO", "distance-one", "Thm:meridional-detection"))
    out.append(DetectionFact("NLS", "distance-one", "Thm:meridional-detection"))
    if is_fibred(expr) == Tri.YES:
        out.append(DetectionFact("CTF", "distance-one", "Thm:meridional-detection-fibred"))
    elif assume_conjecture:
        out.append(DetectionFact("CTF", "finite", "Conj:ctf-meridional-detection",
                                 slopes=frozenset({MERIDIAN}), conjectural=True))
    out.extend(_strong_facts(expr))
    return out


def detected(expr: KnotExpr, s: Slope, prop: str,
             assume_conjecture: bool = False) -> tuple[Tri, Optional[DetectionFact]]:
    """Whether ``s`` is known to be ``prop``-detected, with the fact used."""
    if prop not in PROPERTIES:
        raise ValueError(f"property must be one of {PROPERTIES}")
    for f in facts(expr, assume_conjecture):
        if f.property == prop and f.contains(s):
            return Tri.YES, f
    return Tri.UNKNOWN, None


def strongly_ctf_detected(expr: KnotExpr, s: Slope) -> tuple[Tri, Optional[DetectionFact]]:
    if isinstance(expr, Unknot):
        return Tri.UNKNOWN, None
    if s.is_meridian:
        # the filling is S^3, which carries no taut foliation
        return Tri.NO, None
    for f in _strong_facts(expr):
        if f.contains(s):
            return Tri.YES, f
    return Tri.UNKNOWN, None
