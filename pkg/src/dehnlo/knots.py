"""Knot expressions: constructors, declared attributes and derived invariants.

Knots are syntax.  Anything the engine cannot derive has to be declared on an
atom or a pattern; an undeclared attribute means "unknown", never a default.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from math import gcd
from typing import Optional, Union

from .slopes import Slope


class Tri(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, flag: Optional[bool]) -> "Tri":
        if flag is None:
            return cls.UNKNOWN
        return cls.YES if flag else cls.NO

    def __bool__(self):
        raise TypeError("use explicit comparison with Tri.YES / Tri.NO")


class KnotModelError(ValueError):
    pass


class InvalidTorusParams(KnotModelError):
    pass


class InvalidCableParams(KnotModelError):
    pass


class TrivialCompanion(KnotModelError):
    pass


class MalformedPattern(KnotModelError):
    pass


class InconsistentAttrs(KnotModelError):
    pass


class DepthExceeded(KnotModelError):
    pass


FDTC_SIGNS = ("positive", "negative", "zero", "unknown")


@dataclass(frozen=True)
class DegeneracyLocus:
    form: str  # "b_mu" or "b_mu_plus_lambda"
    b: int

    def __post_init__(self):
        if self.form not in ("b_mu", "b_mu_plus_lambda"):
            raise InconsistentAttrs(f"unknown degeneracy locus form {self.form!r}")
        if self.b == 0:
            raise InconsistentAttrs("degeneracy locus needs b != 0")

    def intersection(self, s: Slope) -> int:
        """Algebraic intersection of the locus with ``p*mu + q*lambda``."""
        if self.form == "b_mu":
            return self.b * s.q
        return self.b * s.q - s.p


@dataclass(frozen=True)
class HypAttrs:
    genus: Optional[int] = None
    fibred: Optional[bool] = None
    fdtc_sign: str = "unknown"
    positive_L_space_knot: Optional[bool] = None
    negative_L_space_knot: Optional[bool] = None
    alternating: Optional[bool] = None
    persistently_foliar: Optional[bool] = None
    non_lo_branched_cover: Optional[bool] = None
    degeneracy_locus: Optional[DegeneracyLocus] = None
    known_LO_surgery_slopes: frozenset = frozenset()
    known_not_LO_surgery_slopes: frozenset = frozenset()


@dataclass(frozen=True)
class PatternAttrs:
    winding_number: int
    is_braided: Optional[bool] = None
    # (w, b, t); a negative first entry marks the mirror image of the braid
    one_bridge_braid: Optional[tuple] = None
    solid_torus_surgery: Optional[bool] = None
    atoroidal: Optional[bool] = None
    pattern_closure: Optional["KnotExpr"] = None
    pattern_closure_genus: Optional[int] = None


@dataclass(frozen=True)
class Unknot:
    pass


@dataclass(frozen=True)
class TorusKnot:
    m: int
    n: int


@dataclass(frozen=True)
class HypAtom:
    attrs: HypAttrs = field(default_factory=HypAttrs)
    name: str = ""


@dataclass(frozen=True)
class Cable:
    m: int
    n: int
    companion: "KnotExpr"


@dataclass(frozen=True)
class Satellite:
    pattern: PatternAttrs
    companion: "KnotExpr"


@dataclass(frozen=True)
class ConnectedSum:
    summands: tuple


KnotExpr = Union[Unknot, TorusKnot, HypAtom, Cable, Satellite, ConnectedSum]


# -- validation ---------------------------------------------------------------

def _validate_hyp(a: HypAttrs) -> HypAttrs:
    if a.genus is not None and a.genus < 1:
        raise InconsistentAttrs("a hyperbolic knot has genus >= 1")
    if a.fdtc_sign not in FDTC_SIGNS:
        raise InconsistentAttrs(f"fdtc sign must be one of {FDTC_SIGNS}")
    if a.positive_L_space_knot and a.negative_L_space_knot:
        raise InconsistentAttrs("a hyperbolic knot cannot be both a positive and a negative L-space knot")
    lsk = a.positive_L_space_knot or a.negative_L_space_knot
    if lsk:
        want = "positive" if a.positive_L_space_knot else "negative"
        if a.fibred is False:
            raise InconsistentAttrs("L-space knots are fibred")
        if a.fdtc_sign not in ("unknown", want):
            raise InconsistentAttrs(f"{want} L-space knots have {want} fractional Dehn twist coefficient")
        if a.genus is not None and a.genus < 3:
            raise InconsistentAttrs("a hyperbolic L-space knot has genus >= 3")
        if a.alternating:
            raise InconsistentAttrs("alternating L-space knots are torus knots, not hyperbolic")
        if a.persistently_foliar:
            raise InconsistentAttrs("a persistently foliar knot has no L-space surgery")
        a = replace(a, fibred=True, fdtc_sign=want)
    if a.fdtc_sign != "unknown" and a.fibred is False:
        raise InconsistentAttrs("fdtc sign needs a fibred knot")
    if a.fdtc_sign != "unknown" and a.fibred is None:
        a = replace(a, fibred=True)
    if a.alternating and a.non_lo_branched_cover is False:
        raise InconsistentAttrs("the double branched cover of an alternating knot is not LO")
    if a.known_LO_surgery_slopes & a.known_not_LO_surgery_slopes:
        raise InconsistentAttrs("a slope is declared both LO and not LO")
    for s in a.known_LO_surgery_slopes | a.known_not_LO_surgery_slopes:
        if s.is_meridian:
            raise InconsistentAttrs("1/0 surgery is S^3; not a legal declared slope")
    return a


def _validate_pattern(pa: PatternAttrs) -> PatternAttrs:
    w = pa.winding_number
    if w < 0:
        raise MalformedPattern("winding number must be non-negative")
    if pa.is_braided and w < 1:
        raise MalformedPattern("a braided pattern has winding number >= 1")
    if pa.one_bridge_braid is not None:
        bw, b, t = pa.one_bridge_braid
        if abs(bw) != w:
            raise MalformedPattern("1-bridge braid strand count must equal the winding number")
        if w < 3 or not (1 <= b <= w - 2 and 1 <= t <= w - 2):
            raise MalformedPattern("1-bridge braid (w,b,t) needs w >= 3 and 1 <= b,t <= w-2")
        if pa.is_braided is False:
            raise InconsistentAttrs("a 1-bridge braid is braided")
        pa = replace(pa, is_braided=True)
    if pa.solid_torus_surgery:
        # non-cabled patterns only: a solid torus surgery forces a 1-bridge braid with w >= 5
        if pa.is_braided is False:
            raise InconsistentAttrs("only braided patterns admit solid torus surgeries")
        if w < 5:
            raise InconsistentAttrs(
                "a non-cabled pattern with a solid torus surgery is a 1-bridge braid with w >= 5")
    closure = pa.pattern_closure
    if closure is not None:
        closure = validate(closure, allow_unknot=True)
        g = genus(closure)
        if pa.pattern_closure_genus is not None and g is not None and g != pa.pattern_closure_genus:
            raise InconsistentAttrs(
                f"closure genus {pa.pattern_closure_genus} disagrees with the closure's genus {g}")
        pa = replace(pa, pattern_closure=closure,
                     pattern_closure_genus=g if g is not None else pa.pattern_closure_genus)
    if pa.pattern_closure_genus is not None and pa.pattern_closure_genus < 0:
        raise MalformedPattern("closure genus must be non-negative")
    return pa


def validate(expr: KnotExpr, allow_unknot: bool = True) -> KnotExpr:
    """Check structural invariants and return the normalized tree."""
    if isinstance(expr, Unknot):
        if not allow_unknot:
            raise TrivialCompanion("the unknot is not allowed here")
        return expr
    if isinstance(expr, TorusKnot):
        m, n = expr.m, expr.n
        if abs(m) < 2 or abs(n) < 2 or gcd(m, n) != 1:
            raise InvalidTorusParams(f"T({m},{n}) needs coprime |m|, |n| >= 2")
        sign = 1 if m * n > 0 else -1
        a, b = sorted((abs(m), abs(n)))
        return TorusKnot(a, sign * b)
    if isinstance(expr, HypAtom):
        return HypAtom(_validate_hyp(expr.attrs), expr.name)
    if isinstance(expr, Cable):
        m, n = expr.m, expr.n
        if m < 0:
            m, n = -m, -n
        if m < 2 or n == 0 or gcd(m, n) != 1:
            raise InvalidCableParams(f"C({expr.m},{expr.n}) needs m >= 2, n != 0, gcd(m, n) = 1")
        comp = validate(expr.companion, allow_unknot=False)
        return Cable(m, n, comp)
    if isinstance(expr, Satellite):
        if isinstance(expr.companion, Unknot):
            raise TrivialCompanion("a satellite needs a non-trivial companion")
        return Satellite(_validate_pattern(expr.pattern), validate(expr.companion, allow_unknot=False))
    if isinstance(expr, ConnectedSum):
        flat = []
        for s in expr.summands:
            s = validate(s, allow_unknot=False)
            if isinstance(s, ConnectedSum):
                flat.extend(s.summands)
            else:
                flat.append(s)
        if len(flat) < 2:
            raise InconsistentAttrs("a connected sum needs at least two non-trivial summands")
        from .dsl import format_expr
        return ConnectedSum(tuple(sorted(flat, key=format_expr)))
    raise TypeError(f"not a knot expression: {expr!r}")


# -- derived quantities -------------------------------------------------------

def is_trivial(expr: KnotExpr) -> bool:
    return isinstance(expr, Unknot)


def is_satellite(expr: KnotExpr) -> bool:
    return isinstance(expr, (Cable, Satellite, ConnectedSum))


def winding(expr: KnotExpr) -> Optional[int]:
    """Winding number of the root pattern, or None when the root is not a satellite."""
    if isinstance(expr, Cable):
        return expr.m
    if isinstance(expr, Satellite):
        return expr.pattern.winding_number
    return None


def genus(expr: KnotExpr) -> Optional[int]:
    if isinstance(expr, Unknot):
        return 0
    if isinstance(expr, TorusKnot):
        return (abs(expr.m) - 1) * (abs(expr.n) - 1) // 2
    if isinstance(expr, HypAtom):
        return expr.attrs.genus
    if isinstance(expr, Cable):
        g0 = genus(expr.companion)
        if g0 is None:
            return None
        return (expr.m - 1) * (abs(expr.n) - 1) // 2 + expr.m * g0
    if isinstance(expr, Satellite):
        cg = expr.pattern.pattern_closure_genus
        g0 = genus(expr.companion)
        if cg is None or g0 is None:
            return None
        return cg + expr.pattern.winding_number * g0
    if isinstance(expr, ConnectedSum):
        gs = [genus(s) for s in expr.summands]
        return None if None in gs else sum(gs)
    raise TypeError(expr)


def cabling_slope(expr: KnotExpr) -> Optional[Slope]:
    # Satellite nodes carry non-cabled patterns, so only Cable roots have one
    if isinstance(expr, Cable):
        return Slope(expr.m * expr.n, 1)
    return None


def jsj_is_rooted_interval(expr: KnotExpr) -> Tri:
    if _contains_sum(expr):
        return Tri.NO
    node, ok = expr, True
    while isinstance(node, (Cable, Satellite)):
        if isinstance(node, Satellite) and node.pattern.atoroidal is not True:
            ok = False
        node = node.companion
    if isinstance(node, (TorusKnot, HypAtom)) and ok:
        return Tri.YES
    return Tri.UNKNOWN


def _contains_sum(expr: KnotExpr) -> bool:
    if isinstance(expr, ConnectedSum):
        return True
    if isinstance(expr, (Cable, Satellite)):
        return _contains_sum(expr.companion)
    return False


def sum_nodes(expr: KnotExpr):
    """ConnectedSum nodes reachable through companions and summands."""
    if isinstance(expr, ConnectedSum):
        yield expr
        for s in expr.summands:
            yield from sum_nodes(s)
    elif isinstance(expr, (Cable, Satellite)):
        yield from sum_nodes(expr.companion)


def mirror(expr: KnotExpr) -> KnotExpr:
    if isinstance(expr, Unknot):
        return expr
    if isinstance(expr, TorusKnot):
        return TorusKnot(expr.m, -expr.n)
    if isinstance(expr, HypAtom):
        a = expr.attrs
        flip = {"positive": "negative", "negative": "positive"}
        dl = a.degeneracy_locus
        a = replace(
            a,
            fdtc_sign=flip.get(a.fdtc_sign, a.fdtc_sign),
            positive_L_space_knot=a.negative_L_space_knot,
            negative_L_space_knot=a.positive_L_space_knot,
            degeneracy_locus=None if dl is None else DegeneracyLocus(dl.form, -dl.b),
            known_LO_surgery_slopes=frozenset(-s for s in a.known_LO_surgery_slopes),
            known_not_LO_surgery_slopes=frozenset(-s for s in a.known_not_LO_surgery_slopes),
        )
        return HypAtom(a, expr.name)
    if isinstance(expr, Cable):
        return Cable(expr.m, -expr.n, mirror(expr.companion))
    if isinstance(expr, Satellite):
        pa = expr.pattern
        obb = pa.one_bridge_braid
        pa = replace(
            pa,
            one_bridge_braid=None if obb is None else (-obb[0], obb[1], obb[2]),
            pattern_closure=None if pa.pattern_closure is None else mirror(pa.pattern_closure),
        )
        return Satellite(pa, mirror(expr.companion))
    if isinstance(expr, ConnectedSum):
        from .dsl import format_expr
        return ConnectedSum(tuple(sorted((mirror(s) for s in expr.summands), key=format_expr)))
    raise TypeError(expr)


def chain_length(expr: KnotExpr) -> int:
    n = 0
    while isinstance(expr, (Cable, Satellite, ConnectedSum)):
        n += 1
        if isinstance(expr, ConnectedSum):
            break
        expr = expr.companion
    return n


def total_winding(expr: KnotExpr, depth: int) -> int:
    """Product of the winding numbers of the outermost ``depth`` constructors."""
    if depth < 0 or depth > chain_length(expr):
        raise DepthExceeded(f"depth {depth} exceeds chain length {chain_length(expr)}")
    out = 1
    for _ in range(depth):
        if isinstance(expr, ConnectedSum):
            break
        out *= winding(expr)
        expr = expr.companion
    return out


def height(expr: KnotExpr) -> int:
    if isinstance(expr, (Cable, Satellite)):
        h = 1 + height(expr.companion)
        if isinstance(expr, Satellite) and expr.pattern.pattern_closure is not None:
            h = max(h, 1 + height(expr.pattern.pattern_closure))
        return h
    if isinstance(expr, ConnectedSum):
        return 1 + max(height(s) for s in expr.summands)
    return 0


# -- derived properties used by the engine -------------------------------------

def is_fibred(expr: KnotExpr) -> Tri:
    if isinstance(expr, TorusKnot):
        return Tri.YES
    if isinstance(expr, HypAtom):
        return Tri.of(expr.attrs.fibred)
    if isinstance(expr, Cable):
        return is_fibred(expr.companion)
    if isinstance(expr, ConnectedSum):
        vals = [is_fibred(s) for s in expr.summands]
        if Tri.NO in vals:
            return Tri.NO
        return Tri.YES if all(v == Tri.YES for v in vals) else Tri.UNKNOWN
    if isinstance(expr, Unknot):
        return Tri.NO
    if lsk_sign(expr) is not None:
        return Tri.YES
    return Tri.UNKNOWN


def lsk_sign(expr: KnotExpr) -> Optional[int]:
    """+1 / -1 when the knot is known to be a positive / negative L-space knot."""
    if isinstance(expr, TorusKnot):
        return 1 if expr.n > 0 else -1
    if isinstance(expr, HypAtom):
        if expr.attrs.positive_L_space_knot:
            return 1
        if expr.attrs.negative_L_space_knot:
            return -1
        return None
    if isinstance(expr, Cable):
        # a cable of an L-space knot with n/m > 2g0 - 1 is again an L-space knot
        s = lsk_sign(expr.companion)
        g0 = genus(expr.companion)
        if s is None or g0 is None:
            return None
        if s * expr.n > (2 * g0 - 1) * expr.m:
            return s
        return None
    return None


def fdtc_sign(expr: KnotExpr) -> str:
    if isinstance(expr, TorusKnot):
        return "positive" if expr.n > 0 else "negative"
    if isinstance(expr, HypAtom):
        return expr.attrs.fdtc_sign
    s = lsk_sign(expr)
    if s is not None:
        return "positive" if s > 0 else "negative"
    return "unknown"


def is_persistently_foliar(expr: KnotExpr) -> Tri:
    if isinstance(expr, HypAtom):
        return Tri.of(expr.attrs.persistently_foliar)
    if lsk_sign(expr) is not None:
        return Tri.NO
    if isinstance(expr, ConnectedSum):
        if any(is_persistently_foliar(s) == Tri.YES for s in expr.summands):
            return Tri.YES
    return Tri.UNKNOWN


def is_lspace_knot(expr: KnotExpr) -> Tri:
    """Whether the knot has a non-trivial L-space surgery of either sign."""
    if isinstance(expr, (Unknot, TorusKnot)):
        return Tri.YES
    if isinstance(expr, HypAtom):
        a = expr.attrs
        if a.positive_L_space_knot or a.negative_L_space_knot:
            return Tri.YES
        if a.positive_L_space_knot is False and a.negative_L_space_knot is False:
            return Tri.NO
        if a.fibred is False or a.persistently_foliar or a.alternating:
            return Tri.NO
        return Tri.UNKNOWN
    if isinstance(expr, ConnectedSum):
        # L-space knots are prime
        return Tri.NO
    if isinstance(expr, Cable):
        c = is_lspace_knot(expr.companion)
        if c == Tri.NO:
            return Tri.NO
        s = lsk_sign(expr.companion)
        g0 = genus(expr.companion)
        if s is None or g0 is None:
            return Tri.UNKNOWN
        return Tri.YES if s * expr.n > (2 * g0 - 1) * expr.m else Tri.NO
    if isinstance(expr, Satellite):
        pa = expr.pattern
        # satellite L-space knots have braided patterns of winding number >= 2
        # and L-space knots as companion and pattern closure
        if pa.winding_number <= 1 or pa.is_braided is False:
            return Tri.NO
        if is_lspace_knot(expr.companion) == Tri.NO:
            return Tri.NO
        if pa.pattern_closure is not None and is_lspace_knot(pa.pattern_closure) == Tri.NO:
            return Tri.NO
        return Tri.UNKNOWN
    raise TypeError(expr)


def graph_chain(expr: KnotExpr) -> bool:
    """True for iterated cables of a torus knot, whose exteriors are graph manifolds."""
    while isinstance(expr, Cable):
        expr = expr.companion
    return isinstance(expr, TorusKnot)
