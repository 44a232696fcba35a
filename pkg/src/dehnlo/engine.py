"""Forward-chaining surgery rules with tri-valued verdicts and derivation traces.

Every rule is applied to both ``K(r)`` and the orientation-reversed view
``mirror(K)(-r)``; the six properties are insensitive to orientation, so both
views write into one verdict and a disagreement between them is a hard error.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from . import knots as km
from .detection import detected, strongly_ctf_detected
from .farey import fg_distance
from .knots import Cable, ConnectedSum, HypAtom, KnotExpr, Satellite, TorusKnot, Tri, Unknot
from .slopes import LONGITUDE, MeridianInput, Slope, distance, satellite_image

PROPS = ("reducible", "toroidal", "lo", "nls", "ctf", "l_space")
_NEG = {Tri.YES: Tri.NO, Tri.NO: Tri.YES}
YES, NO = Tri.YES, Tri.NO


class InconsistencyError(RuntimeError):
    """Two rules derived opposite values; a modeling bug, never swallowed."""


class QueryError(ValueError):
    pass


# rule id -> (citation key, one-line statement)
RULES = {
    "R-zero": ("Thm:zero-surgery", "0-surgery on a non-trivial knot is irreducible, LO, NLS and CTF"),
    "R-red": ("Cor:reducible-satellite-surgery",
              "a satellite surgery is reducible only for a cable at its cabling slope; "
              "torus knots only at mn; hyperbolic knots only at integers"),
    "R-red-lens": ("Thm:cabling-slope-decomposition",
                   "K(mn) = K0(n/m) # L(m,n): not LO, not CTF, an L-space iff K0(n/m) is"),
    "R-compress": ("Thm:compressing-slopes-cable",
                   "cable: the companion torus compresses exactly at distance <= 1 from mn, "
                   "and K(p/q) = K0(p/(m^2 q)) at distance 1"),
    "R-compress-1bb": ("Thm:compressing-slopes-braid",
                       "non-cable satellite: the companion torus can compress only at two consecutive "
                       "integers a, a+1 of a 1-bridge braid pattern with w >= 5"),
    "R-w0": ("Thm:winding-number-zero", "a winding number zero torus makes every non-cabling surgery LO and NLS"),
    "R-w1": ("Thm:winding-number-one", "a winding number one torus makes K(p/(np+-1)) LO and NLS"),
    "R-farey": ("Thm:farey-ball", "j stacked winding number one patterns make K(r) LO and NLS for d(0,r) <= j+1"),
    "R-split": ("Thm:split-tori", "a non-interval JSJ graph makes every non-cabling surgery LO and NLS"),
    "R-composite": ("Cor:composite-lo-nls", "every rational surgery on a composite knot is LO and NLS"),
    "R-split-ctf": ("Thm:split-tori-ctf",
                    "two splitting tori bounding fibred knot exteriors make non-cabling surgeries CTF"),
    "R-composite-ctf": ("Cor:composite-persistently-foliar",
                        "a composite knot with a persistently foliar summand has only CTF surgeries"),
    "R-pattern": ("Prop:pattern-lo", "K(r) is LO if P(U)(r) is"),
    "R-companion-lo": ("Prop:companion-lo-nls", "K(r) is LO if K0(r/w^2) is, w >= 1, r not the cabling slope"),
    "R-companion-nls": ("Prop:companion-lo-nls", "K(r) is NLS if K0(r/w^2) is, w >= 1, r not the cabling slope"),
    "R-detect-gluing": ("Lem:longitude-detected-gluing",
                        "companion torus incompressible and r/w^2 detected in the companion exterior"),
    "R-companion-ctf": ("Prop:companion-ctf", "K(r) is CTF if r/w^2 is strongly CTF-detected in the companion"),
    "R-w0-ctf": ("Thm:winding-number-zero-ctf",
                 "a winding number zero torus bounding a fibred knot exterior makes non-cabling surgeries CTF"),
    "R-fdtc": ("Prop:fdtc-satellite-ctf",
               "fibred companion with FDTC c: CTF on (-inf, w^2] for c > 0, [-w^2, inf) for c < 0, all r for c = 0"),
    "R-strong-self": ("Fact:strongly-detected-filling", "a strongly CTF-detected slope has a CTF filling"),
    "R-psL": ("Cor:lspace-satellite-ctf", "positive satellite L-space knot: CTF on (-inf, w^2]"),
    "R-psL9": ("Thm:lspace-satellite-ctf-nine",
               "positive satellite L-space knot: CTF on (-inf, 9] except C(2,n;T(2,3)), n = 3,5,7, r in [n+2, 9]"),
    "R-lspace-range": ("Thm:lspace-surgery-range",
                       "a positive L-space knot of genus g has L-space surgeries exactly for r >= 2g-1"),
    "R-not-lsk": ("Thm:lspace-knot-obstructions", "a knot that is not an L-space knot has no L-space surgery"),
    "R-nls-small": ("Rem:small-slope-nls", "|r| < 1 surgery on a non-trivial knot is never an L-space"),
    "R-hyp-nls": ("Rem:hyperbolic-lspace-genus", "hyperbolic L-space knots have genus >= 3, so |r| < 5 is NLS"),
    "R-torus": ("Thm:torus-knot-surgery", "T(m,n)(r), m,n >= 2: LO, NLS and CTF iff r < mn - m - n; atoroidal"),
    "R-graph": ("Thm:graph-manifold-equivalence",
                "irreducible surgery on an iterated torus knot cable: LO, NLS and CTF agree"),
    "R-smallH": ("Thm:small-homology-toroidal-lo", "irreducible toroidal with |H_1| <= 4 is LO"),
    "R-sat-smallp": ("Prop:satellite-small-p",
                     "satellite, 1 <= |p| <= 4, q >= 2: LO except possibly C(2,e) at 3e/2"),
    "R-smallp-sat": ("Thm:small-p-exceptional-set", "satellite, |p| <= 2: LO except C(2,e) at 2e"),
    "R-smallp-any": ("Thm:small-p-exceptional-set",
                     "non-trivial knot, |p| <= 2: LO outside {+-1/2, +-2/3, +-1, +-2}"),
    "R-psa": ("Thm:degeneracy-locus-lo", "|p| <= 2 and |delta . r| >= 2 gives a pseudo-Anosov flow, so LO"),
    "R-fibred-smallp": ("Cor:fibred-small-p",
                        "fibred, alternating, or non-LO branched cover: K(1/q), K(2/q) LO for |q| >= 2"),
    "R-declared": ("Decl:user-attribute", "declared LO / not LO surgery slope of an atom"),
    "R-ctf-nls": ("Fact:ctf-implies-nls", "CTF manifolds are not L-spaces"),
    "R-lspace-ctf": ("Fact:ctf-implies-nls", "L-spaces are not CTF"),
    "R-red-ctf": ("Fact:reducible-not-ctf", "reducible manifolds other than S^2 x S^1 are not CTF"),
    "R-duality": ("Def:lspace-duality", "NLS means not an L-space"),
}

CITATIONS = {
    "Prop:longitude-detected": "the longitude of a knot manifold is LO-, NLS- and CTF-detected",
    "Thm:meridional-detection": "slopes at distance 1 from the longitude of a Z-homology solid torus "
                                "are LO- and NLS-detected",
    "Thm:meridional-detection-fibred": "for fibred exteriors those slopes are also CTF-detected",
    "Prop:fdtc-interval": "FDTC > 0: (-inf,1) strongly CTF-detected; < 0: (-1,inf); = 0: all rational slopes",
    "Def:persistently-foliar": "every rational slope is strongly CTF-detected",
    "Conj:ctf-meridional-detection": "CONJECTURAL: the meridian of every non-trivial knot is CTF-detected",
    "Thm:zero-surgery": "Gabai: K(0) is irreducible with a taut foliation",
    "Cor:reducible-satellite-surgery": "Scharlemann; Moser; Gordon-Luecke",
    "Thm:cabling-slope-decomposition": "Gordon: K(mn) = K0(n/m) # L(m,n)",
    "Thm:compressing-slopes-cable": "Gordon: compressing slopes of a cable torus",
    "Thm:compressing-slopes-braid": "Berge, Gabai, Scharlemann: compressing slopes of a non-cable satellite torus",
    "Thm:winding-number-zero": "winding number zero satellites",
    "Thm:winding-number-one": "winding number one satellites",
    "Thm:farey-ball": "iterated winding number one satellites and Farey balls",
    "Thm:split-tori": "two essential tori cobounding a submanifold with the boundary",
    "Cor:composite-lo-nls": "composite knots",
    "Thm:split-tori-ctf": "split tori bounding fibred knot exteriors",
    "Cor:composite-persistently-foliar": "Delman-Roberts: persistently foliar summands",
    "Prop:pattern-lo": "degree one map K(r) -> P(U)(r)",
    "Prop:companion-lo-nls": "gluing along r/w^2",
    "Lem:longitude-detected-gluing": "gluing along the longitude of P(r)",
    "Prop:companion-ctf": "strongly CTF-detected r/w^2",
    "Thm:winding-number-zero-ctf": "fibred winding number zero torus",
    "Prop:fdtc-satellite-ctf": "Roberts' intervals transported to the satellite, closed at w^2",
    "Fact:strongly-detected-filling": "the filling along a strongly CTF-detected slope is CTF",
    "Cor:lspace-satellite-ctf": "positive satellite L-space knots up to w^2",
    "Thm:lspace-satellite-ctf-nine": "positive satellite L-space knots up to 9",
    "Thm:lspace-surgery-range": "Ozsvath-Szabo: L-space surgery slopes of an L-space knot",
    "Thm:lspace-knot-obstructions": "Hom (cables), Hanselman-Rasmussen-Watson (companions), "
                                    "Baker-Motegi (braided patterns), Krcatovich (primality), Ni (fibred)",
    "Rem:small-slope-nls": "L-space surgeries satisfy |r| >= 2g-1 >= 1",
    "Rem:hyperbolic-lspace-genus": "hyperbolic L-space knots have genus at least 3",
    "Thm:torus-knot-surgery": "Moser; the L-space conjecture for Seifert manifolds",
    "Thm:graph-manifold-equivalence": "the L-space conjecture for graph manifolds",
    "Thm:small-homology-toroidal-lo": "irreducible toroidal W with |H_1(W)| <= 4 is LO",
    "Prop:satellite-small-p": "satellite knots with 1 <= p <= 4",
    "Thm:small-p-exceptional-set": "the exceptional set E for p in {1,2}",
    "Thm:degeneracy-locus-lo": "Goodman-Fried extension and Z/2 homology",
    "Cor:fibred-small-p": "fibred, alternating and branched-cover corollaries",
    "Decl:user-attribute": "user declaration",
    "Fact:ctf-implies-nls": "Ozsvath-Szabo, Bowden, Kazez-Roberts",
    "Fact:reducible-not-ctf": "Novikov",
    "Def:lspace-duality": "definition",
}

CONJECTURE_FLAG = "assume-conjecture-1.6"


@dataclass(frozen=True)
class Query:
    knot: KnotExpr
    slope: Slope
    depth_budget: Optional[int] = None
    assume_conjecture: bool = False


@dataclass(frozen=True)
class Trace:
    rule_id: str
    citation: str
    prop: str
    value: Tri
    premises: tuple = ()
    mirrored: bool = False
    conjectural: bool = False

    def to_dict(self) -> dict:
        return {
            "rule": self.rule_id,
            "citation": self.citation,
            "property": self.prop,
            "value": self.value.value,
            "premises": list(self.premises),
            "mirrored": self.mirrored,
            "conjectural": self.conjectural,
        }


@dataclass(frozen=True)
class Verdict:
    reducible: Tri
    toroidal: Tri
    lo: Tri
    nls: Tri
    ctf: Tri
    l_space: Tri
    traces: tuple = ()
    reductions: tuple = ()  # (description, reduced query)
    notes: tuple = ()

    def get(self, prop: str) -> Tri:
        return getattr(self, prop)

    def values(self) -> dict:
        return {p: getattr(self, p) for p in PROPS}


def _fmt(expr) -> str:
    from .dsl import format_expr
    return format_expr(expr)


class _Run:
    """Mutable state of one classification."""

    def __init__(self, depth: int, conj: bool):
        self.vals = dict.fromkeys(PROPS, Tri.UNKNOWN)
        self.traces: list[Trace] = []
        self._seen = set()
        self.reductions: list = []
        self.notes: list = []
        self.depth = depth
        self.conj = conj
        self.mirrored = False
        self.changed = False

    def get(self, prop: str) -> Tri:
        return self.vals[prop]

    def conclude(self, prop: str, value: Tri, rule_id: str, *premises, conjectural: bool = False):
        cur = self.vals[prop]
        if cur != Tri.UNKNOWN and cur != value:
            raise InconsistencyError(
                f"{rule_id} derives {prop}={value.value} but an earlier rule derived {cur.value}; "
                f"traces: {[t.to_dict() for t in self.traces if t.prop == prop]}")
        key = (rule_id, prop, self.mirrored)
        if key not in self._seen:
            self._seen.add(key)
            self.traces.append(Trace(rule_id, RULES[rule_id][0], prop, value, tuple(premises),
                                     self.mirrored, conjectural))
        if cur == Tri.UNKNOWN:
            self.vals[prop] = value
            self.changed = True
            dual = {"nls": "l_space", "l_space": "nls"}.get(prop)
            if dual is not None and self.vals[dual] != _NEG[value]:
                self.conclude(dual, _NEG[value], "R-duality", f"{prop}={value.value}")

    def sub(self, knot: KnotExpr, slope: Slope) -> Optional[Verdict]:
        if self.depth <= 0:
            note = f"depth budget exhausted before {_fmt(knot)} at {slope}"
            if note not in self.notes:
                self.notes.append(note)
            return None
        v = _classify(knot, slope, self.depth - 1, self.conj)
        for n in v.notes:
            if n not in self.notes:
                self.notes.append(n)
        return v

    def reduce(self, desc: str, knot: KnotExpr, slope: Slope):
        item = (desc, f"{_fmt(knot)} at {slope}")
        if item not in self.reductions:
            self.reductions.append(item)


# -- helpers ------------------------------------------------------------------

def _is_cabling(K: KnotExpr, r: Slope) -> bool:
    c = km.cabling_slope(K)
    return c is not None and c == r


def _chain(K: KnotExpr):
    """Cable and Satellite nodes from the root inward."""
    while isinstance(K, (Cable, Satellite)):
        yield K
        K = K.companion


def may_compress(K: KnotExpr, r: Slope) -> bool:
    """Whether the root companion torus could compress in K(r)."""
    if isinstance(K, Cable):
        return distance(r, Slope(K.m * K.n, 1)) <= 1
    if isinstance(K, Satellite):
        pa = K.pattern
        w = pa.winding_number
        if r.q != 1 or w < 5 or pa.is_braided is False or pa.solid_torus_surgery is False:
            return False
        if pa.one_bridge_braid is not None:
            bw, b, t = pa.one_bridge_braid
            a = t * w + b
            window = {a, a + 1} if bw > 0 else {-a, -a - 1}
            return r.p in window
        # a = t*w + b with 1 <= b, t <= w-2, so w+1 <= |a| and |a+1| <= w^2 - w - 1
        return w + 1 <= abs(r.p) <= w * w - w - 1
    return False


def _leading_w1(K: KnotExpr) -> int:
    j = 0
    while isinstance(K, Satellite) and K.pattern.winding_number == 1:
        j += 1
        K = K.companion
    return j


def _val(v: Optional[Verdict], prop: str) -> Tri:
    return Tri.UNKNOWN if v is None else v.get(prop)


def _sub_premise(knot, s, v, prop) -> str:
    return f"{_fmt(knot)} at {s}: {prop}={v.get(prop).value}"


_SMALL_E = frozenset(Slope(p, q) for p, q in [(1, 2), (-1, 2), (2, 3), (-2, 3), (1, 1), (-1, 1), (2, 1), (-2, 1)])


# -- rules ----------------------------------------------------------------------
# each takes (run, K, r) for one orientation

def r_zero(run, K, r):
    if r == LONGITUDE:
        for prop in ("lo", "nls", "ctf"):
            run.conclude(prop, YES, "R-zero", "slope 0/1")
        run.conclude("reducible", NO, "R-zero", "slope 0/1")


def r_red(run, K, r):
    if isinstance(K, (Cable, TorusKnot)):
        c = Slope(K.m * K.n, 1)
        run.conclude("reducible", YES if r == c else NO, "R-red", f"cabling slope {c}")
    elif isinstance(K, (Satellite, ConnectedSum)):
        run.conclude("reducible", NO, "R-red", "satellite that is not a cable")
    elif isinstance(K, HypAtom) and r.q >= 2:
        run.conclude("reducible", NO, "R-red", "hyperbolic knot, non-integral slope")


def r_red_lens(run, K, r):
    if isinstance(K, TorusKnot) and r == Slope(K.m * K.n, 1):
        # L(m,n) # L(n,m)
        run.conclude("lo", NO, "R-red-lens", "lens space summands")
        run.conclude("ctf", NO, "R-red-lens", "reducible")
        run.conclude("l_space", YES, "R-red-lens", "connected sum of lens spaces")
        return
    if not (isinstance(K, Cable) and _is_cabling(K, r)):
        return
    run.conclude("lo", NO, "R-red-lens", f"lens space summand L({K.m},{K.n})")
    run.conclude("ctf", NO, "R-red-lens", "reducible")
    s = Slope(K.n, K.m)
    run.reduce(f"K({r}) = K0({s}) # L({K.m},{K.n})", K.companion, s)
    v = run.sub(K.companion, s)
    for prop in ("l_space", "toroidal"):
        if _val(v, prop) != Tri.UNKNOWN:
            run.conclude(prop, v.get(prop), "R-red-lens", _sub_premise(K.companion, s, v, prop))


def r_compress(run, K, r):
    if not isinstance(K, Cable):
        return
    c = Slope(K.m * K.n, 1)
    d = distance(r, c)
    if d >= 2:
        run.conclude("toroidal", YES, "R-compress", f"distance {d} from cabling slope {c}")
    elif d == 1:
        s = satellite_image(r, K.m)
        run.reduce(f"K({r}) = K0({s})", K.companion, s)
        v = run.sub(K.companion, s)
        if v is None:
            return
        for prop in PROPS:
            if v.get(prop) != Tri.UNKNOWN:
                run.conclude(prop, v.get(prop), "R-compress", f"distance 1 from cabling slope {c}",
                             _sub_premise(K.companion, s, v, prop))


def r_compress_1bb(run, K, r):
    if isinstance(K, ConnectedSum):
        run.conclude("toroidal", YES, "R-compress-1bb", "swallow-follow torus stays incompressible")
        return
    if not isinstance(K, Satellite):
        return
    if not may_compress(K, r):
        run.conclude("toroidal", YES, "R-compress-1bb", "slope outside the compressing window")
        return
    w = K.pattern.winding_number
    s = satellite_image(r, w)
    v = run.sub(K.companion, s)
    if _val(v, "toroidal") == YES:
        # toroidal whether or not the companion torus compresses
        run.conclude("toroidal", YES, "R-compress-1bb", _sub_premise(K.companion, s, v, "toroidal"))


def r_w0(run, K, r):
    if _is_cabling(K, r):
        return
    for node in _chain(K):
        if isinstance(node, Satellite) and node.pattern.winding_number == 0:
            run.conclude("lo", YES, "R-w0", "winding number zero pattern")
            run.conclude("nls", YES, "R-w0", "winding number zero pattern")
            return


def r_w1(run, K, r):
    if _leading_w1(K) < 1:
        return
    p, q = abs(r.p), r.q
    if p <= 1 or q % p in (1, p - 1):
        run.conclude("lo", YES, "R-w1", "winding number one pattern", f"q = {q} = +-1 mod {p}")
        run.conclude("nls", YES, "R-w1", "winding number one pattern", f"q = {q} = +-1 mod {p}")


def r_farey(run, K, r):
    j = _leading_w1(K)
    if j < 2:
        return
    d = fg_distance(LONGITUDE, r)
    if d <= j + 1:
        run.conclude("lo", YES, "R-farey", f"{j} winding number one layers", f"d_FG(0,{r}) = {d}")
        run.conclude("nls", YES, "R-farey", f"{j} winding number one layers", f"d_FG(0,{r}) = {d}")


def r_split(run, K, r):
    if isinstance(K, ConnectedSum):
        run.conclude("lo", YES, "R-composite", "composite knot")
        run.conclude("nls", YES, "R-composite", "composite knot")
        return
    if _is_cabling(K, r):
        return
    if km.jsj_is_rooted_interval(K) == NO:
        run.conclude("lo", YES, "R-split", "connected sum inside the companion chain")
        run.conclude("nls", YES, "R-split", "connected sum inside the companion chain")


def r_split_ctf(run, K, r):
    if isinstance(K, ConnectedSum):
        pf = [s for s in K.summands if km.is_persistently_foliar(s) == YES]
        if pf:
            run.conclude("ctf", YES, "R-composite-ctf", f"persistently foliar summand {_fmt(pf[0])}")
    if _is_cabling(K, r):
        return
    for node in km.sum_nodes(K):
        fib = [s for s in node.summands if km.is_fibred(s) == YES]
        if len(fib) >= 2:
            run.conclude("ctf", YES, "R-split-ctf", f"fibred summands {_fmt(fib[0])}, {_fmt(fib[1])}")
            return
    if run.conj and any(True for _ in km.sum_nodes(K)):
        run.conclude("ctf", YES, "R-split-ctf", "swallow-follow tori", CONJECTURE_FLAG, conjectural=True)


def r_pattern(run, K, r):
    if not isinstance(K, Satellite):
        return
    cl = K.pattern.pattern_closure
    if cl is None or isinstance(cl, Unknot):
        return
    v = run.sub(cl, r)
    if _val(v, "lo") == YES:
        run.conclude("lo", YES, "R-pattern", _sub_premise(cl, r, v, "lo"))


def r_companion(run, K, r):
    w = km.winding(K)
    if w is None or w < 1 or _is_cabling(K, r):
        return
    s = satellite_image(r, w)
    v = run.sub(K.companion, s)
    for prop, rule in (("lo", "R-companion-lo"), ("nls", "R-companion-nls")):
        if _val(v, prop) == YES:
            run.conclude(prop, YES, rule, _sub_premise(K.companion, s, v, prop))


def r_detect_gluing(run, K, r):
    w = km.winding(K)
    if w is None or w < 1 or may_compress(K, r) or _is_cabling(K, r):
        return
    s = satellite_image(r, w)
    for prop, key in (("lo", "LO"), ("nls", "NLS"), ("ctf", "CTF")):
        t, fact = detected(K.companion, s, key)
        if t == YES:
            run.conclude(prop, YES, "R-detect-gluing", "companion torus incompressible",
                         f"{s} {key}-detected in the companion exterior ({fact.provenance})")


def r_companion_ctf(run, K, r):
    w = km.winding(K)
    if w is None or w < 1 or _is_cabling(K, r):
        return
    s = satellite_image(r, w)
    t, fact = strongly_ctf_detected(K.companion, s)
    if t == YES:
        run.conclude("ctf", YES, "R-companion-ctf", f"{s} strongly CTF-detected ({fact.provenance})")


def r_w0_ctf(run, K, r):
    if _is_cabling(K, r):
        return
    for node in _chain(K):
        if isinstance(node, Satellite) and node.pattern.winding_number == 0:
            if km.is_fibred(node.companion) == YES:
                run.conclude("ctf", YES, "R-w0-ctf", "winding number zero torus, fibred inside")
            elif run.conj:
                run.conclude("ctf", YES, "R-w0-ctf", "winding number zero torus", CONJECTURE_FLAG,
                             conjectural=True)
            return


def r_fdtc(run, K, r):
    w = km.winding(K)
    if w is None or w < 1 or _is_cabling(K, r):
        return
    comp = K.companion
    if km.is_fibred(comp) != YES:
        return
    sign = km.fdtc_sign(comp)
    x, w2 = r.value(), w * w
    if (sign == "positive" and x <= w2) or (sign == "negative" and x >= -w2) or sign == "zero":
        run.conclude("ctf", YES, "R-fdtc", f"companion FDTC {sign}", f"w^2 = {w2}")


def r_strong_self(run, K, r):
    t, fact = strongly_ctf_detected(K, r)
    if t == YES:
        run.conclude("ctf", YES, "R-strong-self", f"{r} strongly CTF-detected ({fact.provenance})")


def _positive_satellite_lsk(K) -> bool:
    return isinstance(K, (Cable, Satellite)) and km.lsk_sign(K) == 1 and km.is_lspace_knot(K) == YES


def r_psl(run, K, r):
    if not _positive_satellite_lsk(K):
        return
    w = km.winding(K)
    if r.value() <= w * w:
        run.conclude("ctf", YES, "R-psL", "positive satellite L-space knot", f"r <= w^2 = {w * w}")


def r_psl9(run, K, r):
    if not _positive_satellite_lsk(K) or r.value() > 9:
        return
    special = (isinstance(K, Cable) and K.m == 2 and K.n in (3, 5, 7)
               and K.companion == TorusKnot(2, 3))
    if special and r.value() >= K.n + 2:
        run.conclude("l_space", YES, "R-psL9", f"C(2,{K.n}; T(2,3)) with r in [{K.n + 2}, 9]")
        run.conclude("ctf", NO, "R-psL9", f"C(2,{K.n}; T(2,3)) with r in [{K.n + 2}, 9]")
    else:
        run.conclude("ctf", YES, "R-psL9", "positive satellite L-space knot", "r <= 9")


def r_lspace_range(run, K, r):
    if km.is_lspace_knot(K) != YES or km.lsk_sign(K) != 1:
        return
    g = km.genus(K)
    x = r.value()
    if g is not None:
        bound = 2 * g - 1
        if x >= bound:
            run.conclude("l_space", YES, "R-lspace-range", f"positive L-space knot of genus {g}")
        else:
            run.conclude("nls", YES, "R-lspace-range", f"positive L-space knot of genus {g}")
        return
    low = 3 if isinstance(K, HypAtom) else 1
    if x < 2 * low - 1:
        run.conclude("nls", YES, "R-lspace-range", f"positive L-space knot of genus >= {low}")


def r_not_lsk(run, K, r):
    if km.is_lspace_knot(K) == NO:
        run.conclude("nls", YES, "R-not-lsk", "not an L-space knot")


def r_nls_small(run, K, r):
    if abs(r.p) < r.q:
        run.conclude("nls", YES, "R-nls-small", f"|{r}| < 1")


def r_hyp_nls(run, K, r):
    if isinstance(K, HypAtom) and abs(r.p) < 5 * r.q:
        run.conclude("nls", YES, "R-hyp-nls", f"|{r}| < 5")


def r_torus(run, K, r):
    if not isinstance(K, TorusKnot):
        return
    run.conclude("toroidal", NO, "R-torus", "Seifert fibred or a sum of lens spaces")
    if K.n < 0:
        return
    m, n = K.m, K.n
    bound = m * n - m - n
    if r.value() < bound:
        for prop in ("lo", "nls", "ctf"):
            run.conclude(prop, YES, "R-torus", f"r < {bound}")
    else:
        run.conclude("lo", NO, "R-torus", f"r >= {bound}")
        run.conclude("ctf", NO, "R-torus", f"r >= {bound}")
        run.conclude("l_space", YES, "R-torus", f"r >= {bound}")


def r_smallp_sat(run, K, r):
    if not isinstance(K, (Cable, Satellite, ConnectedSum)):
        return
    p, q = abs(r.p), r.q
    two_cable = isinstance(K, Cable) and K.m == 2 and abs(K.n) == 1
    if 1 <= p <= 4 and q >= 2:
        if not (two_cable and r == Slope(3 * K.n, 2)):
            run.conclude("lo", YES, "R-sat-smallp", f"p = {r.p}, q = {q}")
    if p in (1, 2):
        if not (two_cable and r == Slope(2 * K.n, 1)):
            run.conclude("lo", YES, "R-smallp-sat", f"p = {r.p}")


def r_smallp_any(run, K, r):
    if abs(r.p) in (1, 2) and r not in _SMALL_E:
        run.conclude("lo", YES, "R-smallp-any", f"p = {r.p}, {r} outside the exceptional shape")


def r_psa(run, K, r):
    if not isinstance(K, HypAtom) or abs(r.p) not in (1, 2):
        return
    dl = K.attrs.degeneracy_locus
    if dl is None:
        return
    i = dl.intersection(r)
    if abs(i) >= 2:
        run.conclude("lo", YES, "R-psa", f"degeneracy locus {dl.form} b={dl.b}", f"|intersection| = {abs(i)}")


def r_fibred_smallp(run, K, r):
    if abs(r.p) not in (1, 2) or r.q < 2:
        return
    if km.is_fibred(K) == YES:
        run.conclude("lo", YES, "R-fibred-smallp", "fibred knot")
    if isinstance(K, HypAtom):
        if K.attrs.alternating:
            run.conclude("lo", YES, "R-fibred-smallp", "alternating knot")
        if K.attrs.non_lo_branched_cover:
            run.conclude("lo", YES, "R-fibred-smallp", "cyclic branched cover not LO")


def r_declared(run, K, r):
    if not isinstance(K, HypAtom):
        return
    if r in K.attrs.known_LO_surgery_slopes:
        run.conclude("lo", YES, "R-declared", f"{r} declared LO")
    if r in K.attrs.known_not_LO_surgery_slopes:
        run.conclude("lo", NO, "R-declared", f"{r} declared not LO")


# state-dependent rules, iterated to a fixed point

def r_smallh(run, K, r):
    if (run.get("toroidal") == YES and run.get("reducible") == NO and 1 <= abs(r.p) <= 4):
        run.conclude("lo", YES, "R-smallH", "irreducible and toroidal", f"|H_1| = {abs(r.p)}")


def r_graph(run, K, r):
    if not km.graph_chain(K) or isinstance(K, TorusKnot) or run.get("reducible") != NO:
        return
    known = {run.get(p) for p in ("lo", "nls", "ctf")} - {Tri.UNKNOWN}
    for val in sorted(known, key=lambda t: t.value):
        for prop in ("lo", "nls", "ctf"):
            src = next(p for p in ("lo", "nls", "ctf") if run.get(p) == val)
            if prop != src:
                run.conclude(prop, val, "R-graph", f"graph manifold, {src}={val.value}")


def r_implications(run, K, r):
    if run.get("ctf") == YES:
        run.conclude("nls", YES, "R-ctf-nls", "ctf=yes")
    if run.get("l_space") == YES:
        run.conclude("ctf", NO, "R-lspace-ctf", "l_space=yes")
    if run.get("reducible") == YES:
        run.conclude("ctf", NO, "R-red-ctf", "reducible=yes")


FACT_RULES = (
    r_zero, r_red, r_red_lens, r_compress, r_compress_1bb, r_w0, r_w1, r_farey, r_split,
    r_split_ctf, r_pattern, r_companion, r_detect_gluing, r_companion_ctf, r_w0_ctf, r_fdtc,
    r_strong_self, r_psl, r_psl9, r_lspace_range, r_not_lsk, r_nls_small, r_hyp_nls, r_torus,
    r_smallp_sat, r_smallp_any, r_psa, r_fibred_smallp, r_declared,
)
STATE_RULES = (r_smallh, r_graph, r_implications)


# -- entry points -------------------------------------------------------------

def default_depth(knot: KnotExpr) -> int:
    return km.height(knot) + 2


@lru_cache(maxsize=200_000)
def _classify(knot: KnotExpr, slope: Slope, depth: int, conj: bool) -> Verdict:
    run = _Run(depth, conj)
    views = ((knot, slope, False), (km.mirror(knot), -slope, True))
    for K, r, mirrored in views:
        run.mirrored = mirrored
        for rule in FACT_RULES:
            rule(run, K, r)
    run.changed = True
    while run.changed:
        run.changed = False
        for K, r, mirrored in views:
            run.mirrored = mirrored
            for rule in STATE_RULES:
                if mirrored and rule is r_implications:
                    continue
                rule(run, K, r)
    v = run.vals
    return Verdict(v["reducible"], v["toroidal"], v["lo"], v["nls"], v["ctf"], v["l_space"],
                   tuple(run.traces), tuple(run.reductions), tuple(run.notes))


def classify(q: Query) -> Verdict:
    if q.slope.is_meridian:
        raise MeridianInput("1/0 surgery is S^3; give a rational slope")
    knot = km.validate(q.knot)
    if isinstance(knot, Unknot):
        raise QueryError("surgery verdicts need a non-trivial knot")
    depth = default_depth(knot) if q.depth_budget is None else q.depth_budget
    if depth < 0:
        raise QueryError("depth budget must be non-negative")
    return _classify(knot, q.slope, depth, bool(q.assume_conjecture))


def e_shape_ok(not_lo: set) -> bool:
    """Whether a set of not-LO slopes with |p| <= 2 fits the small-p exceptional shape."""
    for e in (1, -1):
        shape = {Slope(e, 2), Slope(2 * e, 3), Slope(e, 1), Slope(2 * e, 1)}
        if not_lo <= shape:
            return True
    return False


def scan(knot: KnotExpr, slopes, depth: Optional[int] = None,
         assume_conjecture: bool = False) -> list[tuple[Slope, Verdict]]:
    out = [(s, classify(Query(knot, s, depth, assume_conjecture))) for s in slopes]
    not_lo = {s for s, v in out if abs(s.p) in (1, 2) and v.lo == NO}
    if not e_shape_ok(not_lo):
        raise InconsistencyError(
            f"not-LO slopes {sorted(map(str, not_lo))} with p in {{1,2}} break the exceptional-set shape")
    return out


def verdict_to_dict(q: Query, v: Verdict) -> dict:
    from .dsl import format_expr
    knot = km.validate(q.knot)
    return {
        "knot": format_expr(knot),
        "slope": str(q.slope),
        "depth": default_depth(knot) if q.depth_budget is None else q.depth_budget,
        "flags": [CONJECTURE_FLAG] if q.assume_conjecture else [],
        "verdict": {p: v.get(p).value for p in PROPS},
        "traces": [t.to_dict() for t in v.traces],
        "reductions": [{"description": d, "query": s} for d, s in v.reductions],
        "notes": list(v.notes),
    }
