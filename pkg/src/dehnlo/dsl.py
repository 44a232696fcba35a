"""Text syntax for knot expressions, slopes and batch documents.

Grammar::

    expr   := "U" | "T(" int "," int ")" | "C(" int "," int ";" expr ")"
            | "Sat(" attrs ";" expr ")" | "Sum(" expr {"," expr} ")" | "Hyp(" [attrs] ")"
    attrs  := key "=" value {"," key "=" value}
    slope  := int ["/" int]

    document := {line}
    line     := NAME "=" expr | "query" NAME slopes {flag} | "#" comment
    slopes   := slope {"," slope} | "grid" "p=" ints "q=" ints
    ints     := int ".." int | int {"," int}

Whitespace between tokens is ignored.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .knots import (
    Cable,
    ConnectedSum,
    DegeneracyLocus,
    HypAtom,
    HypAttrs,
    KnotExpr,
    KnotModelError,
    PatternAttrs,
    Satellite,
    TorusKnot,
    Unknot,
    validate,
)
from .slopes import Slope, SlopeError


class DslError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        super().__init__(f"{line}:{col}: {msg}" if line else msg)


class DslSyntaxError(DslError):
    pass


class UnknownAttribute(DslError):
    pass


class ValidationError(DslError):
    pass


SAT_KEYS = ("w", "braided", "obb", "sts", "atoroidal", "closure", "cgenus")
HYP_KEYS = ("name", "genus", "fibred", "fdtc", "plsk", "nlsk", "alt", "pf", "bcnlo", "delta", "lo", "nlo")
FLAGS = ("assume-conjecture-1.6",)


class _Reader:
    def __init__(self, text: str, line: int = 1, col0: int = 1):
        self.s = text
        self.i = 0
        self.line = line
        self.col0 = col0

    def col(self) -> int:
        return self.col0 + self.i

    def fail(self, msg, cls=DslSyntaxError):
        raise cls(msg, self.line, self.col())

    def ws(self):
        while self.i < len(self.s) and self.s[self.i] in " \t\r\n":
            self.i += 1

    def peek(self, tok: str) -> bool:
        self.ws()
        return self.s.startswith(tok, self.i)

    def eat(self, tok: str, production: str):
        self.ws()
        if not self.s.startswith(tok, self.i):
            got = self.s[self.i:self.i + 8] or "end of input"
            self.fail(f"expected {tok!r} in {production}, got {got!r}")
        self.i += len(tok)

    def at_end(self) -> bool:
        self.ws()
        return self.i >= len(self.s)

    def integer(self, production: str) -> int:
        self.ws()
        j = self.i
        if j < len(self.s) and self.s[j] in "+-":
            j += 1
        k = j
        while k < len(self.s) and self.s[k].isdigit():
            k += 1
        if k == j:
            self.fail(f"expected integer in {production}")
        v = int(self.s[self.i:k])
        self.i = k
        return v

    def word(self) -> str:
        self.ws()
        j = self.i
        while j < len(self.s) and (self.s[j].isalnum() or self.s[j] in "_.-+"):
            j += 1
        w = self.s[self.i:j]
        self.i = j
        return w

    def ident(self, production: str) -> str:
        self.ws()
        j = self.i
        if j < len(self.s) and (self.s[j].isalpha() or self.s[j] == "_"):
            j += 1
            while j < len(self.s) and (self.s[j].isalnum() or self.s[j] == "_"):
                j += 1
        if j == self.i:
            self.fail(f"expected name in {production}")
        w = self.s[self.i:j]
        self.i = j
        return w

    # -- grammar --

    def slope(self) -> Slope:
        p = self.integer("slope")
        q = 1
        if self.peek("/"):
            self.eat("/", "slope")
            self.ws()
            if self.i < len(self.s) and self.s[self.i] in "+-":
                self.fail("slope sign goes on the numerator only")
            q = self.integer("slope")
        if p == 0 and q == 0:
            self.fail("0/0 is not a slope")
        return Slope(p, q)

    def expr(self):
        self.ws()
        start = self.col()
        for head in ("Sat(", "Sum(", "Hyp(", "T(", "C("):
            if self.s.startswith(head, self.i):
                self.i += len(head)
                return getattr(self, "_" + head[:-1].lower())()
        if self.s.startswith("U", self.i):
            self.i += 1
            return Unknot()
        self.fail("expected one of U, T(, C(, Sat(, Sum(, Hyp( in expr")
        return start  # unreachable

    def _t(self):
        m = self.integer("T(int,int)")
        self.eat(",", "T(int,int)")
        n = self.integer("T(int,int)")
        self.eat(")", "T(int,int)")
        return TorusKnot(m, n)

    def _c(self):
        m = self.integer("C(int,int;expr)")
        self.eat(",", "C(int,int;expr)")
        n = self.integer("C(int,int;expr)")
        self.eat(";", "C(int,int;expr)")
        e = self.expr()
        self.eat(")", "C(int,int;expr)")
        return Cable(m, n, e)

    def _sum(self):
        parts = [self.expr()]
        while self.peek(","):
            self.eat(",", "Sum(expr,...)")
            parts.append(self.expr())
        self.eat(")", "Sum(expr,...)")
        if len(parts) < 2:
            self.fail("Sum needs at least two summands", ValidationError)
        return ConnectedSum(tuple(parts))

    def _sat(self):
        vals = self.attrs(SAT_KEYS, "Sat")
        self.eat(";", "Sat(attrs;expr)")
        e = self.expr()
        self.eat(")", "Sat(attrs;expr)")
        if "w" not in vals:
            self.fail("Sat needs a winding number w=...", MalformedAttr)
        pa = PatternAttrs(
            winding_number=vals["w"],
            is_braided=vals.get("braided"),
            one_bridge_braid=vals.get("obb"),
            solid_torus_surgery=vals.get("sts"),
            atoroidal=vals.get("atoroidal"),
            pattern_closure=vals.get("closure"),
            pattern_closure_genus=vals.get("cgenus"),
        )
        return Satellite(pa, e)

    def _hyp(self):
        vals = {} if self.peek(")") else self.attrs(HYP_KEYS, "Hyp")
        self.eat(")", "Hyp(attrs)")
        a = HypAttrs(
            genus=vals.get("genus"),
            fibred=vals.get("fibred"),
            fdtc_sign=vals.get("fdtc", "unknown"),
            positive_L_space_knot=vals.get("plsk"),
            negative_L_space_knot=vals.get("nlsk"),
            alternating=vals.get("alt"),
            persistently_foliar=vals.get("pf"),
            non_lo_branched_cover=vals.get("bcnlo"),
            degeneracy_locus=vals.get("delta"),
            known_LO_surgery_slopes=vals.get("lo", frozenset()),
            known_not_LO_surgery_slopes=vals.get("nlo", frozenset()),
        )
        return HypAtom(a, vals.get("name", ""))

    def attrs(self, keys, where: str) -> dict:
        vals = {}
        while True:
            col = (self.ws(), self.col())[1]
            key = self.ident(f"{where} attrs")
            if key not in keys:
                raise UnknownAttribute(f"unknown attribute {key!r} for {where}; allowed: {', '.join(keys)}",
                                       self.line, col)
            if key in vals:
                self.fail(f"duplicate attribute {key!r}")
            self.eat("=", f"{where} attrs")
            vals[key] = self.value(key)
            if not self.peek(","):
                return vals
            self.eat(",", f"{where} attrs")

    def value(self, key: str):
        if key in ("w", "genus", "cgenus"):
            return self.integer(key)
        if key in ("braided", "sts", "atoroidal", "fibred", "plsk", "nlsk", "alt", "pf", "bcnlo"):
            w = self.word()
            if w not in ("true", "false"):
                self.fail(f"{key} expects true or false")
            return w == "true"
        if key == "fdtc":
            self.ws()
            c = self.s[self.i:self.i + 1]
            if c not in ("+", "-", "0"):
                self.fail("fdtc expects +, - or 0")
            self.i += 1
            return {"+": "positive", "-": "negative", "0": "zero"}[c]
        if key == "name":
            return self.ident("name")
        if key == "closure":
            return self.expr()
        if key == "obb":
            self.eat("(", "obb=(w,b,t)")
            w = self.integer("obb")
            self.eat(",", "obb=(w,b,t)")
            b = self.integer("obb")
            self.eat(",", "obb=(w,b,t)")
            t = self.integer("obb")
            self.eat(")", "obb=(w,b,t)")
            return (w, b, t)
        if key == "delta":
            b = self.integer("delta")
            self.eat("mu", "delta")
            form = "b_mu"
            if self.peek("+"):
                self.eat("+", "delta")
                self.eat("lambda", "delta")
                form = "b_mu_plus_lambda"
            try:
                return DegeneracyLocus(form, b)
            except KnotModelError as e:
                self.fail(str(e), ValidationError)
        if key in ("lo", "nlo"):
            self.eat("[", f"{key}=[slopes]")
            out = []
            while not self.peek("]"):
                out.append(self.slope())
            self.eat("]", f"{key}=[slopes]")
            return frozenset(out)
        self.fail(f"no value rule for {key}")


class MalformedAttr(DslSyntaxError):
    pass


def parse_expr(text: str, line: int = 1, col0: int = 1, check: bool = True) -> KnotExpr:
    r = _Reader(text, line, col0)
    e = r.expr()
    if not r.at_end():
        r.fail("trailing input after expression")
    if check:
        try:
            e = validate(e)
        except KnotModelError as exc:
            raise ValidationError(f"{type(exc).__name__}: {exc}", line, col0) from exc
    return e


def parse_slope_text(text: str) -> Slope:
    r = _Reader(text)
    try:
        s = r.slope()
    except SlopeError as exc:
        raise DslSyntaxError(str(exc)) from exc
    if not r.at_end():
        r.fail("trailing input after slope")
    return s


# -- printing ------------------------------------------------------------------

def _b(v: bool) -> str:
    return "true" if v else "false"


def _slopes(ss) -> str:
    return "[" + " ".join(str(s) for s in sorted(ss, key=Slope.sort_key)) + "]"


def format_slope(s: Slope) -> str:
    return f"{s.p}/{s.q}"


def format_expr(e: KnotExpr) -> str:
    if isinstance(e, Unknot):
        return "U"
    if isinstance(e, TorusKnot):
        return f"T({e.m},{e.n})"
    if isinstance(e, Cable):
        return f"C({e.m},{e.n}; {format_expr(e.companion)})"
    if isinstance(e, ConnectedSum):
        return "Sum(" + ", ".join(format_expr(s) for s in e.summands) + ")"
    if isinstance(e, Satellite):
        pa = e.pattern
        items = [f"w={pa.winding_number}"]
        if pa.is_braided is not None:
            items.append(f"braided={_b(pa.is_braided)}")
        if pa.one_bridge_braid is not None:
            items.append("obb=({},{},{})".format(*pa.one_bridge_braid))
        if pa.solid_torus_surgery is not None:
            items.append(f"sts={_b(pa.solid_torus_surgery)}")
        if pa.atoroidal is not None:
            items.append(f"atoroidal={_b(pa.atoroidal)}")
        if pa.pattern_closure is not None:
            items.append(f"closure={format_expr(pa.pattern_closure)}")
        if pa.pattern_closure_genus is not None:
            items.append(f"cgenus={pa.pattern_closure_genus}")
        return f"Sat({', '.join(items)}; {format_expr(e.companion)})"
    if isinstance(e, HypAtom):
        a = e.attrs
        items = []
        if e.name:
            items.append(f"name={e.name}")
        if a.genus is not None:
            items.append(f"genus={a.genus}")
        for key, v in (("fibred", a.fibred),):
            if v is not None:
                items.append(f"{key}={_b(v)}")
        if a.fdtc_sign != "unknown":
            items.append("fdtc=" + {"positive": "+", "negative": "-", "zero": "0"}[a.fdtc_sign])
        for key, v in (("plsk", a.positive_L_space_knot), ("nlsk", a.negative_L_space_knot),
                       ("alt", a.alternating), ("pf", a.persistently_foliar),
                       ("bcnlo", a.non_lo_branched_cover)):
            if v is not None:
                items.append(f"{key}={_b(v)}")
        dl = a.degeneracy_locus
        if dl is not None:
            items.append(f"delta={dl.b}mu" + ("+lambda" if dl.form == "b_mu_plus_lambda" else ""))
        if a.known_LO_surgery_slopes:
            items.append("lo=" + _slopes(a.known_LO_surgery_slopes))
        if a.known_not_LO_surgery_slopes:
            items.append("nlo=" + _slopes(a.known_not_LO_surgery_slopes))
        return f"Hyp({', '.join(items)})"
    raise TypeError(e)


# -- documents -----------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    ps: tuple
    qs: tuple

    def slopes(self) -> list[Slope]:
        out, seen = [], set()
        for p in self.ps:
            for q in self.qs:
                if q == 0 or gcd(p, q) != 1:
                    continue
                s = Slope(p, q)
                if s not in seen:
                    seen.add(s)
                    out.append(s)
        return sorted(out, key=Slope.sort_key)


@dataclass(frozen=True)
class DslQuery:
    name: str
    slopes: object  # tuple of Slope or Grid
    flags: tuple = ()

    def slope_list(self) -> list[Slope]:
        return self.slopes.slopes() if isinstance(self.slopes, Grid) else list(self.slopes)


@dataclass
class DslDocument:
    definitions: dict = field(default_factory=dict)
    queries: list = field(default_factory=list)


def _ints(r: _Reader, what: str) -> tuple:
    a = r.integer(what)
    if r.peek(".."):
        r.eat("..", what)
        b = r.integer(what)
        if b < a:
            r.fail(f"empty range {a}..{b}")
        return tuple(range(a, b + 1))
    out = [a]
    while r.peek(","):
        r.eat(",", what)
        out.append(r.integer(what))
    return tuple(out)


def parse_int_list(text: str) -> tuple:
    r = _Reader(text)
    out = _ints(r, "integer list")
    if not r.at_end():
        r.fail("trailing input in integer list")
    return out


def parse(text: str) -> DslDocument:
    doc = DslDocument()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        r = _Reader(raw, lineno)
        if stripped.startswith("query") and (len(stripped) == 5 or stripped[5] in " \t"):
            r.eat("query", "query line")
            name = r.ident("query line")
            if name not in doc.definitions:
                r.fail(f"query references undefined name {name!r}", ValidationError)
            if r.peek("grid"):
                r.eat("grid", "grid")
                r.eat("p=", "grid")
                ps = _ints(r, "grid p")
                r.eat("q=", "grid")
                qs = _ints(r, "grid q")
                slopes = Grid(ps, qs)
            else:
                items = [r.slope()]
                while r.peek(","):
                    r.eat(",", "slope list")
                    items.append(r.slope())
                slopes = tuple(items)
            flags = []
            while not r.at_end():
                col = (r.ws(), r.col())[1]
                f = r.word()
                if f not in FLAGS:
                    raise DslSyntaxError(f"unknown query flag {f!r}", lineno, col)
                flags.append(f)
            doc.queries.append(DslQuery(name, slopes, tuple(flags)))
            continue
        name = r.ident("definition")
        if name == "query":
            r.fail("'query' is reserved")
        if name in doc.definitions:
            r.fail(f"duplicate definition {name!r}", ValidationError)
        r.eat("=", "definition")
        rest_col = r.col()
        doc.definitions[name] = parse_expr(raw[r.i:], lineno, rest_col)
    return doc


def _format_ints(xs: tuple) -> str:
    if len(xs) > 1 and xs == tuple(range(xs[0], xs[-1] + 1)):
        return f"{xs[0]}..{xs[-1]}"
    return ",".join(str(x) for x in xs)


def format_document(doc: DslDocument) -> str:
    lines = [f"{k} = {format_expr(v)}" for k, v in doc.definitions.items()]
    for q in doc.queries:
        if isinstance(q.slopes, Grid):
            sl = f"grid p={_format_ints(q.slopes.ps)} q={_format_ints(q.slopes.qs)}"
        else:
            sl = ", ".join(format_slope(s) for s in q.slopes)
        lines.append(" ".join([f"query {q.name} {sl}", *q.flags]).rstrip())
    return "\n".join(lines) + "\n"
