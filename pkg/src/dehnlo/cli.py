"""Command line front end.

    dehnlo classify EXPR SLOPE
    dehnlo scan EXPR --p LIST --q LIST
    dehnlo farey ball K --qmax N
    dehnlo farey dist R S
    dehnlo batch FILE

Exit status: 0 on success, 1 on input errors, 2 when rules contradict.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from importlib import resources
from typing import Optional

from .dsl import DslError, Grid, format_expr, parse, parse_expr, parse_int_list, parse_slope_text
from .engine import (
    CONJECTURE_FLAG,
    PROPS,
    InconsistencyError,
    Query,
    QueryError,
    classify,
    scan,
    verdict_to_dict,
)
from .farey import ball_enumerate, fg_distance
from .knots import KnotModelError
from .slopes import SlopeError

SCHEMA_VERSION = "1.0"


def load_schema() -> dict:
    """The JSON schema every ``--json`` document conforms to."""
    text = resources.files("dehnlo").joinpath("schema/verdict.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog.removeprefix('dehnlo').strip() or 'usage'}: {message}")


def _common() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset after it
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit versioned JSON")
    p.add_argument("--trace", action="store_true", default=argparse.SUPPRESS, help="print derivation traces")
    p.add_argument("--depth", type=int, default=argparse.SUPPRESS, help="sub-query depth budget")
    p.add_argument("--assume-conjecture-1.6", dest="conj", action="store_true", default=argparse.SUPPRESS,
                   help="assume CTF detection of meridians for all knots (traces tagged CONJECTURAL)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = _Parser(prog="dehnlo", parents=[common],
                 description="Tri-valued LO / NLS / CTF verdicts for Dehn surgery on knots.")
    sub = ap.add_subparsers(dest="cmd", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("classify", parents=[common], help="verdict for one slope")
    c.add_argument("expr")
    c.add_argument("slope")

    s = sub.add_parser("scan", parents=[common], help="verdicts over a p/q grid")
    s.add_argument("expr")
    s.add_argument("--p", required=True, help="integers: 1,2 or -3..3")
    s.add_argument("--q", required=True, help="integers: 1,2 or -20..20")

    f = sub.add_parser("farey", parents=[common], help="Farey graph utilities")
    fsub = f.add_subparsers(dest="fcmd", parser_class=_Parser)
    fsub.required = True
    fb = fsub.add_parser("ball", parents=[common], help="slopes within distance k of 0/1")
    fb.add_argument("k", type=int)
    fb.add_argument("--qmax", type=int, required=True)
    fd = fsub.add_parser("dist", parents=[common], help="Farey distance between two slopes")
    fd.add_argument("r")
    fd.add_argument("s")

    b = sub.add_parser("batch", parents=[common], help="run the queries of a DSL file")
    b.add_argument("file")
    return ap


_NEGATIVE = re.compile(r"^-\d")


def _protect_negatives(argv: list[str]) -> list[str]:
    # "-3/2" or "-2..2" would otherwise be taken for an option
    return [" " + a if _NEGATIVE.match(a) else a for a in argv]


def _opt(args, name, default=None):
    return getattr(args, name, default)


class _Style:
    def __init__(self, stream):
        self.on = stream.isatty() and "NO_COLOR" not in os.environ

    def tri(self, v: str) -> str:
        if not self.on:
            return v
        code = {"yes": "32", "no": "31"}.get(v)
        return f"\033[{code}m{v}\033[0m" if code else v


def _verdict_rows(v) -> dict:
    return {p: v.get(p).value for p in PROPS}


def _trace_lines(v) -> list[str]:
    out = []
    for t in v.traces:
        tags = []
        if t.mirrored:
            tags.append("mirror")
        if t.conjectural:
            tags.append("CONJECTURAL")
        tag = f" ({', '.join(tags)})" if tags else ""
        prem = "; ".join(t.premises)
        out.append(f"  {t.prop}={t.value.value}  {t.rule_id} [{t.citation}]{tag}" + (f"  {prem}" if prem else ""))
    for d, q in v.reductions:
        out.append(f"  reduction: {d}  ->  {q}")
    for n in v.notes:
        out.append(f"  note: {n}")
    return out


def _table(rows: list[tuple], style: _Style) -> list[str]:
    head = ("slope",) + PROPS
    width = [max(len(h), *(len(str(r[i])) for r in rows)) if rows else len(h) for i, h in enumerate(head)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, width)).rstrip()]
    for r in rows:
        cells = [str(r[0]).ljust(width[0])]
        for i, x in enumerate(r[1:], start=1):
            cells.append(style.tri(x) + " " * (width[i] - len(x)))
        lines.append("  ".join(cells).rstrip())
    return lines


def _envelope(kind: str, **payload) -> dict:
    return {"schema_version": SCHEMA_VERSION, "kind": kind, **payload}


def _query(args, expr, slope) -> Query:
    return Query(expr, slope, _opt(args, "depth"), bool(_opt(args, "conj", False)))


def _cmd_classify(args, out, style):
    expr = parse_expr(args.expr)
    slope = parse_slope_text(args.slope.strip())
    q = _query(args, expr, slope)
    v = classify(q)
    if _opt(args, "json"):
        return _envelope("classify", result=verdict_to_dict(q, v))
    lines = [f"knot       {format_expr(expr)}", f"slope      {slope}"]
    lines += [f"{p:<10} {style.tri(x)}" for p, x in _verdict_rows(v).items()]
    if _opt(args, "trace"):
        lines.append("traces:")
        lines += _trace_lines(v)
    return lines


def _cmd_scan(args, out, style):
    expr = parse_expr(args.expr)
    grid = Grid(parse_int_list(args.p.strip()), parse_int_list(args.q.strip()))
    slopes = grid.slopes()
    res = scan(expr, slopes, _opt(args, "depth"), bool(_opt(args, "conj", False)))
    if _opt(args, "json"):
        return _envelope("scan", results=[verdict_to_dict(_query(args, expr, s), v) for s, v in res])
    lines = [f"knot {format_expr(expr)}"]
    lines += _table([(str(s), *_verdict_rows(v).values()) for s, v in res], style)
    if _opt(args, "trace"):
        for s, v in res:
            lines.append(f"traces at {s}:")
            lines += _trace_lines(v)
    return lines


def _cmd_farey(args, out, style):
    if args.fcmd == "ball":
        if args.k < 0 or args.qmax < 1:
            raise InputError("farey ball needs k >= 0 and --qmax >= 1")
        ball = [str(s) for s in ball_enumerate(args.k, args.qmax)]
        if _opt(args, "json"):
            return _envelope("farey_ball", k=args.k, qmax=args.qmax, slopes=ball)
        return [" ".join(ball)]
    r = parse_slope_text(args.r.strip())
    s = parse_slope_text(args.s.strip())
    d = fg_distance(r, s)
    if _opt(args, "json"):
        return _envelope("farey_dist", r=str(r), s=str(s), distance=d)
    return [str(d)]


def _cmd_batch(args, out, style):
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc.strerror}") from exc
    doc = parse(text)
    results, lines = [], []
    for dq in doc.queries:
        expr = doc.definitions[dq.name]
        conj = bool(_opt(args, "conj", False)) or CONJECTURE_FLAG in dq.flags
        slopes = dq.slope_list()
        for s in slopes:
            if s.is_meridian:
                raise InputError(f"query {dq.name}: 1/0 is not a surgery slope")
        res = scan(expr, slopes, _opt(args, "depth"), conj)
        for s, v in res:
            q = Query(expr, s, _opt(args, "depth"), conj)
            item = verdict_to_dict(q, v)
            item["name"] = dq.name
            results.append(item)
        if not _opt(args, "json"):
            lines.append(f"{dq.name} = {format_expr(expr)}" + (f"  [{CONJECTURE_FLAG}]" if conj else ""))
            lines += _table([(str(s), *_verdict_rows(v).values()) for s, v in res], style)
            if _opt(args, "trace"):
                for s, v in res:
                    lines.append(f"traces at {s}:")
                    lines += _trace_lines(v)
    if _opt(args, "json"):
        return _envelope("batch", results=results)
    return lines


_COMMANDS = {"classify": _cmd_classify, "scan": _cmd_scan, "farey": _cmd_farey, "batch": _cmd_batch}


def _emit(out, payload):
    if isinstance(payload, dict):
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        out.write("\n".join(payload) + "\n")


def run(argv: Optional[list] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = list(sys.argv[1:] if argv is None else argv)
    want_json = "--json" in argv
    try:
        args = build_parser().parse_args(_protect_negatives(argv))
        payload = _COMMANDS[args.cmd](args, out, _Style(out))
    except InconsistencyError as exc:
        err.write(f"dehnlo: inconsistency: {exc}\n")
        if want_json:
            _emit(out, _envelope("error", error={"type": "InconsistencyError", "message": str(exc)}))
        return 2
    except (InputError, DslError, SlopeError, KnotModelError, QueryError) as exc:
        err.write(f"dehnlo: {exc}\n")
        if want_json:
            _emit(out, _envelope("error", error={"type": type(exc).__name__, "message": str(exc)}))
        return 1
    _emit(out, payload)
    return 0


def main() -> None:
    sys.exit(run())
