import random

import pytest
from hypothesis import given

from dehnlo.dsl import (
    DslError, DslSyntaxError, Grid, UnknownAttribute, ValidationError, format_document, format_expr,
    parse, parse_expr, parse_int_list, parse_slope_text,
)
from dehnlo.knots import Cable, HypAtom, HypAttrs, Satellite, TorusKnot, Unknot
from dehnlo.slopes import Slope
from knotgen import knot, knots


def test_examples():
    assert parse_expr("C(2,7; T(2,3))") == Cable(2, 7, TorusKnot(2, 3))
    assert parse_expr("U") == Unknot()
    k = parse_expr("Sat(w=1; Sat(w=1; Hyp(genus=2)))")
    assert isinstance(k, Satellite) and isinstance(k.companion, Satellite)
    assert k.companion.companion == HypAtom(HypAttrs(genus=2))


@pytest.mark.parametrize("text,cls,pos", [
    ("C(2,7 T(2,3))", DslSyntaxError, "1:7"),
    ("Hyp(foo=1)", UnknownAttribute, "1:5"),
    ("T(2,4)", ValidationError, "1:1"),
    ("C(2,1; U)", ValidationError, None),
    ("Sat(w=3, obb=(3,1,1), sts=true; T(2,3))", ValidationError, None),
    ("Sum(T(2,3))", ValidationError, None),
    ("T(2,3) junk", DslSyntaxError, None),
    ("", DslSyntaxError, None),
])
def test_errors(text, cls, pos):
    with pytest.raises(cls) as ei:
        parse_expr(text)
    if pos:
        assert str(ei.value).startswith(pos)


def test_slope_text():
    assert parse_slope_text("-3/2") == Slope(-3, 2)
    with pytest.raises(DslError):
        parse_slope_text("3/-2")


def test_int_lists():
    assert parse_int_list("-2..2") == (-2, -1, 0, 1, 2)
    assert parse_int_list("1,2,6") == (1, 2, 6)
    with pytest.raises(DslSyntaxError):
        parse_int_list("3..1")


def test_canonical_printing():
    k = parse_expr("Sum( T(2,5) , T(3,2) )")
    assert format_expr(k) == "Sum(T(2,3), T(2,5))"
    assert format_expr(parse_expr("Hyp(delta=2mu+lambda, fdtc=-)")).count("2mu+lambda") == 1


@given(knots())
def test_parse_print_roundtrip(k):
    text = format_expr(k)
    assert parse_expr(text) == k
    assert format_expr(parse_expr(text)) == text


DOC = """
# a comment
A = T(2,3)
B = C(2,7; T(2,3))
query A 1, 2/3, -5/2
query B grid p=1..2 q=-3..3 assume-conjecture-1.6
"""


def test_document():
    doc = parse(DOC)
    assert list(doc.definitions) == ["A", "B"]
    q0, q1 = doc.queries
    assert q0.slope_list() == [Slope(1, 1), Slope(2, 3), Slope(-5, 2)]
    assert isinstance(q1.slopes, Grid) and q1.flags == ("assume-conjecture-1.6",)
    assert Slope(1, 0) not in q1.slope_list()
    text = format_document(doc)
    again = parse(text)
    assert again.definitions == doc.definitions and again.queries == doc.queries
    assert format_document(again) == text


@pytest.mark.parametrize("text,cls", [
    ("query A 1", ValidationError),
    ("A = T(2,3)\nA = T(2,5)", ValidationError),
    ("A = T(2,3)\nquery A 1 bogus-flag", DslSyntaxError),
    ("A = T(2,3)\nB = Hyp(zz=1)", UnknownAttribute),
])
def test_document_errors(text, cls):
    with pytest.raises(cls):
        parse(text)


def test_document_error_line():
    with pytest.raises(UnknownAttribute) as ei:
        parse("A = T(2,3)\n\nB = Hyp(zz=1)")
    assert str(ei.value).startswith("3:9")


def test_generated_document_roundtrip():
    rng = random.Random(3)
    doc_lines = []
    for i in range(40):
        doc_lines.append(f"K{i} = {format_expr(knot(rng))}")
    doc_lines.append("query K0 grid p=-2..2 q=1,3")
    text = "\n".join(doc_lines) + "\n"
    assert format_document(parse(text)) == text
