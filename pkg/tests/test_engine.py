import random
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from dehnlo.dsl import parse_expr
from dehnlo.engine import (
    CITATIONS, PROPS, RULES, InconsistencyError, Query, QueryError, classify, e_shape_ok,
    may_compress, scan, verdict_to_dict,
)
from dehnlo.knots import Cable, Tri, TorusKnot, Unknot, validate
from dehnlo.slopes import MeridianInput, Slope, distance, satellite_image
from knotgen import add_attribute, knots, rational_slopes

Y, N, U = Tri.YES, Tri.NO, Tri.UNKNOWN


def C(text, p, q=1, **kw):
    return classify(Query(parse_expr(text), Slope(p, q), **kw))


def test_spec_examples():
    v = C("Sum(T(2,3),T(2,5))", 37, 5)
    assert v.lo == Y and v.nls == Y
    assert any(t.rule_id == "R-composite" for t in v.traces)
    v = C("T(2,3)", 1)
    assert v.lo == N and v.l_space == Y
    v = C("Sat(w=1; Hyp())", 5)
    assert v.lo == Y and v.nls == Y


def test_scan_examples():
    t = parse_expr("T(2,3)")
    slopes = [Slope(p, q) for p in (1, 2) for q in range(-5, 6) if q and gcd(p, q) == 1]
    not_lo = {s for s, v in scan(t, slopes) if v.lo == N}
    assert not_lo == {Slope(1, 1), Slope(2, 1)}
    with pytest.raises(QueryError):
        classify(Query(Unknot(), Slope(1, 1)))
    (s, v), = scan(parse_expr("C(2,1; Hyp())"), [Slope(2, 1)])
    assert v.lo == N and v.reducible == Y
    assert any(t.rule_id == "R-red-lens" for t in v.traces)


def test_meridian_rejected():
    with pytest.raises(MeridianInput):
        classify(Query(parse_expr("T(2,3)"), Slope(1, 0)))


def test_negative_depth_rejected():
    with pytest.raises(QueryError):
        classify(Query(parse_expr("T(2,3)"), Slope(1, 1), depth_budget=-1))


def test_torus_knot_range():
    for m, n in [(2, 3), (2, 5), (3, 4), (3, 5)]:
        b = m * n - m - n
        for p in range(-30, 40):
            v = C(f"T({m},{n})", p)
            if p == m * n:
                assert v.reducible == Y and v.lo == N
            elif p < b:
                assert (v.lo, v.nls, v.ctf) == (Y, Y, Y)
            else:
                assert (v.lo, v.ctf, v.l_space) == (N, N, Y)


def test_cable_reducible_and_compressing():
    v = C("C(2,7; T(2,3))", 14)
    assert v.reducible == Y and v.lo == N and v.ctf == N
    v = C("C(2,7; T(2,3))", 29, 2)  # distance one from 14
    assert v.reductions and v.toroidal == N
    v = C("C(2,7; T(2,3))", 20)
    assert v.toroidal == Y


@given(st.integers(2, 5), st.integers(-15, 15), st.integers(-80, 80), st.integers(1, 9))
def test_compress_arithmetic(m, n, p, q):
    if n == 0 or gcd(m, n) != 1 or gcd(p, q) != 1:
        return
    r, c = Slope(p, q), Slope(m * n, 1)
    assert distance(r, c) == abs(p - q * m * n)
    assert satellite_image(r, m) == Slope(p, m * m * q)


def test_psl9_table():
    for n in (3, 5, 7, 9, 11):
        for r in range(-10, 10):
            v = C(f"C(2,{n}; T(2,3))", r)
            if n <= 7 and n + 2 <= r <= 9:
                assert v.ctf == N and v.l_space == Y
            else:
                assert v.ctf == Y


def test_satellite_compression_window():
    k = validate(parse_expr("Sat(w=5, braided=true, obb=(5,1,2), sts=true; T(2,3))"))
    assert [p for p in range(-40, 40) if may_compress(k, Slope(p, 1))] == [11, 12]  # a = t*w + b
    k = validate(parse_expr("Sat(w=5, obb=(-5,1,2), sts=true; T(2,3))"))
    assert [p for p in range(-40, 40) if may_compress(k, Slope(p, 1))] == [-12, -11]
    k = validate(parse_expr("Sat(w=5, braided=true, sts=true; T(2,3))"))
    win = [p for p in range(-40, 40) if may_compress(k, Slope(p, 1))]
    assert win == [p for p in range(-40, 40) if 6 <= abs(p) <= 19]
    assert not may_compress(k, Slope(13, 2))


def test_conjecture_flag_tags_traces():
    plain = C("Sat(w=0; Hyp())", 3)
    flagged = C("Sat(w=0; Hyp())", 3, assume_conjecture=True)
    assert plain.ctf == U and flagged.ctf == Y
    assert any(t.conjectural for t in flagged.traces if t.prop == "ctf")
    assert not any(t.conjectural for t in plain.traces)


def test_two_cable_three_halves_left_open():
    v = C("C(2,1; Hyp())", 3, 2)
    assert v.lo == U


def test_e_shape():
    assert e_shape_ok(set()) and e_shape_ok({Slope(1, 1), Slope(2, 1)})
    assert e_shape_ok({Slope(-1, 2), Slope(-2, 3)})
    assert not e_shape_ok({Slope(1, 1), Slope(-1, 1)})
    assert not e_shape_ok({Slope(1, 3)})


def test_declared_contradiction_raises():
    # 1/3 lies outside every small-p exceptional set, so declaring it not-LO clashes
    with pytest.raises(InconsistencyError):
        C("Hyp(fibred=true, nlo=[1/3 2/5])", 1, 3)


@settings(max_examples=300, deadline=None)
@given(knots(), rational_slopes())
def test_duality_and_trace_completeness(k, s):
    v = classify(Query(k, s))
    assert v.nls == {Y: N, N: Y, U: U}[v.l_space]
    for p in PROPS:
        if v.get(p) != U:
            assert any(t.prop == p and t.value == v.get(p) for t in v.traces), p
    for t in v.traces:
        assert t.rule_id in RULES and t.citation in CITATIONS
        assert RULES[t.rule_id][0] == t.citation
        assert t.value == v.get(t.prop)


@settings(max_examples=200, deadline=None)
@given(knots(), rational_slopes(), st.integers(0, 4))
def test_depth_monotone(k, s, d):
    a = classify(Query(k, s, depth_budget=d))
    b = classify(Query(k, s, depth_budget=d + 2))
    for p in PROPS:
        if a.get(p) != U:
            assert b.get(p) == a.get(p)


@settings(max_examples=200, deadline=None)
@given(knots(), rational_slopes(), st.integers(0, 10**6))
def test_attribute_monotone(k, s, seed):
    k2 = add_attribute(random.Random(seed), k)
    if k2 is None:
        return
    a, b = classify(Query(k, s)), classify(Query(k2, s))
    for p in PROPS:
        if a.get(p) != U:
            assert b.get(p) == a.get(p)


@settings(max_examples=100, deadline=None)
@given(knots(), rational_slopes())
def test_deterministic(k, s):
    from dehnlo.engine import _classify
    q = Query(k, s)
    first = verdict_to_dict(q, classify(q))
    _classify.cache_clear()
    assert verdict_to_dict(q, classify(q)) == first


def test_catalog_well_formed():
    for rid, (cite, stmt) in RULES.items():
        assert cite in CITATIONS and stmt


def test_rule_doc_in_sync():
    from pathlib import Path
    doc = (Path(__file__).resolve().parents[1] / "docs" / "rules.md").read_text()
    for key in list(RULES) + list(CITATIONS):
        assert f"`{key}`" in doc, key
