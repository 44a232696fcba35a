from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from dehnlo.slopes import (
    LONGITUDE, MERIDIAN, HomologyClass, MeridianInput, Slope, SlopeError, ZeroPair,
    det2, distance, from_fraction, longitude_class, parse_slope, satellite_image, slope_new,
)

ints = st.integers(-10**6, 10**6)


@st.composite
def slopes(draw, meridian=True):
    p, q = draw(ints), draw(ints)
    if (p, q) == (0, 0) or (not meridian and q == 0):
        q = 1
    return Slope(p, q)


def test_normalization_examples():
    assert slope_new(2, 4) == Slope(1, 2)
    s = slope_new(3, -2)
    assert (s.p, s.q) == (-3, 2)
    m = slope_new(-1, 0)
    assert (m.p, m.q) == (1, 0) and m == MERIDIAN


def test_zero_pair_rejected():
    with pytest.raises(ZeroPair):
        Slope(0, 0)


def test_distance_examples():
    assert distance(Slope(7, 1), Slope(22, 1)) == 15
    assert distance(MERIDIAN, LONGITUDE) == 1
    assert distance(Slope(3, 2), Slope(3, 1)) == 3


@given(slopes(), slopes())
def test_distance_symmetric(a, b):
    assert distance(a, b) == distance(b, a)


@given(slopes(), slopes())
def test_distance_zero_iff_equal(a, b):
    assert (distance(a, b) == 0) == (a == b)
    assert distance(a, a) == 0


@given(ints, ints, slopes())
def test_distance_ignores_representative_sign(p, q, b):
    if (p, q) == (0, 0):
        return
    a = Slope(p, q)
    # the unnormalized determinant agrees up to sign for (p, q) and (-p, -q)
    assert abs(det2(p, b.p, q, b.q)) == abs(det2(-p, b.p, -q, b.q)) == distance(a, b) * gcd(p, q)


@given(slopes(meridian=False))
def test_value_roundtrip(s):
    assert from_fraction(s.value()) == s
    assert -(-s) == s
    assert parse_slope(str(s)) == s


def test_parse_slope():
    assert parse_slope("-3/2") == Slope(-3, 2)
    assert parse_slope("5") == Slope(5, 1)
    assert parse_slope("1/0") == MERIDIAN
    with pytest.raises(MeridianInput):
        parse_slope("1/0", allow_meridian=False)
    for bad in ("3/-2", "x", "1/2/3", ""):
        with pytest.raises(SlopeError):
            parse_slope(bad)


def test_sort_key_meridian_last():
    xs = [MERIDIAN, Slope(3, 1), Slope(-1, 2), LONGITUDE]
    assert sorted(xs, key=Slope.sort_key) == [Slope(-1, 2), LONGITUDE, Slope(3, 1), MERIDIAN]
    with pytest.raises(MeridianInput):
        MERIDIAN.value()


def test_satellite_image_examples():
    assert satellite_image(Slope(5, 3), 0) == MERIDIAN
    assert satellite_image(Slope(5, 3), 1) == Slope(5, 3)
    assert satellite_image(Slope(3, 2), 2) == Slope(3, 8)
    with pytest.raises(MeridianInput):
        satellite_image(MERIDIAN, 2)


def test_longitude_class_examples():
    assert longitude_class(7, 3, 0) == HomologyClass(1, 0)
    assert longitude_class(7, 3, 1) == HomologyClass(7, 3)
    assert longitude_class(2, 1, 2) == HomologyClass(1, 2)
    with pytest.raises(ZeroPair):
        longitude_class(0, 0, 2)


@given(st.integers(-200, 200), st.integers(1, 200), st.integers(1, 12))
def test_longitude_matches_satellite_image(p, q, w):
    if gcd(p, q) != 1:
        return
    c = longitude_class(p, q, w)
    assert c.divisor() == 1
    assert c.slope() == satellite_image(Slope(p, q), w)
    assert c.scale(gcd(p, w * w)) == HomologyClass(p, q * w * w)


def test_homology_class_primitive():
    assert HomologyClass(4, 6).primitive() == HomologyClass(2, 3)
    with pytest.raises(ZeroPair):
        HomologyClass(0, 0).primitive()
