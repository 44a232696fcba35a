from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from dehnlo.farey import (
    adjacent, ball_enumerate, ball_membership, bounded_neighbors, farey_bfs_all,
    farey_bfs_distance, farey_vertices, fg_distance,
)
from dehnlo.slopes import LONGITUDE, MERIDIAN, Slope, distance

small = st.integers(-20, 20)


@st.composite
def slopes(draw, lim=20):
    p = draw(st.integers(-lim, lim))
    q = draw(st.integers(0, lim))
    if q == 0:
        return MERIDIAN
    return Slope(p, q)


def test_adjacent_examples():
    for n in range(-30, 31):
        if n:
            assert adjacent(LONGITUDE, Slope(1, n))
    assert not adjacent(Slope(2, 5), Slope(2, 5))
    assert adjacent(MERIDIAN, Slope(5, 1))


def test_distance_examples():
    assert fg_distance(LONGITUDE, LONGITUDE) == 0
    assert fg_distance(LONGITUDE, Slope(5, 2)) == 3
    for p in range(-12, 13):
        for n in range(-12, 13):
            for e in (1, -1):
                if n * p + e != 0 and p != 0:
                    assert fg_distance(LONGITUDE, Slope(p, n * p + e)) <= 2


def test_ball_examples():
    assert ball_membership(Slope(1, 7), 1)
    assert ball_membership(LONGITUDE, 0)
    assert not ball_membership(Slope(5, 2), 2)
    got = [str(s) for s in ball_enumerate(1, 3)]
    assert got == ["-1/1", "-1/2", "-1/3", "0/1", "1/3", "1/2", "1/1", "1/0"]
    for b in (1, 4, 9):
        assert ball_enumerate(0, b) == [LONGITUDE]


def test_ball_two_closed_form_small():
    got = set(ball_enumerate(2, 5))
    want = {s for s in farey_vertices(5) if s.q and (s.p == 0 and s.q == 1 or s.p and
            (s.q % abs(s.p) in (1 % abs(s.p), abs(s.p) - 1)))}
    want.add(MERIDIAN)
    assert got == want


def test_ball_enumerate_sorted_and_validates():
    xs = ball_enumerate(3, 6)
    assert xs == sorted(xs, key=Slope.sort_key) and xs[-1] == MERIDIAN
    with pytest.raises(ValueError):
        ball_enumerate(-1, 3)
    with pytest.raises(ValueError):
        ball_enumerate(1, 0)


@given(slopes(), slopes())
def test_symmetry_and_identity(a, b):
    d = fg_distance(a, b)
    assert d == fg_distance(b, a)
    assert (d == 0) == (a == b)
    assert (d == 1) == adjacent(a, b)


@given(slopes(), slopes(), slopes())
def test_triangle_inequality(a, b, c):
    assert fg_distance(a, c) <= fg_distance(a, b) + fg_distance(b, c)


@given(slopes(), slopes())
def test_mirror_invariance(a, b):
    # s -> -s is a graph automorphism
    assert fg_distance(a, b) == fg_distance(-a, -b)


@settings(max_examples=300)
@given(slopes(), slopes())
def test_agrees_with_bfs(a, b):
    assert fg_distance(a, b) == farey_bfs_distance(a, b)


@pytest.mark.parametrize("bound", [1, 2, 5, 8])
def test_bounded_neighbors_exact(bound):
    vs = farey_vertices(bound)
    for v in vs:
        want = sorted((u for u in vs if distance(u, v) == 1), key=Slope.sort_key)
        assert sorted(bounded_neighbors(v, bound), key=Slope.sort_key) == want


def test_bfs_from_longitude_matches_on_grid():
    dist = farey_bfs_all(LONGITUDE, 15)
    for s, d in dist.items():
        assert fg_distance(LONGITUDE, s) == d


@given(st.integers(1, 10**12), st.integers(1, 10**12))
def test_large_entries_terminate(p, q):
    if gcd(p, q) != 1:
        return
    d = fg_distance(LONGITUDE, Slope(p, q))
    assert 1 <= d <= 2 * 60 + 2
