from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mopbdstar.costvec import (
    INF,
    add,
    costvec,
    covered,
    dominates,
    eps_dominates,
    lex_less,
    nd_filter,
    nd_filter_kung_2d,
    nd_filter_naive,
    weakly_dominates,
)

vec2 = st.tuples(st.integers(0, 20), st.integers(0, 20))
vecs = st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12), st.integers(0, 12)), max_size=30)


@pytest.mark.parametrize(
    "a,b,want",
    [((2, 3), (2, 4), True), ((2, 3), (3, 2), False), ((3, 2), (2, 3), False), ((5, 5), (5, 5), False)],
)
def test_dominates(a, b, want):
    assert dominates(a, b) is want


@pytest.mark.parametrize(
    "a,b,want", [((5, 5), (5, 5), True), ((2, 3), (2, 4), True), ((3, 2), (2, 4), False)]
)
def test_weakly_dominates(a, b, want):
    assert weakly_dominates(a, b) is want


def test_eps_dominates_examples():
    assert eps_dominates((100, 100), (101, 101), 0.01)
    # mutual eps-dominance is allowed
    assert eps_dominates((101, 101), (100, 100), 0.01)
    assert not eps_dominates((102, 100), (100, 100), 0.01)


def test_eps_negative_rejected():
    with pytest.raises(ValueError):
        eps_dominates((1, 1), (1, 1), -0.1)


@given(vec2, vec2)
def test_eps_zero_is_weak_dominance(a, b):
    assert eps_dominates(a, b, 0.0) == weakly_dominates(a, b)


@given(vec2, vec2)
def test_strict_implies_weak(a, b):
    if dominates(a, b):
        assert weakly_dominates(a, b)
        assert not dominates(b, a)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        dominates((1, 2), (1, 2, 3))
    with pytest.raises(ValueError):
        weakly_dominates((1,), (1, 2))


def test_costvec_validation():
    assert costvec([1, 2]) == (1, 2)
    with pytest.raises(ValueError):
        costvec([1, -1])


def test_addition_saturates():
    assert add((1, INF), (2, 3)) == (3, INF)
    assert math.isinf(add((INF,), (5,))[0])


@pytest.mark.parametrize(
    "a,b,want", [((1, 5), (2, 1), True), ((2, 1), (2, 3), True), ((2, 3), (2, 3), False)]
)
def test_lex_less(a, b, want):
    assert lex_less(a, b) is want


def test_nd_filter_examples():
    b = [(1, 5), (2, 2), (5, 1), (3, 3)]
    assert set(nd_filter_naive(b)) == {(1, 5), (2, 2), (5, 1)}
    assert set(nd_filter_kung_2d(b)) == {(1, 5), (2, 2), (5, 1)}
    assert nd_filter_naive([(4, 4), (4, 4)]) == [(4, 4)]
    assert nd_filter_naive([]) == []
    assert nd_filter_kung_2d([(1, 1)]) == [(1, 1)]


def test_kung_rejects_three_objectives():
    with pytest.raises(ValueError):
        nd_filter_kung_2d([(1, 2, 3)])
    assert nd_filter([(1, 2, 3), (2, 2, 3)], "kung") == [(1, 2, 3)]


@given(vecs)
def test_nd_filter_properties(b):
    out = nd_filter_naive(b)
    assert len(set(out)) == len(out)
    for x in out:
        assert not any(dominates(y, x) for y in b)
    for y in b:
        assert any(weakly_dominates(x, y) for x in out)


@given(st.lists(vec2, max_size=60))
def test_kung_matches_naive(b):
    assert set(nd_filter_kung_2d(b)) == set(nd_filter_naive(b))


@given(vec2, st.lists(vec2, max_size=8))
def test_covered_is_any_weak(v, others):
    assert covered(v, others) == any(weakly_dominates(o, v) for o in others)


@given(st.lists(vec2, min_size=1, max_size=20, unique=True))
def test_lex_min_is_nondominated(b):
    m = min(b)
    assert not any(dominates(x, m) for x in b)
