import re
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ocrp.compositions import (
    EMPTY,
    Composition,
    Params,
    compositions_up_to,
    enumerate_compositions,
    falling_factorial,
    format_rational,
    insert,
    insertion_classes,
    kappa,
    neighbors_down,
    neighbors_up,
    parse_composition,
    parse_rational,
    ranked,
    remove_box,
    replace_with_single,
    rising_factorial,
    stack,
    uninsert,
    unstack,
)

from conftest import compositions


def test_composition_basics():
    s = Composition((2, 1, 3))
    assert s.size == 6 and s.length == 3
    assert EMPTY.size == 0 and EMPTY.length == 0
    assert str(s) == "2,1,3"
    with pytest.raises(ValueError):
        Composition((1, 0))


def test_parse_round_trip():
    assert parse_composition("2,3,1") == (2, 3, 1)
    assert parse_composition("") == EMPTY
    with pytest.raises(ValueError):
        parse_composition("2,x")
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational("0.25") == Fraction(1, 4)
    assert format_rational(Fraction(4, 2)) == "2"


@pytest.mark.parametrize(
    "alpha,theta,msg",
    [("3/2", "1", "0 <= alpha < 1"), ("-1/2", "1", "0 <= alpha < 1"), ("1/2", "-1", "theta"), ("0", "0", "alpha + theta")],
)
def test_params_rejects(alpha, theta, msg):
    with pytest.raises(ValueError, match=re.escape(msg)):
        Params(alpha, theta)


def test_operations_examples():
    assert stack((2, 1), 2) == (2, 2)
    assert insert((2, 1), 1) == (1, 2, 1)
    assert insert((2, 1), 3) == (2, 1, 1)
    assert unstack((2, 2), 1) == (1, 2)
    assert uninsert((1, 2, 1), 3) == (1, 2)
    assert replace_with_single((3, 2), 1) == (1, 2)
    assert remove_box((1, 3), 1) == (3,)
    with pytest.raises(IndexError):
        stack((2, 1), 3)
    with pytest.raises(ValueError):
        unstack((2, 1), 2)
    with pytest.raises(ValueError):
        uninsert((2, 1), 1)


def test_kappa_examples():
    assert kappa((1,), (1, 1)) == 2
    assert kappa((1, 1), (1, 1, 1)) == 3
    assert kappa((2,), (1, 2)) == 1
    assert kappa((2,), (3,)) == 1
    assert kappa((2,), (2, 2)) == 0


def test_neighbors_examples():
    assert neighbors_up((1,)) == [((2,), 1, False), ((1, 1), 2, True)]
    assert neighbors_up((2, 1)) == [
        ((3, 1), 1, False),
        ((2, 2), 1, False),
        ((1, 2, 1), 1, True),
        ((2, 1, 1), 2, False),
    ]
    assert neighbors_down((1, 1)) == [((1,), 2)]
    assert insertion_classes((1, 1, 2)) == [(1, 3), (4, 1)]


def test_enumerate():
    assert enumerate_compositions(3) == [(1, 1, 1), (1, 2), (2, 1), (3,)]
    assert enumerate_compositions(0) == [EMPTY]
    for n in range(1, 11):
        assert len(enumerate_compositions(n)) == 2 ** (n - 1)
    assert compositions_up_to(2) == [(), (1,), (1, 1), (2,)]
    assert ranked((1, 2, 1, 3)) == (3, 2, 1, 1)


def test_factorials():
    assert falling_factorial(5, 2) == 20
    assert falling_factorial(3, 4) == 0
    assert falling_factorial(Fraction(1, 2), 0) == 1
    assert rising_factorial(Fraction(1, 2), 3) == Fraction(15, 8)
    assert rising_factorial(0, 0) == 1


@given(compositions(max_size=8))
def test_up_then_down_undoes(sigma):
    for r in range(1, len(sigma) + 1):
        assert unstack(stack(sigma, r), r) == sigma
    for s in range(1, len(sigma) + 2):
        assert uninsert(insert(sigma, s), s) == sigma


@given(compositions(min_size=0, max_size=8))
def test_kappa_sums_to_moves(sigma):
    # every one of the len + (len + 1) moves is counted exactly once
    ups = neighbors_up(sigma)
    assert sum(k for _, k, _ in ups) == 2 * len(sigma) + 1
    assert len({t for t, _, _ in ups}) == len(ups)
    for tau, k, _ in ups:
        assert kappa(sigma, tau) == k
        assert (sigma, k) in [(s, c) for s, c in neighbors_down(tau)]
    assert sum(flag for _, _, flag in ups) == 1


@given(compositions(min_size=1, max_size=8))
def test_down_multiplicities_count_boxes(tau):
    # removing the top box of each column: len(tau) moves in total
    assert sum(k for _, k in neighbors_down(tau)) == len(tau)


@given(st.integers(0, 6), st.integers(0, 6))
def test_falling_vs_binomial(x, b):
    import math

    assert falling_factorial(x, b) == math.comb(x, b) * math.factorial(b)
