from fractions import Fraction

import pytest
from hypothesis import strategies as st

from ocrp.compositions import Composition, Params

PARAM_GRID = [
    Params(Fraction(1, 2), Fraction(1, 2)),
    Params(Fraction(0), Fraction(1)),
    Params(Fraction(1, 3), Fraction(2, 3)),
    Params(Fraction(1, 2), Fraction(0)),
]


def param_id(p):
    return f"a{p.alpha}-t{p.theta}".replace("/", "_")


@pytest.fixture(params=PARAM_GRID, ids=param_id)
def params(request):
    return request.param


def compositions(min_size=0, max_size=7):
    return st.lists(st.integers(1, 4), min_size=0, max_size=max_size).filter(
        lambda xs: min_size <= sum(xs) <= max_size
    ).map(Composition)


rationals = st.fractions(min_value=0, max_value=1, max_denominator=12)


@st.composite
def param_values(draw):
    a = draw(st.fractions(min_value=0, max_value=Fraction(11, 12), max_denominator=12))
    t = draw(st.fractions(min_value=0, max_value=3, max_denominator=6))
    if a + t == 0:
        t = Fraction(1, 2)
    return Params(a, t)
