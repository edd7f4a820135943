import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ocrp.compositions import Composition, compositions_up_to, enumerate_compositions, ranked
from ocrp.opensets import (
    EMPTY_SET,
    UNIT,
    NotConverged,
    OpenIntervalSet,
    approximate,
    approximate_composition,
    eval_mo,
    eval_psi,
    hausdorff,
    iota,
    monomial_convergence_check,
    projection_value,
    ranked_lengths,
)
from ocrp.qsym import M, MSTAR, QSymElement, quasi_shuffle
from ocrp.verify import random_open_set

from conftest import compositions

F = Fraction
P = OpenIntervalSet.parse
HALVES = P("0,1/2;1/2,1")


@st.composite
def open_sets(draw, grid=36):
    cuts = sorted(draw(st.lists(st.integers(0, grid), max_size=8)))
    if len(cuts) % 2:
        cuts = cuts[:-1]
    ivs = [(F(cuts[i], grid), F(cuts[i + 1], grid)) for i in range(0, len(cuts), 2) if cuts[i] < cuts[i + 1]]
    return OpenIntervalSet(tuple(ivs))


def brute_hausdorff(U, V, res=120):
    # endpoints on a 1/20 grid put every candidate point on this lattice
    xs = [F(i, res) for i in range(res + 1)]

    def closed(W):
        return [x for x in xs if not any(a < x < b for a, b in W.intervals)]

    A, B = closed(U), closed(V)

    def d(S, T):
        return max(min(abs(s - t) for t in T) for s in S)

    return max(d(A, B), d(B, A))


def test_iota_examples():
    assert iota((2, 1)).intervals == ((0, F(2, 3)), (F(2, 3), 1))
    assert iota((1,)) == UNIT
    assert iota(()) == EMPTY_SET


def test_parse_and_str():
    U = P("0,1/3;1/3,1")
    assert U == iota((1, 2))
    assert str(U) == "0,1/3;1/3,1"
    assert P("0.25,0.5").intervals == ((F(1, 4), F(1, 2)),)
    with pytest.raises(ValueError):
        P("1/2,1/3")
    with pytest.raises(ValueError):
        P("0,1/2;1/4,1")


def test_hausdorff_examples():
    assert hausdorff(iota((1,)), iota((1, 1))) == F(1, 2)
    assert hausdorff(EMPTY_SET, UNIT) == F(1, 2)
    assert hausdorff(HALVES, HALVES) == 0
    assert hausdorff(UNIT, HALVES) == F(1, 2)


@settings(max_examples=40, deadline=None)
@given(open_sets(grid=20), open_sets(grid=20))
def test_hausdorff_against_grid(U, V):
    assert hausdorff(U, V) == brute_hausdorff(U, V)


@settings(max_examples=150, deadline=None)
@given(open_sets(), open_sets(), open_sets())
def test_metric_axioms(U, V, W):
    assert hausdorff(U, V) == hausdorff(V, U)
    assert hausdorff(U, U) == 0
    assert hausdorff(U, W) <= hausdorff(U, V) + hausdorff(V, W)
    assert (hausdorff(U, V) == 0) == (U.complement() == V.complement())


def test_iota_distance_zero_iff_same_cuts():
    comps = compositions_up_to(5)[1:]
    for s in comps:
        for t in comps:
            cuts_s = {F(sum(s[:j]), s.size) for j in range(len(s) + 1)}
            cuts_t = {F(sum(t[:j]), t.size) for j in range(len(t) + 1)}
            assert (hausdorff(iota(s), iota(t)) == 0) == (cuts_s == cuts_t)


def test_approximate_examples():
    assert approximate(UNIT, 4) == iota((1, 2, 1))
    assert approximate(iota((1, 1)), 2) == iota((1, 1))
    assert approximate_composition(EMPTY_SET, 5) == (1, 1, 1, 1, 1)
    assert approximate(UNIT, 1) == UNIT


@settings(max_examples=200, deadline=None)
@given(open_sets(grid=48), st.integers(1, 64))
def test_approximation_bound(U, n):
    A = approximate(U, n)
    assert approximate_composition(U, n).size == n
    assert hausdorff(U, A) <= F(1, n)


def test_eval_mo_examples():
    assert eval_mo((2,), HALVES) == F(1, 2)
    assert eval_mo((), P("0,1/3")) == 1
    assert eval_mo((1,), iota((3, 1, 4))) == 1
    assert eval_mo((1, 1), HALVES) == F(1, 4)


def test_eval_mo_grid_mode():
    U = P("0,1/3")
    assert eval_mo((1,), U, method="grid") == pytest.approx(1.0)
    assert eval_mo((2,), U, method="grid", eps=1e-5) == pytest.approx(1 / 9, abs=1e-5)
    with pytest.raises(NotConverged):
        eval_mo((2,), U, method="grid")
    with pytest.raises(ValueError):
        eval_mo((2,), U, method="bogus")


def test_eval_mo_exact_limit_examples():
    V = P("0,1/3;1/2,1")
    assert eval_mo((2,), V) == F(13, 36)
    assert eval_mo((1, 1), V) == F(23, 72)
    assert eval_mo((1, 2, 1), V) == 0
    assert eval_mo((2,), P("0,1/3")) == F(1, 9)
    assert eval_mo((1,), EMPTY_SET) == 1
    assert eval_mo((1, 1), EMPTY_SET) == F(1, 2)
    assert eval_mo((2,), EMPTY_SET) == 0


@settings(max_examples=40, deadline=None)
@given(compositions(min_size=1, max_size=7), compositions(min_size=1, max_size=3))
def test_extrapolation_matches_closed_form(sigma, mu):
    from ocrp.opensets import _extrapolated_limit

    U = iota(sigma)
    assert _extrapolated_limit(Composition(mu), U) == eval_mo(mu, U)


@settings(max_examples=40, deadline=None)
@given(open_sets(), compositions(max_size=2), compositions(max_size=2))
def test_eval_mo_is_multiplicative(U, a, b):
    prod = quasi_shuffle(QSymElement.monomial(a, M), QSymElement.monomial(b, M))
    assert eval_psi(prod, U) == eval_mo(a, U) * eval_mo(b, U)


@settings(max_examples=25, deadline=None)
@given(open_sets(), compositions(min_size=1, max_size=3))
def test_exact_limit_close_to_fine_grid(U, mu):
    from ocrp.opensets import _dp_runs, approximate_runs

    n = 1 << 14
    exact = eval_mo(mu, U)
    assert 0 <= exact <= 1
    assert abs(float(exact) - _dp_runs(Composition(mu), approximate_runs(U, n), n)) < 1e-2


def test_eval_psi_linear():
    q = QSymElement({(2,): 3, (): 1}, M)
    assert eval_psi(q, HALVES) == F(5, 2)
    assert eval_psi(QSymElement.monomial((2,), MSTAR), HALVES) == F(1, 2) - 1


@pytest.mark.parametrize("n", range(1, 9))
def test_projection_multiplicative(n):
    qs = [QSymElement({(1,): 1, (2,): -2}, M), QSymElement({(1, 1): 3, (): 1}, M), QSymElement.monomial((2, 1), MSTAR)]
    for tau in enumerate_compositions(n):
        for a in qs:
            for b in qs:
                assert projection_value(quasi_shuffle(a, b), tau) == projection_value(a, tau) * projection_value(b, tau)


@settings(max_examples=60, deadline=None)
@given(compositions(min_size=1, max_size=8), compositions(max_size=4))
def test_eval_mo_on_iota_is_projection(sigma, mu):
    v = eval_mo(mu, iota(sigma))
    assert v == projection_value(QSymElement.monomial(mu, M), sigma)
    assert abs(v) <= 1


def test_ranked_lengths():
    assert ranked_lengths(iota((1, 2, 1, 3))) == (F(3, 7), F(2, 7), F(1, 7), F(1, 7))
    assert ranked_lengths(EMPTY_SET) == ()
    assert ranked_lengths(UNIT) == (1,)
    for sigma in compositions_up_to(8)[1:]:
        assert ranked_lengths(iota(sigma)) == tuple(F(p, sigma.size) for p in ranked(sigma))


def test_monomial_convergence():
    seq = [Composition((k, k)) for k in range(1, 101)]
    res = monomial_convergence_check((1,), seq, HALVES)
    assert all(r == 1 for _, r, _ in res)
    res = monomial_convergence_check((2,), seq, HALVES)
    assert all(r == F(k - 1, 2 * k - 1) for k, r, _ in res)
    dists = [d for _, _, d in res]
    assert all(b <= a for a, b in zip(dists, dists[1:]))
    assert monomial_convergence_check((), seq[:3], HALVES)[0][1] == 1


def test_random_open_set_helper():
    rnd = random.Random(3)
    for _ in range(50):
        U = random_open_set(rnd)
        assert U.total_length() <= 1
