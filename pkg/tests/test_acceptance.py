"""Acceptance criteria 1 to 10.

Each test prints one ``criterion N: PASS|FAIL`` line straight to the terminal
(also when output capture is on) and then asserts. Runtime budgets are part of
the pass condition. ``python tests/test_acceptance.py`` prints the same lines.
"""

import random
import sys
import time
from fractions import Fraction

import pytest

from ocrp.compositions import Composition, Params, compositions_up_to, enumerate_compositions, ranked
from ocrp.kernels import build_down_matrix, build_transition_matrix, build_up_matrix, lumpability_defects, stationary_law
from ocrp.operators import (
    Form,
    generator_convergence,
    generator_matrix,
    insertion_sum,
    spectrum,
    stacking_sum,
    verify_down,
    verify_transition,
    verify_up,
)
from ocrp.opensets import OpenIntervalSet, approximate, eval_mo, hausdorff, monomial_convergence_check
from ocrp.qsym import eval_mstar, g, g_total
from ocrp.simulation import empirical_distribution, endpoint_m2, stationary_m2_by_summation, tv_distance
from ocrp.verify import count_paths_brute, random_open_set

PARAMS = [
    Params(Fraction(1, 2), Fraction(1, 2)),
    Params(Fraction(0), Fraction(1)),
    Params(Fraction(1, 3), Fraction(2, 3)),
    Params(Fraction(1, 2), Fraction(0)),
]
HALF = PARAMS[0]
SEED = 20240611


class Criterion:
    def __init__(self, number, budget):
        self.number, self.budget = number, budget
        self.failures = []

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def expect(self, ok, what):
        if not ok:
            self.failures.append(what)

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is not None:
            self.failures.append(f"raised {exc_type.__name__}: {exc}")
        if self.budget is not None and elapsed > self.budget:
            self.failures.append(f"runtime {elapsed:.1f}s over budget {self.budget}s")
        status = "PASS" if not self.failures else "FAIL"
        extra = "" if not self.failures else f"; first issue: {self.failures[0]} ({len(self.failures)} total)"
        limit = "no limit" if self.budget is None else f"{self.budget}s"
        _say(f"criterion {self.number}: {status} [{elapsed:.1f}s / {limit}]{extra}")
        return False


_CAPTURE = None


def _say(line):
    if _CAPTURE is not None:
        with _CAPTURE.disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)


@pytest.fixture(autouse=True)
def _terminal(capsys):
    global _CAPTURE
    _CAPTURE = capsys
    yield
    _CAPTURE = None


def _c(s):
    return tuple(s)


def test_criterion_1_kernel_exactness():
    with Criterion(1, 30) as crit:
        for params in PARAMS:
            laws = {n: stationary_law(n, params) for n in range(10)}
            for n in range(9):
                U, D = build_up_matrix(n, params), build_down_matrix(n)
                crit.expect(all(v == 1 for v in U.row_sums().values()), f"up rows n={n} {params}")
                crit.expect(all(v == 1 for v in D.row_sums().values()), f"down rows n={n}")
                law = dict(laws[n].items())
                up = U.left_apply(law)
                crit.expect(all(up.get(s, 0) == w for s, w in laws[n + 1].items()), f"M p_up n={n} {params}")
                down = D.left_apply(dict(laws[n + 1].items()))
                crit.expect(all(down.get(s, 0) == w for s, w in law.items()), f"M p_down n={n} {params}")
                if n >= 1:
                    T = U @ D
                    crit.expect(all(v == 1 for v in T.row_sums().values()), f"T rows n={n} {params}")
                    fixed = T.left_apply(law)
                    crit.expect(all(fixed.get(s, 0) == w for s, w in law.items()), f"M T n={n} {params}")
    assert not crit.failures, crit.failures[:5]


def test_criterion_2_path_count_identity():
    with Criterion(2, 60) as crit:
        for tau in compositions_up_to(7):
            n = tau.size
            gt = g_total(tau)
            for sigma in compositions_up_to(min(5, n)):
                falling = 1
                for j in range(sigma.size):
                    falling *= n - j
                crit.expect(
                    eval_mstar(sigma, tau) == Fraction(g(sigma, tau) * falling, gt), f"identity {_c(sigma)} {_c(tau)}"
                )
                if sigma.size <= 4:
                    crit.expect(count_paths_brute(sigma, tau) == g(sigma, tau), f"g oracle {_c(sigma)} {_c(tau)}")
    assert not crit.failures, crit.failures[:5]


def test_criterion_3_operator_identities():
    with Criterion(3, None) as crit:
        rhos = compositions_up_to(4)
        taus = compositions_up_to(8)
        for params in PARAMS:
            for n in range(9):
                T = build_transition_matrix(n, params) if n >= 1 else None
                for rho in rhos:
                    crit.expect(verify_down(rho, n) == [], f"down {_c(rho)} n={n}")
                    if n + params.theta > 0:
                        for form in (Form.EXPLICIT, Form.FACTORIZED):
                            crit.expect(verify_up(rho, n, params, form) == [], f"up {form} {_c(rho)} n={n}")
                    if T is not None:
                        for form in (Form.EXPLICIT, Form.FACTORIZED):
                            bad = verify_transition(rho, n, params, form, T)
                            crit.expect(bad == [], f"transition {form} {_c(rho)} n={n} {params}")
            for tau in taus:
                if tau.size + params.theta == 0:
                    continue
                for rho in rhos:
                    lhs, rhs = stacking_sum(rho, tau, params)
                    crit.expect(lhs == rhs, f"stacking {_c(rho)} {_c(tau)} {params}")
                    lhs, rhs = insertion_sum(rho, tau, params)
                    crit.expect(lhs == rhs, f"insertion {_c(rho)} {_c(tau)} {params}")
    assert not crit.failures, crit.failures[:5]


def test_criterion_4_generator_consistency():
    with Criterion(4, None) as crit:
        for params in PARAMS:
            for k in range(6):
                A = generator_matrix(k, params, Form.FACTORIZED)
                B = generator_matrix(k, params, Form.ALTERNATIVE)
                crit.expect(A.entries == B.entries, f"forms differ k={k} {params}")
                crit.expect(A.is_graded_triangular(), f"not graded-triangular k={k} {params}")
                for m in range(k + 1):
                    lam = -m * (m - 1 + params.theta)
                    block = A.diagonal_block(m)
                    scalar = all(
                        block[i][j] == (lam if i == j else 0) for i in range(len(block)) for j in range(len(block))
                    )
                    crit.expect(scalar, f"diagonal block m={m} k={k} {params}")
                want = {}
                for m in range(k + 1):
                    lam = -m * (m - 1 + params.theta)
                    want[lam] = want.get(lam, 0) + (2 ** (m - 1) if m else 1)
                crit.expect(spectrum(k, params) == sorted(want.items(), reverse=True), f"spectrum k={k} {params}")
    assert not crit.failures, crit.failures[:5]


def test_criterion_5_convergence_diagnostic():
    with Criterion(5, 120) as crit:
        ns = [20, 40, 80, 160]
        for rho in compositions_up_to(3):
            r = [res for _, res in generator_convergence(3, rho, ns, HALF)]
            if not rho:
                crit.expect(all(x == 0 for x in r), "nonzero residual for the empty composition")
                continue
            crit.expect(all(b <= a for a, b in zip(r, r[1:])), f"{_c(rho)} residuals increase: {[float(x) for x in r]}")
            crit.expect(r[-1] < r[0] / 4, f"{_c(rho)} ratio r160/r20 = {float(r[-1] / r[0]):.3f}")
    assert not crit.failures, crit.failures[:5]


def test_criterion_6_lumpability():
    with Criterion(6, None) as crit:
        for params in PARAMS:
            for n in range(1, 8):
                defects = lumpability_defects(build_transition_matrix(n, params), key=ranked)
                crit.expect(defects == [], f"n={n} {params}: {defects[:1]}")
    assert not crit.failures, crit.failures[:5]


def test_criterion_7_monte_carlo_vs_exact_law():
    with Criterion(7, 60) as crit:
        empirical = empirical_distribution(6, HALF, 10**6, SEED)
        tv = tv_distance(empirical, dict(stationary_law(6, HALF).items()))
        _say(f"  TV(empirical, M_6) = {tv:.5f}")
        crit.expect(tv < 0.02, f"TV {tv:.4f} >= 0.02")
    assert not crit.failures, crit.failures


def test_criterion_8_stationary_moment():
    with Criterion(8, 60) as crit:
        for n in range(2, 11):
            crit.expect(stationary_m2_by_summation(n, HALF) == Fraction(1, 3), f"exact target at n={n}")
        values = endpoint_m2(100, HALF, 100**2, 200, SEED)
        mean = sum(values) / len(values)
        _say(f"  mean endpoint m2 over {len(values)} trajectories = {mean:.5f}")
        crit.expect(len(values) == 200, "wrong number of trajectories")
        crit.expect(abs(mean - 1 / 3) <= 0.03, f"mean {mean:.4f} outside 1/3 +- 0.03")
    assert not crit.failures, crit.failures


def test_criterion_9_metric_module():
    with Criterion(9, 30) as crit:
        rnd = random.Random(SEED)
        for i in range(500):
            U, V, W = (random_open_set(rnd) for _ in range(3))
            duv, dvw, duw = hausdorff(U, V), hausdorff(V, W), hausdorff(U, W)
            crit.expect(duv == hausdorff(V, U), f"symmetry #{i}")
            crit.expect(hausdorff(U, U) == 0, f"reflexivity #{i}")
            crit.expect((duv == 0) == (U == V), f"identity of indiscernibles #{i}")
            crit.expect(duv >= 0 and duw <= duv + dvw, f"triangle #{i}")
        for i in range(200):
            U = random_open_set(rnd, max_parts=6, grid=97)
            for n in range(1, 65):
                crit.expect(hausdorff(U, approximate(U, n)) <= Fraction(1, n), f"approximation {U} n={n}")
    assert not crit.failures, crit.failures[:5]


def test_criterion_10_monomial_convergence():
    with Criterion(10, 5) as crit:
        limit = OpenIntervalSet(((0, Fraction(1, 2)), (Fraction(1, 2), 1)))
        for mu in ((1,), (2,), (1, 1)):
            rows = monomial_convergence_check(mu, [Composition((k, k)) for k in range(1, 101)], limit)
            err = rows[-1][2]
            _say(f"  mu={mu}: |ratio - m^o| at k=100 is {float(err):.2e} (limit {eval_mo(mu, limit)})")
            crit.expect(err < Fraction(1, 100), f"mu={mu} error {float(err):.4f}")
    assert not crit.failures, crit.failures


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    tests.sort(key=lambda f: int(f.__name__.split("_")[2]))
    failed = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
