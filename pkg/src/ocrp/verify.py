"""Exact identity suites run by ``ocrp verify``."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .compositions import (
    Params,
    compositions_up_to,
    enumerate_compositions,
    format_composition,
    format_rational,
    neighbors_up,
    ranked,
)
from .kernels import (
    build_down_matrix,
    build_transition_matrix,
    build_up_matrix,
    lumpability_defects,
    stationary_law,
)
from .operators import (
    Form,
    generator_matrix,
    insertion_sum,
    spectrum,
    stacking_sum,
    stationary_expectation,
    verify_down,
    verify_transition,
    verify_up,
)
from .opensets import OpenIntervalSet, approximate, eval_mo, hausdorff, iota, ranked_lengths
from .qsym import M, MSTAR, QSymElement, eval, eval_mstar, g, g_total, to_m_basis, to_mstar_basis

SUITES = ("kernels", "qsym", "operators", "metric")


@dataclass
class VerificationReport:
    suite: str
    params: tuple
    cases: int = 0
    failures: list = field(default_factory=list)

    def check(self, case: str, expected, actual) -> None:
        self.cases += 1
        if expected != actual:
            self.failures.append({"case": case, "expected": _show(expected), "actual": _show(actual)})

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "params": {"alpha": self.params[0], "theta": self.params[1]},
            "cases": self.cases,
            "failures": self.failures,
        }

    def merge(self, other: "VerificationReport") -> None:
        self.cases += other.cases
        self.failures.extend({**f, "case": f"{other.suite}: {f['case']}"} for f in other.failures)


def _show(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, (int, bool, str)) or x is None:
        return x
    return str(x)


def _c(sigma) -> str:
    return "(" + format_composition(sigma) + ")"


@lru_cache(maxsize=None)
def count_paths_brute(sigma, tau) -> int:
    """Directed paths from ``sigma`` to ``tau`` by walking every stack/insert move."""
    if sum(sigma) == sum(tau):
        return int(tuple(sigma) == tuple(tau))
    if sum(sigma) > sum(tau):
        return 0
    return sum(k * count_paths_brute(nxt, tau) for nxt, k, _ in neighbors_up(sigma))


# ------------------------------------------------------------------ suites


def verify_kernels(params: Params, max_n: int) -> VerificationReport:
    rep = VerificationReport("kernels", _pstr(params))
    laws = {n: stationary_law(n, params) for n in range(max_n + 2)}
    for n in range(max_n + 1):
        law = laws[n]
        rep.check(f"M_{n} sums to 1", Fraction(1), law.total())
        U = build_up_matrix(n, params)
        D = build_down_matrix(n)
        for s, tot in U.row_sums().items():
            rep.check(f"up row {_c(s)} sums to 1", Fraction(1), tot)
        for s, tot in D.row_sums().items():
            rep.check(f"down row {_c(s)} sums to 1", Fraction(1), tot)
        pushed = U.left_apply(dict(law.items()))
        for s, w in laws[n + 1].items():
            rep.check(f"M_{n} p_up at {_c(s)}", w, pushed.get(s, Fraction(0)))
        pulled = D.left_apply(dict(laws[n + 1].items()))
        for s, w in law.items():
            rep.check(f"M_{n + 1} p_down at {_c(s)}", w, pulled.get(s, Fraction(0)))
        if n >= 1:
            T = U @ D
            for s, tot in T.row_sums().items():
                rep.check(f"T_{n} row {_c(s)} sums to 1", Fraction(1), tot)
            fixed = T.left_apply(dict(law.items()))
            for s, w in law.items():
                rep.check(f"M_{n} T_{n} at {_c(s)}", w, fixed.get(s, Fraction(0)))
            rep.check(f"T_{n} lumpable on ranked fibers", [], lumpability_defects(T))
    return rep


def verify_qsym(params: Params, max_n: int) -> VerificationReport:
    rep = VerificationReport("qsym", _pstr(params))
    top = min(max_n, 7)
    for tau in compositions_up_to(top):
        for sigma in compositions_up_to(min(5, tau.size)):
            n = tau.size
            lhs = Fraction(eval_mstar(sigma, tau))
            falling = 1
            for j in range(sigma.size):
                falling *= n - j
            rhs = Fraction(g(sigma, tau) * falling, g_total(tau))
            rep.check(f"m*{_c(sigma)} at {_c(tau)} via path counts", lhs, rhs)
            if sigma.size <= 4:
                rep.check(f"g{_c(sigma)}{_c(tau)} against path walk", count_paths_brute(sigma, tau), g(sigma, tau))
    for sigma in compositions_up_to(min(max_n, 5)):
        q = QSymElement.monomial(sigma, M)
        rep.check(f"basis round trip {_c(sigma)}", q, to_m_basis(to_mstar_basis(q)))
    small = compositions_up_to(min(max_n, 3))
    for a in small:
        for b in small:
            prod = QSymElement.monomial(a, M) * QSymElement.monomial(b, MSTAR)
            for tau in compositions_up_to(min(max_n, 5)):
                rep.check(
                    f"product m{_c(a)} m*{_c(b)} at {_c(tau)}",
                    Fraction(eval(QSymElement.monomial(a, M), tau) * eval_mstar(b, tau)),
                    eval(prod, tau),
                )
    return rep


def verify_operators(params: Params, max_n: int) -> VerificationReport:
    rep = VerificationReport("operators", _pstr(params))
    rhos = compositions_up_to(min(4, max_n + 1))
    for n in range(0, max_n + 1):
        T = build_transition_matrix(n, params) if n >= 1 else None
        for rho in rhos:
            rep.check(f"down m*{_c(rho)} n={n}", [], verify_down(rho, n))
            if n + params.theta > 0:
                for form in (Form.EXPLICIT, Form.FACTORIZED):
                    rep.check(f"up {form.value} m*{_c(rho)} n={n}", [], verify_up(rho, n, params, form))
            if T is not None:
                for form in (Form.EXPLICIT, Form.FACTORIZED):
                    rep.check(
                        f"transition {form.value} m*{_c(rho)} n={n}", [], verify_transition(rho, n, params, form, T)
                    )
    for tau in compositions_up_to(min(6, max_n)):
        if tau.size + params.theta == 0:
            continue
        for rho in compositions_up_to(4):
            rep.check(f"stacking sum {_c(rho)} at {_c(tau)}", *stacking_sum(rho, tau, params))
            rep.check(f"insertion sum {_c(rho)} at {_c(tau)}", *insertion_sum(rho, tau, params))
    k = min(5, max_n)
    A = generator_matrix(k, params, Form.FACTORIZED)
    B = generator_matrix(k, params, Form.ALTERNATIVE)
    rep.check(f"generator forms agree k={k}", A.entries, B.entries)
    rep.check(f"generator graded-triangular k={k}", True, A.is_graded_triangular())
    want = {}
    for m in range(k + 1):
        lam = -m * (m - 1 + params.theta)
        want[lam] = want.get(lam, 0) + (2 ** (m - 1) if m else 1)
    rep.check(f"spectrum k={k}", sorted(want.items(), reverse=True), spectrum(k, params))
    for n in range(1, max_n + 1):
        law = stationary_law(n, params)
        for rho in compositions_up_to(min(3, n)):
            direct = sum((w * eval_mstar(rho, s) for s, w in law.items()), Fraction(0))
            rep.check(f"stationary mean of m*{_c(rho)} n={n}", direct, stationary_expectation(rho, n, params))
    return rep


def random_open_set(rnd: random.Random, max_parts: int = 4, grid: int = 48) -> OpenIntervalSet:
    pts = sorted(rnd.randint(0, grid) for _ in range(2 * rnd.randint(0, max_parts)))
    ivs = [(Fraction(pts[2 * i], grid), Fraction(pts[2 * i + 1], grid)) for i in range(len(pts) // 2)]
    return OpenIntervalSet(tuple((a, b) for a, b in ivs if a < b))


def verify_metric(params: Params, max_n: int, seed: int = 0) -> VerificationReport:
    rep = VerificationReport("metric", _pstr(params))
    rnd = random.Random(seed)
    for i in range(60):
        U, V, W = (random_open_set(rnd) for _ in range(3))
        duv, dvw, duw = hausdorff(U, V), hausdorff(V, W), hausdorff(U, W)
        rep.check(f"symmetry #{i}", duv, hausdorff(V, U))
        rep.check(f"self distance #{i}", Fraction(0), hausdorff(U, U))
        rep.check(f"triangle #{i}", True, duw <= duv + dvw)
        for n in (1, 2, 3, 5, 8, 13, 21, 34, 55):
            rep.check(f"approximation #{i} n={n}", True, hausdorff(U, approximate(U, n)) <= Fraction(1, n))
        if i < 15:
            for mu in compositions_up_to(min(3, max_n))[1:]:
                rep.check(f"|m^o{_c(mu)}| <= 1 on random set #{i}", True, abs(eval_mo(mu, U)) <= 1)
    for sigma in compositions_up_to(max_n):
        if not sigma:
            continue
        rep.check(f"ranked lengths {_c(sigma)}", tuple(Fraction(p, sigma.size) for p in ranked(sigma)), ranked_lengths(iota(sigma)))
        U = iota(sigma)
        for mu in compositions_up_to(min(3, max_n)):
            rep.check(f"|m^o{_c(mu)}| <= 1 at {_c(sigma)}", True, abs(eval_mo(mu, U)) <= 1)
    return rep


def _pstr(params: Params) -> tuple:
    return (format_rational(params.alpha), format_rational(params.theta))


def run_suite(suite: str, params: Params, max_n: int) -> VerificationReport:
    if not 0 <= max_n <= 10:
        raise ValueError("max_n must lie in [0, 10]")
    runners = {
        "kernels": verify_kernels,
        "qsym": verify_qsym,
        "operators": verify_operators,
        "metric": verify_metric,
    }
    if suite == "all":
        rep = VerificationReport("all", _pstr(params))
        for name in SUITES:
            rep.merge(runners[name](params, max_n))
        return rep
    if suite not in runners:
        raise ValueError(f"unknown suite {suite!r}")
    return runners[suite](params, max_n)
