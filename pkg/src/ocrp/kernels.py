"""Exact one-step kernels of the ordered CRP up-down chain and its stationary laws."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .compositions import (
    EMPTY,
    Composition,
    Params,
    as_composition,
    enumerate_compositions,
    insert,
    kappa,
    neighbors_down,
    neighbors_up,
    rising_factorial,
    stack,
)


def _check_params(params) -> Params:
    if not isinstance(params, Params):
        raise TypeError(f"expected Params, got {type(params).__name__}")
    return params


def up_prob(sigma, tau, params: Params) -> Fraction:
    """Probability that a new customer turns ``sigma`` into ``tau``.

    ``up_prob((), (1,))`` is 1 by convention, which avoids the 0/0 at theta = 0.
    """
    params = _check_params(params)
    sigma = as_composition(sigma)
    tau = as_composition(tau)
    if not sigma:
        return Fraction(1) if tau == (1,) else Fraction(0)
    a, t = params.alpha, params.theta
    denom = sigma.size + t
    if tau.size != sigma.size + 1:
        return Fraction(0)
    if len(tau) == len(sigma):
        for r in range(1, len(sigma) + 1):
            if stack(sigma, r) == tau:
                return (sigma[r - 1] - a) / denom
        return Fraction(0)
    k = kappa(sigma, tau)
    if k == 0:
        return Fraction(0)
    if insert(sigma, 1) == tau:
        return (t + a * (k - 1)) / denom
    return a * k / denom


def down_prob(tau, sigma) -> Fraction:
    """Probability that a uniformly chosen customer leaving ``tau`` gives ``sigma``."""
    tau = as_composition(tau)
    sigma = as_composition(sigma)
    if not tau:
        raise ValueError("no down-step from the empty composition")
    k = kappa(sigma, tau)
    if k == 0:
        return Fraction(0)
    n = tau.size
    if len(tau) == len(sigma):
        for r in range(1, len(sigma) + 1):
            if stack(sigma, r) == tau:
                return Fraction(tau[r - 1] * k, n)
    # insertion: the inserted column has a single box
    return Fraction(k, n)


@dataclass
class SparseStochasticMatrix:
    """Row-indexed sparse matrix with exact rational entries.

    ``rows[s]`` maps each successor state to its (positive) probability.
    """

    rows: dict
    row_level: int
    col_level: int

    def __getitem__(self, key):
        s, t = key
        return self.rows[s].get(t, Fraction(0))

    def row(self, state) -> dict:
        return self.rows[as_composition(state)]

    def states(self) -> list:
        return sorted(self.rows)

    def row_sums(self) -> dict:
        return {s: sum(r.values(), Fraction(0)) for s, r in self.rows.items()}

    def left_apply(self, weights: dict) -> dict:
        """Row vector times matrix: ``(w P)(t) = sum_s w(s) P(s, t)``."""
        out: dict = {}
        for s, w in weights.items():
            if not w:
                continue
            for t, p in self.rows[s].items():
                out[t] = out.get(t, Fraction(0)) + w * p
        return {t: v for t, v in out.items() if v}

    def apply(self, f) -> dict:
        """Matrix times column vector, ``(P f)(s) = sum_t P(s, t) f(t)``.

        ``f`` is a callable or a mapping on column states.
        """
        get = f if callable(f) else f.__getitem__
        return {s: sum((p * get(t) for t, p in r.items()), Fraction(0)) for s, r in self.rows.items()}

    def __matmul__(self, other: "SparseStochasticMatrix") -> "SparseStochasticMatrix":
        if self.col_level != other.row_level:
            raise ValueError("level mismatch in matrix product")
        rows = {}
        for s, r in self.rows.items():
            acc: dict = {}
            for mid, p in r.items():
                for t, q in other.rows[mid].items():
                    acc[t] = acc.get(t, Fraction(0)) + p * q
            rows[s] = {t: v for t, v in sorted(acc.items()) if v}
        return SparseStochasticMatrix(rows, self.row_level, other.col_level)


def build_up_matrix(n: int, params: Params) -> SparseStochasticMatrix:
    """Up kernel from level ``n`` to level ``n + 1``."""
    params = _check_params(params)
    a, t = params.alpha, params.theta
    rows = {}
    for sigma in enumerate_compositions(n):
        if not sigma:
            rows[sigma] = {Composition((1,)): Fraction(1)}
            continue
        denom = n + t
        row = {}
        for tau, k, front in neighbors_up(sigma):
            if len(tau) == len(sigma):
                col = next(r for r in range(len(sigma)) if tau[r] != sigma[r])
                p = (sigma[col] - a) / denom
            elif front:
                p = (t + a * (k - 1)) / denom
            else:
                p = a * k / denom
            if p:
                row[tau] = p
        rows[sigma] = dict(sorted(row.items()))
    return SparseStochasticMatrix(rows, n, n + 1)


def build_down_matrix(n: int) -> SparseStochasticMatrix:
    """Down kernel from level ``n + 1`` to level ``n``."""
    rows = {}
    for tau in enumerate_compositions(n + 1):
        row = {}
        for sigma, k in neighbors_down(tau):
            if len(sigma) == len(tau):
                col = next(r for r in range(len(tau)) if tau[r] != sigma[r])
                row[sigma] = Fraction(tau[col] * k, n + 1)
            else:
                row[sigma] = Fraction(k, n + 1)
        rows[tau] = dict(sorted(row.items()))
    return SparseStochasticMatrix(rows, n + 1, n)


def build_transition_matrix(n: int, params: Params) -> SparseStochasticMatrix:
    """Up-down kernel on compositions of ``n``: up-step then down-step."""
    if n < 1:
        raise ValueError("transition matrix needs n >= 1")
    return build_up_matrix(n, params) @ build_down_matrix(n)


def lumpability_defects(matrix: SparseStochasticMatrix, key=None) -> list:
    """States whose fiber-summed rows differ from the first state in the same fiber.

    ``key`` maps states to fibers (``ranked`` by default). An empty result means
    the chain observed through ``key`` is itself Markov.
    """
    from .compositions import ranked

    key = key or ranked
    reference: dict = {}
    defects = []
    for s in matrix.states():
        lumped: dict = {}
        for t, p in matrix.rows[s].items():
            lumped[key(t)] = lumped.get(key(t), Fraction(0)) + p
        fiber = key(s)
        if fiber not in reference:
            reference[fiber] = (s, lumped)
        elif reference[fiber][1] != lumped:
            defects.append((reference[fiber][0], s))
    return defects


# ------------------------------------------------------------ stationary law


def R(n: int, m: int, params: Params) -> Fraction:
    """Law of the last part of a size-``n`` composition under the stationary law."""
    params = _check_params(params)
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    a, t = params.alpha, params.theta
    if m == n:
        # theta cancels between m*theta and the first factor of [theta]_m
        return Fraction(rising_factorial(1 - a, n - 1)) / rising_factorial(t + 1, n - 1)
    return (
        Fraction(math.comb(n, m))
        * rising_factorial(1 - a, m - 1)
        / rising_factorial(t + n - m, m)
        * ((n - m) * a + m * t)
        / n
    )


@dataclass
class StationaryLaw:
    n: int
    weights: dict = field(repr=False)

    def __getitem__(self, sigma) -> Fraction:
        return self.weights.get(as_composition(sigma), Fraction(0))

    def items(self):
        return self.weights.items()

    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))


def stationary_weight(tau, params: Params) -> Fraction:
    """Product of ``R`` factors, peeling parts off from the right."""
    tau = as_composition(tau)
    w = Fraction(1)
    remaining = tau.size
    for part in reversed(tau):
        w *= R(remaining, part, params)
        remaining -= part
    return w


def stationary_law(n: int, params: Params) -> StationaryLaw:
    params = _check_params(params)
    if n < 0:
        raise ValueError("n must be non-negative")
    return StationaryLaw(n, {tau: stationary_weight(tau, params) for tau in enumerate_compositions(n)})


@lru_cache(maxsize=4096)
def _last_part_cdf(n: int, params: Params) -> tuple[int, tuple[int, ...]]:
    """Common denominator and integer cumulative weights of ``R(n : .)``."""
    probs = [R(n, m, params) for m in range(1, n + 1)]
    denom = math.lcm(*(p.denominator for p in probs))
    cum, acc = [], 0
    for p in probs:
        acc += p.numerator * (denom // p.denominator)
        cum.append(acc)
    if acc != denom:
        raise AssertionError(f"R({n}:.) does not sum to 1")
    return denom, tuple(cum)


def uniform_below(bound: int, rng) -> int:
    """Exact uniform integer in ``[0, bound)`` from a numpy Generator (rejection)."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    bits = (bound - 1).bit_length()
    if bits == 0:
        return 0
    nbytes = (bits + 7) // 8
    mask = (1 << bits) - 1
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "little") & mask
        if x < bound:
            return x


EXACT_SAMPLING_MAX = 64


@lru_cache(maxsize=4096)
def _last_part_cdf_float(n: int, alpha: float, theta: float) -> np.ndarray:
    """Float cumulative law of ``R(n : .)`` through log-gamma, for large ``n``."""
    m = np.arange(1, n + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logw = (
            gammaln(n + 1) - gammaln(m + 1) - gammaln(n - m + 1)
            + gammaln(m - alpha) - gammaln(1 - alpha)
            - gammaln(theta + n) + gammaln(theta + n - m)
            + np.log((n - m) * alpha + m * theta)
            - np.log(n)
        )
    # the m = n term: theta cancels against the first factor of [theta]_n
    logw[-1] = gammaln(n - alpha) - gammaln(1 - alpha) - gammaln(theta + n) + gammaln(theta + 1)
    w = np.exp(logw - logw.max())
    cum = np.cumsum(w)
    return cum / cum[-1]


def sample_stationary(n: int, params: Params, rng) -> Composition:
    """Draw from the stationary law on compositions of ``n``.

    Parts are generated right to left: the last part ``m`` has law ``R(n : .)``,
    the next one ``R(n - m : .)``, and so on until nothing remains. Sizes up to
    ``EXACT_SAMPLING_MAX`` use exact rational weights; larger ones use floats.
    """
    params = _check_params(params)
    if n < 0:
        raise ValueError("n must be non-negative")
    parts = []
    remaining = n
    a, t = float(params.alpha), float(params.theta)
    while remaining:
        if remaining > EXACT_SAMPLING_MAX:
            cum = _last_part_cdf_float(remaining, a, t)
            m = min(int(np.searchsorted(cum, rng.random(), side="right")) + 1, remaining)
        else:
            denom, cum = _last_part_cdf(remaining, params)
            x = uniform_below(denom, rng)
            m = next(i for i, c in enumerate(cum, start=1) if x < c)
        parts.append(m)
        remaining -= m
    return Composition(reversed(parts)) if parts else EMPTY
