"""Finite unions of open subintervals of (0, 1) with exact rational endpoints.

Distances are Hausdorff distances between complements in [0, 1]. Compositions
embed by cutting (0, 1) at their normalized partial sums.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction

from .compositions import Composition, as_composition, format_rational, parse_rational
from .qsym import M, QSymElement, g, g_total, to_m_basis


@dataclass(frozen=True)
class OpenIntervalSet:
    """Ordered disjoint open intervals ``(a_1, b_1), (a_2, b_2), ...`` inside (0, 1).

    Neighbouring intervals may share an endpoint; that point is then a cut
    point of the complement. Equality compares the interval lists.
    """

    intervals: tuple = ()

    def __post_init__(self):
        ivs = tuple((Fraction(a), Fraction(b)) for a, b in self.intervals)
        prev = Fraction(0)
        for a, b in ivs:
            if not (prev <= a < b <= 1):
                raise ValueError(f"intervals must be increasing and disjoint within [0, 1]: {ivs}")
            prev = b
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def parse(cls, text: str) -> "OpenIntervalSet":
        """Parse ``"0,1/3;1/3,1"``; blank text is the empty set."""
        text = text.strip()
        if not text:
            return cls(())
        pairs = []
        for chunk in text.split(";"):
            bits = chunk.split(",")
            if len(bits) != 2:
                raise ValueError(f"bad interval {chunk!r}: expected 'a,b'")
            pairs.append((parse_rational(bits[0]), parse_rational(bits[1])))
        return cls(tuple(pairs))

    def __str__(self) -> str:
        return ";".join(f"{format_rational(a)},{format_rational(b)}" for a, b in self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def lengths(self) -> list[Fraction]:
        return [b - a for a, b in self.intervals]

    def total_length(self) -> Fraction:
        return sum(self.lengths(), Fraction(0))

    def complement(self) -> list[tuple[Fraction, Fraction]]:
        """Closed components of ``[0, 1]`` minus the set; degenerate ones are points."""
        out, left = [], Fraction(0)
        for a, b in self.intervals:
            out.append((left, a))
            left = b
        out.append((left, Fraction(1)))
        return out


EMPTY_SET = OpenIntervalSet(())
UNIT = OpenIntervalSet(((0, 1),))


def iota(sigma) -> OpenIntervalSet:
    sigma = as_composition(sigma)
    n = sigma.size
    ivs, acc = [], 0
    for p in sigma:
        ivs.append((Fraction(acc, n), Fraction(acc + p, n)))
        acc += p
    return OpenIntervalSet(tuple(ivs))


def _dist_to_closed(x: Fraction, comps, lefts) -> Fraction:
    """Distance from ``x`` to a union of sorted closed components; ``lefts`` are their left ends."""
    i = bisect.bisect_right(lefts, x) - 1
    best = None
    if i >= 0:
        best = max(x - comps[i][1], Fraction(0))
    if i + 1 < len(comps):
        right = comps[i + 1][0] - x
        best = right if best is None or right < best else best
    return best


def _directed(U: OpenIntervalSet, V: OpenIntervalSet) -> Fraction:
    """``sup_{x in U^c} d(x, V^c)``.

    ``d(., V^c)`` is a tent over each interval of ``V``, so on a closed
    component of ``U^c`` the sup sits at an endpoint or at a tent peak.
    """
    Vc = V.complement()
    lefts = [c for c, _ in Vc]
    peaks = [(a + b) / 2 for a, b in V.intervals]
    best = Fraction(0)
    for c, d in U.complement():
        lo, hi = bisect.bisect_left(peaks, c), bisect.bisect_right(peaks, d)
        for x in [c, d] + peaks[lo:hi]:
            dist = _dist_to_closed(x, Vc, lefts)
            if dist > best:
                best = dist
    return best


def hausdorff(U: OpenIntervalSet, V: OpenIntervalSet) -> Fraction:
    """Exact Hausdorff distance between the complements of ``U`` and ``V``."""
    return max(_directed(U, V), _directed(V, U))


# ------------------------------------------------------------ approximation


def _excluded_ranges(U: OpenIntervalSet, n: int) -> list[tuple[int, int]]:
    """Grid indices ``j`` with ``j/n`` farther than ``1/n`` from the complement.

    Inside ``(a, b)`` that means ``na + 1 < j < nb - 1``.
    """
    out = []
    for a, b in U.intervals:
        lo = max(math.floor(n * a) + 2, 1)
        hi = min(math.ceil(n * b) - 2, n - 1)
        if lo <= hi:
            out.append((lo, hi))
    return out


def approximate_runs(U: OpenIntervalSet, n: int) -> list[tuple[int, int]]:
    """Parts of the grid composition as ``(part, multiplicity)`` runs, left to right."""
    if n < 1:
        raise ValueError("n must be at least 1")
    runs = []
    prev = 0
    for lo, hi in _excluded_ranges(U, n):
        if lo - 1 > prev:
            runs.append((1, lo - 1 - prev))
        runs.append((hi + 1 - max(lo - 1, prev), 1))
        prev = hi + 1
    if n > prev:
        runs.append((1, n - prev))
    return runs


def approximate_composition(U: OpenIntervalSet, n: int) -> Composition:
    """The composition of ``n`` whose embedding is :func:`approximate` ``(U, n)``."""
    parts = []
    for p, mult in approximate_runs(U, n):
        parts.extend([p] * mult)
    return Composition(parts)


def approximate(U: OpenIntervalSet, n: int) -> OpenIntervalSet:
    """Cut (0, 1) at every ``j/n`` within ``1/n`` of the complement of ``U``."""
    return iota(approximate_composition(U, n))


# --------------------------------------------------------------- evaluation


def _dp_exact(sigma, xs) -> Fraction:
    k = len(sigma)
    ways = [Fraction(1)] + [Fraction(0)] * k
    for x in xs:
        for r in range(k, 0, -1):
            if ways[r - 1]:
                ways[r] += ways[r - 1] * x ** sigma[r - 1]
    return ways[k]


def _dp_runs(sigma, runs, n: int, exact: bool = False):
    """Monotone-map power sum over run-length encoded variables ``part / n``."""
    k = len(sigma)
    one = Fraction(1) if exact else 1.0
    ways = [one] + [0 * one] * k
    for part, mult in runs:
        x = Fraction(part, n) if exact else part / n
        new = ways[:]
        for j in range(1, k + 1):
            prod = one
            for t in range(1, min(j, mult) + 1):
                prod *= x ** sigma[j - t]
                new[j] += math.comb(mult, t) * ways[j - t] * prod
        ways = new
    return ways[k]


class NotConverged(RuntimeError):
    pass


def _lagrange_at_zero(xs, ys) -> Fraction:
    total = Fraction(0)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        w = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                w *= xj / (xj - xi)
        total += yi * w
    return total


def _extrapolated_limit(sigma, U: OpenIntervalSet) -> Fraction:
    """Exact limit of the grid values along ``n = L m``.

    With ``L`` the common denominator of the endpoints, every endpoint is a grid
    point, the run lengths are affine in ``n`` and the normalized monomial is a
    polynomial of degree at most ``|sigma|`` in ``1/n``. Fitting it on two
    overlapping windows and requiring the same value at ``1/n = 0`` guards the
    argument.
    """
    L = math.lcm(*(x.denominator for iv in U.intervals for x in iv)) if U.intervals else 1
    shortest = min((b - a for a, b in U.intervals), default=Fraction(1))
    m0 = max(1, math.ceil(8 / (L * shortest)))
    deg = sigma.size
    ns = [L * (m0 + i) for i in range(deg + 2)]
    ys = [_dp_runs(sigma, approximate_runs(U, n), n, exact=True) for n in ns]
    xs = [Fraction(1, n) for n in ns]
    first = _lagrange_at_zero(xs[:-1], ys[:-1])
    if first != _lagrange_at_zero(xs[1:], ys[1:]):
        raise NotConverged(f"grid values for m^o_{tuple(sigma)} are not polynomial in 1/n on {U}")
    return first


def eval_mo(sigma, U: OpenIntervalSet, method: str = "exact", eps: float = 1e-9, n_start: int = 64, n_cap: int = 2**20):
    """``m_sigma^o(U)``.

    When the interval lengths sum to 1 the value is the closed-form sum over
    monotone maps. Otherwise it is the limit of the normalized monomial along
    the grid approximations of ``U``:

    * ``method="exact"`` extrapolates that limit exactly (a Fraction);
    * ``method="grid"`` doubles ``n`` from ``n_start`` until two successive
      float values differ by less than ``eps``, raising :class:`NotConverged`
      once ``n`` would pass ``n_cap``. The error decays like ``1/n``.
    """
    sigma = as_composition(sigma)
    if not sigma:
        return Fraction(1)
    if U.total_length() == 1:
        return _dp_exact(sigma, U.lengths())
    if method == "exact":
        return _extrapolated_limit(sigma, U)
    if method != "grid":
        raise ValueError(f"unknown method {method!r}")
    # grid rounding can make neighbouring doublings agree by accident, so two
    # consecutive small changes are required
    n = n_start
    prev = _dp_runs(sigma, approximate_runs(U, n), n)
    calm = 0
    while n * 2 <= n_cap:
        n *= 2
        cur = _dp_runs(sigma, approximate_runs(U, n), n)
        calm = calm + 1 if abs(cur - prev) < eps else 0
        prev = cur
        if calm == 2:
            return cur
    raise NotConverged(f"m^o_{tuple(sigma)} did not settle to {eps} by n = {n}; last value {prev}")


def eval_psi(q: QSymElement, U: OpenIntervalSet, **kwargs):
    total = 0
    for sigma, c in to_m_basis(q).items():
        v = eval_mo(sigma, U, **kwargs)
        total += c * v if isinstance(v, Fraction) else float(c) * v
    return total


def projection_value(q: QSymElement, tau) -> Fraction:
    """``(G_n q)_n(tau)`` with ``n = |tau|``: degree-``d`` terms scaled by ``n^-d``."""
    from .qsym import eval_monomial

    tau = as_composition(tau)
    n = tau.size
    total = Fraction(0)
    for sigma, c in to_m_basis(q).items():
        total += c * Fraction(eval_monomial(sigma, tau), n ** sigma.size)
    return total


def ranked_lengths(U: OpenIntervalSet) -> tuple:
    return tuple(sorted(U.lengths(), reverse=True))


def monomial_convergence_check(mu, sequence, limit: OpenIntervalSet, start: int = 1) -> list:
    """``(index, g(mu, s) / g(s), |ratio - m_mu^o(limit)|)`` along a composition sequence."""
    mu = as_composition(mu)
    target = eval_mo(mu, limit)
    out = []
    for idx, sigma in enumerate(sequence, start=start):
        sigma = as_composition(sigma)
        ratio = Fraction(g(mu, sigma), g_total(sigma))
        out.append((idx, ratio, abs(ratio - target)))
    return out


__all__ = [
    "EMPTY_SET",
    "M",
    "NotConverged",
    "OpenIntervalSet",
    "UNIT",
    "approximate",
    "approximate_composition",
    "approximate_runs",
    "eval_mo",
    "eval_psi",
    "hausdorff",
    "iota",
    "monomial_convergence_check",
    "projection_value",
    "ranked_lengths",
]
