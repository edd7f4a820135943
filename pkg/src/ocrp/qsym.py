"""Quasisymmetric functions indexed by compositions, with exact coefficients.

Two bases are supported: the monomials ``m_sigma`` and the factorial monomials
``m*_sigma`` in which every power ``y^b`` is replaced by the falling power
``y(y-1)...(y-b+1)``. Elements act on compositions ``tau`` by substituting the
parts of ``tau`` for the first ``len(tau)`` variables.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .compositions import (
    EMPTY,
    Composition,
    as_composition,
    enumerate_compositions,
    falling_factorial,
    format_composition,
    format_rational,
    multinomial_of,
    parse_composition,
    parse_rational,
)

M = "m"
MSTAR = "mstar"
_BASES = (M, MSTAR)


def _sort_key(sigma):
    return (sum(sigma), tuple(sigma))


class QSymElement:
    """Finite linear combination of ``m`` or ``m*`` basis elements.

    Zero coefficients are never stored, so equality is structural within one
    basis; elements in different bases are compared after conversion.
    """

    __slots__ = ("basis", "_coeffs")

    def __init__(self, coeffs=None, basis: str = M):
        if basis not in _BASES:
            raise ValueError(f"basis must be one of {_BASES}, got {basis!r}")
        clean = {}
        for sigma, c in (coeffs or {}).items():
            sigma = as_composition(sigma)
            c = Fraction(c)
            if c:
                clean[sigma] = clean.get(sigma, Fraction(0)) + c
        self.basis = basis
        self._coeffs = {s: clean[s] for s in sorted(clean, key=_sort_key) if clean[s]}

    @classmethod
    def monomial(cls, sigma, basis: str = M, coef=1) -> "QSymElement":
        return cls({as_composition(sigma): coef}, basis)

    @classmethod
    def one(cls, basis: str = M) -> "QSymElement":
        return cls({EMPTY: 1}, basis)

    @property
    def coeffs(self) -> dict:
        return dict(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def __getitem__(self, sigma) -> Fraction:
        return self._coeffs.get(as_composition(sigma), Fraction(0))

    def __iter__(self):
        return iter(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def degree(self) -> int:
        """Largest size in the support (-1 for the zero element)."""
        return max((s.size for s in self._coeffs), default=-1)

    def _same_basis(self, other: "QSymElement") -> "QSymElement":
        if other.basis == self.basis:
            return other
        return to_m_basis(other) if self.basis == M else to_mstar_basis(other)

    def __add__(self, other):
        if not isinstance(other, QSymElement):
            return NotImplemented
        other = self._same_basis(other)
        out = dict(self._coeffs)
        for s, c in other.items():
            out[s] = out.get(s, Fraction(0)) + c
        return QSymElement(out, self.basis)

    def __neg__(self):
        return QSymElement({s: -c for s, c in self.items()}, self.basis)

    def __sub__(self, other):
        if not isinstance(other, QSymElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, QSymElement):
            out = quasi_shuffle(self, other)
            return out if self.basis == M else to_mstar_basis(out)
        if isinstance(other, (int, Fraction)):
            return QSymElement({s: c * other for s, c in self.items()}, self.basis)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, QSymElement):
            return NotImplemented
        return self._coeffs == self._same_basis(other)._coeffs

    def __hash__(self):
        return hash((self.basis, tuple(self._coeffs.items())))

    def __repr__(self):
        if not self._coeffs:
            return f"QSymElement(0, basis={self.basis!r})"
        name = "m" if self.basis == M else "m*"
        terms = " + ".join(f"{format_rational(c)}*{name}({format_composition(s)})" for s, c in self.items())
        return f"QSymElement({terms})"

    def to_json(self) -> dict:
        return {
            "basis": self.basis,
            "terms": [{"comp": format_composition(s), "coef": format_rational(c)} for s, c in self.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "QSymElement":
        return cls(
            {parse_composition(t["comp"]): parse_rational(t["coef"]) for t in data["terms"]},
            data["basis"],
        )


# ---------------------------------------------------------------- evaluation


def _monotone_power_sum(sigma, tau, power) -> int:
    """``sum over monotone i of prod_r power(tau_{i_r}, sigma_r)`` by dynamic programming."""
    k = len(sigma)
    if k > len(tau):
        return 0
    ways = [1] + [0] * k
    for t in tau:
        for r in range(k, 0, -1):
            if ways[r - 1]:
                ways[r] += ways[r - 1] * power(t, sigma[r - 1])
    return ways[k]


def eval_monomial(sigma, tau) -> int:
    """``(m_sigma)(tau)``."""
    return _monotone_power_sum(as_composition(sigma), as_composition(tau), pow)


def eval_mstar(sigma, tau) -> int:
    """``(m*_sigma)(tau)``, falling powers in place of powers."""
    return _monotone_power_sum(as_composition(sigma), as_composition(tau), falling_factorial)


def eval_basis(basis: str, sigma, tau) -> int:
    return eval_monomial(sigma, tau) if basis == M else eval_mstar(sigma, tau)


def eval(q: QSymElement, tau) -> Fraction:
    tau = as_composition(tau)
    return sum((c * eval_basis(q.basis, s, tau) for s, c in q.items()), Fraction(0))


# ------------------------------------------------------------ path counting


def enumerate_B(sigma, tau) -> list[tuple[int, ...]]:
    """Box selections ``b`` with ``tau - b`` equal to ``sigma`` once zeros are dropped."""
    sigma = as_composition(sigma)
    tau = as_composition(tau)
    out = []

    def walk(u, j, acc):
        if u == len(tau):
            if j == len(sigma):
                out.append(tuple(acc))
            return
        t = tau[u]
        acc.append(t)  # column vanishes entirely
        walk(u + 1, j, acc)
        acc.pop()
        if j < len(sigma) and t >= sigma[j]:
            acc.append(t - sigma[j])  # column survives as part j of sigma
            walk(u + 1, j + 1, acc)
            acc.pop()

    walk(0, 0, [])
    return sorted(out)


def g(sigma, tau) -> int:
    """Number of paths from ``sigma`` to ``tau`` in the composition graph."""
    sigma = as_composition(sigma)
    tau = as_composition(tau)
    d = tau.size - sigma.size
    if d < 0:
        return 0
    total = 0
    for b in enumerate_B(sigma, tau):
        term = math.factorial(d)
        for x in b:
            term //= math.factorial(x)
        total += term
    return total


def g_total(tau) -> int:
    """Paths from the empty composition: ``|tau|! / prod tau_r!``."""
    return multinomial_of(as_composition(tau))


# ----------------------------------------------------------- basis changes


@lru_cache(maxsize=None)
def stirling1(n: int, k: int) -> int:
    """Signed Stirling number of the first kind: ``y falling n = sum_k s(n,k) y^k``."""
    if n == k:
        return 1
    if n == 0 or k == 0 or k > n:
        return 0
    return stirling1(n - 1, k - 1) - (n - 1) * stirling1(n - 1, k)


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind: ``y^n = sum_k S(n,k) y falling k``."""
    if n == k:
        return 1
    if n == 0 or k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


# warm the tables up to part size 32
for _n in range(33):
    for _k in range(_n + 1):
        stirling1(_n, _k)
        stirling2(_n, _k)


def _partwise_expand(sigma, table) -> dict:
    out = {}
    for e in product(*(range(1, p + 1) for p in sigma)):
        coef = 1
        for p, x in zip(sigma, e):
            coef *= table(p, x)
        if coef:
            out[Composition(e)] = coef
    return out


def to_m_basis(q: QSymElement) -> QSymElement:
    if q.basis == M:
        return q
    out: dict = {}
    for sigma, c in q.items():
        for e, coef in _partwise_expand(sigma, stirling1).items():
            out[e] = out.get(e, Fraction(0)) + c * coef
    return QSymElement(out, M)


def to_mstar_basis(q: QSymElement) -> QSymElement:
    if q.basis == MSTAR:
        return q
    out: dict = {}
    for sigma, c in q.items():
        for e, coef in _partwise_expand(sigma, stirling2).items():
            out[e] = out.get(e, Fraction(0)) + c * coef
    return QSymElement(out, MSTAR)


# --------------------------------------------------------------- products


@lru_cache(maxsize=100_000)
def _shuffle_words(u: tuple, v: tuple) -> tuple:
    """Overlapping shuffle of two compositions as ``((word, multiplicity), ...)``."""
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    acc: dict = {}
    for head, rest in (
        (u[0], _shuffle_words(u[1:], v)),
        (v[0], _shuffle_words(u, v[1:])),
        (u[0] + v[0], _shuffle_words(u[1:], v[1:])),
    ):
        for w, c in rest:
            key = (head,) + w
            acc[key] = acc.get(key, 0) + c
    return tuple(acc.items())


def quasi_shuffle(q1: QSymElement, q2: QSymElement) -> QSymElement:
    """Product of two quasisymmetric functions, returned in the ``m`` basis."""
    q1 = to_m_basis(q1)
    q2 = to_m_basis(q2)
    out: dict = {}
    for s1, c1 in q1.items():
        for s2, c2 in q2.items():
            for w, mult in _shuffle_words(tuple(s1), tuple(s2)):
                key = Composition(w)
                out[key] = out.get(key, Fraction(0)) + c1 * c2 * mult
    return QSymElement(out, M)


# ---------------------------------------------------------- reconstruction


def reconstruct_from_actions(evaluations, k: int) -> QSymElement:
    """Recover ``q`` of degree at most ``k`` from its values ``q_n(tau)``.

    ``evaluations(n, tau)`` must return ``q_n(tau)`` for ``tau`` of size ``n``.
    Coefficients in the ``m*`` basis are solved for degree by degree using
    ``(m*_sigma)(sigma) = |sigma|! / g(sigma)`` and the vanishing of
    ``(m*_sigma)(tau)`` when ``|tau| <= |sigma|``, ``tau != sigma``. The values
    on level ``k + 1`` are then checked; a nonzero residual there means the
    evaluations do not come from an element of degree at most ``k``.
    """
    if k < 0:
        raise ValueError("degree bound must be non-negative")
    coeffs: dict = {}
    for d in range(k + 1):
        found = {}
        for tau in enumerate_compositions(d):
            residual = Fraction(evaluations(d, tau)) - sum(
                (c * eval_mstar(s, tau) for s, c in coeffs.items()), Fraction(0)
            )
            if residual:
                found[tau] = residual * g_total(tau) / math.factorial(d)
        coeffs.update(found)
    q = QSymElement(coeffs, MSTAR)
    for tau in enumerate_compositions(k + 1):
        if Fraction(evaluations(k + 1, tau)) != eval(q, tau):
            raise ValueError(f"evaluations are not of degree <= {k}: mismatch at {tau}")
    return q
