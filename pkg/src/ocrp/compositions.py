"""Integer compositions, their box-diagram operations, and exact rational helpers.

A composition is an ordered tuple of positive integers. Thinking of part ``j``
as a column of ``sigma[j]`` boxes, the up-step of the ordered restaurant either
*stacks* a box on a column or *inserts* a new one-box column; the down-step
undoes one of those moves. Indices in this module are 1-based to match the
usual column numbering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Union

Rational = Union[int, Fraction]


class Composition(tuple):
    """Immutable tuple of positive integers.

    Being a ``tuple`` subclass, compositions hash, compare structurally and
    sort lexicographically, so they can key dictionaries deterministically.
    """

    __slots__ = ()

    def __new__(cls, parts=()):
        parts = tuple(int(p) for p in parts)
        for p in parts:
            if p < 1:
                raise ValueError(f"composition parts must be positive, got {parts}")
        return super().__new__(cls, parts)

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def __repr__(self) -> str:
        return f"Composition({tuple(self)!r})"

    def __str__(self) -> str:
        return format_composition(self)


EMPTY = Composition()


def as_composition(obj) -> Composition:
    if isinstance(obj, Composition):
        return obj
    if isinstance(obj, str):
        return parse_composition(obj)
    return Composition(obj)


def parse_composition(text: str) -> Composition:
    """Parse ``"2,3,1"``; the empty (or blank) string is the empty composition."""
    text = text.strip()
    if not text:
        return EMPTY
    try:
        return Composition(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad composition {text!r}: {exc}") from None


def format_composition(sigma) -> str:
    return ",".join(str(p) for p in sigma)


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a decimal string into an exact Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational {text!r}: {exc}") from None


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_decimal(x) -> str:
    """Decimal rendering at 12 significant digits."""
    return format(float(x), ".12g")


@dataclass(frozen=True)
class Params:
    """The (alpha, theta) pair, held as exact rationals."""

    alpha: Fraction
    theta: Fraction

    def __post_init__(self):
        a = parse_rational(self.alpha)
        t = parse_rational(self.theta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "theta", t)
        if not 0 <= a < 1:
            raise ValueError(f"alpha must satisfy 0 <= alpha < 1, got {a}")
        if t < 0:
            raise ValueError(f"theta must satisfy theta >= 0, got {t}")
        if a + t <= 0:
            raise ValueError(f"alpha + theta must be positive, got {a} + {t}")

    def __str__(self) -> str:
        return f"(alpha={format_rational(self.alpha)}, theta={format_rational(self.theta)})"


# ---------------------------------------------------------------- operations


def _check_index(i: int, lo: int, hi: int, what: str) -> None:
    if not lo <= i <= hi:
        raise IndexError(f"{what} index {i} out of range [{lo}, {hi}]")


def stack(sigma, k: int) -> Composition:
    """Add one box on top of column ``k``."""
    sigma = as_composition(sigma)
    _check_index(k, 1, len(sigma), "stack")
    return Composition(sigma[: k - 1] + (sigma[k - 1] + 1,) + sigma[k:])


def insert(sigma, s: int) -> Composition:
    """Insert a one-box column so that it becomes column ``s``."""
    sigma = as_composition(sigma)
    _check_index(s, 1, len(sigma) + 1, "insert")
    return Composition(sigma[: s - 1] + (1,) + sigma[s - 1 :])


def unstack(tau, k: int) -> Composition:
    tau = as_composition(tau)
    _check_index(k, 1, len(tau), "unstack")
    if tau[k - 1] < 2:
        raise ValueError(f"unstack needs part {k} of {tau} to be at least 2")
    return Composition(tau[: k - 1] + (tau[k - 1] - 1,) + tau[k:])


def uninsert(tau, u: int) -> Composition:
    tau = as_composition(tau)
    _check_index(u, 1, len(tau), "uninsert")
    if tau[u - 1] != 1:
        raise ValueError(f"uninsert needs part {u} of {tau} to equal 1")
    return Composition(tau[: u - 1] + tau[u:])


def replace_with_single(tau, k: int) -> Composition:
    tau = as_composition(tau)
    _check_index(k, 1, len(tau), "replace_with_single")
    return Composition(tau[: k - 1] + (1,) + tau[k:])


def remove_box(tau, k: int) -> Composition:
    """Remove the top box of column ``k``, dropping the column if it empties."""
    tau = as_composition(tau)
    return uninsert(tau, k) if tau[k - 1] == 1 else unstack(tau, k)


def kappa(sigma, tau) -> int:
    """Number of stack/insert moves that turn ``sigma`` into ``tau``."""
    sigma = as_composition(sigma)
    tau = as_composition(tau)
    if tau.size != sigma.size + 1:
        return 0
    count = 0
    if len(tau) == len(sigma):
        count += sum(stack(sigma, r) == tau for r in range(1, len(sigma) + 1))
    elif len(tau) == len(sigma) + 1:
        count += sum(insert(sigma, s) == tau for s in range(1, len(sigma) + 2))
    return count


def insertion_classes(sigma) -> list[tuple[int, int]]:
    """Group insertion positions ``1..len+1`` into classes giving equal results.

    Returns ``(c, size)`` per class where ``c`` is the canonical (smallest)
    position, i.e. ``c == 1`` or ``sigma[c-1] != 1`` in 1-based terms.
    """
    sigma = as_composition(sigma)
    classes = []
    for s in range(1, len(sigma) + 2):
        if s > 1 and sigma[s - 2] == 1:
            c, size = classes[-1]
            classes[-1] = (c, size + 1)
        else:
            classes.append((s, 1))
    return classes


def uninsertion_classes(tau) -> list[tuple[int, int]]:
    """Group positions ``u`` with ``tau_u == 1`` by the result of uninsertion.

    Each run of consecutive ones is one class; returns ``(c, run_length)``
    with ``c`` the first position of the run.
    """
    tau = as_composition(tau)
    classes = []
    for u in range(1, len(tau) + 1):
        if tau[u - 1] != 1:
            continue
        if classes and u >= 2 and tau[u - 2] == 1:
            c, size = classes[-1]
            classes[-1] = (c, size + 1)
        else:
            classes.append((u, 1))
    return classes


def neighbors_up(sigma) -> list[tuple[Composition, int, bool]]:
    """Distinct successors ``tau`` of ``sigma`` with ``kappa(sigma, tau)``.

    Stacking targets come first (by column), then one entry per insertion
    class. The flag is True only for the class containing position 1.
    """
    sigma = as_composition(sigma)
    out = [(stack(sigma, r), 1, False) for r in range(1, len(sigma) + 1)]
    for c, size in insertion_classes(sigma):
        out.append((insert(sigma, c), size, c == 1))
    return out


def neighbors_down(tau) -> list[tuple[Composition, int]]:
    """Distinct predecessors ``sigma`` of ``tau`` with ``kappa(sigma, tau)``."""
    tau = as_composition(tau)
    out = [(unstack(tau, k), 1) for k in range(1, len(tau) + 1) if tau[k - 1] >= 2]
    for c, size in uninsertion_classes(tau):
        out.append((uninsert(tau, c), size))
    return out


@lru_cache(maxsize=64)
def _enumerate_cached(n: int) -> tuple[Composition, ...]:
    if n == 0:
        return (EMPTY,)
    comps = []
    for k in range(n):
        for cuts in combinations(range(1, n), k):
            bounds = (0,) + cuts + (n,)
            comps.append(Composition(b - a for a, b in zip(bounds, bounds[1:])))
    comps.sort()
    return tuple(comps)


def enumerate_compositions(n: int) -> list[Composition]:
    """All compositions of ``n`` in lexicographic order (``[()]`` for n = 0)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return list(_enumerate_cached(n))


def compositions_up_to(k: int) -> list[Composition]:
    """Degree-major, then lexicographic, list of all compositions of size <= k."""
    return [c for m in range(k + 1) for c in _enumerate_cached(m)]


def iter_compositions(n: int) -> Iterator[Composition]:
    yield from _enumerate_cached(n)


def ranked(sigma) -> tuple[int, ...]:
    """Parts sorted into non-increasing order."""
    return tuple(sorted(sigma, reverse=True))


def falling_factorial(x: Rational, b: int):
    """``x (x-1) ... (x-b+1)``, the empty product being 1."""
    if b < 0:
        raise ValueError("b must be non-negative")
    out = 1
    for j in range(b):
        out *= x - j
    return out


def rising_factorial(a: Rational, n: int):
    """``a (a+1) ... (a+n-1)``, the empty product being 1."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = 1
    for j in range(n):
        out *= a + j
    return out


def multinomial_of(sigma) -> int:
    """``|sigma|! / prod sigma_r!``."""
    out = math.factorial(sum(sigma))
    for p in sigma:
        out //= math.factorial(p)
    return out
