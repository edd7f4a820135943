"""Monotone (strictly increasing) maps ``[k] -> [l]`` and the operations on them
used when summing quasisymmetric monomials over column choices."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .compositions import as_composition, falling_factorial


@dataclass(frozen=True)
class MonotoneMap:
    """A monotone map ``[k] -> [bound]``, stored by its (1-based) values."""

    values: tuple
    bound: int

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError(f"values must be strictly increasing: {vals}")
        if vals and (vals[0] < 1 or vals[-1] > self.bound):
            raise ValueError(f"values {vals} not inside [1, {self.bound}]")

    @property
    def k(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, r: int) -> int:
        """``i_r`` for 1-based ``r``."""
        return self.values[r - 1]

    def range(self) -> frozenset:
        return frozenset(self.values)

    def preimage(self, u: int) -> int:
        return self.values.index(u) + 1


def enumerate_maps(k: int, l: int) -> list[MonotoneMap]:
    """All monotone maps ``[k] -> [l]``, lexicographic in their values."""
    return [MonotoneMap(c, l) for c in combinations(range(1, l + 1), k)]


def maps_hitting(k: int, l: int, u: int) -> list[MonotoneMap]:
    """Maps with ``u`` in the range."""
    return [i for i in enumerate_maps(k, l) if u in i.values]


def maps_missing(k: int, l: int, u: int) -> list[MonotoneMap]:
    """Maps with ``u`` outside the range."""
    return [i for i in enumerate_maps(k, l) if u not in i.values]


def remove(i: MonotoneMap, u: int) -> MonotoneMap:
    """Drop ``u`` from the range (domain shrinks by one)."""
    if u not in i.values:
        raise ValueError(f"{u} is not in the range of {i.values}")
    return MonotoneMap(tuple(v for v in i.values if v != u), i.bound)


def add(i: MonotoneMap, u: int) -> MonotoneMap:
    """Add ``u`` to the range (domain grows by one)."""
    if u in i.values:
        raise ValueError(f"{u} is already in the range of {i.values}")
    if not 1 <= u <= i.bound:
        raise ValueError(f"{u} outside [1, {i.bound}]")
    return MonotoneMap(tuple(sorted(i.values + (u,))), i.bound)


def shift(i: MonotoneMap, u: int) -> MonotoneMap:
    """Close the gap at ``u``: values above ``u`` drop by one, bound drops by one."""
    if u in i.values:
        raise ValueError(f"{u} must not be in the range of {i.values}")
    return MonotoneMap(tuple(v - (v > u) for v in i.values), i.bound - 1)


def unshift(j: MonotoneMap, u: int) -> MonotoneMap:
    """Inverse of :func:`shift`: values ``>= u`` move up by one."""
    return MonotoneMap(tuple(v + (v >= u) for v in j.values), j.bound + 1)


def phi(i: MonotoneMap, u: int) -> int:
    """One plus the number of range values below ``u``; the slot of ``u`` in ``add(i, u)``."""
    return 1 + sum(v < u for v in i.values)


def h(i: MonotoneMap, rho, tau) -> int:
    """``prod_r tau_{i_r} falling rho_r``."""
    rho = as_composition(rho)
    tau = as_composition(tau)
    if len(i) != len(rho):
        raise ValueError("map domain must match the length of rho")
    out = 1
    for r, v in enumerate(i.values):
        out *= falling_factorial(tau[v - 1], rho[r])
    return out
