"""Monte Carlo engine for the ordered CRP up-down chain.

Table sizes sit in a numba-compiled implicit treap, so each up- or down-step
costs O(log k) for k tables. Randomness comes from numpy ``PCG64`` streams
keyed by ``(seed, trajectory index)``; the initial state is an exact draw from
the stationary law unless a start composition is given.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

import numpy as np

from ..compositions import Composition, Params, as_composition, enumerate_compositions
from ..kernels import StationaryLaw, sample_stationary, stationary_law
from . import _treap as tp

CHUNK = 1 << 18


def trajectory_rng(seed: int, traj: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(traj)])))


class ChainState:
    """Ordered table sizes plus the (float) parameters driving the dynamics."""

    def __init__(self, comp, params: Params, capacity: Optional[int] = None):
        comp = as_composition(comp)
        self.params = params
        self.alpha = float(params.alpha)
        self.theta = float(params.theta)
        cap = capacity if capacity is not None else comp.size + 2
        self._arrays = tp.allocate(max(cap, len(comp) + 2))
        for j, p in enumerate(comp):
            tp.insert_at(*self._arrays, j, p)

    def _root_field(self, row: int) -> int:
        T, _, meta = self._arrays
        return int(T[row, meta[tp.ROOT]])

    @property
    def n(self) -> int:
        return self._root_field(tp.SUM)

    @property
    def num_tables(self) -> int:
        return self._root_field(tp.CNT)

    @property
    def largest(self) -> int:
        return self._root_field(tp.MAX)

    @property
    def sum_of_squares(self) -> int:
        return int(self._arrays[-1][tp.SUMSQ])

    def composition(self) -> Composition:
        return Composition(self.sizes().tolist())

    def sizes(self) -> np.ndarray:
        T, _, meta = self._arrays
        return tp.to_array(T, meta)

    def check(self) -> None:
        """Recompute every subtree aggregate and compare (debug helper)."""
        T, _, meta = self._arrays
        L, R, P, V, C, S, X = T

        def walk(t):
            if t == 0:
                return 0, 0, 0
            c1, s1, x1 = walk(L[t])
            c2, s2, x2 = walk(R[t])
            if V[t] < 1:
                raise AssertionError(f"table of size {V[t]}")
            agg = (1 + c1 + c2, V[t] + s1 + s2, max(V[t], x1, x2))
            if agg != (C[t], S[t], X[t]):
                raise AssertionError(f"stale aggregate at node {t}")
            for child in (L[t], R[t]):
                if child and P[child] > P[t]:
                    raise AssertionError("heap order violated")
            return agg

        walk(int(meta[tp.ROOT]))
        sizes = self.sizes()
        if int((sizes * sizes).sum()) != self.sum_of_squares:
            raise AssertionError("sum of squares out of sync")

    def m2(self) -> float:
        n = self.n
        return (self.sum_of_squares - n) / (n * (n - 1)) if n >= 2 else 0.0

    def stats(self) -> dict:
        n = self.n
        return {"m2": self.m2(), "num_blocks": self.num_tables, "largest": self.largest / n if n else 0.0}

    def _grow(self):
        if self._arrays[-1][tp.FREE_TOP] > 0:
            return
        comp = self.composition()
        self._arrays = tp.allocate(2 * (comp.size + 2))
        for j, p in enumerate(comp):
            tp.insert_at(*self._arrays, j, p)


def step_up(state: ChainState, rng: np.random.Generator) -> int:
    """Seat one customer; returns the 1-based position of the affected table."""
    state._grow()
    return 1 + int(tp.step_up(*state._arrays, rng.random(), state.alpha, state.theta))


def step_down(state: ChainState, rng: np.random.Generator) -> int:
    """Remove a uniform customer; returns the 1-based position of the affected table."""
    if state.n < 1:
        raise ValueError("no customer to remove")
    return 1 + int(tp.step_down(*state._arrays, rng.random()))


def step(state: ChainState, rng: np.random.Generator) -> None:
    n = state.n
    step_up(state, rng)
    step_down(state, rng)
    if state.n != n:
        raise AssertionError("composed step changed the number of customers")


def advance(state: ChainState, steps: int, rng: np.random.Generator) -> None:
    """``steps`` composed steps inside compiled code, drawing uniforms in chunks."""
    remaining = int(steps)
    while remaining > 0:
        batch = min(remaining, CHUNK)
        tp.run_steps(*state._arrays, rng.random(2 * batch), state.alpha, state.theta)
        remaining -= batch


# ---------------------------------------------------------------- trajectories


@dataclass
class TrajectoryRecord:
    t: float
    step: int
    comp: Optional[Composition]
    stats: dict
    traj: int = 0
    n: int = 0

    def to_json(self) -> str:
        out = {"traj": self.traj, "t": self.t, "step": self.step, "n": self.n}
        if self.comp is not None:
            out["comp"] = list(self.comp)
        out["stats"] = self.stats
        return json.dumps(out, separators=(",", ":"))


def _as_time(t) -> Fraction:
    return t if isinstance(t, Fraction) else Fraction(repr(t) if isinstance(t, float) else str(t))


def steps_at(n: int, t) -> int:
    """``floor(n^2 t)`` computed exactly from the decimal form of ``t``."""
    return math.floor(n * n * _as_time(t))


def initial_state(n: int, params: Params, rng, start=None) -> ChainState:
    comp = as_composition(start) if start is not None else sample_stationary(n, params, rng)
    if comp.size != n:
        raise ValueError(f"start composition has size {comp.size}, expected {n}")
    return ChainState(comp, params)


def run(
    n: int,
    params: Params,
    t_max,
    record_times: Iterable,
    seed: int,
    traj: int = 0,
    start=None,
    keep_comp: bool = True,
) -> list[TrajectoryRecord]:
    """One trajectory over ``floor(n^2 t_max)`` composed steps, recorded at rescaled times."""
    if n < 1:
        raise ValueError("n must be at least 1")
    times = [_as_time(t) for t in record_times]
    tmax = _as_time(t_max)
    if any(b < a for a, b in zip(times, times[1:])) or any(not 0 <= t <= tmax for t in times):
        raise ValueError("record_times must be sorted inside [0, t_max]")
    rng = trajectory_rng(seed, traj)
    state = initial_state(n, params, rng, start)
    records, done = [], 0
    for t in times:
        target = steps_at(n, t)
        advance(state, target - done, rng)
        done = target
        records.append(
            TrajectoryRecord(float(t), done, state.composition() if keep_comp else None, state.stats(), traj, n)
        )
    advance(state, steps_at(n, tmax) - done, rng)
    return records


def record_grid(t_max, every) -> list[Fraction]:
    tmax, dt = _as_time(t_max), _as_time(every)
    if dt <= 0:
        raise ValueError("record interval must be positive")
    return [k * dt for k in range(int(tmax / dt) + 1)]


def simulate(
    n: int,
    params: Params,
    t_max,
    record_every,
    samples: int,
    seed: int,
    keep_comp: bool = True,
    start=None,
) -> Iterator[TrajectoryRecord]:
    """Independent trajectories in index order; each owns its own RNG stream."""
    grid = record_grid(t_max, record_every)
    for traj in range(samples):
        yield from run(n, params, t_max, grid, seed, traj=traj, start=start, keep_comp=keep_comp)


def write_jsonl(records: Iterable[TrajectoryRecord], fh) -> int:
    count = 0
    for rec in records:
        fh.write(rec.to_json() + "\n")
        count += 1
    return count


# ---------------------------------------------------------------- statistics


def decode_cut_code(code: int, n: int) -> Composition:
    parts, last = [], 0
    for s in range(1, n):
        if code >> (s - 1) & 1:
            parts.append(s - last)
            last = s
    parts.append(n - last)
    return Composition(parts)


def _histogram_to_law(hist: np.ndarray, n: int) -> dict:
    total = hist.sum()
    return {decode_cut_code(int(c), n): hist[c] / total for c in np.flatnonzero(hist)}


def empirical_distribution(n: int, params: Params, num_steps: int, seed: int, start=None) -> dict:
    """Occupation frequencies of a single stationary-started run."""
    if not 1 <= n <= 20:
        raise ValueError("empirical_distribution tabulates states and needs 1 <= n <= 20")
    rng = trajectory_rng(seed, 0)
    state = initial_state(n, params, rng, start)
    hist = np.zeros(1 << (n - 1), np.int64)
    remaining = int(num_steps)
    while remaining > 0:
        batch = min(remaining, CHUNK)
        tp.run_histogram(*state._arrays, rng.random(2 * batch), state.alpha, state.theta, hist)
        remaining -= batch
    return _histogram_to_law(hist, n)


def one_step_distribution(start, params: Params, samples: int, seed: int, mode: str = "updown") -> dict:
    """Empirical law of one ``up``, ``down`` or ``updown`` transition from ``start``."""
    start = as_composition(start)
    code = {"up": 0, "down": 1, "updown": 2}[mode]
    n_out = start.size + (1 if mode == "up" else -1 if mode == "down" else 0)
    if n_out < 1:
        raise ValueError("the resulting level must be at least 1")
    rng = trajectory_rng(seed, 0)
    state = ChainState((), params, capacity=start.size + 4)
    hist = np.zeros(1 << (n_out - 1), np.int64)
    per = 2 if code == 2 else 1
    tp.one_step_histogram(
        *state._arrays, np.array(start, np.int64), code, rng.random(per * samples), state.alpha, state.theta, hist
    )
    return _histogram_to_law(hist, n_out)


def tv_distance(empirical: dict, exact) -> float:
    """Total variation distance; ``exact`` is a StationaryLaw or a mapping of probabilities."""
    exact_items = dict(exact.items()) if isinstance(exact, StationaryLaw) else dict(exact)
    keys = set(empirical) | set(exact_items)
    return 0.5 * sum(abs(float(empirical.get(k, 0.0)) - float(exact_items.get(k, 0))) for k in keys)


def m2_stat(sigma) -> Fraction:
    sigma = as_composition(sigma)
    n = sigma.size
    if n < 2:
        raise ValueError("m2_stat needs |sigma| >= 2")
    return Fraction(sum(p * (p - 1) for p in sigma), n * (n - 1))


def stationary_m2_expectation(n: int, params: Params) -> Fraction:
    """Stationary mean of :func:`m2_stat`; the falling factorial in ``n`` cancels."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return (1 - params.alpha) / (1 + params.theta)


def stationary_m2_by_summation(n: int, params: Params) -> Fraction:
    law = stationary_law(n, params)
    return sum((w * m2_stat(s) for s, w in law.items()), Fraction(0))


def endpoint_m2(n: int, params: Params, steps: int, samples: int, seed: int) -> np.ndarray:
    """``m2_stat`` after ``steps`` composed steps for independent stationary starts."""
    out = np.empty(samples)
    for traj in range(samples):
        rng = trajectory_rng(seed, traj)
        state = initial_state(n, params, rng)
        advance(state, steps, rng)
        out[traj] = state.m2()
    return out


def largest_jump(n: int, params: Params, t_max, seed: int, samples: int = 1) -> Fraction:
    """Largest Hausdorff distance between embedded states across one composed step."""
    best = 0
    for traj in range(samples):
        rng = trajectory_rng(seed, traj)
        state = initial_state(n, params, rng)
        remaining = steps_at(n, t_max)
        while remaining > 0:
            batch = min(remaining, CHUNK)
            best = max(best, int(tp.run_max_jump(*state._arrays, rng.random(2 * batch), state.alpha, state.theta)))
            remaining -= batch
    return Fraction(best, n)


__all__ = [
    "ChainState",
    "TrajectoryRecord",
    "advance",
    "decode_cut_code",
    "empirical_distribution",
    "endpoint_m2",
    "enumerate_compositions",
    "largest_jump",
    "m2_stat",
    "one_step_distribution",
    "record_grid",
    "run",
    "simulate",
    "stationary_m2_by_summation",
    "stationary_m2_expectation",
    "step",
    "step_down",
    "step_up",
    "steps_at",
    "trajectory_rng",
    "tv_distance",
    "write_jsonl",
]
