"""Implicit treap over table sizes, compiled with numba.

All node fields live in one int64 array ``T`` of shape (7, capacity + 1), rows
indexed by the constants below; column 0 is the null node. Passing a single
array keeps the recursive calls cheap. ``meta`` holds
``[root, free_top, prng_state, sumsq]`` and ``free`` is a stack of unused ids.
"""

import numpy as np
from numba import njit

LEFT, RIGHT, PRIO, VAL, CNT, SUM, MAX = 0, 1, 2, 3, 4, 5, 6
ROOT, FREE_TOP, PRNG, SUMSQ = 0, 1, 2, 3
_MAX_DEPTH = 256


def allocate(capacity: int):
    cap = capacity + 1
    T = np.zeros((7, cap), np.int64)
    free = np.arange(cap - 1, 0, -1, dtype=np.int64)
    meta = np.array([0, cap - 1, 0x9E3779B97F4A7C15 & 0x7FFFFFFFFFFFFFFF, 0], np.int64)
    return T, free, meta


@njit
def _prio(meta):
    x = np.uint64(meta[PRNG])
    x ^= x << np.uint64(13)
    x ^= x >> np.uint64(7)
    x ^= x << np.uint64(17)
    meta[PRNG] = np.int64(x & np.uint64(0x7FFFFFFFFFFFFFFF))
    return meta[PRNG]


@njit
def _pull(T, t):
    a, b = T[LEFT, t], T[RIGHT, t]
    T[CNT, t] = 1 + T[CNT, a] + T[CNT, b]
    T[SUM, t] = T[VAL, t] + T[SUM, a] + T[SUM, b]
    m = T[VAL, t]
    if T[MAX, a] > m:
        m = T[MAX, a]
    if T[MAX, b] > m:
        m = T[MAX, b]
    T[MAX, t] = m


@njit
def _split(T, t, k):
    """First ``k`` tables of subtree ``t`` versus the rest."""
    if t == 0:
        return 0, 0
    if T[CNT, T[LEFT, t]] >= k:
        a, b = _split(T, T[LEFT, t], k)
        T[LEFT, t] = b
        _pull(T, t)
        return a, t
    a, b = _split(T, T[RIGHT, t], k - T[CNT, T[LEFT, t]] - 1)
    T[RIGHT, t] = a
    _pull(T, t)
    return t, b


@njit
def _merge(T, a, b):
    if a == 0:
        return b
    if b == 0:
        return a
    if T[PRIO, a] > T[PRIO, b]:
        T[RIGHT, a] = _merge(T, T[RIGHT, a], b)
        _pull(T, a)
        return a
    T[LEFT, b] = _merge(T, a, T[LEFT, b])
    _pull(T, b)
    return b


@njit
def _new_node(T, free, meta, value):
    top = meta[FREE_TOP]
    t = free[top - 1]
    meta[FREE_TOP] = top - 1
    T[LEFT, t] = 0
    T[RIGHT, t] = 0
    T[PRIO, t] = _prio(meta)
    T[VAL, t] = value
    _pull(T, t)
    return t


@njit
def insert_at(T, free, meta, pos, value):
    t = _new_node(T, free, meta, value)
    a, b = _split(T, meta[ROOT], pos)
    meta[ROOT] = _merge(T, _merge(T, a, t), b)
    meta[SUMSQ] += value * value


@njit
def set_at(T, free, meta, pos, value):
    """Overwrite the size of table ``pos``; a zero size deletes the table."""
    a, b = _split(T, meta[ROOT], pos)
    x, c = _split(T, b, 1)
    meta[SUMSQ] += value * value - T[VAL, x] * T[VAL, x]
    if value == 0:
        free[meta[FREE_TOP]] = x
        meta[FREE_TOP] += 1
        meta[ROOT] = _merge(T, a, c)
    else:
        T[VAL, x] = value
        _pull(T, x)
        meta[ROOT] = _merge(T, a, _merge(T, x, c))


@njit
def find_by_sum(T, meta, target):
    """Table containing unit ``target`` (0-based): ``(position, size, units before it)``."""
    t = meta[ROOT]
    pos = 0
    before = 0
    while True:
        ls = T[SUM, T[LEFT, t]]
        v = T[VAL, t]
        if target < ls:
            t = T[LEFT, t]
        elif target < ls + v:
            return pos + T[CNT, T[LEFT, t]], v, before + ls
        else:
            target -= ls + v
            before += ls + v
            pos += T[CNT, T[LEFT, t]] + 1
            t = T[RIGHT, t]


@njit
def bump_by_sum(T, meta, target, delta):
    """Add ``delta`` to the table holding unit ``target`` when it stays non-empty.

    Returns ``(position, old size)``; position is -1 when nothing was changed
    because the table would empty or the search path is unusually deep.
    """
    path = np.empty(_MAX_DEPTH, np.int64)
    depth = 0
    t = meta[ROOT]
    pos = 0
    while True:
        if depth == _MAX_DEPTH:
            return -1, 0
        path[depth] = t
        depth += 1
        ls = T[SUM, T[LEFT, t]]
        v = T[VAL, t]
        if target < ls:
            t = T[LEFT, t]
        elif target < ls + v:
            break
        else:
            target -= ls + v
            pos += T[CNT, T[LEFT, t]] + 1
            t = T[RIGHT, t]
    old = T[VAL, t]
    if old + delta < 1:
        return -1, old
    T[VAL, t] = old + delta
    meta[SUMSQ] += (old + delta) * (old + delta) - old * old
    for d in range(depth - 1, -1, -1):
        _pull(T, path[d])
    return pos + T[CNT, T[LEFT, t]], old


@njit
def step_up(T, free, meta, u, alpha, theta):
    """Seat a customer using one uniform ``u``; returns the affected table position."""
    n = T[SUM, meta[ROOT]]
    if n == 0:
        insert_at(T, free, meta, 0, 1)
        return 0
    w = u * (n + theta)
    if w < theta:
        insert_at(T, free, meta, 0, 1)
        return 0
    w -= theta
    target = np.int64(w)
    if target >= n:
        target = n - 1
        w = n - 1e-12
    pos, size, before = find_by_sum(T, meta, target)
    if w - before < size - alpha:
        if bump_by_sum(T, meta, target, 1)[0] < 0:
            set_at(T, free, meta, pos, size + 1)
        return pos
    insert_at(T, free, meta, pos + 1, 1)
    return pos + 1


@njit
def step_down(T, free, meta, u):
    """Remove a uniformly chosen customer; returns the affected table position."""
    n = T[SUM, meta[ROOT]]
    target = np.int64(u * n)
    if target >= n:
        target = n - 1
    pos, size = bump_by_sum(T, meta, target, -1)
    if pos >= 0:
        return pos
    pos, size, _ = find_by_sum(T, meta, target)
    set_at(T, free, meta, pos, size - 1)
    return pos


@njit
def run_steps(T, free, meta, uniforms, alpha, theta):
    for i in range(uniforms.shape[0] // 2):
        step_up(T, free, meta, uniforms[2 * i], alpha, theta)
        step_down(T, free, meta, uniforms[2 * i + 1])


@njit
def to_array(T, meta):
    """Table sizes left to right."""
    t = meta[ROOT]
    out = np.empty(T[CNT, t], np.int64)
    stack = np.empty(T[CNT, t] + 1, np.int64)
    top = 0
    i = 0
    while top > 0 or t != 0:
        while t != 0:
            stack[top] = t
            top += 1
            t = T[LEFT, t]
        top -= 1
        t = stack[top]
        out[i] = T[VAL, t]
        i += 1
        t = T[RIGHT, t]
    return out


@njit
def cut_code(T, meta):
    """Bit ``s - 1`` is set for every interior partial sum ``s``."""
    sizes = to_array(T, meta)
    code = 0
    acc = 0
    for j in range(sizes.shape[0] - 1):
        acc += sizes[j]
        code |= 1 << (acc - 1)
    return code


@njit
def run_histogram(T, free, meta, uniforms, alpha, theta, hist):
    """Composed steps, counting the cut code of each visited state."""
    for i in range(uniforms.shape[0] // 2):
        step_up(T, free, meta, uniforms[2 * i], alpha, theta)
        step_down(T, free, meta, uniforms[2 * i + 1])
        hist[cut_code(T, meta)] += 1


@njit
def _cut_points(sizes):
    out = np.empty(sizes.shape[0] + 1, np.int64)
    out[0] = 0
    for j in range(sizes.shape[0]):
        out[j + 1] = out[j] + sizes[j]
    return out


@njit
def _directed(A, B):
    """``max_a min_b |a - b|`` for sorted integer arrays."""
    best = 0
    j = 0
    for a in A:
        while j + 1 < B.shape[0] and B[j + 1] <= a:
            j += 1
        d = abs(a - B[j])
        if j + 1 < B.shape[0] and B[j + 1] - a < d:
            d = B[j + 1] - a
        if d > best:
            best = d
    return best


@njit
def cut_hausdorff(A, B):
    x = _directed(A, B)
    y = _directed(B, A)
    return x if x > y else y


@njit
def run_max_jump(T, free, meta, uniforms, alpha, theta):
    """Composed steps; largest Hausdorff jump between embedded states, in units of 1/n."""
    best = 0
    before = _cut_points(to_array(T, meta))
    for i in range(uniforms.shape[0] // 2):
        step_up(T, free, meta, uniforms[2 * i], alpha, theta)
        step_down(T, free, meta, uniforms[2 * i + 1])
        after = _cut_points(to_array(T, meta))
        d = cut_hausdorff(before, after)
        if d > best:
            best = d
        before = after
    return best


@njit
def one_step_histogram(T, free, meta, start, mode, uniforms, alpha, theta, hist):
    """Repeated single transitions from ``start``.

    ``mode`` 0 is an up-step, 1 a down-step, 2 an up-step then a down-step;
    one or two uniforms are consumed per sample accordingly.
    """
    per = 2 if mode == 2 else 1
    cap = free.shape[0]
    for i in range(uniforms.shape[0] // per):
        # wholesale reset, then rebuild by appending
        for j in range(cap):
            free[j] = cap - j
        meta[ROOT] = 0
        meta[FREE_TOP] = cap
        meta[SUMSQ] = 0
        for j in range(start.shape[0]):
            t = _new_node(T, free, meta, start[j])
            meta[ROOT] = _merge(T, meta[ROOT], t)
            meta[SUMSQ] += start[j] * start[j]
        if mode == 0 or mode == 2:
            step_up(T, free, meta, uniforms[per * i], alpha, theta)
        if mode == 1:
            step_down(T, free, meta, uniforms[i])
        elif mode == 2:
            step_down(T, free, meta, uniforms[2 * i + 1])
        hist[cut_code(T, meta)] += 1
