"""Transition operators acting on factorial monomials, and the
limiting generator on the filtration of quasisymmetric functions.

Operator actions are returned as :class:`QSymElement` coefficient lists. The
``verify_*`` helpers evaluate both sides at every composition of the relevant
level and return the mismatches, so an empty list means the identity holds
exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .compositions import (
    EMPTY,
    Composition,
    Params,
    as_composition,
    compositions_up_to,
    enumerate_compositions,
    falling_factorial,
    neighbors_down,
    neighbors_up,
    uninsert,
    unstack,
)
from .kernels import build_down_matrix, build_transition_matrix, build_up_matrix, up_prob
from .monotone import enumerate_maps
from .qsym import M, MSTAR, QSymElement, eval_mstar, g_total, to_m_basis, to_mstar_basis


class Form(enum.Enum):
    EXPLICIT = "explicit"
    FACTORIZED = "factorized"
    ALTERNATIVE = "alternative"


def _eta(c: int, params: Params) -> Fraction:
    return params.theta if c == 1 else params.alpha


def _lower_terms(rho, params: Params) -> dict:
    """Uninsertion terms weighted by eta and unstacking terms by rho_s (rho_s - 1 - alpha)."""
    out: dict = {}
    for s, part in enumerate(rho, start=1):
        if part == 1:
            mu, w = uninsert(rho, s), _eta(s, params)
        else:
            mu, w = unstack(rho, s), part * (part - 1 - params.alpha)
        out[mu] = out.get(mu, Fraction(0)) + w
    return out


def _predecessor_terms(rho, params: Params) -> dict:
    """``p_up(mu, rho) g(mu) / g(rho)`` over all ``mu`` below ``rho``."""
    g_rho = g_total(rho)
    return {mu: up_prob(mu, rho, params) * Fraction(g_total(mu), g_rho) for mu, _ in neighbors_down(rho)}


def _check_denominator(n: int, params: Params) -> Fraction:
    denom = n + params.theta
    if denom == 0:
        raise ValueError("n + theta must be positive (n = 0 needs theta > 0)")
    return denom


# --------------------------------------------------------------- down / up


def apply_down(rho, n: int) -> QSymElement:
    """Coefficients of ``D_{n+1,n} (m*_rho)_n`` read at level ``n + 1``."""
    rho = as_composition(rho)
    if n < 0:
        raise ValueError("n must be non-negative")
    if rho.size > n:
        return QSymElement({}, MSTAR)  # m*_rho vanishes on level n + 1 or the factor is 0
    return QSymElement({rho: Fraction(n - rho.size + 1, n + 1)}, MSTAR)


def apply_up(rho, n: int, params: Params, form: Form = Form.EXPLICIT) -> QSymElement:
    """Coefficients of ``U_{n,n+1} (m*_rho)_{n+1}`` read at level ``n``."""
    rho = as_composition(rho)
    if n < 0:
        raise ValueError("n must be non-negative")
    denom = _check_denominator(n, params)
    r = rho.size
    out = {rho: (n + r + params.theta) / denom}
    if form is Form.EXPLICIT:
        lower = {mu: w / denom for mu, w in _lower_terms(rho, params).items()}
    elif form is Form.FACTORIZED:
        pref = r * (r - 1 + params.theta) / denom
        lower = {mu: pref * w for mu, w in _predecessor_terms(rho, params).items()} if r else {}
    else:
        raise ValueError(f"unsupported form {form}")
    for mu, w in lower.items():
        out[mu] = out.get(mu, Fraction(0)) + w
    return QSymElement(out, MSTAR)


def apply_transition_minus_identity(rho, n: int, params: Params, form: Form = Form.EXPLICIT) -> QSymElement:
    """Coefficients of ``(T_n - 1)(m*_rho)_n`` read at level ``n``."""
    rho = as_composition(rho)
    if n < 1:
        raise ValueError("n must be at least 1")
    denom = _check_denominator(n, params) * (n + 1)
    r = rho.size
    rate = r * (r - 1 + params.theta)
    out = {rho: -rate / denom}
    if form is Form.EXPLICIT:
        scale = Fraction(n - r + 1) / denom
        lower = {mu: scale * w for mu, w in _lower_terms(rho, params).items()}
    elif form is Form.FACTORIZED:
        scale = rate * (n - r + 1) / denom
        lower = {mu: scale * w for mu, w in _predecessor_terms(rho, params).items()} if r else {}
    else:
        raise ValueError(f"unsupported form {form}")
    for mu, w in lower.items():
        out[mu] = out.get(mu, Fraction(0)) + w
    return QSymElement(out, MSTAR)


def _eval_star(q: QSymElement, tau) -> Fraction:
    return sum((c * eval_mstar(s, tau) for s, c in q.items()), Fraction(0))


def verify_down(rho, n: int) -> list:
    """Compare ``sum_sigma p_down(tau, sigma) (m*_rho)(sigma)`` with the coefficient form."""
    rho = as_composition(rho)
    D = build_down_matrix(n)
    lhs = D.apply(lambda sigma: eval_mstar(rho, sigma))
    q = apply_down(rho, n)
    return [(tau, lhs[tau], _eval_star(q, tau)) for tau in D.states() if lhs[tau] != _eval_star(q, tau)]


def verify_up(rho, n: int, params: Params, form: Form = Form.EXPLICIT) -> list:
    rho = as_composition(rho)
    U = build_up_matrix(n, params)
    lhs = U.apply(lambda tau: eval_mstar(rho, tau))
    q = apply_up(rho, n, params, form)
    return [(s, lhs[s], _eval_star(q, s)) for s in U.states() if lhs[s] != _eval_star(q, s)]


def verify_transition(rho, n: int, params: Params, form: Form = Form.EXPLICIT, matrix=None) -> list:
    rho = as_composition(rho)
    T = matrix if matrix is not None else build_transition_matrix(n, params)
    lhs = T.apply(lambda tau: eval_mstar(rho, tau))
    q = apply_transition_minus_identity(rho, n, params, form)
    bad = []
    for s in T.states():
        left = lhs[s] - eval_mstar(rho, s)
        right = _eval_star(q, s)
        if left != right:
            bad.append((s, left, right))
    return bad


# ------------------------------------------------ stacking / insertion split


def _remainder(rho, tau) -> int:
    """``sum_{rho_s = 1} sum_i prod_{r != s} tau_{i_r} falling rho_r``; not quasisymmetric."""
    k, l = len(rho), len(tau)
    total = 0
    for s in range(k):
        if rho[s] != 1:
            continue
        for i in enumerate_maps(k, l):
            term = 1
            for r, v in enumerate(i.values):
                if r != s:
                    term *= falling_factorial(tau[v - 1], rho[r])
            total += term
    return total


def stacking_sum(rho, tau, params: Params) -> tuple[Fraction, Fraction]:
    """Both sides of the stacking-part identity of the up-operator: ``(lhs, rhs)``."""
    rho, tau = as_composition(rho), as_composition(tau)
    n, l = tau.size, len(tau)
    denom = _check_denominator(n, params)
    a = params.alpha
    lhs = Fraction(0)
    for sigma, _, _ in neighbors_up(tau):
        if len(sigma) == len(tau):
            lhs += up_prob(tau, sigma, params) * eval_mstar(rho, sigma)
    rhs = (n + rho.size - a * l) * eval_mstar(rho, tau)
    for s, part in enumerate(rho, start=1):
        if part >= 2:
            rhs += part * (part - 1 - a) * eval_mstar(unstack(rho, s), tau)
    rhs -= a * _remainder(rho, tau)
    return lhs, rhs / denom


def insertion_sum(rho, tau, params: Params) -> tuple[Fraction, Fraction]:
    """Both sides of the insertion-part identity of the up-operator: ``(lhs, rhs)``."""
    rho, tau = as_composition(rho), as_composition(tau)
    n, l = tau.size, len(tau)
    denom = _check_denominator(n, params)
    a = params.alpha
    lhs = Fraction(0)
    for sigma, _, _ in neighbors_up(tau):
        if len(sigma) == len(tau) + 1:
            lhs += up_prob(tau, sigma, params) * eval_mstar(rho, sigma)
    if not tau:
        lhs = eval_mstar(rho, (1,))  # the single successor, reached with probability 1
    rhs = (a * l + params.theta) * eval_mstar(rho, tau)
    for s, part in enumerate(rho, start=1):
        if part == 1:
            rhs += _eta(s, params) * eval_mstar(uninsert(rho, s), tau)
    rhs += a * _remainder(rho, tau)
    return lhs, rhs / denom


# ------------------------------------------------------------- generator


@dataclass
class OperatorMatrix:
    """Exact matrix of an operator on the span of ``m_sigma`` with ``|sigma| <= k``.

    Row ``i`` holds the ``m``-coordinates of the image of ``basis_order[i]``;
    ``basis_order`` is degree-major then lexicographic.
    """

    k: int
    basis_order: list
    entries: list

    def __post_init__(self):
        self.index = {s: i for i, s in enumerate(self.basis_order)}

    @property
    def dim(self) -> int:
        return len(self.basis_order)

    def row(self, sigma) -> QSymElement:
        i = self.index[as_composition(sigma)]
        return QSymElement(dict(zip(self.basis_order, self.entries[i])), M)

    def __getitem__(self, key) -> Fraction:
        s, t = key
        return self.entries[self.index[as_composition(s)]][self.index[as_composition(t)]]

    def apply(self, q: QSymElement) -> QSymElement:
        out = QSymElement({}, M)
        for s, c in to_m_basis(q).items():
            out = out + self.row(s) * c
        return out

    def is_graded_triangular(self) -> bool:
        """True when no basis element is mapped to higher degree."""
        return all(
            not self.entries[i][j]
            for i, s in enumerate(self.basis_order)
            for j, t in enumerate(self.basis_order)
            if t.size > s.size
        )

    def diagonal_block(self, m: int) -> list:
        idx = [i for i, s in enumerate(self.basis_order) if s.size == m]
        return [[self.entries[i][j] for j in idx] for i in idx]


def _matrix_from_rows(k: int, rows: dict) -> OperatorMatrix:
    order = compositions_up_to(k)
    entries = [[rows[s][t] for t in order] for s in order]
    return OperatorMatrix(k, order, entries)


def generator_row(rho, params: Params, form: Form = Form.FACTORIZED) -> QSymElement:
    """Image of ``m_rho`` under the generator, in the ``m`` basis."""
    rho = as_composition(rho)
    r = rho.size
    rate = r * (r - 1 + params.theta)
    if r == 0:
        return QSymElement({}, M)
    if form is Form.FACTORIZED:
        out = {mu: rate * w for mu, w in _predecessor_terms(rho, params).items()}
    elif form is Form.ALTERNATIVE:
        out = _lower_terms(rho, params)
    else:
        raise ValueError(f"unsupported form {form}")
    out[rho] = out.get(rho, Fraction(0)) - rate
    return QSymElement(out, M)


def generator_matrix(k: int, params: Params, form: Form = Form.FACTORIZED) -> OperatorMatrix:
    if k < 0:
        raise ValueError("k must be non-negative")
    rows = {s: generator_row(s, params, form) for s in compositions_up_to(k)}
    return _matrix_from_rows(k, rows)


def spectrum(k: int, params: Params) -> list[tuple[Fraction, int]]:
    """Eigenvalues with multiplicities, read off the graded-triangular generator.

    Returns ``(value, multiplicity)`` pairs, largest value first.
    """
    A = generator_matrix(k, params)
    if not A.is_graded_triangular():
        raise AssertionError("generator matrix is not graded-triangular")
    mults: dict = {}
    for m in range(k + 1):
        lam = -m * (m - 1 + params.theta)
        block = A.diagonal_block(m)
        size = len(block)
        for i in range(size):
            for j in range(size):
                want = lam if i == j else 0
                if block[i][j] != want:
                    raise AssertionError(f"degree-{m} diagonal block is not {lam} times identity")
        mults[lam] = mults.get(lam, 0) + size
    return sorted(((Fraction(v), c) for v, c in mults.items()), reverse=True)


def down_matrix_on_filtration(k: int, n: int) -> OperatorMatrix:
    """Down operator ``D_{n+1,n}`` in ``m`` coordinates on degree ``<= k``.

    Row ``rho`` holds the element whose level-``(n+1)`` action equals the
    down-step average of ``(m_rho)_n``.
    """
    rows = {}
    for rho in compositions_up_to(k):
        image = QSymElement({}, MSTAR)
        for lam, c in to_mstar_basis(QSymElement.monomial(rho, M)).items():
            image = image + apply_down(lam, n) * c
        rows[rho] = to_m_basis(image)
    return _matrix_from_rows(k, rows)


# ------------------------------------------------ lifted transition operator


def _apply_G_inverse(q: QSymElement, n: int) -> QSymElement:
    q = to_m_basis(q)
    return QSymElement({s: c * Fraction(n) ** s.size for s, c in q.items()}, M)


def lifted_transition_row(rho, n: int, params: Params) -> QSymElement:
    """``q'`` with ``T_n m^o_rho = q'^o`` once level-``n`` projections are lifted.

    ``m_rho`` is expanded in the ``m*`` basis, scaled by ``n^{-|rho|}`` so that
    its level-``n`` action matches the projection of ``m^o_rho``, pushed through
    the exact up-down formula, and finally mapped back by undoing the
    normalization degree by degree.
    """
    rho = as_composition(rho)
    expansion = to_mstar_basis(QSymElement.monomial(rho, M))
    image = QSymElement({}, MSTAR)
    for lam, c in expansion.items():
        step = apply_transition_minus_identity(lam, n, params, Form.FACTORIZED)
        image = image + (QSymElement.monomial(lam, MSTAR) + step) * c
    image = image * (Fraction(1) / Fraction(n) ** rho.size)
    return _apply_G_inverse(image, n)


def transition_matrix_on_filtration(k: int, n: int, params: Params) -> OperatorMatrix:
    rows = {s: lifted_transition_row(s, n, params) for s in compositions_up_to(k)}
    return _matrix_from_rows(k, rows)


def l1_norm(q: QSymElement) -> Fraction:
    return sum((abs(c) for _, c in to_m_basis(q).items()), Fraction(0))


def generator_convergence(k: int, rho, n_list, params: Params) -> list[tuple[int, Fraction]]:
    """Exact residuals ``|| n^2 (q'_n - m_rho) - A m_rho ||_1`` for each ``n``."""
    rho = as_composition(rho)
    if rho.size > k:
        raise ValueError(f"|rho| = {rho.size} exceeds the degree bound {k}")
    target = generator_row(rho, params)
    m_rho = QSymElement.monomial(rho, M)
    out = []
    for n in n_list:
        q = lifted_transition_row(rho, n, params)
        resid = (q - m_rho) * Fraction(n * n) - target
        out.append((n, l1_norm(resid)))
    return out


def stationary_expectation(rho, n: int, params: Params) -> Fraction:
    """``E[(m*_rho)_n]`` under the stationary law, by intertwining: ``n^{(|rho|)} M(rho) / g(rho)``."""
    from .kernels import stationary_weight

    rho = as_composition(rho)
    if rho.size > n:
        return Fraction(0)
    return falling_factorial(n, rho.size) * stationary_weight(rho, params) / g_total(rho)


__all__ = [
    "EMPTY",
    "Composition",
    "Form",
    "OperatorMatrix",
    "apply_down",
    "down_matrix_on_filtration",
    "apply_up",
    "apply_transition_minus_identity",
    "generator_convergence",
    "generator_matrix",
    "generator_row",
    "insertion_sum",
    "lifted_transition_row",
    "spectrum",
    "stacking_sum",
    "stationary_expectation",
    "transition_matrix_on_filtration",
    "verify_down",
    "verify_transition",
    "verify_up",
    "enumerate_compositions",
]
