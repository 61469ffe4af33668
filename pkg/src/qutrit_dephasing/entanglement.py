"""Negativity of two-qutrit states, numerically and in closed form.

Normalization: N(rho) = (||rho^{T_A}||_1 - 1) / 2, so a maximally
entangled two-qutrit state has N = 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelSpec, DecayParams
from .errors import ClassificationError, DomainError
from .linalg import PSD_TOL, Subsystem, as_state, check_density_matrix, hermitian_eigenvalues, partial_transpose

AMPLITUDE_TOL = 1e-12

FRAGILE_SUPPORT = frozenset({1, 5, 9})
ROBUST_SUPPORT = frozenset({2, 3, 4, 6, 7, 8})
PSI1_SUPPORT = frozenset({2, 4})


@dataclass(frozen=True)
class NegativityResult:
    value: float
    negative_eigenvalues: tuple
    method: str = "numerical"

    def __float__(self):
        return self.value


def negativity(rho, subsystem: Subsystem = "A", validate: bool = True) -> NegativityResult:
    if validate:
        rho = check_density_matrix(rho, dim=9)
    eig = hermitian_eigenvalues(partial_transpose(rho, subsystem))
    value = max(0.0, (float(np.sum(np.abs(eig))) - 1.0) / 2.0)
    neg = tuple(float(x) for x in eig if x < PSD_TOL)
    return NegativityResult(value, neg, "numerical")


def negativity_value(rho, subsystem: Subsystem = "A") -> float:
    """Unvalidated fast path: sum of |negative eigenvalues| of the partial transpose."""
    eig = np.linalg.eigvalsh(partial_transpose(rho, subsystem))
    return max(0.0, float(-np.sum(eig[eig < 0])))


def support(state, tol: float = AMPLITUDE_TOL) -> frozenset:
    """1-based indices of the non-negligible amplitudes."""
    psi = np.asarray(state, dtype=complex)
    return frozenset(int(k) + 1 for k in np.flatnonzero(np.abs(psi) > tol))


def _check_gammas(*gammas: float) -> None:
    for g in gammas:
        if not 0 < g <= 1:
            raise DomainError(f"gamma must lie in (0, 1], got {g!r}")


# Each term of the general multi-local expression is sqrt(bracket_A * bracket_B),
# a bracket being p_x + (sum of p)*gamma^2 + (sum of p)*gamma^4 over the listed
# 1-based amplitude indices.
_GENERAL_TERMS = (
    (((1,), (4, 7), ()), ((1,), (2, 3), ())),
    (((7,), (1,), (4,)), ((7,), (8, 9), ())),
    (((4,), (1,), (7,)), ((4,), (5, 6), ())),
    (((3,), (6, 9), ()), ((3,), (1,), (2,))),
    (((6,), (3,), (9,)), ((6,), (4,), (5,))),
    (((9,), (3,), (6,)), ((9,), (7,), (8,))),
    (((2,), (5, 8), ()), ((2,), (1,), (3,))),
    (((8,), (2,), (5,)), ((8,), (7,), (9,))),
    (((5,), (2,), (8,)), ((5,), (4,), (6,))),
)


def negativity_general_multilocal(state, gamma_a: float, gamma_b: float) -> float:
    """Closed-form nine-square-root expression for multi-local dephasing.

    Advisory only: its range of validity is unknown, so callers should compare
    it against :func:`negativity` rather than rely on it.
    """
    _check_gammas(gamma_a, gamma_b)
    p = np.abs(as_state(state)) ** 2

    def bracket(groups, g):
        base, sq, quad = groups
        return sum(p[k - 1] for k in base) + g**2 * sum(p[k - 1] for k in sq) + g**4 * sum(p[k - 1] for k in quad)

    total = sum(np.sqrt(bracket(a, gamma_a) * bracket(b, gamma_b)) for a, b in _GENERAL_TERMS)
    return float((total - 1.0) / 2.0)


def _fragile_amplitudes(state) -> np.ndarray:
    psi = as_state(state)
    if not support(psi) <= FRAGILE_SUPPORT:
        raise ClassificationError("fragile formula needs support within {1, 5, 9}")
    return np.abs(psi[[0, 4, 8]])


def fragile_closed_form(state, params: DecayParams) -> float:
    """(|a1||a5| + |a1||a9|) gA gB gC^4 + |a5||a9| gA^2 gB^2.

    Reduces to the multi-local form for gC = 1 and the collective form for
    gA = gB = 1.
    """
    a1, a5, a9 = _fragile_amplitudes(state)
    ga, gb, gc = params.gamma_a, params.gamma_b, params.gamma_c
    return float((a1 * a5 + a1 * a9) * ga * gb * gc**4 + a5 * a9 * ga**2 * gb**2)


def negativity_fragile(state, spec: ChannelSpec, t: float) -> float:
    return fragile_closed_form(state, DecayParams.at(spec, t))


def negativity_robust_multilocal(state, gamma_a: float, gamma_b: float) -> float:
    """|a2||a4| gA gB for states a2|0,+1> + a4|+1,0>."""
    _check_gammas(gamma_a, gamma_b)
    psi = as_state(state)
    if not support(psi) <= PSI1_SUPPORT:
        raise ClassificationError("robust formula needs support within {2, 4}")
    return float(abs(psi[1]) * abs(psi[3]) * gamma_a * gamma_b)
