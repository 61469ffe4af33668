"""Local, multi-local and collective pure-dephasing channels on two qutrits.

Two equivalent routes to rho(t):

* Kraus operator sums built from the three-operator sets of each noise
  source (the reference dynamics), and
* element-wise multiplication of rho(0) by a matrix of decay factors, each
  a monomial gamma_A^p gamma_B^q gamma_C^r.

Every source enters through its decay parameter gamma = exp(-Gamma t / 2);
every function that takes a time also has a gamma-based counterpart so
tests can use exact rational points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ChannelIntegrityError, DomainError
from .linalg import DIM, JOINT_DIM, Subsystem, basis_label, partial_trace

SOURCES = ("A", "B", "collective")

COMPLETENESS_TOL = 1e-12

# Phase charge of each joint basis state under the shared noise field.
COLLECTIVE_CHARGE = np.array([0, 1, 1, 1, 2, 1, 1, 1, 2])


def _level_exponent(a: int, b: int) -> int:
    # ground<->excited coherences decay as gamma, +1<->-1 as gamma^2
    if a == b:
        return 0
    return 1 if 0 in (a, b) else 2


def _exponent_tables() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ea = np.zeros((JOINT_DIM, JOINT_DIM), dtype=int)
    eb = np.zeros_like(ea)
    for i in range(JOINT_DIM):
        ai, bi = basis_label(i + 1)
        for j in range(JOINT_DIM):
            aj, bj = basis_label(j + 1)
            ea[i, j] = _level_exponent(ai, aj)
            eb[i, j] = _level_exponent(bi, bj)
    ec = (COLLECTIVE_CHARGE[:, None] - COLLECTIVE_CHARGE[None, :]) ** 2
    for t in (ea, eb, ec):
        t.setflags(write=False)
    return ea, eb, ec


#: Powers of gamma_A, gamma_B, gamma_C multiplying each entry of rho.
EXPONENT_A, EXPONENT_B, EXPONENT_C = _exponent_tables()


@dataclass(frozen=True)
class ChannelSpec:
    """Active noise sources and their phase-damping rates.

    ``gamma1`` is the local rate (both qutrits), ``gamma2`` the collective
    rate; both are inverse times.  Inactive sources never decay.
    """

    active: frozenset = field(default_factory=lambda: frozenset({"A", "B"}))
    gamma1: float = 1.0
    gamma2: float = 1.0

    def __post_init__(self):
        active = frozenset(self.active)
        unknown = active - set(SOURCES)
        if unknown:
            raise DomainError(f"unknown noise sources {sorted(unknown)}")
        object.__setattr__(self, "active", active)
        if not (self.gamma1 >= 0 and self.gamma2 >= 0):
            raise DomainError("dephasing rates must be non-negative")

    @classmethod
    def multilocal(cls, gamma1: float = 1.0) -> "ChannelSpec":
        return cls(frozenset({"A", "B"}), gamma1, 0.0)

    @classmethod
    def local(cls, subsystem: Subsystem, gamma1: float = 1.0) -> "ChannelSpec":
        return cls(frozenset({subsystem}), gamma1, 0.0)

    @classmethod
    def collective(cls, gamma2: float = 1.0) -> "ChannelSpec":
        return cls(frozenset({"collective"}), 0.0, gamma2)

    def rate(self, source: str) -> float:
        if source not in self.active:
            return 0.0
        return self.gamma2 if source == "collective" else self.gamma1

    def without(self, source: str) -> "ChannelSpec":
        return ChannelSpec(self.active - {source}, self.gamma1, self.gamma2)

    @property
    def is_trivial(self) -> bool:
        return all(self.rate(s) == 0 for s in SOURCES)


@dataclass(frozen=True)
class DecayParams:
    """Decay parameters gamma in (0, 1] for the A, B and collective sources."""

    gamma_a: float = 1.0
    gamma_b: float = 1.0
    gamma_c: float = 1.0

    @classmethod
    def at(cls, spec: ChannelSpec, t: float) -> "DecayParams":
        _check_time(t)
        g = {s: float(np.exp(-spec.rate(s) * t / 2)) for s in SOURCES}
        return cls(g["A"], g["B"], g["collective"])

    @staticmethod
    def omega(gamma: float) -> float:
        return float(np.sqrt(1.0 - gamma**2))

    @staticmethod
    def collective_omegas(gamma: float) -> tuple[float, float, float]:
        g2 = gamma**2
        w = np.sqrt(1.0 - g2)
        return float(w), float(-g2 * w), float(np.sqrt((1.0 - g2) * (1.0 - g2 * g2)))


def _check_time(t: float) -> None:
    if not t >= 0:
        raise DomainError(f"time must be non-negative, got {t!r}")


def _check_gamma(gamma: float) -> None:
    if not 0 < gamma <= 1:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma!r}")


@dataclass(frozen=True)
class KrausSet:
    operators: tuple

    def __post_init__(self):
        ops = tuple(np.array(op, dtype=complex) for op in self.operators)
        for op in ops:
            op.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    def __len__(self):
        return len(self.operators)

    def completeness_residual(self) -> float:
        """max |sum_mu E_mu^dag E_mu - I|."""
        s = sum(op.conj().T @ op for op in self.operators)
        return float(np.max(np.abs(s - np.eye(s.shape[0]))))

    def compose(self, other: "KrausSet") -> "KrausSet":
        """Kraus set of ``self`` applied after ``other``."""
        return KrausSet(tuple(a @ b for a in self.operators for b in other.operators))


IDENTITY_CHANNEL = KrausSet((np.eye(JOINT_DIM),))


def build_local_kraus(gamma: float, subsystem: Subsystem) -> KrausSet:
    _check_gamma(gamma)
    w = DecayParams.omega(gamma)
    single = [np.diag([1.0, gamma, gamma]), np.diag([0.0, w, 0.0]), np.diag([0.0, 0.0, w])]
    eye = np.eye(DIM)
    if subsystem == "A":
        return KrausSet(tuple(np.kron(e, eye) for e in single))
    if subsystem == "B":
        return KrausSet(tuple(np.kron(eye, e) for e in single))
    raise ValueError(f"subsystem must be 'A' or 'B', not {subsystem!r}")


def build_collective_kraus(gamma: float) -> KrausSet:
    _check_gamma(gamma)
    w1, w2, w3 = DecayParams.collective_omegas(gamma)
    d1 = np.ones(JOINT_DIM)
    d1[[0, 4, 8]] = gamma
    d2 = np.zeros(JOINT_DIM)
    d2[[0, 4, 8]] = (w1, w2, w2)
    d3 = np.zeros(JOINT_DIM)
    d3[[4, 8]] = w3
    return KrausSet((np.diag(d1), np.diag(d2), np.diag(d3)))


def kraus_for(params: DecayParams, active: Iterable[str] = SOURCES) -> KrausSet:
    """Composite Kraus set for the active sources (order is irrelevant: all diagonal)."""
    active = set(active)
    k = IDENTITY_CHANNEL
    if "A" in active:
        k = build_local_kraus(params.gamma_a, "A").compose(k)
    if "B" in active:
        k = build_local_kraus(params.gamma_b, "B").compose(k)
    if "collective" in active:
        k = build_collective_kraus(params.gamma_c).compose(k)
    return k


def apply_channel(k: KrausSet, rho) -> np.ndarray:
    """rho' = sum_mu E_mu rho E_mu^dag."""
    if k.completeness_residual() > COMPLETENESS_TOL:
        raise ChannelIntegrityError(
            f"Kraus set violates completeness (residual {k.completeness_residual():.3e})"
        )
    ops = np.stack(k.operators)
    return np.einsum("kij,jl,kml->im", ops, np.asarray(rho, dtype=complex), ops.conj())


def factor_matrix(params: DecayParams) -> np.ndarray:
    """Element-wise decay factors for the given gammas (0 allowed: t -> inf)."""
    for g in (params.gamma_a, params.gamma_b, params.gamma_c):
        if not 0 <= g <= 1:
            raise DomainError(f"gamma must lie in [0, 1], got {g!r}")
    return (
        np.power(params.gamma_a, EXPONENT_A)
        * np.power(params.gamma_b, EXPONENT_B)
        * np.power(params.gamma_c, EXPONENT_C)
    )


def rate_matrix(spec: ChannelSpec) -> np.ndarray:
    """Decay rate of every entry: factor_ij(t) = exp(-rate_ij * t)."""
    return 0.5 * (
        spec.rate("A") * EXPONENT_A
        + spec.rate("B") * EXPONENT_B
        + spec.rate("collective") * EXPONENT_C
    )


def decay_factor_matrix(spec: ChannelSpec, t: float) -> np.ndarray:
    _check_time(t)
    rates = rate_matrix(spec)
    if np.isinf(t):
        return (rates == 0).astype(float)
    return np.exp(-rates * t)


def evolve_with(rho0, params: DecayParams, active: Iterable[str] = SOURCES,
                method: str = "kraus") -> np.ndarray:
    """Evolve with explicit gammas; ``method`` is ``"kraus"`` or ``"factors"``."""
    rho0 = np.asarray(rho0, dtype=complex)
    active = set(active)
    if method == "kraus":
        return apply_channel(kraus_for(params, active), rho0)
    if method == "factors":
        p = DecayParams(
            params.gamma_a if "A" in active else 1.0,
            params.gamma_b if "B" in active else 1.0,
            params.gamma_c if "collective" in active else 1.0,
        )
        return rho0 * factor_matrix(p)
    raise ValueError(f"unknown method {method!r}")


def evolve(rho0, spec: ChannelSpec, t: float, method: str = "kraus") -> np.ndarray:
    """rho(t) for the initial joint state ``rho0``.

    ``t = inf`` is only available through the factor route and gives the
    fully dephased limit.
    """
    _check_time(t)
    rho0 = np.asarray(rho0, dtype=complex)
    if method == "factors" or np.isinf(t):
        return rho0 * decay_factor_matrix(spec, t)
    return evolve_with(rho0, DecayParams.at(spec, t), spec.active, method)


def reduced_evolution(rho0, spec: ChannelSpec, t: float, keep: Subsystem,
                      method: str = "kraus") -> np.ndarray:
    return partial_trace(evolve(rho0, spec, t, method), keep)


def reduced_rate_terms(rho0, spec: ChannelSpec, keep: Subsystem) -> dict:
    """Split each reduced entry into its exponentially decaying components.

    Returns ``{(i, j): {rate: coefficient}}`` (0-based, i != j) so that the
    reduced entry at time t is ``sum(c * exp(-rate * t))``.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    rates = rate_matrix(spec)
    out: dict = {}
    for i in range(DIM):
        for j in range(DIM):
            if i == j:
                continue
            terms: dict = {}
            for m in range(DIM):
                p, q = (i * DIM + m, j * DIM + m) if keep == "A" else (m * DIM + i, m * DIM + j)
                r = float(rates[p, q])
                terms[r] = terms.get(r, 0.0) + rho0[p, q]
            out[(i, j)] = terms
    return out


__all__ = [
    "COLLECTIVE_CHARGE", "EXPONENT_A", "EXPONENT_B", "EXPONENT_C", "IDENTITY_CHANNEL",
    "SOURCES", "ChannelSpec", "DecayParams", "KrausSet", "apply_channel",
    "build_collective_kraus", "build_local_kraus", "decay_factor_matrix", "evolve",
    "evolve_with", "factor_matrix", "kraus_for", "rate_matrix", "reduced_evolution",
    "reduced_rate_terms",
]
