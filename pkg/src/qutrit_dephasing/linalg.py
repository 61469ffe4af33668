"""Dense linear algebra for two-qutrit states.

Basis convention: joint index k = 1..9 enumerates pairs (a, b) of qutrit
levels in the order 00, 0+, 0-, +0, ++, +-, -0, -+, --.  Internally
everything is 0-based (k - 1); the ``basis_*`` helpers are the only place
the mapping lives.
"""
from __future__ import annotations

from typing import Literal

import numpy as np

from .errors import ContractError, DimensionError, NormalizationError

Subsystem = Literal["A", "B"]

LEVELS = (0, +1, -1)
DIM = 3
JOINT_DIM = DIM * DIM

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10
PSD_TOL = -1e-10


def basis_label(k: int) -> tuple[int, int]:
    """1-based joint index -> (level_A, level_B)."""
    if not 1 <= k <= JOINT_DIM:
        raise DimensionError(f"basis index {k} outside 1..9")
    a, b = divmod(k - 1, DIM)
    return LEVELS[a], LEVELS[b]


def basis_index(level_a: int, level_b: int) -> int:
    """(level_A, level_B) -> 1-based joint index."""
    try:
        return LEVELS.index(level_a) * DIM + LEVELS.index(level_b) + 1
    except ValueError:
        raise DimensionError(f"unknown qutrit level in ({level_a}, {level_b})") from None


def basis_state(*ks: int) -> np.ndarray:
    """Equal-weight superposition of the given 1-based basis states."""
    psi = np.zeros(JOINT_DIM, dtype=complex)
    for k in ks:
        basis_label(k)
        psi[k - 1] = 1.0
    return psi / np.sqrt(len(ks))


def as_state(amplitudes, tol: float = NORM_TOL) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if psi.shape != (JOINT_DIM,):
        raise DimensionError(f"expected 9 amplitudes, got {psi.size}")
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > tol:
        raise NormalizationError(f"sum |a_i|^2 = {norm2!r}, not 1 within {tol}")
    return psi


def random_state(rng: np.random.Generator, support=None) -> np.ndarray:
    """Haar-random pure state, optionally restricted to 1-based ``support``."""
    idx = np.arange(JOINT_DIM) if support is None else np.asarray(support) - 1
    psi = np.zeros(JOINT_DIM, dtype=complex)
    psi[idx] = rng.standard_normal(idx.size) + 1j * rng.standard_normal(idx.size)
    return psi / np.linalg.norm(psi)


def projector(state) -> np.ndarray:
    """Density matrix rho_ij = a_i a_j* of a normalized pure state."""
    psi = as_state(state)
    return np.outer(psi, psi.conj())


def check_density_matrix(rho, dim: int | None = None) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (DIM, JOINT_DIM):
        raise DimensionError(f"density matrix must be 3x3 or 9x9, got {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise DimensionError(f"expected {dim}x{dim} density matrix, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > NORM_TOL:
        raise ContractError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > NORM_TOL:
        raise ContractError(f"density matrix trace {np.trace(rho).real!r} != 1")
    if np.linalg.eigvalsh(rho)[0] < PSD_TOL:
        raise ContractError("density matrix has a negative eigenvalue")
    return rho


def _as_joint(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (JOINT_DIM, JOINT_DIM):
        raise DimensionError(f"expected 9x9 matrix, got {rho.shape}")
    return rho


def partial_trace(rho, keep: Subsystem) -> np.ndarray:
    """Reduced 3x3 state of the kept qutrit."""
    t = _as_joint(rho).reshape(DIM, DIM, DIM, DIM)
    if keep == "A":
        return np.einsum("abcb->ac", t)
    if keep == "B":
        return np.einsum("abad->bd", t)
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def partial_transpose(rho, subsystem: Subsystem = "A") -> np.ndarray:
    t = _as_joint(rho).reshape(DIM, DIM, DIM, DIM)
    if subsystem == "A":
        t = t.transpose(2, 1, 0, 3)
    elif subsystem == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', not {subsystem!r}")
    return t.reshape(JOINT_DIM, JOINT_DIM)


def hermitian_eigenvalues(m) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix (LAPACK ``heevd``)."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got {m.shape}")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ContractError("matrix is not Hermitian within 1e-10")
    return np.linalg.eigvalsh(m)


def trace_norm(m) -> float:
    return float(np.sum(np.abs(hermitian_eigenvalues(m))))
