"""Stochastic phase-noise oracle.

Each trajectory applies a diagonal unitary whose phases are Gaussian
(Wiener) variables:

* local noise on qutrit X gives level +1 the phase phi_{X,+} and level -1
  the independent phase phi_{X,-}, each with variance Gamma_1 t;
* collective noise gives joint basis state k the phase c_k phi_C with
  c = (0, 1, 1, 1, 2, 1, 1, 1, 2) and Var(phi_C) = Gamma_2 t.

Averaging exp(i (theta_i - theta_j)) over these reproduces the analytic decay
factors, which is what :func:`oracle_compare` checks.

Trajectories are processed in fixed-size blocks; block b draws from
``default_rng([seed, b])`` so results do not depend on how many workers run.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import COLLECTIVE_CHARGE, ChannelSpec, evolve
from .errors import DomainError
from .linalg import JOINT_DIM, basis_label

BLOCK_SIZE = 4096
Z_THRESHOLD = 4.0
SPREAD_FLOOR = 1e-13


def _phase_map() -> np.ndarray:
    col = {+1: 0, -1: 1}
    m = np.zeros((JOINT_DIM, 5))
    for k in range(JOINT_DIM):
        a, b = basis_label(k + 1)
        if a:
            m[k, col[a]] = 1.0
        if b:
            m[k, 2 + col[b]] = 1.0
        m[k, 4] = COLLECTIVE_CHARGE[k]
    m.setflags(write=False)
    return m


PHASE_MAP = _phase_map()


@dataclass(frozen=True)
class NoiseModel:
    gamma1: float = 0.0
    gamma2: float = 0.0
    active: frozenset = field(default_factory=lambda: frozenset({"A", "B", "collective"}))

    @classmethod
    def from_spec(cls, spec: ChannelSpec) -> "NoiseModel":
        return cls(spec.gamma1, spec.gamma2, spec.active)

    def phase_variances(self, t: float) -> np.ndarray:
        """Variance of each of the five phase variables at time t."""
        if t < 0:
            raise DomainError(f"time must be non-negative, got {t!r}")
        v = np.zeros(5)
        if "A" in self.active:
            v[0:2] = self.gamma1 * t
        if "B" in self.active:
            v[2:4] = self.gamma1 * t
        if "collective" in self.active:
            v[4] = self.gamma2 * t
        return v


def sample_phases(model: NoiseModel, t: float, rng: np.random.Generator, n: int = 1) -> np.ndarray:
    """(n, 5) accumulated phases, drawn in one shot."""
    std = np.sqrt(model.phase_variances(t))
    return rng.standard_normal((n, 5)) * std


def sample_phases_stepped(model: NoiseModel, t: float, rng: np.random.Generator,
                          n: int = 1, steps: int = 100) -> np.ndarray:
    """Same distribution as :func:`sample_phases`, built from Euler increments."""
    std = np.sqrt(model.phase_variances(t) / steps)
    return np.sum(rng.standard_normal((steps, n, 5)) * std, axis=0)


def joint_phases(phases: np.ndarray) -> np.ndarray:
    return np.asarray(phases) @ PHASE_MAP.T


def sample_unitary(model: NoiseModel, t: float, rng: np.random.Generator) -> np.ndarray:
    theta = joint_phases(sample_phases(model, t, rng, 1))[0]
    return np.diag(np.exp(-1j * theta))


@dataclass(frozen=True)
class TrajectoryEnsembleResult:
    mean_rho: np.ndarray
    n_trajectories: int
    stderr: np.ndarray
    seed: int


def _block(model: NoiseModel, t: float, seed: int, b: int, m: int, stepped: bool):
    """Mean and summed squared deviation of the phase factors exp(-i (theta_i - theta_j))."""
    rng = np.random.default_rng([seed, b])
    phases = sample_phases_stepped(model, t, rng, m) if stepped else sample_phases(model, t, rng, m)
    theta = joint_phases(phases)
    factors = np.exp(-1j * (theta[:, :, None] - theta[:, None, :]))
    mean = factors.mean(axis=0)
    dev = factors - mean
    m2 = np.sum(dev.real**2, axis=0) + np.sum(dev.imag**2, axis=0)
    return m, mean, m2


def ensemble_evolve(rho0, model: NoiseModel, t: float, n: int, seed: int = 0,
                    workers: int = 1, stepped: bool = False) -> TrajectoryEnsembleResult:
    """Average U rho0 U^dag over n sampled trajectories.

    Every trajectory multiplies rho0 entry-wise by a phase-factor matrix, so
    the ensemble statistics are those of the factors scaled by |rho0|.
    """
    if n < 1:
        raise DomainError("need at least one trajectory")
    rho0 = np.asarray(rho0, dtype=complex)
    sizes = [BLOCK_SIZE] * (n // BLOCK_SIZE)
    if n % BLOCK_SIZE:
        sizes.append(n % BLOCK_SIZE)
    jobs = [(model, t, seed, b, m, stepped) for b, m in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _block(*a), jobs))
    else:
        parts = [_block(*a) for a in jobs]

    # Chan et al. pairwise combination, always in block order.
    count, mean, m2 = parts[0]
    for m, mu, q in parts[1:]:
        tot = count + m
        delta = mu - mean
        mean = mean + delta * (m / tot)
        m2 = m2 + q + np.abs(delta) ** 2 * (count * m / tot)
        count = tot
    var = m2 / (n - 1) if n > 1 else np.zeros_like(m2)
    return TrajectoryEnsembleResult(rho0 * mean, n, np.abs(rho0) * np.sqrt(var / n), seed)


@dataclass(frozen=True)
class OracleReport:
    max_abs_deviation: float
    z_scores: np.ndarray
    disagreements: tuple
    n_trajectories: int
    seed: int
    t: float
    mean_rho: np.ndarray | None = field(default=None, repr=False)
    stderr: np.ndarray | None = field(default=None, repr=False)
    exact: np.ndarray | None = field(default=None, repr=False)

    @property
    def max_z(self) -> float:
        return float(np.max(self.z_scores))

    @property
    def passed(self) -> bool:
        return not self.disagreements


def z_scores(mean: np.ndarray, expected: np.ndarray, stderr: np.ndarray,
             exact_tol: float = 1e-12) -> np.ndarray:
    """|mean - expected| / stderr.

    Entries whose spread is pure round-off (phases cancel identically) are
    compared exactly instead: z = 0 within ``exact_tol``, else inf.
    """
    dev = np.abs(mean - expected)
    z = np.zeros(dev.shape)
    spread = stderr > SPREAD_FLOOR
    z[spread] = dev[spread] / stderr[spread]
    z[~spread & (dev > exact_tol)] = np.inf
    return z


def oracle_compare(rho0, spec: ChannelSpec, t: float, n: int, seed: int = 0,
                   workers: int = 1) -> OracleReport:
    ens = ensemble_evolve(rho0, NoiseModel.from_spec(spec), t, n, seed, workers)
    exact = evolve(rho0, spec, t)
    z = z_scores(ens.mean_rho, exact, ens.stderr)
    bad = tuple((int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(z > Z_THRESHOLD)))
    return OracleReport(float(np.max(np.abs(ens.mean_rho - exact))), z, bad, n, seed, t,
                        ens.mean_rho, ens.stderr, exact)
