"""Timescales, state classes, decoherence-free checks and the
disentanglement-vs-decoherence comparison.

Time constants are in the units of the rates: an entry decaying as
exp(-t / tau) has tau = 1 / rate, so gamma = exp(-Gamma t / 2) gives
tau = 2 / Gamma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import mpmath
import numpy as np
from scipy.optimize import brentq

from .channels import SOURCES, ChannelSpec, decay_factor_matrix, evolve, rate_matrix, reduced_rate_terms
from .entanglement import FRAGILE_SUPPORT, ROBUST_SUPPORT, negativity_value, support
from .errors import ContractError, DomainError
from .linalg import DIM, JOINT_DIM, as_state, partial_transpose, projector

COHERENCE_TOL = 1e-12
DFS_TOL = 1e-12
ENTANGLED_TOL = 1e-10
EXTINCT = 1e-13
FIT_FLOOR = 1e-8
FIT_TAIL = 0.25
VERDICT_TOL = 1e-6
RATE_RTOL = 1e-9
SLOPE_RTOL = 1e-10
SLOPE_DPS = (50, 100)
SLOPE_MAX_STEPS = 60
DEATH_TOL = 1e-13
DEATH_PROBE = 1e-3
DEATH_MAX_STEPS = 30


class ClassLabel(str, Enum):
    FRAGILE = "fragile"
    ROBUST = "robust"
    GENERAL = "general"
    PRODUCT_LIKE = "product-like"


# --------------------------------------------------------------------------
# timescales


@dataclass(frozen=True)
class TimescaleSet:
    """Groups of matrix positions sharing one decay constant.

    ``entries`` holds ``(positions, tau, fitted_tau)`` sorted by decreasing
    tau.  Joint positions are 1-based ``(i, j)``; reduced ones carry the kept
    subsystem, ``("A", i, j)``.
    """

    entries: tuple
    level: str

    @property
    def taus(self) -> list[float]:
        return [tau for _, tau, _ in self.entries]

    def __len__(self):
        return len(self.entries)


def _group_by_rate(pairs) -> dict:
    groups: dict = {}
    for pos, rate in pairs:
        if rate > 0:
            key = next((r for r in groups if math.isclose(r, rate, rel_tol=RATE_RTOL)), rate)
            groups.setdefault(key, set()).add(pos)
    return groups


def _fit_rate(t: np.ndarray, factors: np.ndarray) -> float:
    return float(-np.polyfit(t, np.log(factors), 1)[0])


def _joint_rate_pairs(spec):
    rates = rate_matrix(spec)
    return [((i + 1, j + 1), float(rates[i, j]))
            for i in range(JOINT_DIM) for j in range(JOINT_DIM) if i < j]


def _reduced_rate_pairs(spec):
    """(("A", i, j), rate) for every component feeding a reduced coherence."""
    rates = rate_matrix(spec)
    out = []
    for keep in ("A", "B"):
        for i in range(DIM):
            for j in range(i + 1, DIM):
                for m in range(DIM):
                    p, q = (i * DIM + m, j * DIM + m) if keep == "A" else (m * DIM + i, m * DIM + j)
                    out.append((((keep, i + 1, j + 1), (p, q)), float(rates[p, q])))
    return out


def extract_timescales(spec: ChannelSpec, level: str = "2-qutrit", t_grid=None) -> TimescaleSet:
    """Decay constants of the channel's off-diagonal entries.

    Each group's tau comes from the rate exponents; ``fitted_tau`` is an
    independent log-linear regression of the sampled decay factors.
    """
    if level not in ("2-qutrit", "1-qutrit"):
        raise ValueError(f"level must be '2-qutrit' or '1-qutrit', not {level!r}")
    if spec.is_trivial:
        return TimescaleSet((), level)
    if t_grid is None:
        fastest = max(spec.rate(s) for s in SOURCES)
        t_grid = np.linspace(0.0, 10.0 / fastest, 21)
    t_grid = np.asarray(t_grid, dtype=float)
    samples = np.stack([decay_factor_matrix(spec, t) for t in t_grid])

    if level == "2-qutrit":
        groups = _group_by_rate(_joint_rate_pairs(spec))
        joint_of = {pos: (pos[0] - 1, pos[1] - 1) for g in groups.values() for pos in g}
        label_of = {pos: pos for pos in joint_of}
    else:
        pairs = _reduced_rate_pairs(spec)
        groups = _group_by_rate(pairs)
        joint_of = {key: key[1] for key, _ in pairs}
        label_of = {key: key[0] for key, _ in pairs}

    entries = []
    for rate, members in groups.items():
        fitted = [_fit_rate(t_grid, samples[:, i, j]) for i, j in (joint_of[m] for m in members)]
        spread = (max(fitted) - min(fitted)) / rate
        if spread > RATE_RTOL:
            raise ContractError(f"group at rate {rate} is not homogeneous (spread {spread:.2e})")
        positions = frozenset(label_of[m] for m in members)
        entries.append((positions, 1.0 / rate, 1.0 / float(np.mean(fitted))))
    entries.sort(key=lambda e: -e[1])
    return TimescaleSet(tuple(entries), level)


# --------------------------------------------------------------------------
# classification and decoherence-free checks


def classify_state(state) -> ClassLabel:
    psi = as_state(state)
    if negativity_value(projector(psi)) < 1e-12:
        return ClassLabel.PRODUCT_LIKE
    sup = support(psi)
    if len(sup) >= 2 and sup <= FRAGILE_SUPPORT:
        return ClassLabel.FRAGILE
    if len(sup) >= 2 and sup <= ROBUST_SUPPORT:
        return ClassLabel.ROBUST
    return ClassLabel.GENERAL


@dataclass(frozen=True)
class DFSResult:
    decoherence_free: bool
    max_deviation: float

    def __bool__(self):
        return self.decoherence_free


def is_decoherence_free(rho0, spec: ChannelSpec, horizon: float, samples: int = 11) -> DFSResult:
    if samples < 2:
        raise DomainError("need at least two time samples")
    rho0 = np.asarray(rho0, dtype=complex)
    dev = max(float(np.max(np.abs(evolve(rho0, spec, t) - rho0)))
              for t in np.linspace(0.0, horizon, samples))
    return DFSResult(dev <= DFS_TOL, dev)


@dataclass(frozen=True)
class CoherenceTrace:
    t: np.ndarray
    positions: tuple          # 1-based (i, j), i < j, row-major
    magnitudes: np.ndarray    # shape (len(t), 36)

    @property
    def total(self) -> np.ndarray:
        return self.magnitudes.sum(axis=1)


UPPER_POSITIONS = tuple((i + 1, j + 1) for i in range(JOINT_DIM) for j in range(i + 1, JOINT_DIM))
_UPPER = np.triu_indices(JOINT_DIM, 1)


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2 or t[0] < 0 or np.any(np.diff(t) <= 0):
        raise DomainError("time grid must be ascending, non-negative, with >= 2 points")
    return t


def coherence_trace(rho0, spec: ChannelSpec, t_grid) -> CoherenceTrace:
    t = _check_grid(t_grid)
    rho0 = np.asarray(rho0, dtype=complex)
    mags = np.stack([np.abs(evolve(rho0, spec, s)[_UPPER]) for s in t])
    return CoherenceTrace(t, UPPER_POSITIONS, mags)


# --------------------------------------------------------------------------
# disentanglement vs decoherence


@dataclass(frozen=True)
class RateComparison:
    """Outcome of comparing disentanglement and decoherence time constants.

    ``tau_dec`` is the slowest coherence time constant of the joint state
    (``tau_dec_reduced`` of either qutrit, ``None`` when the reduced states
    have nothing left to decohere).  ``tau_dis`` is the time constant of the
    slowest component of |N(t) - N(inf)|, or the hitting time when
    ``dis_mode == "sudden-death"``.  The slowest component is read off the
    late-time log slope in extended precision; ``tau_dis_tail_fit`` is the
    double-precision fit over the tail of the sampled grid, kept for reference.
    """

    tau_dis: float | None
    dis_mode: str
    tau_dec: float | None
    tau_dec_positions: frozenset
    tau_dec_reduced: float | None
    tau_dec_candidates: tuple
    tau_dis_candidates: tuple
    tau_dis_tail_fit: float | None
    tau_dis_converged: bool
    negativity_initial: float
    negativity_limit: float
    verdict_joint: bool
    verdict_reduced: bool
    t: np.ndarray = field(repr=False)
    negativity: np.ndarray = field(repr=False)

    @property
    def verdict(self) -> bool:
        return self.verdict_joint and self.verdict_reduced


def _joint_decoherence(rho0, spec):
    rates = rate_matrix(spec)
    pairs = [((i + 1, j + 1), float(rates[i, j]))
             for i in range(JOINT_DIM) for j in range(i + 1, JOINT_DIM)
             if abs(rho0[i, j]) > COHERENCE_TOL]
    groups = _group_by_rate(pairs)
    if not groups:
        return None, frozenset(), ()
    slowest = min(groups)
    return 1.0 / slowest, frozenset(groups[slowest]), tuple(sorted((1.0 / r for r in groups), reverse=True))


def _reduced_decoherence(rho0, spec):
    rates = [r for keep in ("A", "B")
             for terms in reduced_rate_terms(rho0, spec, keep).values()
             for r, c in terms.items() if r > 0 and abs(c) > COHERENCE_TOL]
    return 1.0 / min(rates) if rates else None


def _base_rates(spec):
    return sorted({0.5 * spec.rate(s) for s in SOURCES if spec.rate(s) > 0})


def _fit_tail(t, excess, base_rates):
    """Log-linear tail fit with nuisance terms for sub-leading exponentials."""
    usable = np.flatnonzero(excess > FIT_FLOOR)
    if usable.size < 2:
        return None
    k = max(4, int(math.ceil(FIT_TAIL * usable.size)))
    w = usable[-k:]
    tw, y = t[w], np.log(excess[w])
    cols = [np.ones_like(tw), tw]
    if w.size >= 8:
        for nu in base_rates:
            cols += [np.exp(-nu * tw), np.exp(-2 * nu * tw)]
    coef = np.linalg.lstsq(np.column_stack(cols), y, rcond=None)[0]
    rate = -float(coef[1])
    return 1.0 / rate if rate > 0 else math.inf


class _PrecisePartialTranspose:
    """Partial transpose of the evolved state, evaluated in extended precision.

    The projector is rebuilt from the state vector at working precision so
    that exact degeneracies of the limiting state survive; rounding it in
    double first would split them and change the late-time behaviour.  The
    partial transpose only permutes entries, so it commutes with the
    elementwise decay.
    """

    def __init__(self, psi, rates):
        flat = np.arange(JOINT_DIM * JOINT_DIM).reshape(JOINT_DIM, JOINT_DIM)
        self.source = partial_transpose(flat).real.astype(int)
        self.psi = [complex(z) for z in psi]
        self.rates = np.asarray(rates, dtype=float).ravel()

    def negativity(self, s, dps):
        with mpmath.workdps(dps):
            return -sum((e for e in self.eigenvalues(s, dps) if e < 0), mpmath.mpf(0))

    def eigenvalues(self, s, dps):
        with mpmath.workdps(dps):
            psi = [mpmath.mpc(z.real, z.imag) for z in self.psi]
            late = math.isinf(s)
            s = mpmath.mpf(s)
            decay = {}
            m = mpmath.matrix(JOINT_DIM, JOINT_DIM)
            for i in range(JOINT_DIM):
                for j in range(JOINT_DIM):
                    k = int(self.source[i, j])
                    r = float(self.rates[k])
                    if r not in decay:
                        decay[r] = mpmath.mpf(r == 0) if late else mpmath.exp(-r * s)
                    a, b = divmod(k, JOINT_DIM)
                    m[i, j] = psi[a] * mpmath.conj(psi[b]) * decay[r]
            return list(mpmath.eighe(m, eigvals_only=True))


def _late_time_tau(pt, t_start, step):
    """Time constant of the slowest component of |N(t) - N(inf)|.

    Two-point log slopes are taken at increasing times in extended precision
    until successive slopes agree; faster components die out geometrically.
    Returns ``(tau, converged, dead_at)`` where ``dead_at`` is a time at which
    the negativity is exactly zero at the highest working precision, if the
    walk reached one.
    """
    slope = None
    for dps in SLOPE_DPS:
        floor = mpmath.mpf(10) ** (15 - dps)
        with mpmath.workdps(dps):
            n_inf = pt.negativity(math.inf, dps)
            s = t_start
            prev = abs(pt.negativity(s, dps) - n_inf)
            last = None
            for _ in range(SLOPE_MAX_STEPS):
                if prev <= floor:
                    break
                s += step
                cur = abs(pt.negativity(s, dps) - n_inf)
                if cur <= floor:
                    break
                slope = float(mpmath.log(prev / cur) / step)
                if last is not None and abs(slope - last) <= SLOPE_RTOL * abs(slope):
                    return (1.0 / slope if slope > 0 else math.inf), True, None
                last, prev = slope, cur
            else:
                continue
            top = SLOPE_DPS[-1]
            if n_inf <= floor and pt.negativity(s, top) <= mpmath.mpf(10) ** (15 - top):
                return None, True, s
    if slope is None:
        return None, False, None
    return (1.0 / slope if slope > 0 else math.inf), False, None


def _death_time(pt, t_alive, t_dead):
    """Time at which the last negative partial-transpose eigenvalue reaches zero.

    ``t_alive`` must still be entangled and ``t_dead`` already separable.  A
    secant runs on the signed eigenvalue nearest zero, skipping eigenvalues
    that vanish identically; the root is accepted only if the negativity is
    positive just before it and zero just after, otherwise bisection takes over.
    """
    dps = SLOPE_DPS[0]
    floor = mpmath.mpf(10) ** (15 - dps)
    with mpmath.workdps(dps):
        def crossing(x):
            ev = [e for e in pt.eigenvalues(x, dps) if abs(e) > floor]
            return min(ev, key=abs)

        def alive(x):
            return pt.negativity(x, dps) > floor

        lo, hi = mpmath.mpf(t_alive), mpmath.mpf(t_dead)
        x0, x1 = lo - DEATH_PROBE * (hi - lo), lo
        f0, f1 = crossing(x0), crossing(x1)
        for _ in range(DEATH_MAX_STEPS):
            if f1 == f0:
                break
            x0, x1, f0 = x1, x1 - f1 * (x1 - x0) / (f1 - f0), f1
            if not lo - (hi - lo) <= x1 <= hi:
                break
            f1 = crossing(x1)
            if abs(x1 - x0) <= DEATH_TOL * abs(x1):
                eps = 10 * DEATH_TOL * abs(x1)
                if alive(x1 - eps) and not alive(x1 + eps):
                    return float(x1)
                break
        if not alive(lo) or alive(hi):
            return None
        while hi - lo > DEATH_TOL * hi:
            mid = (lo + hi) / 2
            lo, hi = (mid, hi) if alive(mid) else (lo, mid)
        return float((lo + hi) / 2)


def _exponential_candidates(t, excess, base_rates):
    """Time constants of an exact finite exponential-sum fit, if one exists."""
    if len(base_rates) != 1:
        return ()
    nu = base_rates[0]
    mask = excess > FIT_FLOOR
    if mask.sum() < 10:
        return ()
    ks = np.arange(1, 9)
    basis = np.exp(-np.outer(t[mask], ks * nu))
    coef, *_ = np.linalg.lstsq(basis, excess[mask], rcond=None)
    if np.max(np.abs(basis @ coef - excess[mask])) > 1e-10:
        return ()
    keep = np.abs(coef) > 1e-8 * np.max(np.abs(coef))
    return tuple(sorted((1.0 / float(k * nu) for k in ks[keep]), reverse=True))


def _hitting_time(n_of_t, t_lo, t_hi):
    return float(brentq(lambda s: n_of_t(s) - EXTINCT, t_lo, t_hi, xtol=1e-12))


def _sudden_death_time(pt, n_of_t, t_alive, t_dead):
    """Exact zero of the negativity, falling back to the EXTINCT crossing."""
    t_hit = _hitting_time(n_of_t, t_alive, t_dead)
    exact = _death_time(pt, t_hit, t_dead)
    if exact is None or not t_hit <= exact <= t_dead:
        return t_hit
    return exact


def compare_rates(state, spec: ChannelSpec, t_grid=None) -> RateComparison:
    """Compare the disentanglement time constant with the decoherence ones.

    The verdict holds when tau_dis <= tau_dec + 1e-6 at both the joint and
    the reduced level.  A reduced level with no decaying coherence and a
    finite-time loss of entanglement both count as satisfied.
    """
    rho0 = projector(state)
    n0 = negativity_value(rho0)
    if n0 <= ENTANGLED_TOL:
        raise ContractError(f"initial state is not entangled (N = {n0:.3e})")
    if t_grid is None:
        slowest = min((spec.rate(s) for s in SOURCES if spec.rate(s) > 0), default=1.0)
        t_grid = np.linspace(0.0, 40.0 / slowest, 401)
    t = _check_grid(t_grid)

    rates = rate_matrix(spec)
    factors = np.exp(-rates[None] * t[:, None, None])
    n_t = np.array([negativity_value(rho0 * f) for f in factors])
    n_inf = negativity_value(evolve(rho0, spec, math.inf))

    tau_dec, dec_pos, dec_cands = _joint_decoherence(rho0, spec)
    tau_red = _reduced_decoherence(rho0, spec)
    base = _base_rates(spec)
    excess = np.abs(n_t - n_inf)

    def n_of(s):
        return negativity_value(rho0 * np.exp(-rates * s))

    tau_dis, mode, dis_cands = None, "none", ()
    tau_fit, converged = None, True
    if np.max(excess) > EXTINCT:
        mode = "exponential"
        dead = np.flatnonzero(n_t <= EXTINCT)
        pt = _PrecisePartialTranspose(as_state(state), rates)
        if n_inf <= EXTINCT and dead.size and dead[0] > 0:
            # confirm the grid zero is a true zero, not a fast tail below EXTINCT
            h = dead[0]
            if pt.negativity(float(t[h]), SLOPE_DPS[0]) <= 10.0 ** (15 - SLOPE_DPS[0]):
                tau_dis, mode = _sudden_death_time(pt, n_of, t[h - 1], t[h]), "sudden-death"
        if mode == "exponential":
            tau_fit = _fit_tail(t, excess, base)
            usable = np.flatnonzero(excess > FIT_FLOOR)
            t_start = float(t[usable[-1]]) if usable.size else float(t[0])
            tau_dis, converged, dead_at = _late_time_tau(pt, t_start, 4.0 / min(base))
            if dead_at is not None:
                tau_dis, mode = _sudden_death_time(pt, n_of, t_start, dead_at), "sudden-death"
            else:
                dis_cands = _exponential_candidates(t, excess, base)
                if not dis_cands and tau_dis is not None:
                    dis_cands = (tau_dis,)

    def verdict(tau_ref):
        if mode == "sudden-death":
            return True          # coherences only vanish asymptotically
        if mode == "none":
            return tau_ref is None
        if tau_dis is None:
            return False
        return tau_ref is None or bool(tau_dis <= tau_ref + VERDICT_TOL)

    return RateComparison(
        tau_dis=tau_dis, dis_mode=mode,
        tau_dec=tau_dec, tau_dec_positions=dec_pos, tau_dec_reduced=tau_red,
        tau_dec_candidates=dec_cands, tau_dis_candidates=dis_cands,
        tau_dis_tail_fit=tau_fit, tau_dis_converged=converged,
        negativity_initial=n0, negativity_limit=n_inf,
        verdict_joint=verdict(tau_dec), verdict_reduced=verdict(tau_red),
        t=t, negativity=n_t,
    )
