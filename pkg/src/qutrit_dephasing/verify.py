"""Invariant suites behind ``qutrit-dephasing verify``.

Every check records the measured deviation next to its threshold so the
report can be diffed between runs; nothing here depends on wall-clock time.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .analysis import extract_timescales
from .channels import (
    SOURCES, ChannelSpec, DecayParams, build_collective_kraus, build_local_kraus, evolve, evolve_with,
    kraus_for,
)
from .entanglement import (
    fragile_closed_form, negativity, negativity_general_multilocal, negativity_robust_multilocal,
)
from .linalg import hermitian_eigenvalues, projector, random_state
from .noise import oracle_compare

SUITES = ("cptp", "equivalence", "oracle", "paper-formulas")
GAMMAS = (0.999, 0.9, 0.5, 0.1, 0.001)

SPEC_GRID = (
    ChannelSpec.multilocal(1.0),
    ChannelSpec.local("A", 1.0),
    ChannelSpec.local("B", 0.5),
    ChannelSpec.collective(1.0),
    ChannelSpec(frozenset(SOURCES), 1.0, 0.5),
)
TIMES = (0.0, 0.1, 0.5, 1.0, 10.0)


@dataclass
class Check:
    name: str
    measured: float
    threshold: float
    passed: bool


@dataclass
class VerifyReport:
    suite: str
    seed: int
    n: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite, "seed": self.seed, "n": self.n, "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }


def _check(checks, name, measured, threshold, strict=True):
    measured = float(measured)
    ok = measured < threshold if strict else measured <= threshold
    checks.append(Check(name, measured, float(threshold), bool(ok)))


def _cptp(seed, n):
    checks = []
    for g in GAMMAS:
        _check(checks, f"completeness local-A gamma={g}", build_local_kraus(g, "A").completeness_residual(), 1e-12)
        _check(checks, f"completeness local-B gamma={g}", build_local_kraus(g, "B").completeness_residual(), 1e-12)
        _check(checks, f"completeness collective gamma={g}", build_collective_kraus(g).completeness_residual(), 1e-12)
        _check(checks, f"completeness composite gamma={g}",
               kraus_for(DecayParams(g, g, g)).completeness_residual(), 1e-12)
    rng = np.random.default_rng(seed)
    herm = tr = psd = 0.0
    for _ in range(n):
        rho0 = projector(random_state(rng))
        for spec in SPEC_GRID:
            for t in (0.0, 0.3, 1.0, 5.0):
                rho = evolve(rho0, spec, t)
                herm = max(herm, np.max(np.abs(rho - rho.conj().T)))
                tr = max(tr, abs(np.trace(rho) - 1))
                psd = max(psd, -hermitian_eigenvalues(rho)[0])
    _check(checks, "evolved states Hermitian", herm, 1e-12)
    _check(checks, "evolved states unit trace", tr, 1e-12)
    _check(checks, "evolved states PSD (max negative eigenvalue)", psd, 1e-10, strict=False)
    return checks


def _equivalence(seed, n):
    checks = []
    rng = np.random.default_rng(seed)
    path = semi = 0.0
    for _ in range(n):
        rho0 = projector(random_state(rng))
        for spec in SPEC_GRID:
            for t in TIMES:
                path = max(path, np.max(np.abs(evolve(rho0, spec, t) - evolve(rho0, spec, t, "factors"))))
            split = evolve(evolve(rho0, spec, 0.4), spec, 0.7)
            semi = max(semi, np.max(np.abs(split - evolve(rho0, spec, 1.1))))
    _check(checks, "kraus vs decay-factor evolution", path, 1e-12)
    _check(checks, "semigroup t1+t2", semi, 1e-12)
    return checks


def _oracle(seed, n):
    checks = []
    rho0 = projector(random_state(np.random.default_rng(seed)))
    for spec in (ChannelSpec.multilocal(1.0), ChannelSpec.collective(1.0), ChannelSpec(frozenset(SOURCES), 1.0, 1.0)):
        label = "+".join(sorted(spec.active))
        for t in (0.25, 1.0, 4.0):
            rep = oracle_compare(rho0, spec, t, n, seed)
            _check(checks, f"oracle {label} Gamma*t={t} max z", rep.max_z, 4.0, strict=False)
    return checks


def _closed_forms(seed, n):
    checks = []
    rng = np.random.default_rng(seed)
    gammas = np.exp(-np.linspace(0.0, 5.0, 10) / 2)
    frag = rob = eq5 = 0.0
    for _ in range(n):
        f = random_state(rng, support=(1, 5, 9))
        r = random_state(rng, support=(2, 4))
        for g in gammas:
            rf = projector(f)
            for p, active in ((DecayParams(g, g, 1.0), {"A", "B"}), (DecayParams(1.0, 1.0, g), {"collective"})):
                num = negativity(evolve_with(rf, p, active)).value
                frag = max(frag, abs(num - fragile_closed_form(f, p)))
            num = negativity(evolve_with(projector(r), DecayParams(g, g, 1.0), {"A", "B"})).value
            rob = max(rob, abs(num - negativity_robust_multilocal(r, g, g)))
            for s in (f, r):
                num = negativity(evolve_with(projector(s), DecayParams(g, g, 1.0), {"A", "B"})).value
                eq5 = max(eq5, abs(num - negativity_general_multilocal(s, g, g)))
    _check(checks, "fragile closed forms vs numerical negativity", frag, 1e-10)
    _check(checks, "robust psi1 closed form vs numerical negativity", rob, 1e-10)
    _check(checks, "general nine-root formula on fragile/robust inputs", eq5, 1e-10)

    expected = {
        ("multi-local", "2-qutrit"): (2.0, 1.0, 2 / 3, 0.5),
        ("multi-local", "1-qutrit"): (2.0, 1.0),
        ("collective", "2-qutrit"): (2.0, 0.5),
        ("collective", "1-qutrit"): (2.0,),
    }
    specs = {"multi-local": ChannelSpec.multilocal(1.0), "collective": ChannelSpec.collective(1.0)}
    for (name, level), taus in expected.items():
        ts = extract_timescales(specs[name], level)
        got = ts.taus
        fitted = [e[2] for e in ts.entries]
        err = max((abs(a - b) / b for a, b in zip(got + fitted, list(taus) * 2)), default=np.inf)
        if len(got) != len(taus):
            err = np.inf
        _check(checks, f"timescales {name} {level}", err, 1e-9, strict=False)
    return checks


_DEFAULT_N = {"cptp": 50, "equivalence": 50, "oracle": 100_000, "paper-formulas": 100}


def run_verify(suite: str, seed: int = 0, n: int | None = None) -> VerifyReport:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    n = _DEFAULT_N[suite] if n is None else int(n)
    fn = {"cptp": _cptp, "equivalence": _equivalence, "oracle": _oracle, "paper-formulas": _closed_forms}[suite]
    return VerifyReport(suite, seed, n, fn(seed, n))
