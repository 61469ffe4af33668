import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import gammas, pure_states, times
from oracles import collective_factors, loop_partial_trace, multilocal_factors
from qutrit_dephasing.channels import (
    EXPONENT_A, EXPONENT_B, EXPONENT_C, IDENTITY_CHANNEL, ChannelSpec, DecayParams, KrausSet,
    apply_channel, build_collective_kraus, build_local_kraus, decay_factor_matrix, evolve, evolve_with,
    factor_matrix, kraus_for, reduced_evolution, reduced_rate_terms,
)
from qutrit_dephasing.errors import ChannelIntegrityError, DomainError
from qutrit_dephasing.linalg import basis_state, projector, random_state

GAMMA_POINTS = (0.999, 0.9, 0.5, 0.1, 0.001)
ALL = frozenset({"A", "B", "collective"})


@pytest.mark.parametrize("g", GAMMA_POINTS)
def test_completeness_of_every_family(g):
    for k in (build_local_kraus(g, "A"), build_local_kraus(g, "B"), build_collective_kraus(g)):
        assert len(k) == 3
        assert k.completeness_residual() < 1e-12


def test_gamma_one_gives_identity_channel():
    for k in (build_local_kraus(1.0, "A"), build_local_kraus(1.0, "B"), build_collective_kraus(1.0)):
        assert np.array_equal(k.operators[0], np.eye(9))
        assert not np.any(k.operators[1]) and not np.any(k.operators[2])


@pytest.mark.parametrize("g", [0.0, -0.1, 1.2, math.nan])
def test_kraus_builders_reject_gamma_outside_unit_interval(g):
    with pytest.raises(DomainError):
        build_local_kraus(g, "A")
    with pytest.raises(DomainError):
        build_collective_kraus(g)


def test_collective_omegas():
    g = 0.6
    w1, w2, w3 = DecayParams.collective_omegas(g)
    assert w1 == pytest.approx(math.sqrt(1 - g**2))
    assert w2 == pytest.approx(-g**2 * math.sqrt(1 - g**2))
    assert w3 == pytest.approx(math.sqrt((1 - g**2) * (1 - g**4)))
    assert DecayParams.omega(g) == pytest.approx(0.8)


def test_local_kraus_example_entry_1_4():
    rho = apply_channel(build_local_kraus(0.5, "A"), projector(basis_state(1, 4)))
    assert rho[0, 3] == pytest.approx(0.25, abs=1e-15)


def test_collective_kraus_fragile_entries():
    g = 0.7
    rho = apply_channel(build_collective_kraus(g), projector(basis_state(1, 5, 9)))
    w1, w2, w3 = DecayParams.collective_omegas(g)
    assert g**2 + w1 * w2 == pytest.approx(g**4)
    assert g**2 + w2**2 + w3**2 == pytest.approx(1.0)
    assert rho[0, 4] == pytest.approx(g**4 / 3, abs=1e-15)
    assert rho[4, 8] == pytest.approx(1 / 3, abs=1e-15)


def test_identity_kraus_leaves_state_unchanged(rng):
    rho = projector(random_state(rng))
    assert np.array_equal(apply_channel(IDENTITY_CHANNEL, rho), rho)


def test_apply_channel_rejects_incomplete_set():
    bad = KrausSet((np.eye(9) * 0.9,))
    with pytest.raises(ChannelIntegrityError):
        apply_channel(bad, np.eye(9) / 9)


def test_exponent_tables_match_transcribed_evolved_matrices():
    ga, gb = 0.3, 0.7
    assert np.allclose(factor_matrix(DecayParams(ga, gb, 1.0)), multilocal_factors(ga, gb), rtol=0, atol=1e-15)
    assert np.allclose(factor_matrix(DecayParams(1.0, 1.0, 0.45)), collective_factors(0.45), rtol=0, atol=1e-15)
    # integer tables, checked at a transcendental point too
    assert np.array_equal(EXPONENT_A + EXPONENT_B, np.round(np.log(multilocal_factors(math.e, math.e))))
    assert np.array_equal(EXPONENT_C, np.round(np.log(collective_factors(math.e))))


@pytest.mark.parametrize("active,table", [
    ({"A", "B"}, lambda g: multilocal_factors(g, g)),
    ({"collective"}, collective_factors),
])
def test_kraus_evolution_reproduces_printed_forms(active, table):
    r = np.random.default_rng(11)
    for _ in range(50):
        rho0 = projector(random_state(r))
        for g in np.linspace(1.0, 0.05, 10):
            out = evolve_with(rho0, DecayParams(g, g, g), active)
            assert np.max(np.abs(out - rho0 * table(g))) < 1e-12


def test_decay_factor_examples():
    spec = ChannelSpec.multilocal(1.0)
    assert np.array_equal(decay_factor_matrix(spec, 0.0), np.ones((9, 9)))
    t = 0.8
    g = math.exp(-t / 2)
    f = decay_factor_matrix(spec, t)
    assert f[1, 2] == pytest.approx(g**2, rel=1e-14)
    assert f[3, 6] == pytest.approx(g**2, rel=1e-14)
    fc = decay_factor_matrix(ChannelSpec.collective(1.0), t)
    assert fc[0, 4] == pytest.approx(g**4, rel=1e-14)
    assert fc[1, 7] == 1.0


def test_zero_rates_freeze_the_state():
    rho = projector(basis_state(1, 5, 9))
    spec = ChannelSpec(ALL, 0.0, 0.0)
    for t in (0.0, 1.0, 100.0):
        assert np.array_equal(evolve(rho, spec, t), rho)


def test_fragile_collective_infinite_time_limit():
    rho = evolve(projector(basis_state(1, 5, 9)), ChannelSpec.collective(1.0), math.inf)
    assert rho[0, 4] == 0 and rho[0, 8] == 0
    assert rho[4, 8] == pytest.approx(1 / 3)


def test_robust_entry_under_multilocal_at_unit_time():
    psi = basis_state(2, 4)
    rho = evolve(projector(psi), ChannelSpec.multilocal(1.0), 1.0)
    assert rho[1, 3] == pytest.approx(psi[1] * psi[3].conjugate() * math.exp(-1), abs=1e-15)


def test_robust_state_is_invariant_under_collective_kraus(rng):
    rho = projector(random_state(rng, support=(2, 3, 4, 6, 7, 8)))
    for t in (0.5, 5.0, 50.0):
        assert np.max(np.abs(evolve(rho, ChannelSpec.collective(1.0), t) - rho)) < 1e-14


def test_fragile_reduced_state_is_populations_only(rng):
    psi = random_state(rng, support=(1, 5, 9))
    p = np.abs(psi[[0, 4, 8]]) ** 2
    for spec in (ChannelSpec.multilocal(1.0), ChannelSpec.collective(1.0), ChannelSpec(ALL, 1.0, 2.0)):
        for t in (0.0, 1.0, 10.0):
            for keep in "AB":
                assert np.allclose(reduced_evolution(projector(psi), spec, t, keep), np.diag(p), atol=1e-15)


def test_robust_psi1_reduced_state_under_multilocal():
    psi = np.zeros(9, dtype=complex)
    psi[[1, 3]] = [0.6, 0.8j]
    red = reduced_evolution(projector(psi), ChannelSpec.multilocal(1.0), 2.0, "A")
    assert np.allclose(red, np.diag([0.36, 0.64, 0.0]), atol=1e-15)


def test_collective_reduced_entry_1_2(rng):
    a = random_state(rng)
    t = 0.9
    g = math.exp(-t / 2)
    red = reduced_evolution(projector(a), ChannelSpec.collective(1.0), t, "A")
    c = np.conj
    expected = a[2] * c(a[5]) + (a[0] * c(a[3]) + a[1] * c(a[4])) * g
    assert red[0, 1] == pytest.approx(expected, abs=1e-14)


def test_reduced_rate_terms_resum_to_reduced_entries(rng):
    rho0 = projector(random_state(rng))
    spec = ChannelSpec(ALL, 1.0, 0.7)
    t = 1.3
    for keep in "AB":
        red = loop_partial_trace(evolve(rho0, spec, t), keep)
        for (i, j), terms in reduced_rate_terms(rho0, spec, keep).items():
            total = sum(c * math.exp(-r * t) for r, c in terms.items())
            assert total == pytest.approx(red[i, j], abs=1e-14)


def test_spec_validation():
    with pytest.raises(DomainError):
        ChannelSpec(frozenset({"C"}))
    with pytest.raises(DomainError):
        ChannelSpec(frozenset({"A"}), -1.0)
    with pytest.raises(DomainError):
        evolve(np.eye(9) / 9, ChannelSpec.multilocal(), -1.0)


def test_inactive_source_contributes_exactly_one():
    spec = ChannelSpec(frozenset({"A"}), 1.0, 5.0)
    f = decay_factor_matrix(spec, 3.0)
    assert np.all(f[EXPONENT_A == 0] == 1.0)
    assert spec.rate("collective") == 0.0 and spec.rate("B") == 0.0


# --------------------------------------------------------------------------
# properties

specs = st.builds(
    ChannelSpec,
    st.sets(st.sampled_from(["A", "B", "collective"])).map(frozenset),
    st.floats(0.0, 3.0), st.floats(0.0, 3.0),
)


@given(pure_states, specs, times)
def test_evolution_is_cptp_on_pure_inputs(psi, spec, t):
    rho = evolve(projector(psi), spec, t)
    assert np.max(np.abs(rho - rho.conj().T)) < 1e-12
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.linalg.eigvalsh(rho)[0] >= -1e-10


@given(pure_states, specs, times)
def test_kraus_and_factor_routes_agree(psi, spec, t):
    rho0 = projector(psi)
    assert np.max(np.abs(evolve(rho0, spec, t) - evolve(rho0, spec, t, "factors"))) < 1e-12


@given(pure_states, specs, times, times)
def test_semigroup(psi, spec, t1, t2):
    rho0 = projector(psi)
    two_step = evolve(evolve(rho0, spec, t1), spec, t2)
    assert np.max(np.abs(two_step - evolve(rho0, spec, t1 + t2))) < 1e-12


@given(pure_states, specs, st.lists(times, min_size=2, max_size=6).map(sorted))
def test_coherences_never_grow_and_populations_never_move(psi, spec, ts):
    rho0 = projector(psi)
    mags = [np.abs(evolve(rho0, spec, t)) for t in ts]
    for earlier, later in zip(mags, mags[1:]):
        assert np.all(later <= earlier + 1e-15)
    for t in ts:
        assert np.array_equal(np.diag(evolve(rho0, spec, t, "factors")), np.diag(rho0))


@given(pure_states, specs, times)
def test_diagonal_is_invariant_under_kraus_route(psi, spec, t):
    rho0 = projector(psi)
    assert np.max(np.abs(np.diag(evolve(rho0, spec, t)) - np.diag(rho0))) < 1e-15


@given(pure_states, specs, st.sampled_from(["A", "B", "collective"]), times)
def test_removed_source_acts_as_gamma_one(psi, spec, source, t):
    rho0 = projector(psi)
    reduced_spec = spec.without(source)
    frozen = evolve_with(rho0, DecayParams.at(reduced_spec, t), ALL)
    assert np.max(np.abs(evolve(rho0, reduced_spec, t) - frozen)) < 1e-15


@given(pure_states, st.floats(0.0, 3.0), times)
def test_zero_rate_equals_absent_source(psi, rate, t):
    rho0 = projector(psi)
    no_collective = evolve(rho0, ChannelSpec(ALL, rate, 0.0), t)
    assert np.max(np.abs(no_collective - evolve(rho0, ChannelSpec.multilocal(rate), t))) < 1e-15
    no_local = evolve(rho0, ChannelSpec(ALL, 0.0, rate), t)
    assert np.max(np.abs(no_local - evolve(rho0, ChannelSpec.collective(rate), t))) < 1e-15


@given(gammas)
def test_composite_kraus_completeness(g):
    assert kraus_for(DecayParams(g, g, g)).completeness_residual() < 1e-12
