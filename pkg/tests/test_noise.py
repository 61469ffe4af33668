import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import pure_states
from qutrit_dephasing.channels import ChannelSpec, evolve
from qutrit_dephasing.linalg import basis_state, projector, random_state
from qutrit_dephasing.noise import (
    PHASE_MAP, NoiseModel, ensemble_evolve, joint_phases, oracle_compare, sample_phases,
    sample_phases_stepped, sample_unitary, z_scores,
)

ALL = frozenset({"A", "B", "collective"})


def test_zero_rates_give_identity_unitary():
    model = NoiseModel(0.0, 0.0)
    r = np.random.default_rng(0)
    for _ in range(5):
        assert np.array_equal(sample_unitary(model, 3.0, r), np.eye(9))


def test_phase_map_structure():
    # ground level carries no phase; charges sit in the last column
    assert np.array_equal(PHASE_MAP[0], np.zeros(5))
    assert np.array_equal(PHASE_MAP[:, 4], [0, 1, 1, 1, 2, 1, 1, 1, 2])
    assert np.array_equal(PHASE_MAP[5 - 1, :4], [1, 0, 1, 0])   # (+1, +1)
    assert np.array_equal(PHASE_MAP[9 - 1, :4], [0, 1, 0, 1])   # (-1, -1)


def test_collective_phase_of_state_5_is_twice_the_field():
    model = NoiseModel(0.0, 1.0, frozenset({"collective"}))
    phases = sample_phases(model, 1.0, np.random.default_rng(1), 10)
    theta = joint_phases(phases)
    assert np.array_equal(theta[:, 4], 2 * phases[:, 4])
    assert np.array_equal(theta[:, 1], phases[:, 4])


def test_sampled_phase_variance():
    n = 100_000
    phases = sample_phases(NoiseModel(1.0, 0.0, frozenset({"A"})), 1.0, np.random.default_rng(2), n)
    var = phases[:, 0].var(ddof=1)
    # standard error of a Gaussian variance estimate is sqrt(2/(n-1)) sigma^2
    assert abs(var - 1.0) < 3 * math.sqrt(2 / (n - 1))
    assert np.all(phases[:, 2:] == 0)


def test_stepped_sampler_has_same_variance():
    n = 40_000
    model = NoiseModel(2.0, 0.5)
    ph = sample_phases_stepped(model, 1.0, np.random.default_rng(3), n)
    expected = model.phase_variances(1.0)
    assert np.all(np.abs(ph.var(axis=0, ddof=1) - expected) < 4 * np.sqrt(2 / (n - 1)) * expected)


def test_single_trajectory_with_zero_rates_returns_input(rng):
    rho0 = projector(random_state(rng))
    res = ensemble_evolve(rho0, NoiseModel(0.0, 0.0), 1.0, 1)
    assert np.array_equal(res.mean_rho, rho0)


def test_maximally_entangled_entry_1_5_at_unit_time():
    rho0 = projector(basis_state(1, 5, 9))
    res = ensemble_evolve(rho0, NoiseModel.from_spec(ChannelSpec.multilocal(1.0)), 1.0, 100_000, seed=4)
    assert abs(res.mean_rho[0, 4] - math.exp(-1) / 3) <= 3 * res.stderr[0, 4]


def test_robust_entry_is_exact_per_trajectory():
    psi = basis_state(2, 4)
    rho0 = projector(psi)
    res = ensemble_evolve(rho0, NoiseModel.from_spec(ChannelSpec.collective(1.0)), 2.0, 17, seed=5)
    assert res.mean_rho[1, 3] == pytest.approx(rho0[1, 3], abs=1e-15)
    assert res.stderr[1, 3] < 1e-15


def test_mean_is_hermitian_unit_trace(rng):
    rho0 = projector(random_state(rng))
    res = ensemble_evolve(rho0, NoiseModel(1.0, 1.0), 0.7, 5000, seed=6)
    assert np.max(np.abs(res.mean_rho - res.mean_rho.conj().T)) < 1e-12
    assert abs(np.trace(res.mean_rho) - 1) < 1e-12


def test_oracle_zero_rates_has_zero_deviation(rng):
    rep = oracle_compare(projector(random_state(rng)), ChannelSpec(ALL, 0.0, 0.0), 1.0, 100)
    assert rep.max_abs_deviation == 0.0
    assert rep.passed


def test_oracle_fragile_collective():
    rep = oracle_compare(projector(basis_state(1, 5, 9)), ChannelSpec.collective(1.0), 0.5, 100_000, seed=7)
    assert rep.max_z <= 4


def test_oracle_general_state_all_sources():
    rho0 = projector(random_state(np.random.default_rng(8)))
    rep = oracle_compare(rho0, ChannelSpec(ALL, 1.0, 1.0), 1.0, 100_000, seed=8)
    assert rep.max_z <= 4
    assert rep.passed


def test_oracle_detects_a_wrong_channel():
    # compare a multi-local ensemble against the collective map: must disagree
    rho0 = projector(random_state(np.random.default_rng(9)))
    ens = ensemble_evolve(rho0, NoiseModel.from_spec(ChannelSpec.multilocal(1.0)), 1.0, 20_000, seed=9)
    z = z_scores(ens.mean_rho, evolve(rho0, ChannelSpec.collective(1.0), 1.0), ens.stderr)
    assert np.max(z) > 20


def test_z_scores_treat_deterministic_entries_exactly():
    mean = np.array([1.0, 1.0, 2.0])
    expected = np.array([1.0, 1.0 + 1e-9, 1.5])
    stderr = np.array([0.0, 0.0, 0.1])
    assert list(z_scores(mean, expected, stderr)) == [0.0, math.inf, 5.0]


def test_deviation_shrinks_like_inverse_sqrt_n():
    rho0 = projector(random_state(np.random.default_rng(10)))
    spec = ChannelSpec(ALL, 1.0, 1.0)
    exact = evolve(rho0, spec, 1.0)
    errs = []
    for n in (4_000, 64_000):
        runs = [np.max(np.abs(ensemble_evolve(rho0, NoiseModel.from_spec(spec), 1.0, n, seed=s).mean_rho - exact))
                for s in range(8)]
        errs.append(np.mean(runs))
    ratio = errs[0] / errs[1]
    # 16x more samples should give ~4x smaller error
    assert 2.5 < ratio < 6.5


def test_fixed_seed_is_bitwise_reproducible_across_workers(rng):
    rho0 = projector(random_state(rng))
    model = NoiseModel(1.0, 0.5)
    a = ensemble_evolve(rho0, model, 1.0, 10_000, seed=11, workers=1)
    b = ensemble_evolve(rho0, model, 1.0, 10_000, seed=11, workers=3)
    c = ensemble_evolve(rho0, model, 1.0, 10_000, seed=11, workers=1)
    for other in (b, c):
        assert np.array_equal(a.mean_rho, other.mean_rho)
        assert np.array_equal(a.stderr, other.stderr)
    d = ensemble_evolve(rho0, model, 1.0, 10_000, seed=12)
    assert not np.array_equal(a.mean_rho, d.mean_rho)


@given(pure_states, st.floats(0.0, 5.0), st.integers(0, 1000))
def test_trajectories_preserve_diagonal(psi, t, seed):
    rho0 = projector(psi)
    u = sample_unitary(NoiseModel(1.0, 1.0), t, np.random.default_rng(seed))
    rho = u @ rho0 @ u.conj().T
    assert np.max(np.abs(np.diag(rho) - np.diag(rho0))) < 1e-14
    assert np.allclose(np.abs(np.diag(u)), 1.0)
