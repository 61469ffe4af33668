"""Monte Carlo trajectories against the analytic channel.

Prints the largest z-score per (channel, time) and the n^{-1/2} decay of
the largest entry deviation as the trajectory count grows.

    python3 scripts/oracle_convergence.py --seed 0
"""
import argparse

import numpy as np

from qutrit_dephasing import ChannelSpec
from qutrit_dephasing.channels import evolve
from qutrit_dephasing.linalg import projector, random_state
from qutrit_dephasing.noise import NoiseModel, ensemble_evolve, oracle_compare

SPECS = {
    "multi-local": ChannelSpec.multilocal(1.0),
    "collective": ChannelSpec.collective(1.0),
    "all-sources": ChannelSpec(frozenset({"A", "B", "collective"}), 1.0, 1.0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--states", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    states = [projector(random_state(rng)) for _ in range(args.states)]
    print("channel       Gamma*t   max z over states")
    for name, spec in SPECS.items():
        for t in (0.25, 1.0, 4.0):
            z = max(oracle_compare(rho0, spec, t, args.n, args.seed + k).max_z for k, rho0 in enumerate(states))
            print(f"{name:<13} {t:>7}   {z:.3f}")

    print("\ntrajectories   mean max |deviation|   x sqrt(n)")
    spec = SPECS["all-sources"]
    exact = evolve(states[0], spec, 1.0)
    for n in (1_000, 4_000, 16_000, 64_000, 256_000):
        dev = np.mean([np.max(np.abs(ensemble_evolve(states[0], NoiseModel.from_spec(spec), 1.0, n, seed=s).mean_rho
                                     - exact)) for s in range(6)])
        print(f"{n:>12}   {dev:.3e}              {dev * np.sqrt(n):.3f}")


if __name__ == "__main__":
    main()
