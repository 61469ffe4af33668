"""How far the nine-term multi-local negativity formula is from the numerics.

The formula is exact on the fragile form and on the two-term robust forms;
on general states it is an approximation.  Prints discrepancy quantiles
for several supports over a grid of decay factors.

    python3 scripts/general_formula_discrepancy.py --n 100
"""
import argparse

import numpy as np

from qutrit_dephasing.channels import DecayParams, evolve_with
from qutrit_dephasing.entanglement import negativity, negativity_general_multilocal
from qutrit_dephasing.linalg import projector, random_state

SUPPORTS = {
    "fragile (1,5,9)": (1, 5, 9),
    "robust (2,4)": (2, 4),
    "robust (3,7)": (3, 7),
    "robust (6,8)": (6, 8),
    "robust support (2,3,4,6,7,8)": (2, 3, 4, 6, 7, 8),
    "general": None,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    grid = [(ga, gb) for ga in np.linspace(0.1, 1.0, 4) for gb in np.linspace(0.1, 1.0, 4)]
    print(f"{'support':<30} {'median':>10} {'p95':>10} {'max':>10}")
    for name, sup in SUPPORTS.items():
        worst = []
        for _ in range(args.n):
            psi = random_state(rng, support=sup) if sup else random_state(rng)
            rho0 = projector(psi)
            worst.append(max(abs(negativity(evolve_with(rho0, DecayParams(ga, gb, 1.0), {"A", "B"})).value
                                 - negativity_general_multilocal(psi, ga, gb)) for ga, gb in grid))
        q = np.quantile(worst, [0.5, 0.95, 1.0])
        print(f"{name:<30} {q[0]:>10.2e} {q[1]:>10.2e} {q[2]:>10.2e}")


if __name__ == "__main__":
    main()
