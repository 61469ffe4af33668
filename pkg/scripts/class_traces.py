"""Negativity and coherence traces for the named states under each channel.

Writes one CSV per (preset, channel) pair into --out for external plotting.

    python3 scripts/class_traces.py --out out/traces
"""
import argparse
from pathlib import Path

import numpy as np

from qutrit_dephasing import ChannelSpec, evolve
from qutrit_dephasing.config import PRESETS, StateConfig
from qutrit_dephasing.entanglement import negativity
from qutrit_dephasing.linalg import projector
from qutrit_dephasing.scenario import Table, write_table

CHANNELS = {
    "multilocal": ChannelSpec.multilocal(1.0),
    "collective": ChannelSpec.collective(1.0),
    "local-A": ChannelSpec.local("A", 1.0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/traces")
    ap.add_argument("--t-end", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=201)
    args = ap.parse_args()

    t = np.linspace(0.0, args.t_end, args.points)
    out = Path(args.out)
    for preset in PRESETS:
        if preset == "maximally-entangled":
            continue
        rho0 = projector(StateConfig(preset).vector())
        for cname, spec in CHANNELS.items():
            rows = []
            for s in t:
                rho = evolve(rho0, spec, s)
                off = np.abs(rho[np.triu_indices(9, 1)])
                rows.append([s, negativity(rho).value, off.max(), off.sum()])
            name = write_table(out, f"{preset}_{cname}",
                               Table(["t", "negativity", "max_coherence", "total_coherence"], rows), "csv")
            print(out / name, f"N(0)={rows[0][1]:.4f} N(end)={rows[-1][1]:.4f}")


if __name__ == "__main__":
    main()
