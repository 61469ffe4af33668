"""Scenario runs: tables for each requested output plus a JSON summary.

Tables are written atomically (temporary file, then rename) as CSV with a
header row, or as JSON ``{"columns": [...], "rows": [...]}``.  Floats use
round-trip precision so identical inputs give byte-identical files.
"""
from __future__ import annotations

import json
import os
import platform
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .analysis import classify_state, coherence_trace, compare_rates, extract_timescales, is_decoherence_free
from .channels import evolve
from .config import ScenarioConfig
from .entanglement import negativity, support
from .errors import ContractError
from .linalg import DIM, JOINT_DIM, partial_trace, projector
from .noise import oracle_compare

FORMATS = ("csv", "json")
DFS_SAMPLES = 11


@dataclass
class Table:
    columns: list
    rows: list


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".16e")
    return str(x)


def _jsonable(x):
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, float) and not np.isfinite(x):
        return str(x)
    return x


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_table(table: Table, fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(table.columns)]
        lines += [",".join(_cell(v) for v in row) for row in table.rows]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        rows = [[_jsonable(v) for v in row] for row in table.rows]
        return json.dumps({"columns": table.columns, "rows": rows}, indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_table(out_dir: Path, name: str, table: Table, fmt: str) -> str:
    filename = f"{name}.{fmt}"
    atomic_write(Path(out_dir) / filename, render_table(table, fmt))
    return filename


def dumps_summary(summary: dict) -> str:
    def default(o):
        v = _jsonable(o)
        if v is o:
            raise TypeError(f"not serializable: {type(o).__name__}")
        return v
    return json.dumps(_clean(summary), indent=2, sort_keys=True, default=default) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _jsonable(obj)


def versions() -> dict:
    return {"qutrit_dephasing": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


# --------------------------------------------------------------------------
# tables

_UPPER = [(i, j) for i in range(JOINT_DIM) for j in range(i + 1, JOINT_DIM)]
_REDUCED_UPPER = [(i, j) for i in range(DIM) for j in range(i + 1, DIM)]


def negativity_table(states, t) -> Table:
    rows = []
    for s, rho in zip(t, states):
        res = negativity(rho)
        off = np.array([abs(rho[i, j]) for i, j in _UPPER])
        rows.append([s, res.value, len(res.negative_eigenvalues), off.min(), off.max()])
    return Table(["t", "negativity", "n_negative_eigenvalues", "min_offdiag", "max_offdiag"], rows)


def rho_table(states, t) -> Table:
    cols = ["t"]
    for i in range(JOINT_DIM):
        for j in range(JOINT_DIM):
            cols += [f"re_{i + 1}_{j + 1}", f"im_{i + 1}_{j + 1}"]
    rows = []
    for s, rho in zip(t, states):
        flat = rho.reshape(-1)
        rows.append([s] + [v for z in flat for v in (z.real, z.imag)])
    return Table(cols, rows)


def coherence_table(rho0, spec, t) -> Table:
    tr = coherence_trace(rho0, spec, t)
    cols = ["t"] + [f"abs_rho_{i}_{j}" for i, j in tr.positions]
    return Table(cols, [[s] + list(m) for s, m in zip(tr.t, tr.magnitudes)])


def reduced_table(states, t) -> Table:
    cols = ["t"] + [f"{sub}_{i + 1}_{j + 1}" for sub in "AB" for i, j in _REDUCED_UPPER]
    rows = []
    for s, rho in zip(t, states):
        row = [s]
        for sub in "AB":
            red = partial_trace(rho, sub)
            row += [abs(red[i, j]) for i, j in _REDUCED_UPPER]
        rows.append(row)
    return Table(cols, rows)


def _positions_text(positions) -> str:
    items = sorted(positions, key=lambda p: tuple(str(x) for x in p))
    return ";".join("-".join(str(x) for x in p) for p in items)


def timescale_summary(spec) -> dict:
    out = {}
    for level in ("2-qutrit", "1-qutrit"):
        ts = extract_timescales(spec, level)
        out[level] = [{"tau": tau, "fitted_tau": fit, "positions": _positions_text(pos)}
                      for pos, tau, fit in ts.entries]
    return out


def timescales_table(spec) -> Table:
    rows = []
    for level, entries in timescale_summary(spec).items():
        for e in entries:
            rows.append([level, e["tau"], e["fitted_tau"], e["positions"]])
    return Table(["level", "tau", "fitted_tau", "positions"], rows)


def classification_summary(psi) -> dict:
    return {"label": classify_state(psi).value,
            "support": sorted(support(psi)),
            "negativity": negativity(projector(psi)).value}


def oracle_table(rho0, spec, times, n, seed):
    rows, summary = [], []
    for s in times:
        rep = oracle_compare(rho0, spec, s, n, seed)
        exact, mean = rep.exact, rep.mean_rho
        for i in range(JOINT_DIM):
            for j in range(JOINT_DIM):
                rows.append([s, i + 1, j + 1, exact[i, j].real, exact[i, j].imag,
                             mean[i, j].real, mean[i, j].imag,
                             rep.stderr[i, j], rep.z_scores[i, j]])
        summary.append({"t": s, "max_z": rep.max_z, "max_abs_deviation": rep.max_abs_deviation,
                        "disagreements": [list(p) for p in rep.disagreements], "passed": rep.passed})
    cols = ["t", "i", "j", "analytic_re", "analytic_im", "mc_re", "mc_im", "stderr", "z"]
    return Table(cols, rows), summary


def verdict_summary(psi, spec) -> dict:
    try:
        rc = compare_rates(psi, spec)
    except ContractError as exc:
        return {"applicable": False, "reason": str(exc)}
    return {
        "applicable": True,
        "verdict": rc.verdict, "verdict_joint": rc.verdict_joint, "verdict_reduced": rc.verdict_reduced,
        "tau_dis": rc.tau_dis, "dis_mode": rc.dis_mode,
        "tau_dis_tail_fit": rc.tau_dis_tail_fit, "tau_dis_converged": rc.tau_dis_converged,
        "tau_dec": rc.tau_dec, "tau_dec_positions": _positions_text(rc.tau_dec_positions),
        "tau_dec_reduced": rc.tau_dec_reduced,
        "tau_dis_candidates": list(rc.tau_dis_candidates),
        "tau_dec_candidates": list(rc.tau_dec_candidates),
        "negativity_initial": rc.negativity_initial, "negativity_limit": rc.negativity_limit,
        "convention": "slowest-component time constants; tau_dis from |N(t) - N(inf)|",
    }


# --------------------------------------------------------------------------
# driver


@dataclass
class ScenarioResult:
    status: int
    summary: dict
    files: list


def run_scenario(config: ScenarioConfig, out_dir, fmt: str = "csv") -> ScenarioResult:
    """Evaluate ``config`` and write its tables plus ``summary.json`` to ``out_dir``.

    Status is 0 on success and 2 when the Monte Carlo oracle disagrees with
    the analytic channel.
    """
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    out_dir = Path(out_dir)
    psi = config.state.vector()
    rho0 = projector(psi)
    spec = config.channels.spec()
    t = config.time.grid()
    states = [evolve(rho0, spec, s) for s in t]

    files = []
    status = 0
    summary: dict = {
        "config": config.to_dict(),
        "seed": config.mc.seed,
        "versions": versions(),
        "time_units": "1/Gamma",
        "classification": classification_summary(psi),
        "timescales": timescale_summary(spec),
        "verdict": verdict_summary(psi, spec),
    }
    dfs = is_decoherence_free(rho0, spec, config.time.t_end, DFS_SAMPLES)
    summary["decoherence_free"] = dfs.decoherence_free
    summary["dfs_max_deviation"] = dfs.max_deviation

    for name in config.outputs:
        if name == "negativity":
            table = negativity_table(states, t)
        elif name == "rho":
            table = rho_table(states, t)
        elif name == "coherence":
            table = coherence_table(rho0, spec, t)
        elif name == "reduced":
            table = reduced_table(states, t)
        elif name == "timescales":
            table = timescales_table(spec)
        elif name == "classify":
            c = summary["classification"]
            table = Table(["label", "support", "negativity"],
                          [[c["label"], ";".join(map(str, c["support"])), c["negativity"]]])
        elif name == "dfs":
            table = Table(["decoherence_free", "max_deviation", "horizon", "samples"],
                          [[dfs.decoherence_free, dfs.max_deviation, config.time.t_end, DFS_SAMPLES]])
        elif name == "oracle":
            times = config.mc.times if config.mc.times is not None else (config.time.t_end,)
            table, osum = oracle_table(rho0, spec, times, config.mc.n_trajectories, config.mc.seed)
            summary["oracle"] = osum
            if not all(o["passed"] for o in osum):
                status = 2
        else:
            raise ValueError(f"unknown output {name!r}")
        files.append(write_table(out_dir, name, table, fmt))

    summary["files"] = files
    atomic_write(out_dir / "summary.json", dumps_summary(summary))
    files.append("summary.json")
    return ScenarioResult(status, summary, files)
