"""``qutrit-dephasing`` command-line front end.

Exit codes: 0 success, 1 config error, 2 validation failure (invalid
values in a config, failed verify suite, sweep violation, oracle
disagreement), 3 internal numerical contract violation.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .analysis import compare_rates
from .channels import ChannelSpec
from .config import ValidationError, load_config
from .errors import ConfigError, QutritError
from .linalg import JOINT_DIM, random_state
from .scenario import (
    FORMATS, Table, atomic_write, classification_summary, dumps_summary, run_scenario,
    timescale_summary, timescales_table, versions, write_table,
)
from .verify import SUITES, run_verify

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3

UNITS_NOTE = (
    "All quantities are dimensionless: times are measured in units of 1/Gamma "
    "(set gamma1 = gamma2 = 1 in the config to read the grid directly as Gamma*t), "
    "and each noise source decays its coherences as exp(-Gamma t / 2) per power of gamma."
)

ALL_OUTPUTS = ("negativity", "rho", "coherence", "reduced", "timescales", "classify", "dfs", "oracle")


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _emit(obj: dict) -> None:
    sys.stdout.write(dumps_summary(obj))


def cmd_evolve(args, outputs=None) -> int:
    cfg = _load(args)
    if outputs is not None:
        cfg = replace(cfg, outputs=outputs)
    res = run_scenario(cfg, args.out_dir, args.format)
    for f in res.files:
        print(Path(args.out_dir) / f)
    return res.status


def cmd_report(args) -> int:
    return cmd_evolve(args, ALL_OUTPUTS)


def cmd_classify(args) -> int:
    cfg = _load(args)
    summary = classification_summary(cfg.state.vector())
    if args.out_dir:
        write_table(Path(args.out_dir), "classify",
                    Table(["label", "support", "negativity"],
                          [[summary["label"], ";".join(map(str, summary["support"])), summary["negativity"]]]),
                    args.format)
    _emit(summary)
    return EXIT_OK


def cmd_timescales(args) -> int:
    cfg = _load(args)
    spec = cfg.channels.spec()
    if args.out_dir:
        write_table(Path(args.out_dir), "timescales", timescales_table(spec), args.format)
    _emit(timescale_summary(spec))
    return EXIT_OK


def cmd_mc(args) -> int:
    cfg = _load(args)
    res = run_scenario(replace(cfg, outputs=("oracle",)), args.out_dir, args.format)
    for entry in res.summary["oracle"]:
        status = "PASS" if entry["passed"] else "FAIL"
        print(f"{status} t={entry['t']:.6g} max_z={entry['max_z']:.3f} "
              f"max_abs_dev={entry['max_abs_deviation']:.3e}")
    return res.status


def cmd_verify(args) -> int:
    seed = 0 if args.seed is None else args.seed
    rep = run_verify(args.suite, seed, args.n)
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.measured:.3e} (threshold {c.threshold:.1e})")
    if args.out_dir:
        body = dict(rep.to_dict(), versions=versions())
        atomic_write(Path(args.out_dir) / f"verify_{args.suite}.json", dumps_summary(body))
    print("overall:", "PASS" if rep.passed else "FAIL")
    return EXIT_OK if rep.passed else EXIT_VALIDATION


def sweep_families(args):
    if args.config:
        spec = load_config(args.config).channels.spec()
        return [("config", spec)]
    return [("multi-local", ChannelSpec.multilocal(1.0)), ("collective", ChannelSpec.collective(1.0))]


def run_sweep(families, n: int, seed: int):
    """Random-state sweep of the rate comparison; states use ``default_rng([seed, index])``."""
    rows, violations = [], []
    for name, spec in families:
        for idx in range(n):
            psi = random_state(np.random.default_rng([seed, idx]))
            rc = compare_rates(psi, spec)
            row = [name, idx, rc.verdict, rc.verdict_joint, rc.verdict_reduced, rc.dis_mode,
                   np.nan if rc.tau_dis is None else rc.tau_dis,
                   np.nan if rc.tau_dec is None else rc.tau_dec,
                   np.nan if rc.tau_dec_reduced is None else rc.tau_dec_reduced,
                   np.nan if rc.tau_dis_tail_fit is None else rc.tau_dis_tail_fit,
                   rc.negativity_initial]
            row += [v for z in psi for v in (z.real, z.imag)]
            rows.append(row)
            if not rc.verdict:
                violations.append({"family": name, "index": idx,
                                   "amplitudes": [[z.real, z.imag] for z in psi],
                                   "tau_dis": rc.tau_dis, "tau_dec": rc.tau_dec,
                                   "tau_dec_reduced": rc.tau_dec_reduced, "dis_mode": rc.dis_mode})
    cols = ["family", "index", "verdict", "verdict_joint", "verdict_reduced", "dis_mode",
            "tau_dis", "tau_dec", "tau_dec_reduced", "tau_dis_tail_fit", "negativity_initial"]
    cols += [f"{part}_a{k + 1}" for k in range(JOINT_DIM) for part in ("re", "im")]
    return Table(cols, rows), violations


def cmd_sweep(args) -> int:
    seed = 0 if args.seed is None else args.seed
    table, violations = run_sweep(sweep_families(args), args.n, seed)
    out = Path(args.out_dir)
    write_table(out, "sweep", table, args.format)
    summary = {"n_states": len(table.rows), "seed": seed, "violations": violations,
               "n_violations": len(violations), "versions": versions()}
    atomic_write(out / "sweep_summary.json", dumps_summary(summary))
    print(f"{len(table.rows)} states, {len(violations)} violations")
    return EXIT_OK if not violations else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qutrit-dephasing",
        description="Entanglement and coherence of two qutrits under local and collective dephasing.",
        epilog=UNITS_NOTE,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True, out_default="out"):
        sp.add_argument("--config", required=config_required, help="scenario file (JSON)")
        sp.add_argument("--out-dir", default=out_default, help="directory for output files")
        sp.add_argument("--seed", type=int, default=None, help="overrides the config's mc.seed")
        sp.add_argument("--format", choices=FORMATS, default="csv", help="table format")
        return sp

    common(sub.add_parser("evolve", help="write the config's requested outputs", epilog=UNITS_NOTE))
    common(sub.add_parser("report", help="write every output kind for the config", epilog=UNITS_NOTE))
    common(sub.add_parser("mc", help="Monte Carlo trajectory check at mc.times (default: t_end)",
                          epilog=UNITS_NOTE))
    common(sub.add_parser("classify", help="fragile / robust / general / product-like"), out_default=None)
    common(sub.add_parser("timescales", help="coherence time constants of the configured channel",
                          epilog=UNITS_NOTE), out_default=None)
    sw = common(sub.add_parser("sweep", help="random-state check that disentanglement is at least as fast "
                               "as decoherence (multi-local and collective unless --config is given)",
                               epilog=UNITS_NOTE), config_required=False)
    sw.add_argument("--n", type=int, default=1000, help="states per channel family")
    v = common(sub.add_parser("verify", help="run an invariant suite"), config_required=False, out_default=None)
    v.add_argument("--suite", required=True, choices=SUITES)
    v.add_argument("--n", type=int, default=None, help="random states (trajectories for 'oracle')")
    return p


COMMANDS = {
    "evolve": cmd_evolve, "report": cmd_report, "mc": cmd_mc, "classify": cmd_classify,
    "timescales": cmd_timescales, "sweep": cmd_sweep, "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QutritError as exc:
        print(f"numerical contract violation: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
