"""Command line entry point: run, depth-scan, oracle."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .. import oracles
from ..models import DefaultRegion, calibrate_binomial, calibrate_hazard
from ..statevector import BUDGET_ENV, max_qubits
from . import config as cfg
from .depth_scan import FAMILIES, depth_scan
from .emit import emit, to_csv
from .runner import RefusalError, build_scenario, run

EXIT_REFUSED = 2
EXIT_BAD_INPUT = 3


def _fail(payload: dict, code: int) -> int:
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def _load_config(args) -> cfg.ExperimentConfig:
    """Config file (if any) overlaid with command-line flags."""
    data = {}
    if args.config:
        data = cfg.read_json(args.config)
    if args.scenario:
        data["scenario"] = args.scenario
    if "scenario" not in data:
        raise cfg.ConfigError("give --config FILE or --scenario NAME")
    for key in ("mode", "shots", "seed", "engine", "out", "n"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if getattr(args, "deterministic", False):
        data["deterministic"] = True
    if getattr(args, "high_memory", False):
        data["high_memory"] = True
    return cfg.from_dict(data)


def cmd_run(args) -> int:
    try:
        config = _load_config(args)
    except cfg.ConfigError as exc:
        return _fail({"error": "invalid config", "detail": str(exc)}, EXIT_BAD_INPUT)
    out_dir = config.out or "results"
    dump_dir = out_dir if args.dump_circuit else None
    try:
        records = run(config, workers=args.workers, dump_dir=dump_dir)
    except RefusalError as exc:
        payload = exc.payload()
        payload["budget_env"] = BUDGET_ENV
        return _fail(payload, EXIT_REFUSED)
    paths = emit(records, out_dir, stem=f"{config.scenario}_{config.mode}")
    sys.stdout.write(to_csv(records))
    for p in paths:
        sys.stdout.write(f"# wrote {p}\n")
    return 0


def cmd_depth_scan(args) -> int:
    try:
        sizes = cfg.parse_range(args.range)
    except (ValueError, cfg.ConfigError) as exc:
        return _fail({"error": "invalid range", "detail": str(exc)}, EXIT_BAD_INPUT)
    scan = depth_scan(args.family, sizes)
    sys.stdout.write(scan.to_csv())
    sys.stdout.write(scan.summary() + "\n")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"depth_{args.family}.csv").write_text(scan.to_csv())
    return 0


def cmd_oracle(args) -> int:
    try:
        config = _load_config(args)
    except cfg.ConfigError as exc:
        return _fail({"error": "invalid config", "detail": str(exc)}, EXIT_BAD_INPUT)
    sc = build_scenario(config, config.n[0])
    lines = [f"{sc.name}: {sc.oracle.quantity} = {float(sc.oracle.value):.12g} ({sc.oracle.method})"]
    if config.scenario in ("eq-max", "eq-min", "credit-default"):
        p = calibrate_binomial(config.mu, config.sigma, config.T, config.m)
        lines.append(f"  u={p.u:.6f} d={p.d:.6f} q={p.q:.6f} theta_u={p.theta_u_degrees:.3f} deg")
        pmf = [oracles.binomial_pmf(j, p.m, p.q) for j in range(p.m + 1)]
        lines.append("  up-count pmf: " + " ".join(f"{v:.6f}" for v in pmf))
        if config.scenario == "credit-default":
            region = DefaultRegion.from_down_steps(p.m, config.barrier_down_steps) if config.j_set is None \
                else DefaultRegion(frozenset(config.j_set))
            lines.append(f"  default region j_set={sorted(region.j_set)} ({region.barrier})")
    if config.scenario == "credit-survival":
        h = calibrate_hazard(config.q_def, config.m, config.T, config.hazard_rate)
        lines.append(f"  q_def={h.q_def:.6g} theta_def={h.theta_def_degrees:.3f} deg")
    if isinstance(sc.oracle.value, Fraction):
        lines.append(f"  exact value {sc.oracle.value}")
    lines.append(f"  qubits at n={config.n[0]}: {sc.problem.num_qubits} (budget {max_qubits()})")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmcrisk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario sweep and write CSV/JSON")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--scenario", choices=cfg.SCENARIOS, help="scenario with default parameters")
    p.add_argument("--n", help="output qubits: 5, or a range 1..9")
    p.add_argument("--mode", choices=("exact", "shots"))
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--engine", choices=("statevector", "branch"))
    p.add_argument("--out", help="output directory (default ./results)")
    p.add_argument("--dump-circuit", action="store_true", help="write each full circuit in text form")
    p.add_argument("--deterministic", action="store_true", help="zero the seconds column")
    p.add_argument("--high-memory", action="store_true", help="use the full n range for ir/migration")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("depth-scan", help="decomposed depth versus m or n")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--range", required=True, help="A..B")
    p.add_argument("--out")
    p.set_defaults(func=cmd_depth_scan)

    p = sub.add_parser("oracle", help="print the classical reference values")
    p.add_argument("--scenario", choices=cfg.SCENARIOS)
    p.add_argument("--config")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
