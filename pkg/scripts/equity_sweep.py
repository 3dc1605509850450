"""Estimate vs n for eq-max and eq-min (CSV on stdout, files under --out)."""

import argparse

from qmcrisk.harness.config import ExperimentConfig
from qmcrisk.harness.emit import emit, to_csv
from qmcrisk.harness.runner import run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", default="1..9")
    ap.add_argument("--engine", default="statevector", choices=("statevector", "branch"))
    ap.add_argument("--out", default="results")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    for scenario in ("eq-max", "eq-min"):
        config = ExperimentConfig(scenario, n=args.n, engine=args.engine, deterministic=True)
        records = run(config, workers=args.workers)
        emit(records, args.out, stem=f"{scenario}_sweep")
        print(to_csv(records), end="")
        for r in records:
            flag = "ok" if r.abs_error <= r.delta_p else "OUTSIDE"
            print(f"# {scenario} n={r.n}: |p_est - p| = {r.abs_error:.3g}, bound {r.delta_p:.3g} {flag}")


if __name__ == "__main__":
    main()
