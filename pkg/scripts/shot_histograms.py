"""10,000-shot output histograms at fixed n, printed as text bars."""

import argparse

from qmcrisk.harness.config import SCENARIOS, ExperimentConfig
from qmcrisk.harness.runner import build_scenario
from qmcrisk.qae import estimate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="eq-max", choices=SCENARIOS)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--shots", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--engine", default="branch", choices=("statevector", "branch"))
    args = ap.parse_args()
    config = ExperimentConfig(args.scenario, n=args.n)
    sc = build_scenario(config, args.n)
    res = estimate(sc.problem, "shots", args.shots, args.seed, args.engine, sc.p_oracle)
    counts = res.histogram.data
    width = 60 / max(counts.max(), 1)
    print(f"{sc.name} n={args.n} shots={args.shots} seed={args.seed}")
    for z, c in enumerate(counts):
        print(f"{z:4d} {int(c):6d} {'#' * int(round(c * width))}")
    lo, hi = res.p_exact_pair
    print(f"z0={res.z0} p_est={res.p_est:.6f} p_oracle={sc.p_oracle:.6f}; peaks expected near {lo:.2f} and {hi:.2f}")


if __name__ == "__main__":
    main()
