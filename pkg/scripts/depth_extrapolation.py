"""Decomposed-depth trends, with linear (in m) and geometric (in n) extrapolation.

Every extrapolated figure is a fit to the measured rows, not a simulation.
"""

import argparse
from pathlib import Path

from qmcrisk.harness.config import parse_range
from qmcrisk.harness.depth_scan import FAMILIES, depth_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-range", default="3..12")
    ap.add_argument("--n-range", default="5..9")
    ap.add_argument("--out")
    args = ap.parse_args()
    for family in FAMILIES:
        sizes = parse_range(args.n_range if family == "full-eq-max" else args.m_range)
        scan = depth_scan(family, sizes)
        print(scan.to_csv(), end="")
        print(scan.summary())
        print()
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"depth_{family}.csv").write_text(scan.to_csv())


if __name__ == "__main__":
    main()
