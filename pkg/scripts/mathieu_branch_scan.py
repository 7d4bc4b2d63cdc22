#!/usr/bin/env python3
"""Trace Mathieu characteristic-value branches a_nu(q) over a q grid.

Produces the classical stability-chart data: one CSV row per (nu, parity, q).
Fractional orders interleave between the integer a_n / b_n curves.

Usage: python scripts/mathieu_branch_scan.py [--orders 0,0.5,1,1.5,2] [--out branches.csv]
"""

import argparse
import csv
import sys

import numpy as np

from spinchain.mathieu import characteristic_value


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--orders", default="0,0.5,1,1.5,2,2.5,3")
    ap.add_argument("--q-grid", type=float, nargs=3, default=(-5.0, 5.0, 41),
                    metavar=("LO", "HI", "COUNT"))
    ap.add_argument("--out", default="mathieu_branches.csv")
    args = ap.parse_args()

    orders = [float(tok) for tok in args.orders.split(",") if tok.strip()]
    lo, hi, count = args.q_grid
    qs = np.linspace(lo, hi, int(count))
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["nu", "parity", "q", "a_nu"])
        for nu in orders:
            integer = abs(nu - round(nu)) < 1e-12
            parities = ("ce",) if not integer or round(nu) == 0 else ("ce", "se")
            for parity in parities:
                for q in qs:
                    writer.writerow(
                        [
                            format(nu, ".15g"),
                            parity,
                            format(q, ".15g"),
                            format(characteristic_value(nu, float(q), parity), ".15g"),
                        ]
                    )
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
