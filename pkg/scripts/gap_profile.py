"""Tabulate the gap between (1-x)^x and sinc(x) on the unit interval.

Positivity of the gap at x = 1/p is equivalent to 2*p^(1/p) < pi_p, the
inequality behind the odd certification constant.  Writes a CSV when
--out is given, otherwise prints summary statistics only.
"""

import argparse
import csv

import numpy as np

from fermi_spectra import FIGURE2_COLUMNS, figure2_data


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--out", type=str, default=None)
    args = ap.parse_args()

    x = np.arange(1, args.n + 1, dtype=float) / (args.n + 1)
    table = figure2_data(1.0 / x)
    gap = table[:, FIGURE2_COLUMNS.index("b_minus_r")]
    i_min = int(np.argmin(gap))
    print(f"points: {args.n}")
    print(f"min gap {gap[i_min]:.6e} at x={table[i_min, 0]:.6f}")
    print(f"max gap {gap.max():.6e} at x={table[int(np.argmax(gap)), 0]:.6f}")
    print(f"all positive: {bool(np.all(gap > 0))}")

    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            writer = csv.writer(fh)
            writer.writerow(FIGURE2_COLUMNS)
            for row in table:
                writer.writerow([repr(float(v)) for v in row])
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
