#!/usr/bin/env python3
"""Regenerate data/qtable_0.05.csv: upper 5% points of the studentized range.

Values are rounded to three decimals, the precision of the usual printed tables.
"""
import math
import sys

from scipy.stats import studentized_range

DF_ROWS = list(range(2, 31)) + [40, 60, 120, math.inf]
KS = list(range(2, 21))


def main(out):
    with open(out, "w") as fh:
        fh.write("df," + ",".join(str(k) for k in KS) + "\n")
        for df in DF_ROWS:
            vals = []
            for k in KS:
                q = studentized_range.ppf(0.95, k, df)
                vals.append(f"{q:.3f}")
            label = "inf" if math.isinf(df) else str(df)
            fh.write(label + "," + ",".join(vals) + "\n")
            fh.flush()


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "qtable_0.05.csv")
