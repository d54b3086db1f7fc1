#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Rank-4 LSI reference for the fixture (tf-idf, no preprocessing).

Uses the brute-force cells written by vsm_oracle.py and numpy's LAPACK SVD.
Folded coordinates are reported as magnitudes because singular vector signs
are arbitrary.

    lsi_oracle.py <golden_dir>
"""
import csv
import json
import os
import sys

import numpy as np


def main(golden):
    cells = list(csv.DictReader(open(os.path.join(golden, "vsm_tfidf_matrix.csv"))))
    terms = sorted({c["term"] for c in cells})
    docs = sorted({c["doc"] for c in cells})
    ti = {t: i for i, t in enumerate(terms)}
    di = {d: i for i, d in enumerate(docs)}
    a = np.zeros((len(terms), len(docs)))
    for c in cells:
        a[ti[c["term"]], di[c["doc"]]] = float(c["weight"])
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    q = np.zeros(len(terms))
    for row in csv.DictReader(open(os.path.join(golden, "vsm_q1_vector.csv"))):
        q[ti[row["term"]]] = float(row["weight"])
    k = 4
    coords = u[:, :k].T @ q
    out = {"k": k, "singular_values": [float(x) for x in s[:k]],
           "all_singular_values": [float(x) for x in s],
           "q1_abs_coordinates": [float(abs(x)) for x in coords]}
    with open(os.path.join(golden, "lsi_k4.json"), "w") as f:
        json.dump(out, f, indent=2)
        f.write("\n")
    print("singular values", s[:k])


if __name__ == "__main__":
    if len(sys.argv) != 2:
        raise SystemExit(__doc__)
    main(sys.argv[1])
