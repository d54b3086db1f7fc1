#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Reference statistics for the test suite.

Tukey HSD decisions come from statsmodels (exact studentized range); letters
are the maximal cliques of the "not different" graph, ordered by their
highest-mean member. Wilcoxon p-values come from brute-force enumeration of
all 2^n sign assignments.

    stats_oracle.py tukey <dataset.csv> <out.csv>
    stats_oracle.py wilcoxon <out.json> d1 d2 ...
"""
import itertools
import json
import string
import sys

import networkx as nx
import numpy as np
import pandas as pd
from scipy import stats
from statsmodels.stats.multicomp import pairwise_tukeyhsd


def letters_from_decisions(labels, means, differ):
    """labels sorted by mean (desc); differ(a, b) -> bool."""
    g = nx.Graph()
    g.add_nodes_from(range(len(labels)))
    for a, b in itertools.combinations(range(len(labels)), 2):
        if not differ(labels[a], labels[b]):
            g.add_edge(a, b)
    cliques = [sorted(c) for c in nx.find_cliques(g)]
    cliques.sort()
    out = {lab: "" for lab in labels}
    for i, c in enumerate(cliques):
        for m in c:
            out[labels[m]] += string.ascii_uppercase[i]
    return out


def tukey_letters(frame, value="value", group="group", alpha=0.05):
    means = frame.groupby(group)[value].mean()
    labels = sorted(means.index, key=lambda g: (-means[g], g))
    spread = frame.groupby(group)[value].var(ddof=1).sum()
    if spread == 0.0:
        # Zero within-group variance: any nonzero mean difference is significant.
        def differ(a, b):
            return means[a] != means[b]
        margin = float("inf")
    else:
        res = pairwise_tukeyhsd(frame[value], frame[group], alpha=alpha)
        groups = res.groupsunique
        decision = {}
        k = 0
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                decision[(groups[i], groups[j])] = bool(res.reject[k])
                decision[(groups[j], groups[i])] = bool(res.reject[k])
                k += 1
        crit = (res.confint[:, 1] - res.confint[:, 0])[0] / 2.0
        margin = min(abs(abs(d) - crit) for d in res.meandiffs) / crit

        def differ(a, b):
            return decision[(a, b)] and means[a] != means[b]
    return labels, means, letters_from_decisions(labels, means, differ), margin


def wilcoxon_enumerated(diffs):
    d = [x for x in diffs if x != 0]
    n = len(d)
    if n == 0:
        return 1.0, 0.0, 0.0
    ranks = stats.rankdata(np.abs(d))
    w_plus = float(sum(r for r, x in zip(ranks, d) if x > 0))
    w_minus = float(sum(r for r, x in zip(ranks, d) if x < 0))
    w = min(w_plus, w_minus)
    total = float(sum(ranks))
    extreme = 0
    for signs in itertools.product((0, 1), repeat=n):
        s = sum(r for r, on in zip(ranks, signs) if on)
        if min(s, total - s) <= w + 1e-9:
            extreme += 1
    return min(1.0, extreme / 2 ** n), w_plus, w_minus


def main(argv):
    if argv[1] == "tukey":
        frame = pd.read_csv(argv[2])
        labels, means, letters, margin = tukey_letters(frame)
        with open(argv[3], "w") as f:
            f.write("group,mean,letters\n")
            for lab in labels:
                f.write(f"{lab},{float(means[lab])!r},{letters[lab]}\n")
        print(f"{argv[2]}: {[letters[l] for l in labels]} (closest decision margin {margin:.3%})")
    elif argv[1] == "wilcoxon":
        diffs = [float(x) for x in argv[3:]]
        p, wp, wm = wilcoxon_enumerated(diffs)
        ref = stats.wilcoxon(diffs, method="approx", correction=True).pvalue
        with open(argv[2], "w") as f:
            json.dump({"differences": diffs, "w_plus": wp, "w_minus": wm, "p_value": p,
                       "scipy_normal_approximation": ref}, f, indent=2)
            f.write("\n")
        print(f"wilcoxon {diffs}: p = {p} (scipy approx {ref:.4f})")
    else:
        raise SystemExit(__doc__)


if __name__ == "__main__":
    main(sys.argv)
