#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Recomputes sweep metrics and statistics from persisted rankings.

Reads sweep_report.csv (config parameters only) and sweep_rankings.csv from a
sweep directory, plus the query and gold files, and writes:

    sweep_metrics.csv   config_id, top20, map, p_at_10, r_at_10
    sweep_hsd.csv       family, parameter, metric, group, letters
    sweep_wilcoxon.csv  family, metric, comparison, treated, baseline, p_value

    sweep_oracle.py <sweep_dir> <queries.jsonl> <goldset.json> <out_dir>
"""
import csv
import json
import os
import sys
from collections import defaultdict

import pandas as pd

sys.path.insert(0, os.path.dirname(__file__))
from stats_oracle import tukey_letters, wilcoxon_enumerated  # noqa: E402

PIPELINE_LABEL = {"none": "none", "stem": "stemming", "stop": "stopping", "stopstem": "stemming+stopping"}
FAMILY_PARAMS = {"vsm": ["pipeline", "similarity", "weight"], "lsi": ["pipeline", "topics", "weight"],
                 "lda": ["pipeline", "topics"]}
METRICS = ["top20", "map"]


def per_query(ranking, relevant, top_k=20, pr_k=10):
    hits = [lid in relevant for lid in ranking]
    found = 0
    ap = 0.0
    for i, h in enumerate(hits):
        if h:
            found += 1
            ap += found / (i + 1)
    return {
        "top20": 1 if any(hits[:top_k]) else 0,
        "map": ap / len(relevant),
        "p_at_10": sum(hits[:pr_k]) / pr_k,
        "r_at_10": sum(hits[:pr_k]) / len(relevant),
    }


def main(sweep_dir, queries_path, gold_path, out_dir):
    queries = [json.loads(l)["id"] for l in open(queries_path) if l.strip()]
    gold = {q: set(v) for q, v in json.load(open(gold_path)).items()}
    configs = list(csv.DictReader(open(os.path.join(sweep_dir, "sweep_report.csv"))))
    rankings = defaultdict(lambda: defaultdict(list))
    for row in csv.DictReader(open(os.path.join(sweep_dir, "sweep_rankings.csv"))):
        rankings[row["config_id"]][row["query_id"]].append((int(row["rank"]), row["lesson_id"]))

    per = {}
    agg = {}
    for c in configs:
        cid = c["config_id"]
        values = []
        for q in queries:
            ranked = [lid for _, lid in sorted(rankings[cid][q])]
            values.append(per_query(ranked, gold[q]))
        per[cid] = values
        agg[cid] = {}
        for m in ["top20", "map", "p_at_10", "r_at_10"]:
            s = 0.0
            for v in values:
                s += v[m]
            agg[cid][m] = s / len(values)

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "sweep_metrics.csv"), "w") as f:
        f.write("config_id,top20,map,p_at_10,r_at_10\n")
        for c in configs:
            a = agg[c["config_id"]]
            f.write(f"{c['config_id']},{a['top20']!r},{a['map']!r},{a['p_at_10']!r},{a['r_at_10']!r}\n")

    def value_of(c, param):
        if param == "pipeline":
            return PIPELINE_LABEL[c["pipeline"]]
        return c[param]

    worst_margin = float("inf")
    with open(os.path.join(out_dir, "sweep_hsd.csv"), "w") as f:
        f.write("family,parameter,metric,group,letters\n")
        for fam, params in FAMILY_PARAMS.items():
            members = [c for c in configs if c["model"] == fam]
            if not members:
                continue
            for metric in METRICS:
                for param in params:
                    frame = pd.DataFrame({"group": [value_of(c, param) for c in members],
                                          "value": [agg[c["config_id"]][metric] for c in members]})
                    labels, _, letters, margin = tukey_letters(frame)
                    worst_margin = min(worst_margin, margin)
                    for lab in labels:
                        f.write(f"{fam},{param},{metric},{lab},{letters[lab]}\n")

    with open(os.path.join(out_dir, "sweep_wilcoxon.csv"), "w") as f:
        f.write("family,metric,comparison,treated,baseline,p_value\n")
        for fam in FAMILY_PARAMS:
            members = [c for c in configs if c["model"] == fam]
            if not members:
                continue
            for metric in METRICS:
                def best(pipeline):
                    pool = [c["config_id"] for c in members if c["pipeline"] == pipeline]
                    return sorted(pool, key=lambda cid: (-agg[cid][metric], cid))[0]
                base = best("none")
                for p in ["stem", "stop", "stopstem"]:
                    treated = best(p)
                    diffs = [a[metric] - b[metric] for a, b in zip(per[treated], per[base])]
                    pval, _, _ = wilcoxon_enumerated(diffs)
                    f.write(f"{fam},{metric},{PIPELINE_LABEL[p]} vs none,{treated},{base},{pval!r}\n")
    print(f"{len(configs)} configs; closest HSD decision margin {worst_margin:.3%}")


if __name__ == "__main__":
    if len(sys.argv) != 5:
        raise SystemExit(__doc__)
    main(*sys.argv[1:])
