#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Brute-force tf-idf cells for the fixture corpus without preprocessing.

Writes <out_dir>/vsm_tfidf_matrix.csv (term, doc, weight) for every nonzero
cell and <out_dir>/vsm_q1_vector.csv (term, weight) for query Q1.

    vsm_oracle.py <lessons.jsonl> <queries.jsonl> <out_dir>
"""
import json
import math
import os
import re
import sys
from collections import Counter


def tokens(text):
    return re.findall(r"[a-z0-9]+", text.lower())


def main(lessons_path, queries_path, out_dir):
    lessons = [json.loads(l) for l in open(lessons_path) if l.strip()]
    queries = [json.loads(l) for l in open(queries_path) if l.strip()]
    docs = [Counter(tokens(l["text"])) for l in lessons]
    n = len(docs)
    df = Counter()
    for d in docs:
        df.update(d.keys())
    with open(os.path.join(out_dir, "vsm_tfidf_matrix.csv"), "w") as f:
        f.write("term,doc,weight\n")
        for lesson, d in zip(lessons, docs):
            for term in sorted(d):
                w = d[term] * math.log10(n / df[term])
                if w != 0.0:
                    f.write(f"{term},{lesson['id']},{w!r}\n")
    q1 = next(q for q in queries if q["id"] == "Q1")
    with open(os.path.join(out_dir, "vsm_q1_vector.csv"), "w") as f:
        f.write("term,weight\n")
        for term, tf in sorted(Counter(tokens(q1["text"])).items()):
            if term in df:
                w = tf * math.log10(n / df[term])
                if w != 0.0:
                    f.write(f"{term},{w!r}\n")
    print(f"vocabulary {len(df)} terms over {n} lessons")


if __name__ == "__main__":
    if len(sys.argv) != 4:
        raise SystemExit(__doc__)
    main(*sys.argv[1:])
