#!/usr/bin/env python3
"""Brute-force ranking-metric oracle over all orderings of a 6-item toy.

For every permutation of items {0..5} (lexicographic order, matching
std::next_permutation) the permutation is read as the descending score
ranking; Recall@3 and NDCG@3 against test set {1, 4} are tabulated. Also
freezes NDCG of a single hit at rank 2 with k=2 (= 1/log2(3)).
Writes tests/expected/metrics_oracle.inc.
"""
import itertools
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40

OUT = Path(__file__).resolve().parent.parent / "expected" / "metrics_oracle.inc"

TEST = {1, 4}
K = 3


def metrics(perm):
    topk = perm[:K]
    hits = sum(1 for i in topk if i in TEST)
    recall = mp.mpf(hits) / len(TEST)
    dcg = sum(1 / mp.log(r + 2, 2) for r, i in enumerate(topk) if i in TEST)
    idcg = sum(1 / mp.log(r + 2, 2) for r in range(min(K, len(TEST))))
    return recall, dcg / idcg


recalls, ndcgs = [], []
for perm in itertools.permutations(range(6)):
    r, n = metrics(perm)
    recalls.append(r)
    ndcgs.append(n)


def f(x):
    return repr(float(x))


lines = [
    "// Generated by tests/oracle/oracle_metrics.py -- do not edit by hand.",
    "#pragma once",
    "",
    "inline constexpr int kToyItems = 6;",
    "inline constexpr int kToyK = %d;" % K,
    "inline constexpr int kToyTest[] = {1, 4};",
    "inline constexpr double kPermRecall[] = {",
]
for i in range(0, 720, 6):
    lines.append("    " + ", ".join(f(v) for v in recalls[i:i + 6]) + ",")
lines.append("};")
lines.append("inline constexpr double kPermNdcg[] = {")
for i in range(0, 720, 6):
    lines.append("    " + ", ".join(f(v) for v in ndcgs[i:i + 6]) + ",")
lines.append("};")
lines.append(f"inline constexpr double kNdcgSingleHitRank2 = {f(1 / mp.log(3, 2))};")

OUT.write_text("\n".join(lines) + "\n")
print(f"wrote {OUT}")
