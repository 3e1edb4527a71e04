#!/usr/bin/env python3
"""How often does greedy span alignment fall short of the best assignment?

Samples random multi-span gold/prediction pairs (up to 4 x 4 spans), scores
the greedy alignment used by the metric, and compares it with exhaustive
search over all one-to-one assignments.  Results are bucketed by whether
every span on the smaller side has a strictly best, distinct partner and by
whether the optimum itself is unique.

    python3 scripts/greedy_vs_optimal.py --cases 20000 --seed 0
"""

from __future__ import annotations

import argparse
import itertools
import random
from collections import Counter
from dataclasses import dataclass

from dropkit.metrics import align_spans, normalize_text, pair_f1

VOCAB = "kasay prater field goal yard castile aragon vatasha negotino of in 10 40 43".split()


@dataclass
class StudyConfig:
    cases: int = 10000
    seed: int = 0
    max_spans: int = 4
    max_tokens: int = 4


def _assignments(n_g: int, n_p: int):
    if n_g <= n_p:
        for perm in itertools.permutations(range(n_p), n_g):
            yield list(enumerate(perm))
    else:
        for perm in itertools.permutations(range(n_g), n_p):
            yield [(g, p) for p, g in enumerate(perm)]


def _partner_condition(scores) -> bool:
    rows = scores if len(scores) <= len(scores[0]) else [list(c) for c in zip(*scores)]
    partners = []
    for r in rows:
        best = max(r)
        if r.count(best) != 1:
            return False
        partners.append(r.index(best))
    return len(set(partners)) == len(partners)


def run(cfg: StudyConfig) -> Counter:
    rng = random.Random(cfg.seed)
    tally: Counter = Counter()
    for _ in range(cfg.cases):
        def span():
            return normalize_text(" ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, cfg.max_tokens))))

        g = [span() for _ in range(rng.randint(1, cfg.max_spans))]
        p = [span() for _ in range(rng.randint(1, cfg.max_spans))]
        scores = [[pair_f1(a, b) for b in p] for a in g]
        totals = sorted((sum(scores[i][j] for i, j in a) for a in _assignments(len(g), len(p))), reverse=True)
        best = totals[0]
        unique = len(totals) == 1 or totals[1] < best - 1e-12
        greedy = sum(s for *_, s in align_spans(g, p))
        bucket = ("partner-condition" if _partner_condition(scores) else "no-condition",
                  "unique-optimum" if unique else "tied-optimum")
        tally[bucket + ("total",)] += 1
        if greedy < best - 1e-12:
            tally[bucket + ("greedy-below",)] += 1
    return tally


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cases", type=int, default=StudyConfig.cases)
    parser.add_argument("--seed", type=int, default=StudyConfig.seed)
    args = parser.parse_args()
    tally = run(StudyConfig(cases=args.cases, seed=args.seed))
    print(f"{'condition':<20}{'optimum':<16}{'cases':>8}{'greedy below':>14}")
    for cond in ("partner-condition", "no-condition"):
        for opt in ("unique-optimum", "tied-optimum"):
            total = tally[(cond, opt, "total")]
            below = tally[(cond, opt, "greedy-below")]
            print(f"{cond:<20}{opt:<16}{total:>8}{below:>14}")


if __name__ == "__main__":
    main()
