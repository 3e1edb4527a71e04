#!/usr/bin/env python3
"""Run both searches over the worked-example fixtures and summarise them.

For each question this prints the extracted table size, how many logical
forms match the gold answer at each depth (with truncation and budget
flags), a few of the shortest forms, and the execution targets.

    python3 scripts/fixture_search_report.py --max-depth 3 --show 3
"""

from __future__ import annotations

import argparse
import json
import time

from dropkit.corpus import answer_to_json
from dropkit.fixtures import fixture_dataset, fixture_tables
from dropkit.lflang import function_inventory, induce_grammar
from dropkit.search import SearchConfig, marginal_target_count, search_execution_targets, search_logical_forms


def report(max_depth: int, show: int, word_numbers: bool) -> list[dict]:
    tables = fixture_tables()
    inventory = function_inventory()
    rows = []
    for passage, qas in fixture_dataset(word_numbers=word_numbers):
        table = tables.get(passage.id)
        for qa in qas:
            gold = qa.gold_answers[0]
            entry = {
                "question_id": qa.question_id,
                "gold": answer_to_json(gold),
                "table_rows": len(table.rows) if table else 0,
                "forms_by_depth": {},
            }
            if table is not None:
                grammar = induce_grammar(inventory, qa, passage, table)
                for depth in range(1, max_depth + 1):
                    t0 = time.perf_counter()
                    result = search_logical_forms(grammar, table, gold, SearchConfig(max_depth=depth))
                    entry["forms_by_depth"][depth] = {
                        "forms": len(result.hits),
                        "truncated": result.truncated,
                        "exhaustive": result.exhaustive,
                        "seconds": round(time.perf_counter() - t0, 3),
                    }
                entry["shortest"] = [h.text for h in result.hits[:show]]
            targets = search_execution_targets(passage, qa, gold)
            entry["execution_targets"] = targets.to_json()
            entry["execution_count"] = marginal_target_count(targets)
            rows.append(entry)
    return rows


def print_human(rows: list[dict]) -> None:
    for r in rows:
        print(f"{r['question_id']}  gold={json.dumps(r['gold'])}  table rows={r['table_rows']}")
        for depth, info in r["forms_by_depth"].items():
            flags = []
            if info["truncated"]:
                flags.append("truncated")
            if not info["exhaustive"]:
                flags.append("budget hit")
            suffix = f" ({', '.join(flags)})" if flags else ""
            print(f"  depth {depth}: {info['forms']} forms in {info['seconds']} s{suffix}")
        for text in r.get("shortest", []):
            print(f"    {text}")
        print(f"  execution targets: {r['execution_count']}  {json.dumps(r['execution_targets'])}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-depth", type=int, default=3)
    parser.add_argument("--show", type=int, default=3, help="shortest forms to list per question")
    parser.add_argument("--word-numbers", action="store_true")
    parser.add_argument("--json", action="store_true", help="emit JSON instead of text")
    args = parser.parse_args()
    rows = report(args.max_depth, args.show, args.word_numbers)
    if args.json:
        print(json.dumps(rows, indent=2, ensure_ascii=False))
    else:
        print_human(rows)


if __name__ == "__main__":
    main()
