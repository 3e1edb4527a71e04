"""Command-line entry point: ``dropkit <subcommand> ...``.

Exit status is 0 on success, 1 for bad input (unreadable or malformed
files, unknown ids, logical forms that do not parse or execute) and 2 for
anything unexpected.  Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from .corpus import DatasetError, answer_to_json, load_dataset, load_predictions
from .fixtures import write_fixtures
from .lflang import (
    ContextRuleConfig,
    EmptyDenotation,
    ExecutionError,
    LFSyntaxError,
    LFTypeError,
    execute,
    function_inventory,
    induce_grammar,
    load_embeddings,
    parse_lf,
    to_answer,
)
from .metrics import UnknownPredictionError, evaluate
from .search import SearchConfig, search_execution_targets, search_logical_forms
from .tables import dump_tables, import_tables, pattern_extract

log = logging.getLogger("dropkit")


class InputError(Exception):
    """Bad user input; reported without a traceback, exit status 1."""


INPUT_ERRORS = (
    InputError,
    DatasetError,
    LFSyntaxError,
    LFTypeError,
    ExecutionError,
    UnknownPredictionError,
    OSError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class CliConfig:
    command: str
    args: argparse.Namespace

    @property
    def json(self) -> bool:
        return self.args.format == "json"


def _emit(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False, indent=2))


def _existing(path: str | None, what: str) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{what} file not found: {path}")
    return p


def _find_question(dataset, question_id: str):
    for passage, qas in dataset:
        for qa in qas:
            if qa.question_id == question_id:
                return passage, qa
    raise InputError(f"question id {question_id!r} not in dataset")


def cmd_evaluate(cfg: CliConfig) -> int:
    a = cfg.args
    gold_path, pred_path = _existing(a.gold, "gold"), _existing(a.pred, "prediction")
    report = evaluate(load_dataset(gold_path), load_predictions(pred_path), jobs=a.jobs)
    if cfg.json:
        _emit(report.to_json())
        return 0
    print(f"EM: {report.em:.2f}  F1: {report.f1:.2f}")
    if a.per_type:
        print(f"{'type':<8}{'count':>7}{'EM':>9}{'F1':>9}")
        for name, stats in report.per_type.items():
            print(f"{name:<8}{stats.count:>7}{stats.em:>9.2f}{stats.f1:>9.2f}")
    return 0


def cmd_exec_lf(cfg: CliConfig) -> int:
    a = cfg.args
    tables = import_tables(_existing(a.tables, "tables"))
    if a.passage_id not in tables:
        raise InputError(f"no table for passage {a.passage_id!r}")
    table = tables[a.passage_id]
    lf = parse_lf(a.lf, function_inventory())
    answer = to_answer(execute(lf, table), table)
    _emit({"empty": True} if isinstance(answer, EmptyDenotation) else answer_to_json(answer))
    return 0


def _rule_config(a: argparse.Namespace) -> ContextRuleConfig:
    emb_path = _existing(a.embeddings, "embeddings")
    embeddings = load_embeddings(emb_path) if emb_path else None
    return ContextRuleConfig(embeddings=embeddings, distance=a.distance)


def cmd_search_lf(cfg: CliConfig) -> int:
    a = cfg.args
    tables_path, data_path = _existing(a.tables, "tables"), _existing(a.dataset, "dataset")
    rules = _rule_config(a)
    passage, qa = _find_question(load_dataset(data_path), a.question_id)
    tables = import_tables(tables_path)
    if passage.id not in tables:
        raise InputError(f"no table for passage {passage.id!r}")
    table = tables[passage.id]
    grammar = induce_grammar(function_inventory(), qa, passage, table, rules)
    result = search_logical_forms(
        grammar, table, qa.gold_answers[0], SearchConfig(max_depth=a.depth, max_forms=a.max_forms)
    )
    if result.truncated:
        log.warning("more than %d forms match; output truncated", a.max_forms)
    if not result.exhaustive:
        log.warning("denotation budget reached; search was not exhaustive")
    if cfg.json:
        _emit({
            "forms": [h.text for h in result.hits],
            "truncated": result.truncated,
            "exhaustive": result.exhaustive,
        })
    else:
        for hit in result.hits:
            print(hit.text)
    return 0


def cmd_search_exec(cfg: CliConfig) -> int:
    a = cfg.args
    dataset = load_dataset(_existing(a.dataset, "dataset"), word_numbers=a.word_numbers)
    passage, qa = _find_question(dataset, a.question_id)
    targets = search_execution_targets(
        passage, qa, qa.gold_answers[0], SearchConfig(max_addsub_terms=a.max_terms)
    )
    _emit(targets.to_json())
    return 0


def cmd_extract_tables(cfg: CliConfig) -> int:
    a = cfg.args
    dataset = load_dataset(_existing(a.dataset, "dataset"))
    tables = {}
    for passage, _ in dataset:
        table = pattern_extract(passage)
        if table.rows:
            tables[passage.id] = table
        else:
            log.info("no rows extracted for passage %s", passage.id)
    text = dump_tables(tables)
    if a.out:
        Path(a.out).write_text(text, encoding="utf-8")
        if cfg.json:
            _emit({"written": a.out, "tables": len(tables)})
        else:
            print(f"wrote {len(tables)} tables to {a.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_fixtures(cfg: CliConfig) -> int:
    try:
        written = write_fixtures(cfg.args.out_dir)
    except OSError as err:
        raise InputError(f"cannot write fixtures to {cfg.args.out_dir}: {err}") from None
    if cfg.json:
        _emit({"files": [str(p) for p in written]})
    else:
        for p in written:
            print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("human", "json"), default="human", help="output format")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")

    parser = _Parser(prog="dropkit", description="DROP-style metrics, logical forms and weak-supervision search.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def add(name: str, help: str, func):
        p = sub.add_parser(name, help=help, description=help, parents=[common])
        p.add_argument("--version", action="version", version=f"dropkit {__version__}")
        p.set_defaults(func=func)
        return p

    p = add("evaluate", "score a prediction file with EM and numeracy-aware F1", cmd_evaluate)
    p.add_argument("--gold", required=True, help="dataset JSON")
    p.add_argument("--pred", required=True, help="prediction JSON")
    p.add_argument("--per-type", action="store_true", help="add a per-answer-type table")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for scoring")

    p = add("exec-lf", "execute one logical form against a passage table", cmd_exec_lf)
    p.add_argument("--tables", required=True)
    p.add_argument("--passage-id", required=True)
    p.add_argument("--lf", required=True, help="logical form in s-expression syntax")

    p = add("search-lf", "enumerate logical forms that evaluate to the gold answer", cmd_search_lf)
    p.add_argument("--tables", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--question-id", required=True)
    p.add_argument("--depth", type=int, default=SearchConfig.max_depth)
    p.add_argument("--max-forms", type=int, default=SearchConfig.max_forms)
    p.add_argument("--embeddings", help="GloVe-format vectors for the neighbour rule")
    p.add_argument("--distance", type=float, default=0.3, help="cosine distance threshold")

    p = add("search-exec", "list spans, counts and sign assignments that yield the gold answer", cmd_search_exec)
    p.add_argument("--dataset", required=True)
    p.add_argument("--question-id", required=True)
    p.add_argument("--word-numbers", action="store_true", help="also read 'twenty-five' style numbers")
    p.add_argument("--max-terms", type=int, default=SearchConfig.max_addsub_terms)

    p = add("extract-tables", "build pattern-based tables for every passage of a dataset", cmd_extract_tables)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", help="output file (default: stdout)")

    p = add("fixtures", "write the worked-example dataset, tables and predictions", cmd_fixtures)
    p.add_argument("out_dir")
    return parser


def _configure_logging(verbosity: int) -> None:
    # a fresh handler per run so repeated in-process calls follow sys.stderr
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.handlers[:] = [handler]
    log.propagate = False
    log.setLevel(logging.WARNING - 10 * min(verbosity, 2))


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _configure_logging(args.verbose)
    cfg = CliConfig(args.command, args)
    try:
        return args.func(cfg)
    except INPUT_ERRORS as err:
        print(f"dropkit {cfg.command}: error: {err}", file=sys.stderr)
        return 1
    except Exception as err:  # noqa: BLE001
        print(f"dropkit {cfg.command}: internal error: {err!r}", file=sys.stderr)
        log.debug("traceback follows", exc_info=True)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
