"""Denotation-driven searches used to build weak supervision.

Two searches live here:

* :func:`search_logical_forms` enumerates every well-typed tree of the
  induced grammar up to a depth bound and keeps those whose denotation
  matches the gold answer.
* :func:`search_execution_targets` collects every span, count and signed
  number combination that produces the gold answer.

The logical-form search never materialises trees while exploring.  Trees
are grouped into classes by denotation; each class records the ways it can
be derived (function + child classes).  Trees are only spelled out at the
end, for matching classes, in (depth, canonical text) order.
"""

from __future__ import annotations

import bisect
import heapq
import itertools
import operator
from dataclasses import dataclass, field
from decimal import Decimal
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

from .corpus import Answer, Passage, QuestionAnswer, Token, tokenize
from .lflang import (
    Apply,
    Denotation,
    EmptyDenotation,
    ExecutionError,
    Grammar,
    Leaf,
    LogicalForm,
    ValueKind,
    apply_function,
    to_answer,
    to_text,
)
from .metrics import TokenBag, normalize_answer, normalize_text
from .tables import PredArgTable

__all__ = [
    "ExecutionTargetSet",
    "LFSearchResult",
    "SearchConfig",
    "SearchHit",
    "SignAssignment",
    "answers_match",
    "marginal_target_count",
    "search_execution_targets",
    "search_logical_forms",
    "sign_candidates",
]

K = ValueKind
FILTER_NUMBER = frozenset({"filter_number_greater", "filter_number_lesser", "filter_number_equals"})
ROOT_KINDS = frozenset(K) - {K.RELATION}


@dataclass(frozen=True)
class SearchConfig:
    """Bounds for both searches.

    ``max_classes`` caps the distinct denotations kept per value kind during
    logical-form search; when it trips the result is marked non-exhaustive.
    """

    max_depth: int = 4
    max_forms: int = 10000
    count_range: tuple[int, int] = (0, 9)
    max_addsub_terms: int = 2
    max_classes: int = 1500

    def __post_init__(self) -> None:
        lo, hi = self.count_range
        if self.max_depth < 0 or self.max_forms < 1 or self.max_addsub_terms < 1 or self.max_classes < 1:
            raise ValueError(f"search bounds must be positive: {self}")
        if lo < 0 or hi < lo:
            raise ValueError(f"bad count range {self.count_range}")


def answers_match(pred: Answer | EmptyDenotation, gold: Answer) -> bool:
    """Numbers by value, dates by fields, anything else by normalized span set."""
    if isinstance(pred, EmptyDenotation):
        return False
    if pred.number is not None and gold.number is not None:
        return pred.number == gold.number
    if pred.date is not None and gold.date is not None:
        return pred.date == gold.date
    p = {b.text for b in normalize_answer(pred).spans}
    g = {b.text for b in normalize_answer(gold).spans}
    return p == g


# -- logical-form search -----------------------------------------------------


@dataclass(frozen=True)
class SearchHit:
    form: LogicalForm
    text: str
    depth: int
    denotation: Denotation


@dataclass
class LFSearchResult:
    hits: list[SearchHit]
    truncated: bool = False
    exhaustive: bool = True
    classes: int = 0

    @property
    def forms(self) -> list[LogicalForm]:
        return [h.form for h in self.hits]

    def __len__(self) -> int:
        return len(self.hits)


@dataclass
class _Class:
    id: int
    kind: ValueKind
    value: object
    min_depth: int
    leaves: list[Leaf] = field(default_factory=list)
    # (function name, argument units, depth); a unit is a class id or a pool
    # key.  Levels are built in order, so depths never decrease along the list.
    derivations: list[tuple[str, tuple, int]] = field(default_factory=list)


class _Forest:
    def __init__(self, grammar: Grammar, table: PredArgTable, cfg: SearchConfig):
        self.grammar = grammar
        self.table = table
        self.cfg = cfg
        self.classes: list[_Class] = []
        self.index: dict[ValueKind, dict[object, int]] = {k: {} for k in K}
        self.by_kind: dict[ValueKind, list[int]] = {k: [] for k in K}
        self.seen: set[tuple[str, tuple]] = set()
        self.exhaustive = True
        # filter_number_* only see where a threshold falls among a column's
        # values, so Num arguments are pooled by that position
        self.columns: dict[str, list[Decimal]] = {}
        for rel in table.relations:
            values = {row.cells[rel].number for row in table.rows if rel in row.cells} - {None}
            self.columns[rel] = sorted(values)
        self.pools: dict[tuple, list[int]] = {}
        self.pool_depth: dict[tuple, int] = {}
        self.pools_by_rel: dict[str, list[tuple]] = {rel: [] for rel in table.relations}

    # building

    def _add(self, kind: ValueKind, value: object, depth: int) -> _Class | None:
        cid = self.index[kind].get(value)
        if cid is not None:
            return self.classes[cid]
        if len(self.by_kind[kind]) >= self.cfg.max_classes:
            self.exhaustive = False
            return None
        cls = _Class(len(self.classes), kind, value, depth)
        self.classes.append(cls)
        self.index[kind][value] = cls.id
        self.by_kind[kind].append(cls.id)
        if kind is K.NUM:
            for rel, values in self.columns.items():
                region = (bisect.bisect_left(values, value), bisect.bisect_right(values, value))
                pool = ("pool", rel, region)
                if pool not in self.pools:
                    self.pools[pool] = []
                    self.pool_depth[pool] = depth
                    self.pools_by_rel[rel].append(pool)
                self.pools[pool].append(cls.id)
        return cls

    def _derive(self, fn: str, units: tuple, args: Sequence[object], kind: ValueKind, depth: int) -> None:
        if (fn, units) in self.seen:
            return
        try:
            value = apply_function(fn, args, self.table)
        except ExecutionError:
            return
        cls = self._add(kind, value, depth)
        if cls is not None:
            self.seen.add((fn, units))
            cls.derivations.append((fn, units, depth))

    def _unit_depth(self, unit) -> int:
        return self.pool_depth[unit] if isinstance(unit, tuple) else self.classes[unit].min_depth

    def build(self) -> None:
        for kind in K:
            for leaf in self.grammar.terminals(kind):
                cls = self._add(kind, leaf.value if kind is not K.ROWS else tuple(range(len(self.table.rows))), 0)
                if cls is not None and leaf not in cls.leaves:
                    cls.leaves.append(leaf)
        for d in range(1, self.cfg.max_depth + 1):
            self._level(d)

    def _available(self, kind: ValueKind, d: int) -> list[int]:
        return [c for c in self.by_kind[kind] if self.classes[c].min_depth <= d - 1]

    def _level(self, d: int) -> None:
        for spec in self.grammar.functions:
            if len(self.by_kind[spec.ret_kind]) >= self.cfg.max_classes:
                self.exhaustive = False
                continue
            if spec.name in FILTER_NUMBER:
                self._filter_number_level(spec, d)
                continue
            if spec.name in _ARITH:
                self._arith_level(spec, d)
                continue
            pools = [self._available(k, d) for k in spec.arg_kinds]
            fresh = [[c for c in pool if self.classes[c].min_depth == d - 1] for pool in pools]
            stale = [[c for c in pool if self.classes[c].min_depth < d - 1] for pool in pools]
            # every combination with at least one argument first seen at d-1
            combos = itertools.chain.from_iterable(
                itertools.product(*stale[:j], fresh[j], *pools[j + 1:]) for j in range(len(pools))
            )
            for combo in combos:
                if len(self.by_kind[spec.ret_kind]) >= self.cfg.max_classes:
                    self.exhaustive = False
                    break
                args = [self.classes[c].value for c in combo]
                self._derive(spec.name, tuple(combo), args, spec.ret_kind, d)

    def _arith_level(self, spec, d: int) -> None:
        # plus/diff dominate the build (quadratic in Num classes), so they get
        # a tight loop instead of the generic product/apply path.  Each pair
        # with a fresh argument is produced exactly once, so no seen-check.
        op = _ARITH[spec.name]
        avail = self._available(K.NUM, d)
        fresh = [c for c in avail if self.classes[c].min_depth == d - 1]
        stale = [c for c in avail if self.classes[c].min_depth < d - 1]
        values = {c: self.classes[c].value for c in avail}
        index, classes, budget = self.index[K.NUM], self.classes, self.cfg.max_classes
        num_ids = self.by_kind[K.NUM]
        for left, right in ((fresh, avail), (stale, fresh)):
            for a in left:
                va = values[a]
                for b in right:
                    cid = index.get(op(va, values[b]))
                    if cid is None:
                        if len(num_ids) >= budget:
                            self.exhaustive = False
                            return
                        cid = self._add(K.NUM, op(va, values[b]), d).id
                    classes[cid].derivations.append((spec.name, (a, b), d))

    def _filter_number_level(self, spec, d: int) -> None:
        for r in self._available(K.ROWS, d):
            for rel_id in self._available(K.RELATION, d):
                rel = self.classes[rel_id].value
                for pool in self.pools_by_rel.get(rel, ()):
                    depth = max(self.classes[r].min_depth, self.classes[rel_id].min_depth, self.pool_depth[pool])
                    if depth != d - 1:
                        continue
                    sample = self.classes[self.pools[pool][0]].value
                    rows = self.classes[r].value
                    self._derive(spec.name, (r, rel_id, pool), [rows, rel, sample], spec.ret_kind, d)

    # counting and spelling out

    def count(self, unit, bound: int) -> int:
        return self._count(unit, bound)

    @lru_cache(maxsize=None)
    def _count(self, unit, bound: int) -> int:
        if bound < 0:
            return 0
        if isinstance(unit, tuple):
            return sum(self._count(c, bound) for c in self.pools[unit])
        cls = self.classes[unit]
        total = len(cls.leaves)
        if bound >= 1:
            for _, units, dd in cls.derivations:
                if dd > bound:
                    break
                prod = 1
                for u in units:
                    prod *= self._count(u, bound - 1)
                    if not prod:
                        break
                total += prod
        return total

    def trees(self, unit, bound: int) -> Iterable[tuple[str, int, LogicalForm]]:
        """All trees of ``unit`` with depth <= bound, ascending by text."""
        n = self._count(unit, bound)
        if n <= _MATERIALIZE:
            return self._listed(unit, bound)
        return self._stream(unit, bound)

    @lru_cache(maxsize=None)
    def _listed(self, unit, bound: int) -> tuple:
        return tuple(self._stream(unit, bound))

    def _stream(self, unit, bound: int) -> Iterator[tuple[str, int, LogicalForm]]:
        if isinstance(unit, tuple):
            return heapq.merge(*(self.trees(c, bound) for c in self.pools[unit]), key=_text)
        cls = self.classes[unit]
        parts = [sorted(((_leaf_text(l), 0, l) for l in cls.leaves), key=_text)]
        if bound >= 1:
            for fn, units, dd in cls.derivations:
                if dd > bound:
                    break
                parts.append(self._apply_stream(fn, units, bound - 1))
        return heapq.merge(*parts, key=_text)

    def _apply_stream(self, fn: str, units: tuple, bound: int) -> Iterator[tuple[str, int, LogicalForm]]:
        factories = [lambda u=u: self.trees(u, bound) for u in units]
        for combo in _lex_product(factories):
            text = "(" + fn + " " + " ".join(t for t, _, _ in combo) + ")"
            yield text, 1 + max(dp for _, dp, _ in combo), Apply(fn, tuple(f for _, _, f in combo))


_MATERIALIZE = 20000
_ARITH = {"plus": operator.add, "diff": operator.sub}


def _text(item) -> str:
    return item[0]


@lru_cache(maxsize=4096)
def _leaf_text(leaf: Leaf) -> str:
    return to_text(leaf)


def _lex_product(factories: Sequence[Callable[[], Iterable]]) -> Iterator[tuple]:
    # Every argument text is a complete s-expression or atom, and each is
    # followed by " " or ")", so ordering argument tuples lexicographically
    # orders the enclosing texts.
    if not factories:
        yield ()
        return
    head, rest = factories[0], factories[1:]
    for item in head():
        for tail in _lex_product(rest):
            yield (item, *tail)


def search_logical_forms(
    grammar: Grammar,
    table: PredArgTable,
    gold: Answer,
    cfg: SearchConfig | None = None,
) -> LFSearchResult:
    """Every tree up to ``cfg.max_depth`` whose denotation matches ``gold``.

    Results are ordered by depth, then canonical text; at most
    ``cfg.max_forms`` are returned and ``truncated`` says whether more exist.
    """
    cfg = cfg or SearchConfig()
    if not table.rows:
        return LFSearchResult([])
    forest = _Forest(grammar, table, cfg)
    forest.build()

    matching = []
    for cls in forest.classes:
        if cls.kind not in ROOT_KINDS:
            continue
        den = Denotation(cls.kind, cls.value)
        if answers_match(to_answer(den, table), gold):
            matching.append((cls.id, den))

    hits: list[SearchHit] = []
    truncated = False
    for d in range(cfg.max_depth + 1):
        exact = sum(forest.count(c, d) - forest.count(c, d - 1) for c, _ in matching)
        if not exact:
            continue
        room = cfg.max_forms - len(hits)
        if room <= 0:
            truncated = True
            break
        streams = [
            ((text, dp, lf, den) for text, dp, lf in forest.trees(c, d))
            for c, den in matching
        ]
        level = (item for item in heapq.merge(*streams, key=_text) if item[1] == d)
        for text, dp, lf, den in itertools.islice(level, room):
            hits.append(SearchHit(lf, text, dp, den))
        if exact > room:
            truncated = True
            break
    return LFSearchResult(hits, truncated, forest.exhaustive, len(forest.classes))


# -- execution-target search -------------------------------------------------


@dataclass(frozen=True)
class SignAssignment:
    """Signed passage numbers; numbers not listed carry sign zero."""

    terms: tuple[tuple[int, str], ...]

    def value(self, numbers: Sequence[Decimal]) -> Decimal:
        total = Decimal(0)
        for idx, sign in self.terms:
            total += numbers[idx] if sign == "+" else -numbers[idx]
        return total

    def to_json(self) -> list[list]:
        return [[idx, sign] for idx, sign in self.terms]


@dataclass
class ExecutionTargetSet:
    passage_spans: list[tuple[int, int]] = field(default_factory=list)
    question_spans: list[tuple[int, int]] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)
    sign_assignments: list[SignAssignment] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "passage_spans": [list(s) for s in self.passage_spans],
            "question_spans": [list(s) for s in self.question_spans],
            "counts": list(self.counts),
            "sign_assignments": [a.to_json() for a in self.sign_assignments],
        }


def marginal_target_count(targets: ExecutionTargetSet) -> int:
    return (
        len(targets.passage_spans)
        + len(targets.question_spans)
        + len(targets.counts)
        + len(targets.sign_assignments)
    )


def sign_candidates(n: int, max_terms: int = 2) -> Iterator[SignAssignment]:
    """Every choice of 1..max_terms distinct numbers with a +/- sign each."""
    for k in range(1, min(max_terms, n) + 1):
        for idxs in itertools.combinations(range(n), k):
            for signs in itertools.product("+-", repeat=k):
                yield SignAssignment(tuple(zip(idxs, signs)))


def find_spans(tokens: Sequence[Token], target: TokenBag) -> list[tuple[int, int]]:
    """Maximal token ranges whose normalized text equals ``target``."""
    want = target.tokens
    if not want:
        return []
    normed = [normalize_text(t.text).tokens for t in tokens]
    hits = []
    for i in range(len(tokens)):
        acc: tuple[str, ...] = ()
        for j in range(i, len(tokens)):
            acc += normed[j]
            if len(acc) > len(want) or acc != want[: len(acc)]:
                break
            if acc == want:
                hits.append((i, j + 1))
    return [
        (s, e) for s, e in hits
        if not any(s2 <= s and e <= e2 and (s2, e2) != (s, e) for s2, e2 in hits)
    ]


def search_execution_targets(
    passage: Passage,
    question: QuestionAnswer | Sequence[Token] | str,
    gold: Answer,
    cfg: SearchConfig | None = None,
) -> ExecutionTargetSet:
    """All spans, counts and sign assignments that produce ``gold``.

    Spans are searched for single-span golds only; counts and sign
    assignments for number golds only.
    """
    cfg = cfg or SearchConfig()
    if isinstance(question, QuestionAnswer):
        q_tokens = question.question_tokens
    elif isinstance(question, str):
        q_tokens = tuple(tokenize(question))
    else:
        q_tokens = tuple(question)

    out = ExecutionTargetSet()
    if gold.spans is not None and len(gold.spans) == 1:
        target = normalize_text(gold.spans[0])
        out.passage_spans = find_spans(passage.tokens, target)
        out.question_spans = find_spans(q_tokens, target)
    if gold.number is not None:
        lo, hi = cfg.count_range
        if gold.number == gold.number.to_integral_value() and lo <= gold.number <= hi:
            out.counts = [int(gold.number)]
        values = [m.value for m in passage.numbers]
        out.sign_assignments = [
            a for a in sign_candidates(len(values), cfg.max_addsub_terms) if a.value(values) == gold.number
        ]
    return out
