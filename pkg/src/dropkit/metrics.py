"""Exact match and numeracy-aware F1 over normalized answer bags."""

from __future__ import annotations

import re
import string
import unicodedata
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable, Mapping, Sequence

from .corpus import MONTHS, Answer, Passage, QuestionAnswer, canonical_number, parse_number

__all__ = [
    "ARTICLES",
    "AnswerBag",
    "EvalReport",
    "ScorePair",
    "TokenBag",
    "UnknownPredictionError",
    "align_spans",
    "evaluate",
    "exact_match",
    "multi_span_f1",
    "normalize_answer",
    "normalize_text",
    "pair_f1",
    "score_question",
]

ARTICLES = frozenset({"a", "an", "the"})
ANSWER_TYPES = ("date", "number", "span", "spans")


class UnknownPredictionError(ValueError):
    def __init__(self, ids: Sequence[str]):
        self.ids = list(ids)
        super().__init__(f"predictions for unknown question ids: {', '.join(self.ids)}")


@dataclass(frozen=True)
class TokenBag:
    """Normalized tokens of one span, in order, plus its numeric values."""

    tokens: tuple[str, ...]
    numbers: frozenset[Decimal] = frozenset()

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    @property
    def counts(self) -> Counter:
        return Counter(self.tokens)


@dataclass(frozen=True)
class AnswerBag:
    spans: tuple[TokenBag, ...]
    numbers: frozenset[Decimal] = field(default=frozenset())


@dataclass(frozen=True)
class ScorePair:
    em: float
    f1: float


def _is_punct(ch: str) -> bool:
    return ch in string.punctuation or unicodedata.category(ch)[0] == "P" or unicodedata.category(ch) == "Sc"


def _strip_punct(token: str) -> str:
    # a "." survives only between two digits; "," between digits is grouping and goes
    out = []
    for i, ch in enumerate(token):
        if not _is_punct(ch):
            out.append(ch)
        elif ch == "." and 0 < i < len(token) - 1 and token[i - 1].isdigit() and token[i + 1].isdigit():
            out.append(ch)
    return "".join(out)


def normalize_text(text: str) -> TokenBag:
    """Lowercase, drop punctuation and articles, split on whitespace and hyphens.

    Numeric tokens are rewritten in canonical decimal form, so ``"15,000"``
    and ``"15000.0"`` both become ``"15000"``.
    """
    tokens = []
    numbers = set()
    for piece in re.split(r"[\s\-‐-―]+", text.lower()):
        tok = _strip_punct(piece)
        if not tok or tok in ARTICLES:
            continue
        value = parse_number(tok)
        if value is not None:
            numbers.add(value)
            tok = canonical_number(value)
        tokens.append(tok)
    return TokenBag(tuple(tokens), frozenset(numbers))


def answer_strings(ans: Answer) -> tuple[str, ...]:
    """Surface strings that stand for an answer before normalization."""
    if ans.spans is not None:
        return ans.spans
    if ans.number is not None:
        return (canonical_number(ans.number),)
    d = ans.date
    parts = [str(d.day) if d.day is not None else "", MONTHS[d.month - 1] if d.month else "", str(d.year) if d.year is not None else ""]
    return (" ".join(p for p in parts if p),)


def normalize_answer(ans: Answer) -> AnswerBag:
    spans = tuple(normalize_text(s) for s in answer_strings(ans))
    numbers = frozenset().union(*(b.numbers for b in spans))
    return AnswerBag(spans, numbers)


def pair_f1(gold: TokenBag, pred: TokenBag) -> float:
    """Bag-of-words F1, forced to 0 when the numeric token sets differ."""
    if gold.numbers != pred.numbers:
        return 0.0
    if not gold.tokens and not pred.tokens:
        return 1.0
    if not gold.tokens or not pred.tokens:
        return 0.0
    common = sum((gold.counts & pred.counts).values())
    # 2PR/(P+R) rewritten so swapping the arguments is bit-identical
    return 2 * common / (len(gold.tokens) + len(pred.tokens))


def align_spans(gold: Sequence[TokenBag], pred: Sequence[TokenBag]) -> list[tuple[int, int, float]]:
    """Greedy one-to-one alignment, best pair first.

    Ties go to the pair whose (gold text, pred text) sorts first, so the
    result does not depend on the order the spans were listed in.
    """
    scored = [
        (-pair_f1(g, p), g.text, p.text, gi, pi)
        for gi, g in enumerate(gold)
        for pi, p in enumerate(pred)
    ]
    scored.sort()
    used_g, used_p = set(), set()
    matches = []
    for neg, _, _, gi, pi in scored:
        if gi in used_g or pi in used_p:
            continue
        used_g.add(gi)
        used_p.add(pi)
        matches.append((gi, pi, -neg))
    return matches


def multi_span_f1(gold: AnswerBag, pred: AnswerBag) -> float:
    matches = align_spans(gold.spans, pred.spans)
    denom = max(len(gold.spans), len(pred.spans))
    return sum(score for _, _, score in matches) / denom


def exact_match(gold: AnswerBag, pred: AnswerBag) -> bool:
    return sorted(b.text for b in gold.spans) == sorted(b.text for b in pred.spans)


def score_question(golds: Sequence[Answer], pred: Answer) -> ScorePair:
    """Max over gold answers, taken separately for EM and F1."""
    if not golds:
        raise ValueError("score_question needs at least one gold answer")
    pbag = normalize_answer(pred)
    em = f1 = 0.0
    for gold in golds:
        gbag = normalize_answer(gold)
        em = max(em, float(exact_match(gbag, pbag)))
        f1 = max(f1, multi_span_f1(gbag, pbag))
    return ScorePair(em, f1)


@dataclass
class TypeStats:
    count: int = 0
    em: float = 0.0
    f1: float = 0.0


@dataclass
class EvalReport:
    """Macro averages in percent, plus per answer-type buckets.

    The type of a question is the type of its first gold answer.
    """

    em: float
    f1: float
    count: int
    predicted: int
    per_type: dict[str, TypeStats]
    scores: dict[str, ScorePair] = field(repr=False, default_factory=dict)

    def to_json(self) -> dict:
        return {
            "em": round(self.em, 2),
            "f1": round(self.f1, 2),
            "count": self.count,
            "predicted": self.predicted,
            "per_type": {
                t: {"count": s.count, "em": round(s.em, 2), "f1": round(s.f1, 2)}
                for t, s in self.per_type.items()
            },
        }


def _score_item(item: tuple[tuple[Answer, ...], Answer]) -> ScorePair:
    return score_question(*item)


def evaluate(
    dataset: Iterable[tuple[Passage, Sequence[QuestionAnswer]]],
    predictions: Mapping[str, Answer],
    *,
    jobs: int = 1,
) -> EvalReport:
    """Score predictions against a dataset.

    Questions without a prediction count as 0; predictions for ids that are
    not in the dataset raise :class:`UnknownPredictionError`.
    """
    questions = [qa for _, qas in dataset for qa in qas]
    known = {qa.question_id for qa in questions}
    unknown = sorted(set(predictions) - known)
    if unknown:
        raise UnknownPredictionError(unknown)

    todo = [(qa.gold_answers, predictions[qa.question_id]) for qa in questions if qa.question_id in predictions]
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_score_item, todo, chunksize=max(1, len(todo) // (4 * jobs))))
    else:
        results = [_score_item(t) for t in todo]

    scores: dict[str, ScorePair] = {}
    it = iter(results)
    per_type = {t: TypeStats() for t in ANSWER_TYPES}
    for qa in questions:
        score = next(it) if qa.question_id in predictions else ScorePair(0.0, 0.0)
        scores[qa.question_id] = score
        stats = per_type[qa.gold_answers[0].kind]
        stats.count += 1
        stats.em += score.em
        stats.f1 += score.f1

    for stats in per_type.values():
        if stats.count:
            stats.em = 100 * stats.em / stats.count
            stats.f1 = 100 * stats.f1 / stats.count
    n = len(questions)
    em = 100 * sum(s.em for s in scores.values()) / n if n else 0.0
    f1 = 100 * sum(s.f1 for s in scores.values()) / n if n else 0.0
    return EvalReport(em, f1, n, len(todo), per_type, scores)
