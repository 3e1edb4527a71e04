"""Passages, questions and answers, plus the JSON dataset/prediction formats.

Numbers are kept as :class:`decimal.Decimal` throughout so that arithmetic
over extracted passage numbers is exact.
"""

from __future__ import annotations

import json
import re
import unicodedata
import warnings
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

__all__ = [
    "Answer",
    "AnswerError",
    "DatasetError",
    "Date",
    "MONTHS",
    "NumberMention",
    "Passage",
    "QuestionAnswer",
    "Token",
    "answer_from_json",
    "answer_to_json",
    "canonical_number",
    "dump_dataset",
    "dump_predictions",
    "load_dataset",
    "load_predictions",
    "parse_number",
    "tokenize",
]

MONTHS = (
    "january", "february", "march", "april", "may", "june",
    "july", "august", "september", "october", "november", "december",
)

CURRENCY = "$€£¥"
MAGNITUDES = {
    "thousand": Decimal(10) ** 3,
    "million": Decimal(10) ** 6,
    "billion": Decimal(10) ** 9,
}

_NUMBER_RE = re.compile(
    r"""^
    (?P<neg>[-−])?
    (?P<cur>[$€£¥])?
    (?P<int>\d{1,3}(?:,\d{3})+|\d+)
    (?P<frac>\.\d+)?
    (?:
        (?P<pct>%)
        |\s+(?P<mag>thousand|million|billion)
    )?
    $""",
    re.VERBOSE | re.IGNORECASE,
)

_UNITS = (
    "zero one two three four five six seven eight nine ten eleven twelve "
    "thirteen fourteen fifteen sixteen seventeen eighteen nineteen"
).split()
_TENS = "twenty thirty forty fifty sixty seventy eighty ninety".split()


def _word_lexicon() -> dict[str, int]:
    lex = {w: i for i, w in enumerate(_UNITS)}
    for t, word in enumerate(_TENS, start=2):
        lex[word] = t * 10
        for u in range(1, 10):
            lex[f"{word}-{_UNITS[u]}"] = t * 10 + u
    lex["hundred"] = 100
    lex["one hundred"] = 100
    return lex


WORD_NUMBERS = _word_lexicon()


class DatasetError(ValueError):
    """Malformed dataset, prediction, or answer record."""


class AnswerError(DatasetError):
    """An answer object without exactly one populated variant."""


def parse_number(token: str, *, words: bool = False) -> Decimal | None:
    """Parse a numeric token, returning ``None`` when it is not a number.

    Accepts comma grouping, a leading minus sign, one currency symbol, a trailing ``%`` and
    a trailing magnitude word (``"16.3 million"``).  With ``words=True`` the
    English words zero..hundred (``"twenty-five"``) are accepted as well.
    """
    token = token.strip()
    m = _NUMBER_RE.match(token)
    if m is not None:
        value = Decimal(m["int"].replace(",", "") + (m["frac"] or ""))
        if m["mag"]:
            value *= MAGNITUDES[m["mag"].lower()]
        return -value if m["neg"] else value
    if words:
        hit = WORD_NUMBERS.get(" ".join(token.lower().split()))
        if hit is not None:
            return Decimal(hit)
    return None


def canonical_number(value: Decimal) -> str:
    """Plain decimal rendering without exponent or trailing zeros."""
    value = value.normalize() + 0  # + 0 folds -0 into 0
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


@dataclass(frozen=True)
class Date:
    day: int | None = None
    month: int | None = None
    year: int | None = None

    def __post_init__(self) -> None:
        if self.day is None and self.month is None and self.year is None:
            raise AnswerError("date needs at least one of day, month, year")
        if self.day is not None and not 1 <= self.day <= 31:
            raise AnswerError(f"day out of range: {self.day}")
        if self.month is not None and not 1 <= self.month <= 12:
            raise AnswerError(f"month out of range: {self.month}")

    def render(self) -> str:
        """``"3 March 1992"``; absent fields are left out."""
        parts = []
        if self.day is not None:
            parts.append(str(self.day))
        if self.month is not None:
            parts.append(MONTHS[self.month - 1].capitalize())
        if self.year is not None:
            parts.append(str(self.year))
        return " ".join(parts)

    def to_json(self) -> dict[str, int]:
        return {k: v for k, v in (("day", self.day), ("month", self.month), ("year", self.year)) if v is not None}


@dataclass(frozen=True)
class Answer:
    """One of: a non-empty list of spans, a number, or a date.

    ``number_surface`` keeps the string the number was read from so that
    files round-trip byte for byte.
    """

    spans: tuple[str, ...] | None = None
    number: Decimal | None = None
    date: Date | None = None
    number_surface: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        present = sum(x is not None for x in (self.spans, self.number, self.date))
        if present != 1:
            raise AnswerError(f"answer must have exactly one variant, got {present}")
        if self.spans is not None:
            if isinstance(self.spans, str) or not self.spans:
                raise AnswerError("span answer needs a non-empty list of strings")
            object.__setattr__(self, "spans", tuple(self.spans))
        if self.number is not None:
            if not self.number.is_finite():
                raise AnswerError(f"non-finite number answer: {self.number}")
            if self.number_surface is None:
                object.__setattr__(self, "number_surface", canonical_number(self.number))

    @classmethod
    def of_spans(cls, *spans: str) -> Answer:
        return cls(spans=tuple(spans))

    @classmethod
    def of_number(cls, value: Decimal | int | str) -> Answer:
        if isinstance(value, str):
            parsed = parse_number(value)
            if parsed is None:
                raise AnswerError(f"not a number: {value!r}")
            return cls(number=parsed, number_surface=value)
        return cls(number=Decimal(value))

    @classmethod
    def of_date(cls, day: int | None = None, month: int | None = None, year: int | None = None) -> Answer:
        return cls(date=Date(day, month, year))

    @property
    def kind(self) -> str:
        """Answer-type bucket used for per-type reporting."""
        if self.date is not None:
            return "date"
        if self.number is not None:
            return "number"
        return "span" if len(self.spans) == 1 else "spans"


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class NumberMention:
    token_index: int
    value: Decimal
    surface: str


@dataclass(frozen=True)
class QuestionAnswer:
    question_id: str
    question_text: str
    question_tokens: tuple[Token, ...]
    gold_answers: tuple[Answer, ...]

    def __post_init__(self) -> None:
        if not self.gold_answers:
            raise DatasetError(f"question {self.question_id!r} has no gold answers")

    @classmethod
    def build(cls, question_id: str, question_text: str, gold_answers: Sequence[Answer]) -> QuestionAnswer:
        return cls(question_id, question_text, tuple(tokenize(question_text)), tuple(gold_answers))


@dataclass(frozen=True)
class Passage:
    id: str
    text: str
    tokens: tuple[Token, ...]
    numbers: tuple[NumberMention, ...]

    @classmethod
    def from_text(cls, id: str, text: str, *, word_numbers: bool = False) -> Passage:
        tokens = tuple(tokenize(text, word_numbers=word_numbers))
        return cls(id, text, tokens, extract_numbers(tokens, word_numbers=word_numbers))


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def _strip(text: str, start: int) -> tuple[str, int]:
    """Trim punctuation at both ends; keep currency before a digit and % after one."""
    lo, hi = 0, len(text)
    while lo < hi and _is_punct(text[lo]):
        if text[lo] in CURRENCY and lo + 1 < hi and text[lo + 1].isdigit():
            break
        lo += 1
    while hi > lo and _is_punct(text[hi - 1]):
        if text[hi - 1] == "%" and hi - 2 >= lo and text[hi - 2].isdigit():
            break
        hi -= 1
    return text[lo:hi], start + lo


def _split_hyphens(text: str, start: int, words: bool) -> list[tuple[str, int]]:
    # "43-yard" -> "43", "yard"; only when some piece is numeric
    if "-" not in text or parse_number(text, words=words) is not None:
        return [(text, start)]
    pieces = text.split("-")
    if not any(parse_number(p) is not None for p in pieces):
        return [(text, start)]
    out, offset = [], start
    for piece in pieces:
        if piece:
            out.extend([_strip(piece, offset)])
        offset += len(piece) + 1
    return [(t, s) for t, s in out if t]


def tokenize(text: str, *, word_numbers: bool = False) -> list[Token]:
    """Whitespace tokenizer with punctuation trimming and magnitude merging.

    Every token satisfies ``text[tok.start:tok.end] == tok.text``.
    """
    raw: list[tuple[str, int]] = []
    for m in re.finditer(r"\S+", text):
        stripped, start = _strip(m.group(), m.start())
        if stripped:
            raw.extend(_split_hyphens(stripped, start, word_numbers))
    tokens: list[Token] = []
    i = 0
    while i < len(raw):
        tok, start = raw[i]
        end = start + len(tok)
        if (
            i + 1 < len(raw)
            and raw[i + 1][0].lower() in MAGNITUDES
            and _NUMBER_RE.match(tok)
            and not tok.endswith("%")
        ):
            nxt, nstart = raw[i + 1]
            end = nstart + len(nxt)
            i += 1
        tokens.append(Token(text[start:end], start, end))
        i += 1
    return tokens


def extract_numbers(tokens: Iterable[Token], *, word_numbers: bool = False) -> tuple[NumberMention, ...]:
    out = []
    for i, tok in enumerate(tokens):
        value = parse_number(tok.text, words=word_numbers)
        if value is not None:
            out.append(NumberMention(i, value, tok.text))
    return tuple(out)


# -- JSON encoding -----------------------------------------------------------

_ANSWER_KEYS = ("spans", "number", "date")


def answer_from_json(obj: Any, where: str = "answer") -> Answer:
    if not isinstance(obj, Mapping):
        raise AnswerError(f"{where}: expected an object, got {type(obj).__name__}")
    present = [k for k in _ANSWER_KEYS if k in obj]
    extra = sorted(set(obj) - set(_ANSWER_KEYS))
    if extra:
        warnings.warn(f"{where}: ignoring unknown field(s) {', '.join(extra)}", stacklevel=2)
    if len(present) != 1:
        raise AnswerError(f"{where}: expected exactly one of spans/number/date, got {present or 'none'}")
    key = present[0]
    value = obj[key]
    try:
        if key == "spans":
            if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
                raise AnswerError("spans must be a list of strings")
            return Answer(spans=tuple(value))
        if key == "number":
            if isinstance(value, bool) or not isinstance(value, (str, int, float)):
                raise AnswerError("number must be a string or JSON number")
            return Answer.of_number(value if isinstance(value, str) else str(value))
        if not isinstance(value, Mapping) or set(value) - {"day", "month", "year"}:
            raise AnswerError("date must be an object with day/month/year")
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in value.values()):
            raise AnswerError("date fields must be integers")
        return Answer(date=Date(value.get("day"), value.get("month"), value.get("year")))
    except AnswerError as err:
        raise AnswerError(f"{where}: {err}") from None


def answer_to_json(answer: Answer) -> dict[str, Any]:
    if answer.spans is not None:
        return {"spans": list(answer.spans)}
    if answer.number is not None:
        return {"number": answer.number_surface}
    return {"date": answer.date.to_json()}


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _read_json(path: str | Path, **kwargs: Any) -> Any:
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f, **kwargs)
    except json.JSONDecodeError as err:
        raise DatasetError(f"{path}: invalid JSON: {err}") from None


def _require(obj: Any, key: str, kind: type, where: str) -> Any:
    if not isinstance(obj, Mapping) or key not in obj:
        raise DatasetError(f"{where}: missing field {key!r}")
    if not isinstance(obj[key], kind):
        raise DatasetError(f"{where}: field {key!r} must be {kind.__name__}")
    return obj[key]


def parse_dataset(raw: Any, *, word_numbers: bool = False) -> list[tuple[Passage, list[QuestionAnswer]]]:
    passages = _require(raw, "passages", list, "dataset")
    out = []
    for pi, rec in enumerate(passages):
        where = f"passages[{pi}]"
        pid = _require(rec, "id", str, where)
        where = f"passages[{pi}] (id={pid!r})"
        passage = Passage.from_text(pid, _require(rec, "text", str, where), word_numbers=word_numbers)
        qas = []
        for qi, qrec in enumerate(_require(rec, "qa_pairs", list, where)):
            qwhere = f"{where}.qa_pairs[{qi}]"
            qid = _require(qrec, "question_id", str, qwhere)
            qwhere = f"{qwhere} (question_id={qid!r})"
            question = _require(qrec, "question", str, qwhere)
            answers = _require(qrec, "answers", list, qwhere)
            if not answers:
                raise DatasetError(f"{qwhere}: no answers")
            golds = [answer_from_json(a, f"{qwhere}.answers[{ai}]") for ai, a in enumerate(answers)]
            qas.append(QuestionAnswer.build(qid, question, golds))
        out.append((passage, qas))
    return out


def load_dataset(path: str | Path, *, word_numbers: bool = False) -> list[tuple[Passage, list[QuestionAnswer]]]:
    """Read a dataset file; passages are tokenized and their numbers extracted."""
    return parse_dataset(_read_json(path), word_numbers=word_numbers)


def dataset_to_json(dataset: Iterable[tuple[Passage, Sequence[QuestionAnswer]]]) -> dict[str, Any]:
    return {
        "passages": [
            {
                "id": passage.id,
                "text": passage.text,
                "qa_pairs": [
                    {
                        "question_id": qa.question_id,
                        "question": qa.question_text,
                        "answers": [answer_to_json(a) for a in qa.gold_answers],
                    }
                    for qa in qas
                ],
            }
            for passage, qas in dataset
        ]
    }


def dump_dataset(dataset: Iterable[tuple[Passage, Sequence[QuestionAnswer]]]) -> str:
    return _dumps(dataset_to_json(dataset))


def _no_duplicate_keys(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    seen: dict[str, Any] = {}
    for key, value in pairs:
        if key in seen:
            raise DatasetError(f"duplicate key {key!r}")
        seen[key] = value
    return seen


def parse_predictions(raw: Any) -> dict[str, Answer]:
    if not isinstance(raw, Mapping):
        raise DatasetError("predictions: expected a JSON object mapping question_id to answer")
    return {qid: answer_from_json(obj, f"prediction {qid!r}") for qid, obj in raw.items()}


def load_predictions(path: str | Path) -> dict[str, Answer]:
    """Read a prediction file; a repeated question id is an error."""
    try:
        raw = _read_json(path, object_pairs_hook=_no_duplicate_keys)
    except DatasetError as err:
        raise DatasetError(f"{path}: {err}") from None
    return parse_predictions(raw)


def dump_predictions(predictions: Mapping[str, Answer]) -> str:
    return _dumps({qid: answer_to_json(a) for qid, a in predictions.items()})
