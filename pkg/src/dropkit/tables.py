"""Predicate-argument tables: one row per predicate, one column per role.

Tables come either from annotation files produced by an external parser
(dependency, OpenIE, SRL) or from :func:`pattern_extract`, a small
deterministic extractor that keeps test fixtures self-contained.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Any, Mapping, Sequence

from .corpus import MONTHS, DatasetError, Date, Passage, parse_number, tokenize

__all__ = [
    "Cell",
    "PATTERN_COLUMNS",
    "PROVENANCES",
    "PredArgStructure",
    "PredArgTable",
    "TableError",
    "dump_tables",
    "find_date",
    "import_tables",
    "parse_tables",
    "pattern_extract",
]

PROVENANCES = ("syn-dep", "open-ie", "srl", "pattern", "imported")
PATTERN_COLUMNS = ("arg0", "pred", "arg1", "num", "date")


class TableError(DatasetError):
    pass


_MONTH_RE = "|".join(MONTHS)
_DMY_RE = re.compile(rf"\b(\d{{1,2}})\s+({_MONTH_RE})\s+(\d{{3,4}})\b", re.IGNORECASE)
_MY_RE = re.compile(rf"\b({_MONTH_RE})\s+(\d{{3,4}})\b", re.IGNORECASE)
_YEAR_RE = re.compile(r"\d{3,4}")


def find_date(text: str) -> tuple[Date, str] | None:
    """First date in ``text`` with the substring it was read from.

    Tries "2 March 1992", then "March 1992", then a bare 3-4 digit year token.
    """
    m = _DMY_RE.search(text)
    if m and 1 <= int(m[1]) <= 31:
        return Date(int(m[1]), MONTHS.index(m[2].lower()) + 1, int(m[3])), m.group()
    m = _MY_RE.search(text)
    if m:
        return Date(None, MONTHS.index(m[1].lower()) + 1, int(m[2])), m.group()
    for tok in tokenize(text):
        if _YEAR_RE.fullmatch(tok.text):
            return Date(year=int(tok.text)), tok.text
    return None


def _first_number(text: str) -> Decimal | None:
    value = parse_number(text)
    if value is not None:
        return value
    for tok in tokenize(text):
        value = parse_number(tok.text)
        if value is not None:
            return value
    return None


@dataclass(frozen=True)
class Cell:
    text: str
    number: Decimal | None = None
    date: Date | None = None

    @classmethod
    def from_text(cls, text: str) -> Cell:
        hit = find_date(text)
        return cls(text, _first_number(text), hit[0] if hit else None)


@dataclass(frozen=True)
class PredArgStructure:
    cells: Mapping[str, Cell]

    def __getitem__(self, relation: str) -> Cell:
        return self.cells[relation]

    def get(self, relation: str) -> Cell | None:
        return self.cells.get(relation)

    @classmethod
    def from_strings(cls, values: Mapping[str, str]) -> PredArgStructure:
        return cls({k: Cell.from_text(v) for k, v in values.items()})


@dataclass(frozen=True)
class PredArgTable:
    relations: tuple[str, ...]
    rows: tuple[PredArgStructure, ...] = ()
    provenance: str = "imported"

    def __post_init__(self) -> None:
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "rows", tuple(self.rows))
        if not self.relations:
            raise TableError("a table needs at least one relation")
        if len(set(self.relations)) != len(self.relations):
            raise TableError(f"duplicate relation names in {list(self.relations)}")
        if self.provenance not in PROVENANCES:
            raise TableError(f"unknown provenance {self.provenance!r}")
        known = set(self.relations)
        for i, row in enumerate(self.rows):
            bad = sorted(set(row.cells) - known)
            if bad:
                raise TableError(f"row {i} references unknown column(s) {', '.join(bad)}")

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def display_relation(self) -> str:
        """First column holding plain strings; used when rows become answers."""
        for rel in self.relations:
            cells = [row.cells[rel] for row in self.rows if rel in row.cells]
            if cells and all(c.number is None and c.date is None for c in cells):
                return rel
        return self.relations[0]

    def to_json(self, passage_id: str) -> dict[str, Any]:
        return {
            "passage_id": passage_id,
            "provenance": self.provenance,
            "columns": list(self.relations),
            "rows": [
                {rel: row.cells[rel].text for rel in self.relations if rel in row.cells}
                for row in self.rows
            ],
        }


def parse_tables(raw: Any) -> dict[str, PredArgTable]:
    if not isinstance(raw, Mapping) or not isinstance(raw.get("tables"), list):
        raise TableError("table file: expected an object with a 'tables' list")
    out: dict[str, PredArgTable] = {}
    for ti, rec in enumerate(raw["tables"]):
        where = f"tables[{ti}]"
        if not isinstance(rec, Mapping) or not isinstance(rec.get("passage_id"), str):
            raise TableError(f"{where}: missing passage_id")
        pid = rec["passage_id"]
        where = f"{where} (passage_id={pid!r})"
        if pid in out:
            raise TableError(f"{where}: duplicate passage_id")
        columns = rec.get("columns")
        if not isinstance(columns, list) or not all(isinstance(c, str) for c in columns):
            raise TableError(f"{where}: 'columns' must be a list of strings")
        rows = rec.get("rows")
        if not isinstance(rows, list):
            raise TableError(f"{where}: 'rows' must be a list")
        if not rows:
            warnings.warn(f"{where}: table has no rows; skipped", stacklevel=2)
            continue
        parsed = []
        for ri, row in enumerate(rows):
            if not isinstance(row, Mapping) or not all(isinstance(v, str) for v in row.values()):
                raise TableError(f"{where}.rows[{ri}]: expected an object of strings")
            unknown = sorted(set(row) - set(columns))
            if unknown:
                raise TableError(f"{where}.rows[{ri}]: unknown column(s) {', '.join(unknown)}")
            parsed.append(PredArgStructure.from_strings(row))
        try:
            out[pid] = PredArgTable(tuple(columns), tuple(parsed), rec.get("provenance", "imported"))
        except TableError as err:
            raise TableError(f"{where}: {err}") from None
    return out


def import_tables(path: str | Path) -> dict[str, PredArgTable]:
    """Load a table file; cells are typed by trying number and date parses."""
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as err:
        raise TableError(f"{path}: invalid JSON: {err}") from None
    return parse_tables(raw)


def dump_tables(tables: Mapping[str, PredArgTable]) -> str:
    obj = {"tables": [t.to_json(pid) for pid, t in tables.items()]}
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# -- pattern extractor -------------------------------------------------------

# capitalised words that open sentences without naming anybody
_CAP_STOP = frozenset(
    """a according after although an and as at before but by during for from he her
    his however in it its many of on our she several some that the their then there
    these they this those to when while with yet""".split()
)
_VERBS = frozenset(
    """was were is are had has have came won lost sold took made gave went became
    met led ran got kept left held beat threw scored kicked caught""".split()
)
_NOT_VERBS = frozenset("his its this was thus plus yards years points less".split())

_SENTENCE_RE = re.compile(r"(?<=[.!?])(?<!\b[A-Z]\.)\s+(?=[A-Z\"“(])|\.\.\.|…")
_CLAUSE_RE = re.compile(r";|,\s+(?=[A-Z])|\s+(?:and|yet|but|while)\s+")


def _is_verb(word: str) -> bool:
    if not word.isalpha() or not word.islower():
        return False
    if word in _VERBS:
        return True
    if word in _NOT_VERBS:
        return False
    if len(word) >= 5 and word.endswith(("ed", "ing")):
        return True
    return len(word) >= 4 and word.endswith("s") and not word.endswith("ss")


def _is_capitalized(word: str) -> bool:
    return word[:1].isupper()


@dataclass
class _Match:
    start: int  # token index where the agent starts
    agent: str
    pred: str | None = None
    rest: str | None = None


def _clause_matches(clause: str, toks: Sequence) -> list[_Match]:
    matches = []
    i = 0
    while i < len(toks):
        word = toks[i].text
        if not _is_capitalized(word) or word.lower() in _CAP_STOP or parse_number(word) is not None:
            i += 1
            continue
        j = i
        while j + 1 < len(toks) and _is_capitalized(toks[j + 1].text) and not toks[j].text.endswith("'s"):
            j += 1
        agent = clause[toks[i].start:toks[j].end]
        after = toks[j + 1] if j + 1 < len(toks) else None
        if agent.endswith("'s"):
            rest = clause[toks[j].end:].strip(" ,.;:") if after else ""
            matches.append(_Match(i, agent[:-2], None, rest or None))
        elif after is not None and _is_verb(after.text):
            rest = clause[after.end:].strip(" ,.;:")
            matches.append(_Match(i, agent, after.text, rest or None))
        elif after is not None and re.match(r"\s*\(\s*[$€£¥]?\d", clause[toks[j].end:]):
            matches.append(_Match(i, agent))
        i = j + 1
    return matches


def _clause_row(clause: str) -> dict[str, str] | None:
    toks = tokenize(clause)
    matches = _clause_matches(clause, toks)
    if not matches:
        return None
    numeric = [k for k, t in enumerate(toks) if parse_number(t.text) is not None]
    chosen = matches[0]
    if numeric:
        before = [m for m in matches if m.start < numeric[0]]
        if before:
            chosen = before[-1]
    row = {"arg0": chosen.agent}
    if chosen.pred:
        row["pred"] = chosen.pred
    if chosen.rest:
        row["arg1"] = chosen.rest
    after = [k for k in numeric if k > chosen.start] or numeric
    if after:
        row["num"] = toks[after[0]].text
    hit = find_date(clause)
    if hit:
        row["date"] = hit[1]
    return row


def _clauses(text: str) -> list[str]:
    out = []
    for sentence in _SENTENCE_RE.split(text):
        for clause in _CLAUSE_RE.split(sentence):
            clause = clause.strip()
            if clause:
                out.append(clause)
    return out


def pattern_extract(passage: Passage) -> PredArgTable:
    """Shallow subject-verb-object-number rows, at most one per clause.

    A clause yields a row when a capitalised name is followed by a verb, is
    possessive ("Kasay's 42-yard field goal") or is followed by a
    parenthesised number ("Serbs (14,298 inhabitants)").  When several names
    qualify, the last one before the clause's first number wins.
    """
    rows = []
    for clause in _clauses(passage.text):
        row = _clause_row(clause)
        if row is not None:
            rows.append(PredArgStructure.from_strings(row))
    return PredArgTable(PATTERN_COLUMNS, tuple(rows), "pattern")
