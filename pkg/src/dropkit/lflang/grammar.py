"""Grammar induction from function signatures plus per-question terminals."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..corpus import Passage, QuestionAnswer, canonical_number, parse_number, tokenize
from ..metrics import normalize_text
from ..tables import PredArgTable
from .executor import fold_token
from .language import ALL_ROWS, FunctionSpec, Leaf, ValueKind

__all__ = ["ContextRuleConfig", "Grammar", "Production", "induce_grammar", "load_embeddings"]

log = logging.getLogger(__name__)
K = ValueKind

# question words that are never useful string constants
STOPWORDS = frozenset(
    """and as at be been but by did do does for from he her his how in is it its many much
    of on or she than that their them these they this those to was were what when where
    which who whom whose why with""".split()
)


@dataclass
class ContextRuleConfig:
    """Settings for the context-specific string rules.

    ``neighbor_rule=None`` turns the embedding-neighbour rule on exactly when
    an embedding table is supplied.
    """

    embeddings: Mapping[str, np.ndarray] | None = None
    distance: float = 0.3
    neighbor_rule: bool | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.distance <= 2:
            raise ValueError(f"cosine distance threshold must lie in [0, 2], got {self.distance}")
        if self.embeddings:
            dims = {np.shape(v) for v in self.embeddings.values()}
            if len(dims) != 1:
                raise ValueError(f"embedding vectors disagree in dimension: {sorted(dims)}")


def load_embeddings(path: str | Path) -> dict[str, np.ndarray]:
    """Read GloVe-style text vectors: one ``word v1 v2 ...`` per line."""
    table = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            parts = line.rstrip().split(" ")
            if len(parts) < 2:
                continue
            table[parts[0]] = np.asarray(parts[1:], dtype=float)
    return table


@dataclass(frozen=True)
class Production:
    lhs: ValueKind
    function: FunctionSpec | None = None
    leaf: Leaf | None = None
    source: str = "function"

    def __str__(self) -> str:
        if self.function is not None:
            rhs = f"{self.function.name}({', '.join(k.value for k in self.function.arg_kinds)})"
        else:
            rhs = repr(self.leaf.value) if self.leaf.value is not None else "all_rows"
        return f"{self.lhs.value} -> {rhs}  [{self.source}]"


@dataclass(frozen=True)
class Grammar:
    productions: tuple[Production, ...]
    _by_kind: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        index: dict[ValueKind, list[Production]] = {}
        for p in self.productions:
            index.setdefault(p.lhs, []).append(p)
        object.__setattr__(self, "_by_kind", index)

    @property
    def functions(self) -> list[FunctionSpec]:
        return [p.function for p in self.productions if p.function is not None]

    def terminals(self, kind: ValueKind) -> list[Leaf]:
        return [p.leaf for p in self._by_kind.get(kind, ()) if p.leaf is not None]

    def functions_for(self, kind: ValueKind) -> list[FunctionSpec]:
        return [p.function for p in self._by_kind.get(kind, ()) if p.function is not None]


def _string_candidates(text: str) -> list[str]:
    return [t for t in normalize_text(text).tokens if t not in STOPWORDS and parse_number(t) is None]


def _neighbors(passage_words: Sequence[str], question_words: Sequence[str], cfg: ContextRuleConfig) -> set[str]:
    emb = cfg.embeddings
    p_words = [w for w in dict.fromkeys(passage_words) if w in emb]
    q_words = [w for w in dict.fromkeys(question_words) if w in emb]
    if not p_words or not q_words:
        return set()

    def unit(words):
        m = np.stack([np.asarray(emb[w], dtype=float) for w in words])
        norms = np.linalg.norm(m, axis=1, keepdims=True)
        return m / np.where(norms == 0, 1, norms)

    dist = 1.0 - unit(p_words) @ unit(q_words).T
    # slack absorbs rounding when two vectors are identical
    close = (dist <= cfg.distance + 1e-9).any(axis=1)
    return {w for w, hit in zip(p_words, close) if hit}


def _question_text(question: QuestionAnswer | str) -> str:
    return question if isinstance(question, str) else question.question_text


def induce_grammar(
    inventory: Sequence[FunctionSpec],
    question: QuestionAnswer | str,
    passage: Passage,
    table: PredArgTable,
    cfg: ContextRuleConfig | None = None,
) -> Grammar:
    """One production per function, plus terminals drawn from this context."""
    cfg = cfg or ContextRuleConfig()
    if not table.rows:
        raise ValueError(f"cannot induce a grammar over the empty table of passage {passage.id!r}")
    productions = [Production(f.ret_kind, function=f) for f in inventory]
    qtext = _question_text(question)

    q_words = _string_candidates(qtext)
    p_words = _string_candidates(passage.text)
    q_folded = {fold_token(w) for w in q_words}
    strings = {w for w in p_words if fold_token(w) in q_folded}
    neighbor = cfg.neighbor_rule if cfg.neighbor_rule is not None else cfg.embeddings is not None
    if neighbor:
        if cfg.embeddings is None:
            warnings.warn("embedding-neighbour rule requested without embeddings; skipped", stacklevel=2)
        else:
            extra = _neighbors(p_words, q_words, cfg) - strings
            log.debug("neighbour rule adds %d strings: %s", len(extra), sorted(extra))
            strings |= extra
    for word in sorted(strings):
        productions.append(Production(K.STR, leaf=Leaf(K.STR, word), source="string"))

    numbers: dict[str, Decimal] = {}
    for tok in tokenize(qtext):
        value = parse_number(tok.text)
        if value is not None:
            numbers.setdefault(canonical_number(value), value)
    for mention in passage.numbers:
        numbers.setdefault(canonical_number(mention.value), mention.value)
    for value in sorted(numbers.values()):
        productions.append(Production(K.NUM, leaf=Leaf(K.NUM, value), source="number"))

    dates = {cell.date for row in table.rows for cell in row.cells.values() if cell.date is not None}
    for d in sorted(dates, key=lambda d: tuple(-1 if f is None else f for f in (d.year, d.month, d.day))):
        productions.append(Production(K.DATE, leaf=Leaf(K.DATE, d), source="date"))

    for rel in table.relations:
        productions.append(Production(K.RELATION, leaf=Leaf(K.RELATION, rel), source="relation"))
    productions.append(Production(K.ROWS, leaf=ALL_ROWS, source="all-rows"))
    return Grammar(tuple(productions))
