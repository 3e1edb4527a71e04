"""Deterministic bottom-up evaluation of logical forms over one table."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Callable, Sequence

from ..corpus import Answer, Date, canonical_number
from ..metrics import normalize_text
from ..tables import PredArgTable
from .language import Apply, Leaf, LogicalForm, ValueKind, function_inventory, typecheck

__all__ = [
    "EMPTY_DENOTATION",
    "Denotation",
    "EmptyDenotation",
    "ExecutionError",
    "apply_function",
    "date_cmp",
    "execute",
    "fold_token",
    "to_answer",
]

K = ValueKind


class ExecutionError(RuntimeError):
    pass


@dataclass(frozen=True)
class Denotation:
    """A typed value. Rows are tuples of row indices into the table."""

    kind: ValueKind
    value: object


class EmptyDenotation:
    """Stands for an empty result; it never matches a gold answer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EMPTY_DENOTATION"


EMPTY_DENOTATION = EmptyDenotation()


def fold_token(token: str) -> str:
    """Crude plural folding so that "goals" and "goal" meet."""
    if len(token) > 3 and token.endswith("s") and not token.endswith("ss") and not token[-2].isdigit():
        return token[:-1]
    return token


def folded_tokens(text: str) -> list[str]:
    return [fold_token(t) for t in normalize_text(text).tokens]


def date_cmp(a: Date, b: Date) -> int:
    """Compare year, then month, then day, skipping fields either side lacks."""
    for x, y in ((a.year, b.year), (a.month, b.month), (a.day, b.day)):
        if x is None or y is None:
            continue
        if x != y:
            return -1 if x < y else 1
    return 0


def _date_key(d: Date) -> tuple[int, int, int]:
    return tuple(-1 if f is None else f for f in (d.year, d.month, d.day))


def _check_relation(table: PredArgTable, rel: str) -> None:
    if rel not in table.relations:
        raise ExecutionError(f"relation {rel!r} is not a column of the table (columns: {', '.join(table.relations)})")


def _cells(table: PredArgTable, rows: Sequence[int], rel: str, attr: str):
    _check_relation(table, rel)
    for i in rows:
        cell = table.rows[i].cells.get(rel)
        if cell is not None:
            value = cell.text if attr == "text" else getattr(cell, attr)
            if value is not None:
                yield i, value


def _filter(test: Callable[[object], bool], attr: str):
    def run(table, rows, rel, target):
        return tuple(i for i, v in _cells(table, rows, rel, attr) if test(v, target))
    return run


def _contains(text: str, needle: str) -> bool:
    want = folded_tokens(needle)
    have = set(folded_tokens(text))
    return bool(want) and all(w in have for w in want)


def _extreme(attr: str, pick, key=lambda v: v):
    def run(table, rows, rel):
        found = list(_cells(table, rows, rel, attr))
        if not found:
            return ()
        best = pick(key(v) for _, v in found)
        return tuple(i for i, v in found if key(v) == best)
    return run


def _select(attr: str):
    def run(table, rows, rel):
        return tuple(dict.fromkeys(v for _, v in _cells(table, rows, rel, attr)))
    return run


def _nonempty(name: str, fn):
    def run(table, values):
        if not values:
            raise ExecutionError(f"{name} of an empty set")
        return fn(values)
    return run


_IMPLS: dict[str, Callable] = {
    "count": lambda table, rows: Decimal(len(rows)),
    "filter_number_greater": _filter(lambda v, n: v > n, "number"),
    "filter_number_lesser": _filter(lambda v, n: v < n, "number"),
    "filter_number_equals": _filter(lambda v, n: v == n, "number"),
    "filter_date_greater": _filter(lambda v, d: date_cmp(v, d) > 0, "date"),
    "filter_date_lesser": _filter(lambda v, d: date_cmp(v, d) < 0, "date"),
    "filter_date_equals": _filter(lambda v, d: date_cmp(v, d) == 0, "date"),
    "filter_string_contains": _filter(_contains, "text"),
    "argmax_number": _extreme("number", max),
    "argmin_number": _extreme("number", min),
    "select_string": _select("text"),
    "select_number": _select("number"),
    "select_date": _select("date"),
    "sum": lambda table, values: sum(values, Decimal(0)),
    "diff": lambda table, a, b: a - b,
    "plus": lambda table, a, b: a + b,
    "max": _nonempty("max", max),
    "min": _nonempty("min", min),
    "first_by_date": _extreme("date", min, _date_key),
    "last_by_date": _extreme("date", max, _date_key),
}

_SPECS = {f.name: f for f in function_inventory()}


def apply_function(name: str, args: Sequence[object], table: PredArgTable) -> object:
    """Apply one inventory function to already-evaluated raw values."""
    return _IMPLS[name](table, *args)


def _leaf_value(leaf: Leaf, table: PredArgTable) -> object:
    if leaf.kind is K.ROWS:
        return tuple(range(len(table.rows)))
    if leaf.kind is K.RELATION:
        _check_relation(table, leaf.value)
    return leaf.value


def execute(lf: LogicalForm, table: PredArgTable) -> Denotation:
    kind = typecheck(lf, _SPECS.values())

    def run(node: LogicalForm) -> object:
        if isinstance(node, Leaf):
            return _leaf_value(node, table)
        return apply_function(node.fn, [run(a) for a in node.args], table)

    return Denotation(kind, run(lf))


def _number_answer(value: Decimal) -> Answer:
    return Answer(number=value, number_surface=canonical_number(value))


def to_answer(den: Denotation, table: PredArgTable | None = None) -> Answer | EmptyDenotation:
    kind, value = den.kind, den.value
    if kind is K.NUM:
        return _number_answer(value)
    if kind in (K.STR, K.RELATION):
        return Answer(spans=(value,))
    if kind is K.DATE:
        return Answer(date=value)
    if not value:
        return EMPTY_DENOTATION
    if kind is K.STR_SET:
        return Answer(spans=tuple(value))
    if kind is K.NUM_SET:
        if len(value) == 1:
            return _number_answer(value[0])
        return Answer(spans=tuple(canonical_number(v) for v in value))
    if kind is K.DATE_SET:
        if len(value) == 1:
            return Answer(date=value[0])
        return Answer(spans=tuple(d.render() for d in value))
    if kind is K.ROWS:
        if table is None:
            raise ValueError("converting rows to an answer needs the table")
        rel = table.display_relation
        texts = tuple(dict.fromkeys(
            table.rows[i].cells[rel].text for i in value if rel in table.rows[i].cells
        ))
        return Answer(spans=texts) if texts else EMPTY_DENOTATION
    raise ValueError(f"unknown kind {kind}")
