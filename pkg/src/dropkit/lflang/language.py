"""Value kinds, the function inventory, and logical-form trees.

Logical forms print as parenthesized prefix expressions::

    (count (filter_number_lesser all_rows num 10000))
    (select_string (filter_string_contains all_rows arg1 "goal") arg0)

Leaves are ``all_rows``, bare relation symbols, quoted strings, plain
decimal numbers, and date literals ``(date DAY MONTH YEAR)`` with ``_``
standing in for a missing field.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable, Iterator, Sequence, Union

from ..corpus import Date, canonical_number

__all__ = [
    "ALL_ROWS",
    "Apply",
    "FunctionSpec",
    "LFSyntaxError",
    "LFTypeError",
    "Leaf",
    "LogicalForm",
    "ValueKind",
    "depth",
    "function_inventory",
    "parse_lf",
    "to_text",
    "typecheck",
]


class ValueKind(enum.Enum):
    ROWS = "Rows"
    RELATION = "Relation"
    STR = "Str"
    NUM = "Num"
    DATE = "Date"
    STR_SET = "StrSet"
    NUM_SET = "NumSet"
    DATE_SET = "DateSet"

    def __repr__(self) -> str:
        return self.value


K = ValueKind


@dataclass(frozen=True)
class FunctionSpec:
    name: str
    arg_kinds: tuple[ValueKind, ...]
    ret_kind: ValueKind

    def __str__(self) -> str:
        args = ", ".join(k.value for k in self.arg_kinds)
        return f"{self.name}({args}) -> {self.ret_kind.value}"


_INVENTORY = (
    FunctionSpec("count", (K.ROWS,), K.NUM),
    FunctionSpec("filter_number_greater", (K.ROWS, K.RELATION, K.NUM), K.ROWS),
    FunctionSpec("filter_number_lesser", (K.ROWS, K.RELATION, K.NUM), K.ROWS),
    FunctionSpec("filter_number_equals", (K.ROWS, K.RELATION, K.NUM), K.ROWS),
    FunctionSpec("filter_date_greater", (K.ROWS, K.RELATION, K.DATE), K.ROWS),
    FunctionSpec("filter_date_lesser", (K.ROWS, K.RELATION, K.DATE), K.ROWS),
    FunctionSpec("filter_date_equals", (K.ROWS, K.RELATION, K.DATE), K.ROWS),
    FunctionSpec("filter_string_contains", (K.ROWS, K.RELATION, K.STR), K.ROWS),
    FunctionSpec("argmax_number", (K.ROWS, K.RELATION), K.ROWS),
    FunctionSpec("argmin_number", (K.ROWS, K.RELATION), K.ROWS),
    FunctionSpec("select_string", (K.ROWS, K.RELATION), K.STR_SET),
    FunctionSpec("select_number", (K.ROWS, K.RELATION), K.NUM_SET),
    FunctionSpec("select_date", (K.ROWS, K.RELATION), K.DATE_SET),
    FunctionSpec("sum", (K.NUM_SET,), K.NUM),
    FunctionSpec("diff", (K.NUM, K.NUM), K.NUM),
    FunctionSpec("plus", (K.NUM, K.NUM), K.NUM),
    FunctionSpec("max", (K.NUM_SET,), K.NUM),
    FunctionSpec("min", (K.NUM_SET,), K.NUM),
    FunctionSpec("first_by_date", (K.ROWS, K.RELATION), K.ROWS),
    FunctionSpec("last_by_date", (K.ROWS, K.RELATION), K.ROWS),
)


def function_inventory() -> list[FunctionSpec]:
    return list(_INVENTORY)


class LFSyntaxError(ValueError):
    pass


class LFTypeError(TypeError):
    pass


@dataclass(frozen=True)
class Leaf:
    """A constant: ``value`` is None for all_rows, a str for relations and
    strings, a Decimal for numbers, a Date for dates."""

    kind: ValueKind
    value: object = None

    def __post_init__(self) -> None:
        if self.kind is K.NUM:
            object.__setattr__(self, "value", Decimal(canonical_number(Decimal(self.value))))


@dataclass(frozen=True)
class Apply:
    fn: str
    args: tuple[LogicalForm, ...]


LogicalForm = Union[Leaf, Apply]

ALL_ROWS = Leaf(K.ROWS)

_SYMBOL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.:\-]*")
_NUMBER_RE = re.compile(r"-?\d+(?:\.\d+)?")
_TOKEN_RE = re.compile(r'\s*(?:(\()|(\))|("(?:[^"\\]|\\.)*")|([^\s()"]+))')


def depth(lf: LogicalForm) -> int:
    """Function-application nesting; leaves have depth 0."""
    if isinstance(lf, Leaf):
        return 0
    return 1 + max((depth(a) for a in lf.args), default=0)


def _leaf_text(leaf: Leaf) -> str:
    if leaf.kind is K.ROWS:
        return "all_rows"
    if leaf.kind is K.RELATION:
        name = leaf.value
        if not isinstance(name, str) or not _SYMBOL_RE.fullmatch(name) or name == "all_rows":
            raise LFSyntaxError(f"relation name {name!r} cannot be printed as a symbol")
        return name
    if leaf.kind is K.STR:
        return json.dumps(leaf.value, ensure_ascii=False)
    if leaf.kind is K.NUM:
        return canonical_number(leaf.value)
    if leaf.kind is K.DATE:
        d = leaf.value
        fields = (d.day, d.month, d.year)
        return "(date " + " ".join("_" if f is None else str(f) for f in fields) + ")"
    raise LFSyntaxError(f"no literal syntax for {leaf.kind.value}")


def to_text(lf: LogicalForm) -> str:
    if isinstance(lf, Leaf):
        return _leaf_text(lf)
    return "(" + " ".join([lf.fn, *(to_text(a) for a in lf.args)]) + ")"


def _tokens(text: str) -> Iterator[str]:
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise LFSyntaxError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        yield next(g for g in m.groups() if g is not None)
        pos = m.end()


def _read(tokens: list[str], i: int) -> tuple[object, int]:
    if i >= len(tokens):
        raise LFSyntaxError("unexpected end of input")
    tok = tokens[i]
    if tok == ")":
        raise LFSyntaxError("unexpected ')'")
    if tok != "(":
        return tok, i + 1
    items = []
    i += 1
    while i < len(tokens) and tokens[i] != ")":
        item, i = _read(tokens, i)
        items.append(item)
    if i >= len(tokens):
        raise LFSyntaxError("missing ')'")
    return items, i + 1


def _date_field(tok: object) -> int | None:
    if tok == "_":
        return None
    if isinstance(tok, str) and tok.isdigit():
        return int(tok)
    raise LFSyntaxError(f"bad date field {tok!r}")


def _build(node: object) -> LogicalForm:
    if isinstance(node, list):
        if not node:
            raise LFSyntaxError("empty application '()'")
        head, *rest = node
        if not isinstance(head, str) or not _SYMBOL_RE.fullmatch(head):
            raise LFSyntaxError(f"bad function name {head!r}")
        if head == "date":
            if len(rest) != 3:
                raise LFSyntaxError("date literal takes day, month, year")
            try:
                return Leaf(K.DATE, Date(*(_date_field(t) for t in rest)))
            except ValueError as err:
                raise LFSyntaxError(str(err)) from None
        if not rest:
            raise LFSyntaxError(f"application of {head!r} has no arguments")
        return Apply(head, tuple(_build(a) for a in rest))
    tok = node
    if tok.startswith('"'):
        try:
            return Leaf(K.STR, json.loads(tok))
        except json.JSONDecodeError:
            raise LFSyntaxError(f"bad string literal {tok}") from None
    if _NUMBER_RE.fullmatch(tok):
        return Leaf(K.NUM, Decimal(tok))
    if tok == "all_rows":
        return ALL_ROWS
    if _SYMBOL_RE.fullmatch(tok):
        return Leaf(K.RELATION, tok)
    raise LFSyntaxError(f"bad atom {tok!r}")


def parse_lf(text: str, inventory: Sequence[FunctionSpec] | None = None) -> LogicalForm:
    """Parse canonical text; with an inventory the result is also type-checked."""
    tokens = list(_tokens(text))
    node, end = _read(tokens, 0)
    if end != len(tokens):
        raise LFSyntaxError("trailing input after expression")
    lf = _build(node)
    if inventory is not None:
        typecheck(lf, inventory)
    return lf


def typecheck(lf: LogicalForm, inventory: Iterable[FunctionSpec]) -> ValueKind:
    """Return the kind of ``lf`` or raise :class:`LFTypeError`."""
    specs = {f.name: f for f in inventory}

    def check(node: LogicalForm) -> ValueKind:
        if isinstance(node, Leaf):
            return node.kind
        spec = specs.get(node.fn)
        if spec is None:
            raise LFTypeError(f"unknown function {node.fn!r}")
        if len(node.args) != len(spec.arg_kinds):
            raise LFTypeError(f"{node.fn} takes {len(spec.arg_kinds)} arguments, got {len(node.args)}")
        for i, (arg, want) in enumerate(zip(node.args, spec.arg_kinds)):
            got = check(arg)
            if got is not want:
                raise LFTypeError(f"{node.fn} argument {i + 1}: expected {want.value}, got {got.value}")
        return spec.ret_kind

    return check(lf)
