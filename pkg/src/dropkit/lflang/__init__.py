"""Typed logical forms over predicate-argument tables."""

from .executor import (
    EMPTY_DENOTATION,
    Denotation,
    EmptyDenotation,
    ExecutionError,
    apply_function,
    execute,
    to_answer,
)
from .grammar import ContextRuleConfig, Grammar, Production, induce_grammar, load_embeddings
from .language import (
    ALL_ROWS,
    Apply,
    FunctionSpec,
    Leaf,
    LFSyntaxError,
    LFTypeError,
    LogicalForm,
    ValueKind,
    depth,
    function_inventory,
    parse_lf,
    to_text,
    typecheck,
)

__all__ = [
    "ALL_ROWS",
    "Apply",
    "ContextRuleConfig",
    "Denotation",
    "EMPTY_DENOTATION",
    "EmptyDenotation",
    "ExecutionError",
    "FunctionSpec",
    "Grammar",
    "LFSyntaxError",
    "LFTypeError",
    "Leaf",
    "LogicalForm",
    "Production",
    "ValueKind",
    "apply_function",
    "depth",
    "execute",
    "function_inventory",
    "induce_grammar",
    "load_embeddings",
    "parse_lf",
    "to_answer",
    "to_text",
    "typecheck",
]
