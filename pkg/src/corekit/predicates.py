"""Requirement predicate mini-language.

Grammar:

    pred    := "count(" field ")" cmp int
             | "nonempty(" field ")"
             | "contains(" field "," quoted ")"
    cmp     := ">=" | "<=" | "==" | ">" | "<"
    field   := "constraints" | "intermediate_results" | "pending_questions"
             | "resolved_questions" | "task_summary"

Plus one sugar form used by operator documents in the wild:

    "<field> must contain <cmp> <int> items"  ==  count(<field>) <cmp> <int>

A parsed predicate keeps its original expression text so that failure
reports quote exactly what the operator document said.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import PredicateParseError
from .text import count_tokens

if TYPE_CHECKING:  # pragma: no cover
    from .concepts import LocalConcept

FIELDS = (
    "constraints",
    "intermediate_results",
    "pending_questions",
    "resolved_questions",
    "task_summary",
)

_COUNT_RE = re.compile(r"^count\(\s*(\w+)\s*\)\s*(>=|<=|==|>|<)\s*(-?\d+)$")
_NONEMPTY_RE = re.compile(r"^nonempty\(\s*(\w+)\s*\)$")
_CONTAINS_RE = re.compile(r"^contains\(\s*(\w+)\s*,\s*\"([^\"]*)\"\s*\)$")
_SUGAR_RE = re.compile(r"^(\w+)\s+must\s+contain\s+(>=|<=|==|>|<)\s+(-?\d+)\s+items?$")

_CMP = {
    ">=": lambda a, b: a >= b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    ">": lambda a, b: a > b,
    "<": lambda a, b: a < b,
}


@dataclass(frozen=True)
class RequirementPredicate:
    """One parsed input requirement over a local concept."""

    expression: str
    kind: str  # "count" | "nonempty" | "contains"
    field: str
    cmp: str | None = None
    value: int | None = None
    literal: str | None = None

    def evaluate(self, concept: "LocalConcept") -> bool:
        if self.kind == "count":
            return _CMP[self.cmp](_field_count(concept, self.field), self.value)
        if self.kind == "nonempty":
            return _field_count(concept, self.field) > 0
        return _field_contains(concept, self.field, self.literal)


def parse_predicate(expression: str) -> RequirementPredicate:
    """Parse one predicate expression; raises PredicateParseError."""
    text = " ".join(expression.split())
    m = _COUNT_RE.match(text)
    if m:
        return _build(expression, "count", m.group(1), cmp=m.group(2), value=int(m.group(3)))
    m = _SUGAR_RE.match(text)
    if m:
        return _build(expression, "count", m.group(1), cmp=m.group(2), value=int(m.group(3)))
    m = _NONEMPTY_RE.match(text)
    if m:
        return _build(expression, "nonempty", m.group(1))
    m = _CONTAINS_RE.match(text)
    if m:
        return _build(expression, "contains", m.group(1), literal=m.group(2))
    raise PredicateParseError(f"unparseable predicate: {expression!r}")


def _build(expression, kind, field, cmp=None, value=None, literal=None) -> RequirementPredicate:
    if field not in FIELDS:
        raise PredicateParseError(
            f"unknown field {field!r} in predicate {expression!r}; "
            f"known fields: {', '.join(FIELDS)}"
        )
    return RequirementPredicate(
        expression=expression, kind=kind, field=field, cmp=cmp, value=value, literal=literal
    )


def _field_count(concept: "LocalConcept", field: str) -> int:
    value = getattr(concept, field)
    if field == "task_summary":
        return count_tokens(value)
    return len(value)


def _field_contains(concept: "LocalConcept", field: str, literal: str) -> bool:
    needle = literal.lower()
    value = getattr(concept, field)
    if field == "task_summary":
        return needle in value.lower()
    if isinstance(value, dict):
        return any(needle in k.lower() or needle in str(v).lower() for k, v in value.items())
    return any(needle in str(item).lower() for item in value)
