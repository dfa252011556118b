"""The fixed library of cognitive operators.

Operators are the reasoning grammar: each one names a transformation
(summarize, contrast, outline, ...) with input requirements, an output
contract, and state-update guidance. The shipped library holds exactly
40 operators in 5 families of 8 and is immutable once loaded.
"""

from __future__ import annotations

import difflib
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING

from .errors import LibraryError, PredicateParseError, UnknownOperatorError
from .predicates import RequirementPredicate, parse_predicate

if TYPE_CHECKING:  # pragma: no cover
    from .concepts import LocalConcept

FAMILIES = (
    "Distillation & Extraction",
    "Transformation & Rewriting",
    "Explanatory Reasoning",
    "Planning & Structuring",
    "Evaluation & Verification",
)

LIBRARY_SIZE = 40
FAMILY_SIZE = 8

_NORM_RE = re.compile(r"[^A-Z0-9]+")


def normalize_operator_name(name: str) -> str:
    """Canonical id shape: SCREAMING_SNAKE_CASE, punctuation flattened."""
    return _NORM_RE.sub("_", name.upper()).strip("_")


@dataclass(frozen=True)
class OperatorSpec:
    operator_id: str
    description: str
    family: str | None = None
    input_requirements: list[str] = field(default_factory=list)
    expected_output: str = ""
    reasoning_constraints: list[str] = field(default_factory=list)
    state_update_rules: list[str] = field(default_factory=list)

    def parsed_requirements(self) -> list[RequirementPredicate]:
        return [parse_predicate(expr) for expr in self.input_requirements]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class SatisfactionReport:
    satisfied: bool
    failed: list[str] = field(default_factory=list)  # original predicate expressions


class OperatorLibrary:
    """Immutable operator collection with an alias table."""

    def __init__(self, operators: dict[str, OperatorSpec], aliases: dict[str, str], version: str,
                 raw_document: dict | None = None):
        self.operators = dict(operators)
        self.aliases = dict(aliases)
        self.version = version
        self.raw_document = raw_document or {}

    def __len__(self) -> int:
        return len(self.operators)

    def __contains__(self, operator_id: str) -> bool:
        return operator_id in self.operators

    def get(self, operator_id: str) -> OperatorSpec:
        try:
            return self.operators[operator_id]
        except KeyError:
            raise UnknownOperatorError(operator_id, _suggestions(operator_id, self)) from None

    def families(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for spec in self.operators.values():
            out.setdefault(spec.family, []).append(spec.operator_id)
        return out


def validate_spec(spec: OperatorSpec) -> ValidationReport:
    """Check one operator spec; violations are return values, not errors."""
    violations: list[str] = []
    if not spec.operator_id or not spec.operator_id.strip():
        violations.append("operator_id: must be nonempty")
    elif spec.operator_id != normalize_operator_name(spec.operator_id):
        violations.append(f"operator_id: {spec.operator_id!r} is not in canonical form")
    if not spec.description or not spec.description.strip():
        violations.append("description: must be nonempty")
    if spec.family is not None and spec.family not in FAMILIES:
        violations.append(f"family: {spec.family!r} is not one of the five families")
    for expr in spec.input_requirements:
        try:
            parse_predicate(expr)
        except PredicateParseError as exc:
            violations.append(f"input_requirements: {exc}")
    return ValidationReport(ok=not violations, violations=violations)


def check_input_requirements(spec: OperatorSpec, concept: "LocalConcept") -> SatisfactionReport:
    """Evaluate every requirement predicate against the concept."""
    failed = [
        pred.expression for pred in spec.parsed_requirements() if not pred.evaluate(concept)
    ]
    return SatisfactionReport(satisfied=not failed, failed=failed)


def resolve_alias(name: str, library: OperatorLibrary) -> str:
    """Map a surface operator name to its canonical id (case-insensitive)."""
    normalized = normalize_operator_name(name)
    if normalized in library.operators:
        return normalized
    if normalized in library.aliases:
        return library.aliases[normalized]
    raise UnknownOperatorError(name, _suggestions(normalized, library))


def _suggestions(name: str, library: OperatorLibrary) -> list[str]:
    candidates = list(library.operators) + list(library.aliases)
    return difflib.get_close_matches(name, candidates, n=3, cutoff=0.5)


def _spec_from_dict(data: dict) -> OperatorSpec:
    return OperatorSpec(
        operator_id=data.get("operator_id", ""),
        description=data.get("description", ""),
        family=data.get("family"),
        input_requirements=list(data.get("input_requirements", [])),
        expected_output=data.get("expected_output", ""),
        reasoning_constraints=list(data.get("reasoning_constraints", [])),
        state_update_rules=list(data.get("state_update_rules", [])),
    )


def load_library(source: str | Path | dict) -> OperatorLibrary:
    """Load and fully validate an operator library document.

    Accepts a path to a JSON file or an already-parsed document. Raises
    LibraryError on parse failure, duplicate ids, or any validation
    violation (all violating operator ids are reported together).
    """
    if isinstance(source, dict):
        document = source
    else:
        text = Path(source).read_text(encoding="utf-8")
        if not text.strip():
            raise LibraryError("empty operator library document")
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise LibraryError(f"malformed library document: {exc}") from exc
    if not isinstance(document, dict) or "operators" not in document:
        raise LibraryError("library document must be an object with an 'operators' array")

    operators: dict[str, OperatorSpec] = {}
    violations: list[str] = []
    for entry in document["operators"]:
        spec = _spec_from_dict(entry)
        if spec.operator_id in operators:
            raise LibraryError(f"duplicate operator_id: {spec.operator_id}")
        report = validate_spec(spec)
        if not report.ok:
            violations.extend(f"{spec.operator_id or '<missing id>'}: {v}" for v in report.violations)
        if spec.family is None:
            violations.append(f"{spec.operator_id}: family: missing")
        operators[spec.operator_id] = spec

    aliases: dict[str, str] = {}
    for alias, target in document.get("aliases", {}).items():
        normalized = normalize_operator_name(alias)
        if target not in operators:
            violations.append(f"alias {alias}: target {target} not in library")
        aliases[normalized] = target

    if violations:
        raise LibraryError(
            f"library validation failed with {len(violations)} violation(s)", violations
        )
    return OperatorLibrary(
        operators=operators,
        aliases=aliases,
        version=str(document.get("version", "0")),
        raw_document=document,
    )


def default_library_path() -> Path:
    return Path(str(resources.files("corekit").joinpath("data/operator_library.json")))


def load_default_library() -> OperatorLibrary:
    return load_library(default_library_path())
