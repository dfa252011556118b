"""Rule-driven turn interpretation.

Three jobs, all deterministic and configuration-driven: pick the operator
that should govern a turn, decide whether the turn continues the active
topic / switches / resumes a dormant one, and extract concept updates from
instruction and response text with lightweight lexicon rules.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .concepts import ConceptUpdate, LocalConcept
from .errors import ConfigurationError
from .operators import OperatorLibrary, OperatorSpec, check_input_requirements, resolve_alias
from .predicates import RequirementPredicate, parse_predicate
from .text import keyword_similarity, keywords, normalize_instruction

DEFAULT_THETA = 0.3

# Phrases that explicitly announce a topic change.
SWITCH_MARKERS = (
    "switching gears",
    "switch gears",
    "new topic",
    "different topic",
    "change of subject",
    "changing topics",
    "on another note",
)

_INTERROGATIVE_LEADS = (
    "what", "why", "how", "which", "who", "whom", "whose", "when", "where",
    "can", "could", "would", "should", "do", "does", "did", "is", "are", "will",
)


@dataclass(frozen=True)
class SelectionRule:
    rule_id: str
    priority: int
    operator: str  # canonical id or alias; resolved against the library
    keywords: list[str] = field(default_factory=list)
    starts_with: str | None = None
    guard: RequirementPredicate | None = None

    def matches(self, normalized: str, concept: LocalConcept) -> bool:
        if self.starts_with and not normalized.startswith(self.starts_with):
            return False
        if self.keywords and not any(
            re.search(rf"\b{re.escape(k)}\b", normalized) for k in self.keywords
        ):
            return False
        if self.guard is not None and not self.guard.evaluate(concept):
            return False
        return True


@dataclass(frozen=True)
class TopicDecision:
    kind: str  # "continue" | "switch_new" | "reactivate"
    target_concept_id: str | None = None
    score: float | None = None


@dataclass(frozen=True)
class ExtractionLexicon:
    constraint_map: dict[str, tuple[str, str]]  # surface phrase -> (key, value)
    question_markers: list[str]
    list_item_pattern: str

    def item_regex(self) -> re.Pattern:
        return re.compile(self.list_item_pattern)


def load_ruleset(source: str | Path | list) -> list[SelectionRule]:
    """Parse and validate a selection ruleset (priorities must be unique)."""
    entries = source if isinstance(source, list) else json.loads(Path(source).read_text("utf-8"))
    rules = []
    for entry in entries:
        guard = parse_predicate(entry["guard"]) if entry.get("guard") else None
        rules.append(
            SelectionRule(
                rule_id=entry["rule_id"],
                priority=int(entry["priority"]),
                operator=entry["operator"],
                keywords=[normalize_instruction(k) for k in entry.get("keywords", [])],
                starts_with=entry.get("starts_with"),
                guard=guard,
            )
        )
    priorities = [r.priority for r in rules]
    if len(set(priorities)) != len(priorities):
        raise ConfigurationError("selection rule priorities must be unique")
    return sorted(rules, key=lambda r: r.priority)


def load_lexicon(source: str | Path | dict) -> ExtractionLexicon:
    data = source if isinstance(source, dict) else json.loads(Path(source).read_text("utf-8"))
    constraint_map = {}
    for surface, pair in data["constraint_map"].items():
        normalized = normalize_instruction(surface)
        if normalized in constraint_map:
            raise ConfigurationError(f"duplicate lexicon surface phrase: {surface!r}")
        constraint_map[normalized] = (pair[0], pair[1])
    return ExtractionLexicon(
        constraint_map=constraint_map,
        question_markers=[normalize_instruction(m) for m in data.get("question_markers", [])],
        list_item_pattern=data.get("list_item_pattern", r"^\s*(?:[-*•]|\d+[.)])\s+(.+)$"),
    )


def is_interrogative(instruction: str) -> bool:
    stripped = instruction.strip()
    if stripped.endswith("?"):
        return True
    first = normalize_instruction(stripped).split(" ", 1)[0] if stripped else ""
    return first in _INTERROGATIVE_LEADS


def select_operator(
    instruction: str,
    concept: LocalConcept,
    ruleset: list[SelectionRule],
    library: OperatorLibrary,
) -> tuple[str, str]:
    """First matching rule (by priority) whose operator's input requirements
    hold wins; otherwise the default operator: EXPLAIN for questions,
    SUMMARIZE for statements. Returns (canonical operator id, rule id)."""
    if not ruleset:
        raise ConfigurationError("ruleset must not be empty")
    normalized = normalize_instruction(instruction)
    for rule in ruleset:
        if not rule.matches(normalized, concept):
            continue
        operator_id = resolve_alias(rule.operator, library)
        if check_input_requirements(library.get(operator_id), concept).satisfied:
            return operator_id, rule.rule_id
    default = "EXPLAIN" if is_interrogative(instruction) else "SUMMARIZE"
    return default, "default"


def classify_topic(
    instruction: str,
    active: LocalConcept | None,
    dormants: list[LocalConcept],
    theta: float = DEFAULT_THETA,
) -> TopicDecision:
    """Continue, switch to a new topic, or reactivate a dormant one.

    Reactivation requires keyword similarity >= theta against a dormant
    concept (ties broken by most recent last_updated). Without an explicit
    switch marker, an active topic is sticky: low similarity alone never
    opens a new topic, because ordinary turns (constraint statements,
    short follow-ups) routinely share no keywords with their own topic.
    """
    if not 0 < theta <= 1:
        raise ConfigurationError("theta must be in (0, 1]")
    normalized = normalize_instruction(instruction)
    marked = any(marker in normalized for marker in SWITCH_MARKERS)
    instruction_kw = keywords(instruction)

    best: LocalConcept | None = None
    best_score = 0.0
    for concept in dormants:
        score = keyword_similarity(instruction_kw, concept.topic_keywords)
        if score <= 0:
            continue
        if (
            best is None
            or score > best_score
            or (score == best_score and concept.last_updated > best.last_updated)
        ):
            best, best_score = concept, score

    if active is not None and not marked:
        if keyword_similarity(instruction_kw, active.topic_keywords) >= theta:
            return TopicDecision(kind="continue")
        if best is not None and best_score >= theta:
            return TopicDecision(
                kind="reactivate", target_concept_id=best.concept_id, score=best_score
            )
        return TopicDecision(kind="continue")

    # No active concept, or the user explicitly flagged a change.
    if best is not None and best_score >= theta:
        return TopicDecision(kind="reactivate", target_concept_id=best.concept_id, score=best_score)
    return TopicDecision(kind="switch_new")


_SENTENCE_RE = re.compile(r"[^.!?]*[.!?]?")


def split_sentences(text: str) -> list[str]:
    return [s.strip() for s in _SENTENCE_RE.findall(text) if s.strip()]


def extract_from_instruction(instruction: str, lexicon: ExtractionLexicon) -> ConceptUpdate:
    """Lexicon-driven extraction: constraint phrases become constraints,
    question sentences become pending questions. Instructions only add."""
    normalized = normalize_instruction(instruction)
    add_constraints: dict[str, str] = {}
    for surface, (key, value) in lexicon.constraint_map.items():
        if surface in normalized:
            add_constraints[key] = value
    add_pending = []
    for sentence in split_sentences(instruction):
        lowered = normalize_instruction(sentence)
        if sentence.endswith("?") or any(m in lowered for m in lexicon.question_markers):
            add_pending.append(sentence)
    return ConceptUpdate(add_constraints=add_constraints, add_pending=add_pending)


def extract_from_response(
    response: str, operator: OperatorSpec, lexicon: ExtractionLexicon
) -> ConceptUpdate:
    """Structured feedback from a model response: list items become keyed
    intermediate entries, the first line becomes the consolidated result."""
    item_re = lexicon.item_regex()
    set_intermediate: dict[str, str] = {}
    n = 0
    for line in response.splitlines():
        m = item_re.match(line)
        if m:
            n += 1
            set_intermediate[f"{operator.operator_id}_item_{n}"] = m.group(1).strip()
    first_line = response.splitlines()[0].strip() if response.splitlines() else ""
    set_intermediate[f"{operator.operator_id}_result"] = first_line
    return ConceptUpdate(set_intermediate=set_intermediate)


def default_ruleset_path() -> Path:
    return Path(str(resources.files("corekit").joinpath("data/selection_rules.json")))


def default_lexicon_path() -> Path:
    return Path(str(resources.files("corekit").joinpath("data/extraction_lexicon.json")))


def load_default_ruleset() -> list[SelectionRule]:
    return load_ruleset(default_ruleset_path())


def load_default_lexicon() -> ExtractionLexicon:
    return load_lexicon(default_lexicon_path())
