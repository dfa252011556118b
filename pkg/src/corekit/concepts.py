"""Local concept state: the persistent, meaning-level record of one task.

A concept stores what the conversation *means* so far (task, constraints,
intermediate results, question ledgers), never transcript text. Values are
immutable: every update returns a new concept, which keeps before/after
auditing trivial and makes sharing across threads safe.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

from .errors import ConceptParseError, DormantConceptError
from .text import keywords

ACTIVE = "active"
DORMANT = "dormant"

# Bounded recent-operator trail. Consecutive repeats collapse so the trail
# reflects which reasoning modes were used, not how many turns ran; this is
# what keeps a concept's serialized size independent of conversation length.
OPERATOR_HISTORY_LIMIT = 8


@dataclass(frozen=True)
class LocalConcept:
    concept_id: str
    task_summary: str
    constraints: dict[str, str] = field(default_factory=dict)
    intermediate_results: dict[str, str] = field(default_factory=dict)
    resolved_questions: list[str] = field(default_factory=list)
    pending_questions: list[str] = field(default_factory=list)
    active_operator: str | None = None
    operator_history: list[str] = field(default_factory=list)
    status: str = ACTIVE
    topic_keywords: set[str] = field(default_factory=set)
    last_updated: datetime = field(default_factory=lambda: datetime.now(timezone.utc))


@dataclass(frozen=True)
class ConceptUpdate:
    """One batch of semantic changes to fold into a concept."""

    summary_revision: str | None = None
    add_constraints: dict[str, str] = field(default_factory=dict)
    remove_constraints: list[str] = field(default_factory=list)
    set_intermediate: dict[str, str] = field(default_factory=dict)
    add_pending: list[str] = field(default_factory=list)
    resolve: list[str] = field(default_factory=list)
    next_operator: str | None = None

    def is_empty(self) -> bool:
        return not (
            self.summary_revision is not None
            or self.add_constraints
            or self.remove_constraints
            or self.set_intermediate
            or self.add_pending
            or self.resolve
            or self.next_operator
        )


def derive_topic_keywords(
    task_summary: str,
    constraints: dict[str, str],
    intermediate_results: dict[str, str],
) -> set[str]:
    """Recomputable keyword set: summary text, constraint keys and values,
    intermediate result keys."""
    parts = [task_summary]
    for k, v in constraints.items():
        parts.append(k)
        parts.append(v)
    parts.extend(intermediate_results.keys())
    return keywords(" ".join(parts))


def new_concept(seed_summary: str, now: datetime, concept_id: str | None = None) -> LocalConcept:
    """Fresh active concept seeded with the given summary."""
    return LocalConcept(
        concept_id=concept_id or uuid.uuid4().hex,
        task_summary=seed_summary,
        topic_keywords=derive_topic_keywords(seed_summary, {}, {}),
        last_updated=now,
    )


def apply_update(concept: LocalConcept, update: ConceptUpdate, now: datetime) -> LocalConcept:
    """Fold one update into an active concept, returning the new version.

    Constraint additions overwrite existing values on key collision;
    removals apply after additions (the two key sets must be disjoint).
    Resolved entries leave pending; entries resolved without ever being
    pending are recorded directly. The pending and resolved ledgers stay
    disjoint and duplicate-free.
    """
    if concept.status != ACTIVE:
        raise DormantConceptError(
            f"concept {concept.concept_id} is {concept.status}; only active concepts update"
        )
    overlap = set(update.remove_constraints) & set(update.add_constraints)
    if overlap:
        raise ValueError(f"keys both added and removed: {sorted(overlap)}")

    constraints = dict(concept.constraints)
    constraints.update(update.add_constraints)
    for key in update.remove_constraints:
        constraints.pop(key, None)

    intermediate = dict(concept.intermediate_results)
    intermediate.update(update.set_intermediate)

    resolved = list(concept.resolved_questions)
    pending = list(concept.pending_questions)
    for q in update.resolve:
        if q in pending:
            pending.remove(q)
        if q not in resolved:
            resolved.append(q)
    for q in update.add_pending:
        if q not in pending and q not in resolved:
            pending.append(q)

    active_operator = concept.active_operator
    history = list(concept.operator_history)
    if update.next_operator:
        active_operator = update.next_operator
        if not history or history[-1] != update.next_operator:
            history.append(update.next_operator)
            history = history[-OPERATOR_HISTORY_LIMIT:]

    summary = (
        update.summary_revision if update.summary_revision is not None else concept.task_summary
    )
    return replace(
        concept,
        task_summary=summary,
        constraints=constraints,
        intermediate_results=intermediate,
        resolved_questions=resolved,
        pending_questions=pending,
        active_operator=active_operator,
        operator_history=history,
        topic_keywords=derive_topic_keywords(summary, constraints, intermediate),
        last_updated=now,
    )


def with_status(concept: LocalConcept, status: str, now: datetime | None = None) -> LocalConcept:
    """Copy with a new lifecycle status (and optionally a new timestamp)."""
    return replace(concept, status=status, last_updated=now or concept.last_updated)


# ---------------------------------------------------------------------------
# Persistence format: plain JSON object, ordered [key, value] pairs for the
# two maps so insertion order survives bit-exactly, ISO-8601 timestamps.
# ---------------------------------------------------------------------------

def concept_to_dict(concept: LocalConcept) -> dict:
    return {
        "concept_id": concept.concept_id,
        "task_summary": concept.task_summary,
        "constraints": [[k, v] for k, v in concept.constraints.items()],
        "intermediate_results": [[k, v] for k, v in concept.intermediate_results.items()],
        "resolved_questions": list(concept.resolved_questions),
        "pending_questions": list(concept.pending_questions),
        "active_operator": concept.active_operator,
        "operator_history": list(concept.operator_history),
        "status": concept.status,
        "topic_keywords": sorted(concept.topic_keywords),
        "last_updated": concept.last_updated.isoformat(),
    }


def concept_from_dict(data: dict) -> LocalConcept:
    try:
        return LocalConcept(
            concept_id=data["concept_id"],
            task_summary=data["task_summary"],
            constraints={k: v for k, v in data["constraints"]},
            intermediate_results={k: v for k, v in data["intermediate_results"]},
            resolved_questions=list(data["resolved_questions"]),
            pending_questions=list(data["pending_questions"]),
            active_operator=data.get("active_operator"),
            operator_history=list(data.get("operator_history", [])),
            status=data["status"],
            topic_keywords=set(data.get("topic_keywords", [])),
            last_updated=datetime.fromisoformat(data["last_updated"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConceptParseError(f"bad concept document: {exc}") from exc


def concept_to_json(concept: LocalConcept) -> str:
    return json.dumps(concept_to_dict(concept), ensure_ascii=False)


def concept_from_json(text: str) -> LocalConcept:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConceptParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConceptParseError("concept document must be a JSON object")
    return concept_from_dict(data)


def roundtrip_serialize(concept: LocalConcept) -> LocalConcept:
    """Serialize then parse; the result is field-for-field equal."""
    return concept_from_json(concept_to_json(concept))
