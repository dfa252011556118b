"""Per-turn model input construction.

Two prompt policies live here. The concept-first packet carries only the
operator, a budgeted concept summary, and the latest instruction; it never
contains replayed transcript text. The token-first baseline replays the
whole transcript and exists purely for comparison runs.

Token counting is whitespace-run counting: deterministic, dependency-free,
and additive under concatenation. Absolute values therefore differ from any
vendor tokenizer; all cross-condition comparisons are structural.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .concepts import LocalConcept
from .errors import ConfigurationError
from .operators import OperatorSpec
from .text import count_tokens

__all__ = [
    "count_tokens",
    "TokenBudget",
    "ConceptPacket",
    "ConceptSummary",
    "summarize_concept",
    "build_core_packet",
    "build_baseline_prompt",
]

SECTION_ORDER = (
    "OPERATOR",
    "REASONING_CONSTRAINTS",
    "TASK",
    "CONSTRAINTS",
    "INTERMEDIATE",
    "PENDING",
    "INSTRUCTION",
    "OUTPUT_FORMAT",
)

_HEADERS = {
    "OPERATOR": "[OPERATOR]",
    "REASONING_CONSTRAINTS": "[REASONING CONSTRAINTS]",
    "TASK": "[TASK]",
    "CONSTRAINTS": "[CONSTRAINTS]",
    "INTERMEDIATE": "[INTERMEDIATE]",
    "PENDING": "[PENDING]",
    "INSTRUCTION": "[INSTRUCTION]",
    "OUTPUT_FORMAT": "[OUTPUT FORMAT]",
}


@dataclass(frozen=True)
class TokenBudget:
    packet_budget: int = 256
    summary_budget: int = 160

    def __post_init__(self):
        if self.packet_budget <= 0 or self.summary_budget <= 0:
            raise ConfigurationError("token budgets must be positive")
        if self.summary_budget >= self.packet_budget:
            raise ConfigurationError("summary_budget must be smaller than packet_budget")


@dataclass(frozen=True)
class ConceptPacket:
    operator_id: str
    rendered_text: str
    token_count: int
    sections: dict[str, str]
    over_budget: bool = False


@dataclass(frozen=True)
class ConceptSummary:
    text: str
    token_count: int
    sections: dict[str, str]  # TASK / CONSTRAINTS / INTERMEDIATE / PENDING contents
    over_budget: bool
    truncation_level: int


def _concept_sections(concept: LocalConcept, level: int) -> dict[str, str]:
    """Section contents at one truncation level.

    Levels drop fields in reverse priority order:
      0 full; 1 drop pending; 2 intermediate keys only; 3 drop intermediate;
      4 constraint keys only (the minimal rendering: task summary and
      constraint keys are never dropped).
    """
    constraints = "; ".join(
        concept.constraints if level >= 4 else (f"{k}={v}" for k, v in concept.constraints.items())
    )
    if level >= 3:
        intermediate = ""
    elif level == 2:
        intermediate = "; ".join(concept.intermediate_results)
    else:
        intermediate = "; ".join(f"{k}: {v}" for k, v in concept.intermediate_results.items())
    pending = "" if level >= 1 else "; ".join(concept.pending_questions)
    return {
        "TASK": concept.task_summary.strip(),
        "CONSTRAINTS": constraints,
        "INTERMEDIATE": intermediate,
        "PENDING": pending,
    }


def _summary_text(sections: dict[str, str]) -> str:
    lines = []
    for name in ("TASK", "CONSTRAINTS", "INTERMEDIATE", "PENDING"):
        content = sections[name]
        if name == "TASK" or content:
            lines.append(f"{_HEADERS[name]} {content}".rstrip())
    return "\n".join(lines)


MAX_TRUNCATION_LEVEL = 4


def summarize_concept(concept: LocalConcept, token_budget: int) -> ConceptSummary:
    """Deterministic budgeted rendering of the concept state.

    Only nonempty fields are rendered (the task line always is). When the
    full rendering exceeds the budget, fields are dropped in reverse
    priority order until it fits; if even the minimal rendering is over
    budget it is returned with the over_budget flag set.
    """
    if token_budget < 10:
        raise ConfigurationError("summary token budget must be at least 10")
    for level in range(MAX_TRUNCATION_LEVEL + 1):
        sections = _concept_sections(concept, level)
        text = _summary_text(sections)
        tokens = count_tokens(text)
        if tokens <= token_budget:
            return ConceptSummary(text, tokens, sections, False, level)
    return ConceptSummary(text, tokens, sections, True, MAX_TRUNCATION_LEVEL)


def render_packet_text(sections: dict[str, str]) -> str:
    """Assemble the fixed packet template; empty sections render (none)."""
    parts = []
    for name in SECTION_ORDER:
        content = sections.get(name, "")
        if name == "REASONING_CONSTRAINTS" and content:
            parts.append(f"{_HEADERS[name]}\n{content}\n")
        else:
            parts.append(f"{_HEADERS[name]} {content or '(none)'}\n")
    return "".join(parts)


def build_core_packet(
    spec: OperatorSpec,
    concept: LocalConcept,
    instruction: str,
    budget: TokenBudget | None = None,
) -> ConceptPacket:
    """Render the concept-first packet for one turn.

    Sections come from the operator spec, a budgeted concept summary, and
    the raw instruction; transcript text is structurally unreachable from
    here.
    """
    budget = budget or TokenBudget()
    summary = summarize_concept(concept, budget.summary_budget)
    sections = {
        "OPERATOR": f"{spec.operator_id}: {spec.description}",
        "REASONING_CONSTRAINTS": "\n".join(f"- {c}" for c in spec.reasoning_constraints),
        "TASK": summary.sections["TASK"],
        "CONSTRAINTS": summary.sections["CONSTRAINTS"],
        "INTERMEDIATE": summary.sections["INTERMEDIATE"],
        "PENDING": summary.sections["PENDING"],
        "INSTRUCTION": instruction,
        "OUTPUT_FORMAT": spec.expected_output,
    }
    rendered = render_packet_text(sections)
    tokens = count_tokens(rendered)
    return ConceptPacket(
        operator_id=spec.operator_id,
        rendered_text=rendered,
        token_count=tokens,
        sections=sections,
        over_budget=summary.over_budget or tokens > budget.packet_budget,
    )


def build_baseline_prompt(
    transcript: list[tuple[str, str]], instruction: str
) -> tuple[str, int]:
    """Token-first prompt: the full transcript replayed, then the new
    instruction. Returns (text, token count)."""
    prefixes = {"user": "User", "assistant": "Assistant"}
    lines = []
    for speaker, text in transcript:
        if speaker not in prefixes:
            raise ValueError(f"unknown speaker: {speaker!r}")
        lines.append(f"{prefixes[speaker]}: {text}")
    lines.append(f"User: {instruction}")
    prompt = "\n".join(lines)
    return prompt, count_tokens(prompt)
