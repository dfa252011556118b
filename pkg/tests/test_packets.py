import re
from datetime import datetime, timezone

import pytest

from corekit.concepts import ConceptUpdate, apply_update, new_concept
from corekit.errors import ConfigurationError
from corekit.operators import load_default_library
from corekit.packets import (
    TokenBudget,
    build_baseline_prompt,
    build_core_packet,
    count_tokens,
    summarize_concept,
)

T0 = datetime(2024, 1, 1, tzinfo=timezone.utc)
LIBRARY = load_default_library()


def dog_concept():
    """The worked comparison-state fixture: two constraints, two breeds."""
    c = new_concept("select dog breed", T0)
    return apply_update(
        c,
        ConceptUpdate(
            add_constraints={"housing": "apartment-friendly", "coat": "low shedding"},
            set_intermediate={"breeds to compare": "Poodle, Miniature Schnauzer"},
        ),
        T0,
    )


def test_summary_contains_all_fields_at_generous_budget():
    text = summarize_concept(dog_concept(), 120).text
    for needle in ("apartment-friendly", "low shedding", "Poodle", "Miniature Schnauzer"):
        assert needle in text


def test_summary_of_empty_concept_is_task_line_only():
    c = new_concept("select dog breed", T0)
    summary = summarize_concept(c, 50)
    assert summary.text == "[TASK] select dog breed"


def test_summary_never_truncates_under_huge_budget():
    c = dog_concept()
    c = apply_update(c, ConceptUpdate(add_pending=["budget question?"]), T0)
    summary = summarize_concept(c, 10**6)
    assert summary.truncation_level == 0
    assert "budget question?" in summary.text
    assert not summary.over_budget


def test_summary_respects_budget_dropping_pending_first():
    c = dog_concept()
    c = apply_update(
        c, ConceptUpdate(add_pending=[f"pending question number {i}?" for i in range(10)]), T0
    )
    full = summarize_concept(c, 10**6)
    tight = summarize_concept(c, full.token_count - 1)
    assert tight.token_count <= full.token_count - 1
    assert tight.truncation_level >= 1
    assert "pending question" not in tight.text
    assert "apartment-friendly" in tight.text  # constraints survive


def test_summary_minimal_rendering_flags_over_budget():
    c = new_concept(" ".join(f"word{i}" for i in range(40)), T0)
    summary = summarize_concept(c, 10)
    assert summary.over_budget
    assert summary.token_count > 10


def test_summary_budget_floor():
    with pytest.raises(ConfigurationError):
        summarize_concept(dog_concept(), 9)


def test_core_packet_sections_and_verbatim_instruction():
    spec = LIBRARY.get("CONTRAST_CONCEPTS")
    packet = build_core_packet(spec, dog_concept(), "Compare those two.")
    assert "apartment-friendly" in packet.sections["CONSTRAINTS"]
    assert "low shedding" in packet.sections["CONSTRAINTS"]
    assert packet.sections["INSTRUCTION"] == "Compare those two."
    assert packet.token_count == count_tokens(packet.rendered_text)
    assert not packet.over_budget


def test_core_packet_renders_template_order():
    spec = LIBRARY.get("CONTRAST_CONCEPTS")
    packet = build_core_packet(spec, dog_concept(), "Compare those two.")
    positions = [
        packet.rendered_text.index(header)
        for header in (
            "[OPERATOR]",
            "[REASONING CONSTRAINTS]",
            "[TASK]",
            "[CONSTRAINTS]",
            "[INTERMEDIATE]",
            "[PENDING]",
            "[INSTRUCTION]",
            "[OUTPUT FORMAT]",
        )
    ]
    assert positions == sorted(positions)
    assert packet.rendered_text.endswith("\n")


def test_core_packet_empty_concept_marks_empty_sections():
    spec = LIBRARY.get("SUMMARIZE")
    packet = build_core_packet(spec, new_concept("", T0), "")
    assert packet.sections["CONSTRAINTS"] == ""
    assert packet.sections["INTERMEDIATE"] == ""
    assert packet.sections["PENDING"] == ""
    assert "[CONSTRAINTS] (none)" in packet.rendered_text
    assert packet.token_count > 0


def test_core_packet_deterministic():
    spec = LIBRARY.get("CONTRAST_CONCEPTS")
    a = build_core_packet(spec, dog_concept(), "Compare those two.")
    b = build_core_packet(spec, dog_concept(), "Compare those two.")
    assert a.rendered_text == b.rendered_text


def test_token_budget_validation():
    with pytest.raises(ConfigurationError):
        TokenBudget(packet_budget=100, summary_budget=100)
    with pytest.raises(ConfigurationError):
        TokenBudget(packet_budget=0, summary_budget=10)


def test_baseline_prompt_base_case():
    text, tokens = build_baseline_prompt([], "hi")
    assert text == "User: hi"
    assert tokens == 2


def test_baseline_prompt_replays_in_order():
    transcript = [("user", "first question"), ("assistant", "first answer")]
    text, _ = build_baseline_prompt(transcript, "second question")
    assert text == "User: first question\nAssistant: first answer\nUser: second question"


def test_baseline_prompt_rejects_unknown_speaker():
    with pytest.raises(ValueError):
        build_baseline_prompt([("narrator", "hm")], "x")


def test_baseline_tokens_strictly_increase_with_transcript():
    transcript = []
    previous = -1
    for i in range(10):
        _, tokens = build_baseline_prompt(transcript, f"instruction {i}")
        assert tokens > previous
        previous = tokens
        transcript.append(("user", f"instruction {i}"))
        transcript.append(("assistant", f"answer number {i}"))


def test_count_tokens_matches_independent_oracle_on_shipped_packets():
    """Whitespace-run counts cross-checked with a regex oracle on real packets."""
    oracle = lambda text: len(re.findall(r"\S+", text))
    for operator in ("SUMMARIZE", "CONTRAST_CONCEPTS", "OUTLINE"):
        packet = build_core_packet(LIBRARY.get(operator), dog_concept(), "Compare those two.")
        assert packet.token_count == oracle(packet.rendered_text)
