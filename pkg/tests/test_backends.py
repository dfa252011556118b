from datetime import datetime, timezone

import pytest

from corekit.backends import (
    CannedBullets,
    MockBackend,
    MockTemplate,
    RemoteBackend,
    RemoteConfig,
    ScheduledBackend,
    load_default_mock_backend,
    pad_response,
    remote_generate,
)
from corekit.concepts import ConceptUpdate, apply_update, new_concept
from corekit.errors import BackendError, ConfigurationError
from corekit.operators import load_default_library
from corekit.packets import build_core_packet, count_tokens

T0 = datetime(2024, 1, 1, tzinfo=timezone.utc)
LIBRARY = load_default_library()


def packet_for(operator, summary="select dog breed", items=None, instruction="Go on."):
    concept = new_concept(summary, T0)
    if items:
        concept = apply_update(concept, ConceptUpdate(set_intermediate=items), T0)
    return build_core_packet(LIBRARY.get(operator), concept, instruction)


def test_contrast_template_emits_bullet_per_intermediate_entry():
    backend = load_default_mock_backend()
    packet = packet_for(
        "CONTRAST_CONCEPTS", items={"breed_1": "Poodle", "breed_2": "Miniature Schnauzer"}
    )
    response = backend.generate(packet)
    bullets = [line for line in response.splitlines() if line.startswith("- ")]
    assert len(bullets) == 2


def test_outline_first_line_names_the_task():
    backend = load_default_mock_backend()
    packet = packet_for("OUTLINE", summary="draft the quarterly report")
    first = backend.generate(packet).splitlines()[0]
    assert "draft the quarterly report" in first


def test_identical_packets_identical_responses():
    backend = load_default_mock_backend()
    packet = packet_for("SUMMARIZE")
    assert backend.generate(packet) == backend.generate(packet)


def test_default_template_fallback():
    backend = MockBackend(templates={})
    packet = packet_for("TRANSLATE")
    assert "TRANSLATE" in backend.generate(packet)


def test_canned_bullets_gate_on_packet_content():
    template = MockTemplate(
        lines=["Options:"],
        canned_bullets=[CannedBullets(when_packet_contains="dog breed", items=["Poodle"])],
    )
    backend = MockBackend({"GENERATE_VARIANTS": template})
    assert "- Poodle" in backend.generate(packet_for("GENERATE_VARIANTS"))
    assert "- Poodle" not in backend.generate(
        packet_for("GENERATE_VARIANTS", summary="plan a holiday")
    )


def test_pad_response_hits_target_and_preserves_head():
    padded = pad_response("First line.", 20)
    assert count_tokens(padded) == 20
    assert padded.splitlines()[0] == "First line."
    assert pad_response("one two three", 2) == "one two three"  # never truncates


def test_scheduled_backend_pads_per_turn():
    backend = ScheduledBackend(MockBackend(), [15, 30])
    first = backend.generate(packet_for("SUMMARIZE"))
    second = backend.generate(packet_for("SUMMARIZE"))
    third = backend.generate(packet_for("SUMMARIZE"))  # past schedule: unpadded
    assert count_tokens(first) == 15
    assert count_tokens(second) == 30
    assert count_tokens(third) < 15


def test_template_pad_tokens():
    backend = MockBackend({"SUMMARIZE": MockTemplate(lines=["Summary."], pad_tokens=9)})
    assert count_tokens(backend.generate(packet_for("SUMMARIZE"))) == 10


def test_remote_config_requires_env(monkeypatch):
    for var in ("COREKIT_REMOTE_URL", "COREKIT_REMOTE_API_KEY", "COREKIT_REMOTE_MODEL"):
        monkeypatch.delenv(var, raising=False)
    with pytest.raises(ConfigurationError, match="COREKIT_REMOTE_URL"):
        RemoteBackend()


def test_remote_unreachable_endpoint_is_backend_error():
    config = RemoteConfig(
        url="http://127.0.0.1:9/never", api_key="k", model="m", timeout=0.5
    )
    with pytest.raises(BackendError):
        remote_generate(packet_for("SUMMARIZE"), config)
