"""Pluggable model backends.

The mock backend is a deterministic fake model: per-operator templates fill
in packet sections, optionally emitting one bullet per tracked intermediate
entry or a canned item list gated on packet content. It exists so the whole
loop can be verified at desk scale without a live model.

The remote backend adapts any chat-completions-style HTTP endpoint and is a
manual smoke-test convenience only.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Protocol

import httpx

from .errors import BackendError, ConfigurationError
from .packets import ConceptPacket
from .text import count_tokens


class ModelBackend(Protocol):
    def generate(self, packet: ConceptPacket) -> str:  # pragma: no cover - interface
        ...


@dataclass(frozen=True)
class CannedBullets:
    when_packet_contains: str
    items: list[str]


@dataclass(frozen=True)
class MockTemplate:
    lines: list[str] = field(default_factory=list)
    bullets_from_intermediate: bool = False
    canned_bullets: list[CannedBullets] = field(default_factory=list)
    pad_tokens: int = 0


DEFAULT_TEMPLATE = MockTemplate(lines=["Handled {operator} for: {task}"])


class MockBackend:
    """Deterministic template-driven fake model: same packet, same response."""

    def __init__(self, templates: dict[str, MockTemplate] | None = None,
                 default: MockTemplate = DEFAULT_TEMPLATE):
        self.templates = templates or {}
        self.default = default

    def generate(self, packet: ConceptPacket) -> str:
        return mock_generate(packet, self.templates, self.default)


def mock_generate(
    packet: ConceptPacket,
    templates: dict[str, MockTemplate],
    default: MockTemplate = DEFAULT_TEMPLATE,
) -> str:
    template = templates.get(packet.operator_id, default)
    values = {
        "operator": packet.operator_id,
        "task": packet.sections.get("TASK", ""),
        "constraints": packet.sections.get("CONSTRAINTS", ""),
        "output_format": packet.sections.get("OUTPUT_FORMAT", ""),
    }
    lines = [line.format(**values) for line in template.lines]
    for canned in template.canned_bullets:
        if canned.when_packet_contains.lower() in packet.rendered_text.lower():
            lines.extend(f"- {item}" for item in canned.items)
            break
    if template.bullets_from_intermediate:
        intermediate = packet.sections.get("INTERMEDIATE", "")
        for entry in filter(None, (e.strip() for e in intermediate.split(";"))):
            lines.append(f"- {entry}")
    text = "\n".join(lines)
    if template.pad_tokens > 0:
        text = pad_response(text, count_tokens(text) + template.pad_tokens)
    return text


def pad_response(text: str, target_tokens: int) -> str:
    """Deterministically extend text to the target token count with filler;
    filler lands on its own trailing line so structured extraction from the
    leading lines is unaffected."""
    deficit = target_tokens - count_tokens(text)
    if deficit <= 0:
        return text
    return text + "\n" + " ".join(["filler"] * deficit)


class ScheduledBackend:
    """Wrap a backend and pad each successive response to a per-turn token
    target. Used by scenario runs to drive transcript growth profiles."""

    def __init__(self, inner: ModelBackend, token_targets: list[int]):
        self.inner = inner
        self.token_targets = list(token_targets)
        self._calls = 0

    def generate(self, packet: ConceptPacket) -> str:
        text = self.inner.generate(packet)
        if self._calls < len(self.token_targets):
            text = pad_response(text, self.token_targets[self._calls])
        self._calls += 1
        return text


# ---------------------------------------------------------------------------
# Remote adapter (manual smoke use; excluded from automated verification)
# ---------------------------------------------------------------------------

ENV_URL = "COREKIT_REMOTE_URL"
ENV_KEY = "COREKIT_REMOTE_API_KEY"
ENV_MODEL = "COREKIT_REMOTE_MODEL"


@dataclass(frozen=True)
class RemoteConfig:
    url: str
    api_key: str
    model: str
    timeout: float = 30.0

    @classmethod
    def from_env(cls) -> "RemoteConfig":
        url = os.environ.get(ENV_URL, "")
        key = os.environ.get(ENV_KEY, "")
        model = os.environ.get(ENV_MODEL, "")
        missing = [
            name
            for name, value in ((ENV_URL, url), (ENV_KEY, key), (ENV_MODEL, model))
            if not value
        ]
        if missing:
            raise ConfigurationError(f"missing environment variables: {', '.join(missing)}")
        return cls(url=url, api_key=key, model=model)


class RemoteBackend:
    def __init__(self, config: RemoteConfig | None = None):
        self.config = config or RemoteConfig.from_env()

    def generate(self, packet: ConceptPacket) -> str:
        return remote_generate(packet, self.config)


def remote_generate(packet: ConceptPacket, config: RemoteConfig) -> str:
    """Send the packet text as the sole user message; return the reply."""
    payload = {
        "model": config.model,
        "messages": [{"role": "user", "content": packet.rendered_text}],
    }
    headers = {"Authorization": f"Bearer {config.api_key}"}
    try:
        response = httpx.post(
            config.url, json=payload, headers=headers, timeout=config.timeout
        )
        response.raise_for_status()
        body = response.json()
        return body["choices"][0]["message"]["content"]
    except httpx.HTTPError as exc:
        raise BackendError(f"remote backend failed: {exc}") from exc
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise BackendError(f"unexpected remote response shape: {exc}") from exc


# ---------------------------------------------------------------------------
# Template loading
# ---------------------------------------------------------------------------

def load_mock_templates(source: str | Path | dict) -> tuple[dict[str, MockTemplate], MockTemplate]:
    data = source if isinstance(source, dict) else json.loads(Path(source).read_text("utf-8"))
    templates = {
        op: _template_from_dict(entry) for op, entry in data.get("templates", {}).items()
    }
    default = _template_from_dict(data["default"]) if "default" in data else DEFAULT_TEMPLATE
    return templates, default


def _template_from_dict(entry: dict) -> MockTemplate:
    return MockTemplate(
        lines=list(entry.get("lines", [])),
        bullets_from_intermediate=bool(entry.get("bullets_from_intermediate", False)),
        canned_bullets=[
            CannedBullets(c["when_packet_contains"], list(c["items"]))
            for c in entry.get("canned_bullets", [])
        ],
        pad_tokens=int(entry.get("pad_tokens", 0)),
    )


def default_templates_path() -> Path:
    return Path(str(resources.files("corekit").joinpath("data/mock_templates.json")))


def load_default_mock_backend() -> MockBackend:
    templates, default = load_mock_templates(default_templates_path())
    return MockBackend(templates, default)
