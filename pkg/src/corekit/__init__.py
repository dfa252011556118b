"""corekit: concept-first conversation middleware.

A finite library of cognitive operators plus a persistent local concept
state per topic; each model call receives a compact conceptual packet
instead of replayed conversation history.
"""

from .concepts import (
    ACTIVE,
    DORMANT,
    ConceptUpdate,
    LocalConcept,
    apply_update,
    new_concept,
    roundtrip_serialize,
)
from .engine import EngineConfig, Session, SessionEngine, TurnRecord
from .interpreter import TopicDecision, classify_topic, select_operator
from .operators import (
    OperatorLibrary,
    OperatorSpec,
    check_input_requirements,
    load_default_library,
    load_library,
    resolve_alias,
    validate_spec,
)
from .packets import (
    ConceptPacket,
    TokenBudget,
    build_baseline_prompt,
    build_core_packet,
    count_tokens,
    summarize_concept,
)
from .store import StoreConfig, WarmStore

__version__ = "0.1.0"

__all__ = [
    "ACTIVE",
    "DORMANT",
    "ConceptPacket",
    "ConceptUpdate",
    "EngineConfig",
    "LocalConcept",
    "OperatorLibrary",
    "OperatorSpec",
    "Session",
    "SessionEngine",
    "StoreConfig",
    "TokenBudget",
    "TopicDecision",
    "TurnRecord",
    "WarmStore",
    "apply_update",
    "build_baseline_prompt",
    "build_core_packet",
    "check_input_requirements",
    "classify_topic",
    "count_tokens",
    "load_default_library",
    "load_library",
    "new_concept",
    "resolve_alias",
    "roundtrip_serialize",
    "select_operator",
    "summarize_concept",
    "validate_spec",
]
