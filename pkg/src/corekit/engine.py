"""The per-turn interaction loop and topic lifecycle orchestration.

Each turn: classify the topic (continue / switch / reactivate), select the
operator, fold instruction-derived updates into the concept, build the
concept packet, call the backend, fold response-derived updates back in,
and persist. The transcript is kept only for the shadow baseline and audit;
packet construction never reads it.
"""

from __future__ import annotations

import random
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone

from .backends import ModelBackend, load_default_mock_backend
from .concepts import (
    ACTIVE,
    DORMANT,
    ConceptUpdate,
    LocalConcept,
    apply_update,
    new_concept,
    with_status,
)
from .errors import BackendError, ConfigurationError
from .interpreter import (
    DEFAULT_THETA,
    ExtractionLexicon,
    SelectionRule,
    TopicDecision,
    classify_topic,
    extract_from_instruction,
    extract_from_response,
    load_default_lexicon,
    load_default_ruleset,
    select_operator,
)
from .operators import OperatorLibrary, load_default_library, resolve_alias
from .packets import ConceptPacket, TokenBudget, build_baseline_prompt, build_core_packet
from .store import StoreConfig, WarmStore


class LogicalClock:
    """Deterministic clock for seeded runs: fixed start, fixed step."""

    def __init__(self, start: datetime | None = None, step: timedelta = timedelta(minutes=1)):
        self.current = start or datetime(2024, 1, 1, tzinfo=timezone.utc)
        self.step = step

    def now(self) -> datetime:
        value = self.current
        self.current = self.current + self.step
        return value


class WallClock:
    def now(self) -> datetime:
        return datetime.now(timezone.utc)


class IdGenerator:
    """Unique ids; reproducible sequence when seeded."""

    def __init__(self, seed: int | None = None):
        self._rng = random.Random(seed) if seed is not None else None

    def new_id(self, prefix: str) -> str:
        if self._rng is not None:
            return f"{prefix}{self._rng.getrandbits(48):012x}"
        return f"{prefix}{uuid.uuid4().hex[:12]}"


@dataclass(frozen=True)
class EngineConfig:
    theta: float = DEFAULT_THETA
    budget: TokenBudget = field(default_factory=TokenBudget)
    shadow_baseline: bool = False
    seed: int | None = None

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise ConfigurationError(f"theta must be in (0, 1], got {self.theta}")


@dataclass
class Session:
    session_id: str
    user_id: str
    config: EngineConfig
    active_concept: LocalConcept | None = None
    transcript: list[tuple[str, str]] = field(default_factory=list)
    turn_counter: int = 0
    records: list["TurnRecord"] = field(default_factory=list)


@dataclass(frozen=True)
class TurnRecord:
    turn_index: int
    instruction: str
    topic_decision: TopicDecision
    operator_id: str
    rule_id: str
    concept_before: LocalConcept
    concept_after: LocalConcept
    packet: ConceptPacket
    response: str
    core_prompt_tokens: int
    baseline_prompt_tokens: int | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


class SessionEngine:
    """Owns the operator library, interpreter configuration, warm store,
    and backend; sessions are created and driven through it."""

    def __init__(
        self,
        library: OperatorLibrary | None = None,
        ruleset: list[SelectionRule] | None = None,
        lexicon: ExtractionLexicon | None = None,
        store: WarmStore | None = None,
        backend: ModelBackend | None = None,
        config: EngineConfig | None = None,
    ):
        self.library = library or load_default_library()
        self.ruleset = ruleset or load_default_ruleset()
        self.lexicon = lexicon or load_default_lexicon()
        self.store = store or WarmStore(StoreConfig())
        self.backend = backend or load_default_mock_backend()
        self.config = config or EngineConfig()
        self.ids = IdGenerator(self.config.seed)
        for rule in self.ruleset:  # every rule must name a resolvable operator
            resolve_alias(rule.operator, self.library)

    def open_session(self, user_id: str, config: EngineConfig | None = None) -> Session:
        return Session(
            session_id=self.ids.new_id("s"),
            user_id=user_id,
            config=config or self.config,
        )

    # -- the turn loop -------------------------------------------------------

    def process_turn(self, session: Session, instruction: str, now: datetime) -> TurnRecord:
        decision = classify_topic(
            instruction,
            session.active_concept,
            self.store.dormant_concepts(session.user_id),
            session.config.theta,
        )
        concept = self._resolve_topic(session, decision, instruction, now)
        concept_before = concept

        operator_id, rule_id = select_operator(instruction, concept, self.ruleset, self.library)
        spec = self.library.get(operator_id)

        instruction_update = extract_from_instruction(instruction, self.lexicon)
        concept = apply_update(
            concept, replace(instruction_update, next_operator=operator_id), now
        )

        packet = build_core_packet(spec, concept, instruction, session.config.budget)

        baseline_tokens: int | None = None
        if session.config.shadow_baseline:
            _, baseline_tokens = build_baseline_prompt(session.transcript, instruction)

        error: str | None = None
        response = ""
        try:
            response = self.backend.generate(packet)
        except BackendError as exc:
            error = str(exc)

        if error is None:
            concept = apply_update(
                concept, extract_from_response(response, spec, self.lexicon), now
            )
            session.transcript.append(("user", instruction))
            session.transcript.append(("assistant", response))

        session.active_concept = concept
        self.store.upsert(session.user_id, concept)

        record = TurnRecord(
            turn_index=session.turn_counter,
            instruction=instruction,
            topic_decision=decision,
            operator_id=operator_id,
            rule_id=rule_id,
            concept_before=concept_before,
            concept_after=concept,
            packet=packet,
            response=response,
            core_prompt_tokens=packet.token_count,
            baseline_prompt_tokens=baseline_tokens,
            error=error,
        )
        session.records.append(record)
        session.turn_counter += 1
        if error is not None:
            raise BackendFailure(record)
        return record

    def reactivate(self, session: Session, concept_id: str, now: datetime) -> LocalConcept:
        """Manual reactivation of a dormant concept (UI affordance)."""
        self.store.get(session.user_id, concept_id)  # existence check
        self._dormant_active(session, now)
        touched = self.store.touch(session.user_id, concept_id, now)
        activated = with_status(touched, ACTIVE, now)
        session.active_concept = activated
        self.store.upsert(session.user_id, activated)
        return activated

    # -- internals -----------------------------------------------------------

    def _resolve_topic(
        self, session: Session, decision: TopicDecision, instruction: str, now: datetime
    ) -> LocalConcept:
        if decision.kind == "continue" and session.active_concept is not None:
            return session.active_concept
        if decision.kind == "reactivate":
            self._dormant_active(session, now)
            touched = self.store.touch(session.user_id, decision.target_concept_id, now)
            activated = with_status(touched, ACTIVE, now)
            session.active_concept = activated
            return activated
        # switch_new (or continue with nothing active yet)
        self._dormant_active(session, now)
        fresh = new_concept(instruction, now, concept_id=self.ids.new_id("c"))
        session.active_concept = fresh
        return fresh

    def _dormant_active(self, session: Session, now: datetime) -> None:
        if session.active_concept is not None:
            dormant = with_status(session.active_concept, DORMANT, now)
            self.store.upsert(session.user_id, dormant)
            session.active_concept = None


class BackendFailure(BackendError):
    """Backend failed mid-turn; the failed TurnRecord is attached.

    Instruction-derived concept changes are retained (user statements are
    ground truth regardless of backend health); response-derived changes
    and the transcript append are skipped.
    """

    def __init__(self, record: TurnRecord):
        super().__init__(record.error or "backend failure")
        self.record = record
