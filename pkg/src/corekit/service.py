"""HTTP service over the session engine.

Demonstration service: JSON in/out, no authentication, user identity is a
plain request field. Turns against one session are serialized; a second
concurrent turn for the same session is rejected with 409 rather than
queued, so clients simply retry.
"""

from __future__ import annotations

import threading
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .backends import load_default_mock_backend
from .bench import stats_from_records, write_report
from .concepts import concept_to_dict
from .engine import BackendFailure, EngineConfig, Session, SessionEngine, TurnRecord
from .errors import ConfigurationError, NotFoundError
from .packets import TokenBudget
from .store import StoreConfig, WarmStore


class SessionRegistry:
    def __init__(self, engine: SessionEngine):
        self.engine = engine
        self.sessions: dict[str, Session] = {}
        self.locks: dict[str, threading.Lock] = {}

    def create(self, user_id: str, config: EngineConfig) -> Session:
        session = self.engine.open_session(user_id, config)
        self.sessions[session.session_id] = session
        self.locks[session.session_id] = threading.Lock()
        return session

    def get(self, session_id: str) -> tuple[Session, threading.Lock]:
        if session_id not in self.sessions:
            raise NotFoundError(f"unknown session: {session_id}")
        return self.sessions[session_id], self.locks[session_id]


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": message})


def _config_from_overrides(base: EngineConfig, overrides: dict) -> EngineConfig:
    budget = base.budget
    if "packet_budget" in overrides or "summary_budget" in overrides:
        budget = TokenBudget(
            packet_budget=int(overrides.get("packet_budget", budget.packet_budget)),
            summary_budget=int(overrides.get("summary_budget", budget.summary_budget)),
        )
    return EngineConfig(
        theta=float(overrides.get("theta", base.theta)),
        budget=budget,
        shadow_baseline=bool(overrides.get("shadow_baseline", base.shadow_baseline)),
        seed=overrides.get("seed", base.seed),
    )


def _decision_to_dict(decision) -> dict:
    return {
        "kind": decision.kind,
        "target_concept_id": decision.target_concept_id,
        "score": decision.score,
    }


def _turn_response(session: Session, record: TurnRecord) -> dict:
    rows = stats_from_records(session.records).rows
    row = rows[record.turn_index]
    return {
        "response_text": record.response,
        "operator_id": record.operator_id,
        "rule_id": record.rule_id,
        "topic_decision": _decision_to_dict(record.topic_decision),
        "concept_after": concept_to_dict(record.concept_after),
        "token_stats_row": {
            "turn": row.turn,
            "baseline_prompt_tokens": row.baseline_prompt_tokens,
            "core_prompt_tokens": row.core_prompt_tokens,
            "savings_pct": row.savings_pct,
            "baseline_cumulative": row.baseline_cumulative,
            "core_cumulative": row.core_cumulative,
            "cumulative_savings_pct": row.cumulative_savings_pct,
        },
        "turn_index": record.turn_index,
        "packet_text": record.packet.rendered_text,
        "over_budget": record.packet.over_budget,
    }


def _state_document(registry: SessionRegistry, session: Session) -> dict:
    store = registry.engine.store
    dormants = [
        {
            "concept_id": c.concept_id,
            "task_summary": c.task_summary,
            "last_updated": c.last_updated.isoformat(),
        }
        for c in store.dormant_concepts(session.user_id)
    ]
    stats = stats_from_records(session.records)
    return {
        "session_id": session.session_id,
        "user_id": session.user_id,
        "turn_counter": session.turn_counter,
        "active_concept": (
            concept_to_dict(session.active_concept) if session.active_concept else None
        ),
        "dormant_concepts": dormants,
        "operator_history": [r.operator_id for r in session.records],
        "stats": {
            "rows": [
                {
                    "turn": r.turn,
                    "baseline_prompt_tokens": r.baseline_prompt_tokens,
                    "core_prompt_tokens": r.core_prompt_tokens,
                    "savings_pct": r.savings_pct,
                    "baseline_cumulative": r.baseline_cumulative,
                    "core_cumulative": r.core_cumulative,
                    "cumulative_savings_pct": r.cumulative_savings_pct,
                }
                for r in stats.rows
            ]
        },
    }


def create_app(
    engine: SessionEngine | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    engine = engine or SessionEngine(
        store=WarmStore(StoreConfig()),
        backend=load_default_mock_backend(),
        config=EngineConfig(shadow_baseline=True),
    )
    registry = SessionRegistry(engine)
    app = FastAPI(title="corekit service", version="0.1.0")
    app.state.registry = registry

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return _error(400, f"invalid request: {exc.errors()}")

    @app.post("/sessions", status_code=201)
    def create_session(body: dict):
        user_id = str(body.get("user_id", "")).strip()
        if not user_id:
            return _error(400, "user_id is required")
        try:
            config = _config_from_overrides(engine.config, body.get("config", {}))
        except (ConfigurationError, TypeError, ValueError) as exc:
            return _error(400, f"invalid config: {exc}")
        session = registry.create(user_id, config)
        return {"session_id": session.session_id, "user_id": user_id}

    @app.post("/sessions/{session_id}/turns")
    def post_turn(session_id: str, body: dict):
        try:
            session, lock = registry.get(session_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        instruction = str(body.get("instruction", ""))
        if not instruction.strip():
            return _error(400, "instruction must be nonempty")
        if not lock.acquire(blocking=False):
            return _error(409, "a turn is already in flight for this session")
        try:
            record = engine.process_turn(session, instruction, datetime.now(timezone.utc))
        except BackendFailure as exc:
            return _error(502, f"backend failure: {exc}")
        finally:
            lock.release()
        return _turn_response(session, record)

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        try:
            session, _ = registry.get(session_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        return _state_document(registry, session)

    @app.get("/sessions/{session_id}/stats")
    def get_stats(session_id: str, format: str = "json"):
        try:
            session, _ = registry.get(session_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        stats = stats_from_records(session.records)
        if format == "csv":
            return JSONResponse(content={"csv": write_report(stats, "csv")})
        return _state_document(registry, session)["stats"]

    @app.get("/operators")
    def get_operators():
        return engine.library.raw_document

    @app.post("/sessions/{session_id}/reactivate/{concept_id}")
    def reactivate(session_id: str, concept_id: str):
        try:
            session, lock = registry.get(session_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        if not lock.acquire(blocking=False):
            return _error(409, "a turn is already in flight for this session")
        try:
            engine.reactivate(session, concept_id, datetime.now(timezone.utc))
        except NotFoundError as exc:
            return _error(404, str(exc))
        finally:
            lock.release()
        return _state_document(registry, session)

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
