"""Scripted-scenario benchmarking: token-first baseline vs concept-first packets.

Runs a scenario through the engine with the shadow baseline enabled, checks
per-turn expectations, and derives the per-turn / cumulative token table.
An arithmetic replay mode recomputes the derived columns from externally
measured per-turn token pairs, validating the statistics pipeline
independently of any tokenizer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from .backends import ScheduledBackend, load_default_mock_backend
from .engine import EngineConfig, LogicalClock, SessionEngine, TurnRecord
from .errors import ExpectationError, ScenarioError
from .operators import OperatorLibrary, load_default_library, resolve_alias
from .store import StoreConfig, WarmStore

CSV_HEADER = (
    "Turn,Baseline Prompt Tokens,CORE Prompt Tokens,Savings %,"
    "Baseline Cumulative Tokens,CORE Cumulative Tokens,Cumulative Savings %"
)


@dataclass(frozen=True)
class ScenarioTurn:
    instruction: str
    expected_operator: str | None = None
    expected_constraints: dict[str, str] | None = None
    expected_intermediate_keys: list[str] | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    turns: list[ScenarioTurn]
    response_token_targets: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class TokenRow:
    turn: int
    baseline_prompt_tokens: int | None
    core_prompt_tokens: int
    savings_pct: float | None
    baseline_cumulative: int | None
    core_cumulative: int
    cumulative_savings_pct: float | None


@dataclass(frozen=True)
class TokenStats:
    rows: list[TokenRow]


def round_half_away(value: float, digits: int = 1) -> float:
    """Round half away from zero (so 0.05 -> 0.1 and -0.05 -> -0.1)."""
    factor = 10**digits
    return math.copysign(math.floor(abs(value) * factor + 0.5), value) / factor


def load_scenario(source: str | Path | dict) -> Scenario:
    data = source if isinstance(source, dict) else json.loads(Path(source).read_text("utf-8"))
    if not isinstance(data, dict) or "turns" not in data:
        raise ScenarioError("scenario document must be an object with a 'turns' array")
    turns = []
    for entry in data["turns"]:
        turns.append(
            ScenarioTurn(
                instruction=entry["instruction"],
                expected_operator=entry.get("expected_operator"),
                expected_constraints=entry.get("expected_constraints"),
                expected_intermediate_keys=entry.get("expected_intermediate_keys"),
            )
        )
    if not turns:
        raise ScenarioError("scenario must contain at least one turn")
    return Scenario(
        name=str(data.get("name", "unnamed")),
        turns=turns,
        response_token_targets=[int(t) for t in data.get("response_token_targets", [])],
    )


def run_scenario(
    scenario: Scenario,
    config: EngineConfig | None = None,
    library: OperatorLibrary | None = None,
) -> tuple[TokenStats, list[TurnRecord]]:
    """Execute the scenario deterministically with the mock backend and the
    shadow baseline; enforce per-turn expectations where stated."""
    library = library or load_default_library()
    base = config or EngineConfig(seed=7)
    config = EngineConfig(
        theta=base.theta,
        budget=base.budget,
        shadow_baseline=True,
        seed=base.seed if base.seed is not None else 7,
    )
    backend = ScheduledBackend(load_default_mock_backend(), scenario.response_token_targets)
    engine = SessionEngine(
        library=library,
        store=WarmStore(StoreConfig()),
        backend=backend,
        config=config,
    )
    clock = LogicalClock(start=datetime(2024, 1, 1, tzinfo=timezone.utc))
    session = engine.open_session("bench")
    records = []
    for index, turn in enumerate(scenario.turns, start=1):
        record = engine.process_turn(session, turn.instruction, clock.now())
        _check_expectations(index, turn, record, library)
        records.append(record)
    return stats_from_records(records), records


def _check_expectations(
    index: int, turn: ScenarioTurn, record: TurnRecord, library: OperatorLibrary
) -> None:
    if turn.expected_operator is not None:
        expected = resolve_alias(turn.expected_operator, library)
        if record.operator_id != expected:
            raise ExpectationError(
                index, "operator", f"expected {expected}, selected {record.operator_id}"
            )
    if turn.expected_constraints is not None:
        actual = record.concept_after.constraints
        for key, value in turn.expected_constraints.items():
            if actual.get(key) != value:
                raise ExpectationError(
                    index, "constraints", f"expected {key}={value!r}, present: {actual}"
                )
    if turn.expected_intermediate_keys is not None:
        present = record.concept_after.intermediate_results
        for key in turn.expected_intermediate_keys:
            if key not in present:
                raise ExpectationError(
                    index, "intermediate", f"missing key {key}; present: {sorted(present)}"
                )


def stats_from_records(records: list[TurnRecord]) -> TokenStats:
    rows = []
    baseline_cum = 0
    core_cum = 0
    for i, record in enumerate(records, start=1):
        core = record.core_prompt_tokens
        core_cum += core
        baseline = record.baseline_prompt_tokens
        if baseline is None:
            rows.append(TokenRow(i, None, core, None, None, core_cum, None))
            continue
        baseline_cum += baseline
        rows.append(
            TokenRow(
                turn=i,
                baseline_prompt_tokens=baseline,
                core_prompt_tokens=core,
                savings_pct=round_half_away(100.0 * (baseline - core) / baseline),
                baseline_cumulative=baseline_cum,
                core_cumulative=core_cum,
                cumulative_savings_pct=round_half_away(
                    100.0 * (baseline_cum - core_cum) / baseline_cum
                ),
            )
        )
    return TokenStats(rows=rows)


def replay_table(per_turn: list[tuple[int, int]]) -> TokenStats:
    """Derive all columns from externally measured (baseline, core) pairs."""
    rows = []
    baseline_cum = 0
    core_cum = 0
    for i, (baseline, core) in enumerate(per_turn, start=1):
        if baseline <= 0:
            raise ScenarioError(f"turn {i}: baseline tokens must be positive, got {baseline}")
        baseline_cum += baseline
        core_cum += core
        rows.append(
            TokenRow(
                turn=i,
                baseline_prompt_tokens=baseline,
                core_prompt_tokens=core,
                savings_pct=round_half_away(100.0 * (baseline - core) / baseline),
                baseline_cumulative=baseline_cum,
                core_cumulative=core_cum,
                cumulative_savings_pct=round_half_away(
                    100.0 * (baseline_cum - core_cum) / baseline_cum
                ),
            )
        )
    return TokenStats(rows=rows)


def _fmt_pct(value: float | None) -> str:
    return "" if value is None else f"{value:.1f}"


def _fmt_int(value: int | None) -> str:
    return "" if value is None else str(value)


def write_report(stats: TokenStats, format: str = "csv") -> str:
    """Render the stats table; deterministic byte-for-byte."""
    if format == "csv":
        lines = [CSV_HEADER]
        for r in stats.rows:
            lines.append(
                f"{r.turn},{_fmt_int(r.baseline_prompt_tokens)},{r.core_prompt_tokens},"
                f"{_fmt_pct(r.savings_pct)},{_fmt_int(r.baseline_cumulative)},"
                f"{r.core_cumulative},{_fmt_pct(r.cumulative_savings_pct)}"
            )
        return "\n".join(lines) + "\n"
    if format == "json":
        payload = {
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
            ],
            "series": {
                "baseline_cumulative": [r.baseline_cumulative for r in stats.rows],
                "core_cumulative": [r.core_cumulative for r in stats.rows],
            },
        }
        return json.dumps(payload, indent=2) + "\n"
    raise ValueError(f"unknown report format: {format!r}")


def scenario_dir() -> Path:
    return Path(str(resources.files("corekit").joinpath("data/scenarios")))


def load_shipped_scenario(name: str) -> Scenario:
    return load_scenario(scenario_dir() / f"{name}.json")


def load_replay_pairs(source: str | Path | dict) -> list[tuple[int, int]]:
    data = source if isinstance(source, dict) else json.loads(Path(source).read_text("utf-8"))
    if "pairs" not in data:
        raise ScenarioError("replay document must contain a 'pairs' array")
    return [(int(b), int(c)) for b, c in data["pairs"]]
