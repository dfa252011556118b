"""Unified command line: serve, repl, bench, validate-operators."""

from __future__ import annotations

import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from .backends import RemoteBackend, load_default_mock_backend
from .bench import (
    load_replay_pairs,
    load_scenario,
    replay_table,
    run_scenario,
    write_report,
)
from .engine import EngineConfig, SessionEngine
from .errors import CorekitError, LibraryError
from .operators import load_library
from .packets import TokenBudget
from .store import StoreConfig, WarmStore


def _engine_config(theta, packet_budget, summary_budget, shadow_baseline, seed) -> EngineConfig:
    return EngineConfig(
        theta=theta,
        budget=TokenBudget(packet_budget=packet_budget, summary_budget=summary_budget),
        shadow_baseline=shadow_baseline,
        seed=seed,
    )


def _store(capacity, ttl_days, store_path) -> WarmStore:
    from datetime import timedelta

    return WarmStore(
        StoreConfig(
            capacity_per_user=capacity,
            ttl=timedelta(days=ttl_days),
            persistence_path=Path(store_path) if store_path else None,
        )
    )


def engine_options(fn):
    fn = click.option("--theta", default=0.3, show_default=True, help="Reactivation similarity threshold")(fn)
    fn = click.option("--packet-budget", default=256, show_default=True)(fn)
    fn = click.option("--summary-budget", default=160, show_default=True)(fn)
    fn = click.option("--backend", type=click.Choice(["mock", "remote"]), default="mock", show_default=True)(fn)
    fn = click.option("--shadow-baseline/--no-shadow-baseline", default=True, show_default=True)(fn)
    fn = click.option("--seed", type=int, default=None, help="Fix ids for deterministic runs")(fn)
    fn = click.option("--capacity", default=32, show_default=True, help="Warm-store concepts per user")(fn)
    fn = click.option("--ttl-days", default=30, show_default=True)(fn)
    fn = click.option("--store-path", default=None, help="Directory for persistent warm store")(fn)
    return fn


def _build_engine(theta, packet_budget, summary_budget, backend, shadow_baseline, seed,
                  capacity, ttl_days, store_path) -> SessionEngine:
    chosen = RemoteBackend() if backend == "remote" else load_default_mock_backend()
    return SessionEngine(
        store=_store(capacity, ttl_days, store_path),
        backend=chosen,
        config=_engine_config(theta, packet_budget, summary_budget, shadow_baseline, seed),
    )


@click.group()
def main():
    """Concept-first conversation middleware."""


@main.command("validate-operators")
@click.argument("path", type=click.Path(exists=True))
def validate_operators(path):
    """Validate an operator library document; exit 0 when ok."""
    try:
        library = load_library(path)
    except LibraryError as exc:
        click.echo(f"INVALID: {exc}")
        for violation in exc.violations:
            click.echo(f"  - {violation}")
        sys.exit(1)
    families = library.families()
    click.echo(f"OK: {len(library)} operators, {len(families)} families, version {library.version}")
    sys.exit(0)


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Write report here instead of stdout")
@click.option("--seed", type=int, default=7, show_default=True)
def bench(scenario_path, fmt, out, seed):
    """Run a scripted scenario (or an arithmetic replay document)."""
    document = json.loads(Path(scenario_path).read_text("utf-8"))
    try:
        if "pairs" in document:
            stats = replay_table(load_replay_pairs(document))
        else:
            stats, _ = run_scenario(load_scenario(document), EngineConfig(seed=seed))
    except CorekitError as exc:
        click.echo(f"bench failed: {exc}", err=True)
        sys.exit(1)
    report = write_report(stats, fmt)
    if out:
        Path(out).write_text(report, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(report, nl=False)


@main.command()
@engine_options
@click.option("--user", default="repl", show_default=True)
def repl(user, backend, **kwargs):
    """Interactive terminal session; prints operator and concept per turn."""
    engine = _build_engine(backend=backend, **kwargs)
    session = engine.open_session(user)
    click.echo("corekit repl; empty line to exit")
    while True:
        try:
            instruction = input("> ").strip()
        except EOFError:
            break
        if not instruction:
            break
        try:
            record = engine.process_turn(session, instruction, datetime.now(timezone.utc))
        except CorekitError as exc:
            click.echo(f"[turn failed: {exc}]")
            continue
        click.echo(f"[{record.operator_id} via {record.rule_id}; "
                   f"topic={record.topic_decision.kind}; "
                   f"packet={record.core_prompt_tokens} tokens]")
        click.echo(record.response)
        concept = record.concept_after
        click.echo(f"  task: {concept.task_summary}")
        if concept.constraints:
            click.echo(f"  constraints: {concept.constraints}")
        if concept.pending_questions:
            click.echo(f"  pending: {concept.pending_questions}")


@main.command()
@engine_options
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui-dir", default=None, help="Static playground directory (frontend/dist)")
def serve(port, host, ui_dir, backend, **kwargs):
    """Run the HTTP service (and the playground UI when built)."""
    import uvicorn

    from .service import create_app

    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = str(candidate) if candidate.is_dir() else None
    engine = _build_engine(backend=backend, **kwargs)
    app = create_app(engine, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
