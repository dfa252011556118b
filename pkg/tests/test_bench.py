import random

import pytest

from corekit.bench import (
    Scenario,
    ScenarioTurn,
    load_replay_pairs,
    load_scenario,
    load_shipped_scenario,
    replay_table,
    round_half_away,
    run_scenario,
    scenario_dir,
    stats_from_records,
    write_report,
    CSV_HEADER,
    TokenStats,
)
from corekit.errors import ExpectationError, ScenarioError

REFERENCE_PAIRS = [
    (90, 155), (124, 144), (164, 155), (203, 154), (246, 158),
    (287, 151), (327, 155), (367, 155), (407, 155), (450, 158),
]


def test_round_half_away_from_zero():
    assert round_half_away(7.35) == 7.4
    assert round_half_away(-7.35) == -7.4
    assert round_half_away(5.449) == 5.4
    assert round_half_away(0.0) == 0.0


def test_replay_first_row():
    rows = replay_table([(90, 155)]).rows
    assert rows[0].savings_pct == pytest.approx(-72.2, abs=0.1)
    assert rows[0].cumulative_savings_pct == pytest.approx(-72.2, abs=0.1)


def test_replay_equal_tokens_zero_savings():
    rows = replay_table([(100, 100)]).rows
    assert rows[0].savings_pct == 0.0


def test_replay_full_reference_table():
    rows = replay_table(REFERENCE_PAIRS).rows
    last = rows[-1]
    assert (last.baseline_cumulative, last.core_cumulative) == (2665, 1540)
    assert last.cumulative_savings_pct == pytest.approx(42.2, abs=0.1)
    assert rows[0].savings_pct == pytest.approx(-72.2, abs=0.1)
    assert rows[-1].savings_pct == pytest.approx(64.9, abs=0.1)


def test_replay_rejects_nonpositive_baseline():
    with pytest.raises(ScenarioError, match="positive"):
        replay_table([(0, 10)])


def test_single_turn_cumulative_equals_per_turn():
    rows = replay_table([(120, 80)]).rows
    row = rows[0]
    assert row.baseline_cumulative == row.baseline_prompt_tokens
    assert row.core_cumulative == row.core_prompt_tokens
    assert row.cumulative_savings_pct == row.savings_pct


def test_stats_match_independent_oracle_on_random_inputs():
    rng = random.Random(13)
    for _ in range(200):
        pairs = [(rng.randint(1, 900), rng.randint(1, 900)) for _ in range(rng.randint(1, 25))]
        rows = replay_table(pairs).rows
        # Oracle: running sums and percentages recomputed from scratch.
        bc = cc = 0
        for (b, c), row in zip(pairs, rows):
            bc += b
            cc += c
            assert row.baseline_cumulative == bc
            assert row.core_cumulative == cc
            assert row.savings_pct == round_half_away(100.0 * (b - c) / b)
            assert row.cumulative_savings_pct == round_half_away(100.0 * (bc - cc) / bc)


def test_write_report_csv_matches_reference_values():
    csv = write_report(replay_table(REFERENCE_PAIRS), "csv")
    lines = csv.strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == "1,90,155,-72.2,90,155,-72.2"
    assert lines[10] == "10,450,158,64.9,2665,1540,42.2"


def test_write_report_empty_stats_is_header_only():
    assert write_report(TokenStats(rows=[]), "csv") == CSV_HEADER + "\n"


def test_write_report_deterministic():
    stats = replay_table(REFERENCE_PAIRS)
    assert write_report(stats, "csv") == write_report(stats, "csv")
    assert write_report(stats, "json") == write_report(stats, "json")


def test_write_report_json_has_rows_and_series():
    import json

    payload = json.loads(write_report(replay_table(REFERENCE_PAIRS), "json"))
    assert len(payload["rows"]) == 10
    assert payload["series"]["baseline_cumulative"][-1] == 2665
    assert payload["series"]["core_cumulative"][-1] == 1540


def test_write_report_unknown_format():
    with pytest.raises(ValueError):
        write_report(TokenStats(rows=[]), "xml")


def test_load_scenario_validates():
    with pytest.raises(ScenarioError):
        load_scenario({"name": "x"})
    with pytest.raises(ScenarioError):
        load_scenario({"name": "x", "turns": []})


def test_load_replay_pairs():
    pairs = load_replay_pairs(scenario_dir() / "reference_replay.json")
    assert pairs == REFERENCE_PAIRS


def test_run_scenario_checks_operator_expectations():
    scenario = Scenario(
        name="wrong",
        turns=[ScenarioTurn(instruction="Compare those two.", expected_operator="OUTLINE")],
    )
    with pytest.raises(ExpectationError, match="turn 1, operator"):
        run_scenario(scenario)


def test_run_scenario_checks_constraint_expectations():
    scenario = Scenario(
        name="wrong",
        turns=[
            ScenarioTurn(
                instruction="Noted, moving along.",
                expected_constraints={"housing": "apartment-friendly"},
            )
        ],
    )
    with pytest.raises(ExpectationError, match="turn 1, constraints"):
        run_scenario(scenario)


def test_shipped_scripted_scenarios_pass_their_expectations():
    for name in ("dog_breed_session", "topic_switch_session", "business_plan_session"):
        stats, records = run_scenario(load_shipped_scenario(name))
        assert len(stats.rows) == len(records)


def test_synthetic_scenario_crossover_and_growth():
    stats, _ = run_scenario(load_shipped_scenario("synthetic_50"))
    rows = stats.rows
    baselines = [r.baseline_prompt_tokens for r in rows]
    assert all(b2 > b1 for b1, b2 in zip(baselines, baselines[1:]))
    # Once cumulative savings turn positive they stay positive and increase.
    crossover = next(i for i, r in enumerate(rows) if r.cumulative_savings_pct > 0)
    tail = [r.cumulative_savings_pct for r in rows[crossover:]]
    assert all(b > a for a, b in zip(tail, tail[1:]))
    # Baseline cumulative growth is superlinear; concept-first is ~linear.
    assert rows[-1].baseline_cumulative / rows[-1].core_cumulative >= 3


def test_scenario_runs_are_deterministic():
    first = write_report(run_scenario(load_shipped_scenario("synthetic_10"))[0], "csv")
    second = write_report(run_scenario(load_shipped_scenario("synthetic_10"))[0], "csv")
    assert first == second


def test_stats_from_records_without_baseline():
    from corekit.engine import EngineConfig, LogicalClock, SessionEngine
    from corekit.store import StoreConfig, WarmStore

    engine = SessionEngine(
        store=WarmStore(StoreConfig()), config=EngineConfig(seed=1, shadow_baseline=False)
    )
    clock = LogicalClock()
    session = engine.open_session("u")
    engine.process_turn(session, "Noted, moving along.", clock.now())
    rows = stats_from_records(session.records).rows
    assert rows[0].baseline_prompt_tokens is None
    assert rows[0].savings_pct is None
    assert rows[0].core_cumulative == rows[0].core_prompt_tokens
