import threading

import pytest
from fastapi.testclient import TestClient

from corekit.backends import load_default_mock_backend
from corekit.engine import EngineConfig, SessionEngine
from corekit.errors import BackendError
from corekit.service import create_app
from corekit.store import StoreConfig, WarmStore

SWITCH_SCRIPT = [
    "What are some good dog breeds for small children?",
    "We live in an apartment, and shedding is a concern.",
    "Compare those two.",
    "Switching gears—can you explain quantum entanglement?",
]


@pytest.fixture()
def client():
    engine = SessionEngine(
        store=WarmStore(StoreConfig()),
        backend=load_default_mock_backend(),
        config=EngineConfig(seed=11, shadow_baseline=True),
    )
    with TestClient(create_app(engine)) as test_client:
        yield test_client


def _open_session(client, user="alice", config=None):
    body = {"user_id": user}
    if config:
        body["config"] = config
    response = client.post("/sessions", json=body)
    assert response.status_code == 201, response.text
    return response.json()["session_id"]


def test_create_session_happy_path(client):
    response = client.post("/sessions", json={"user_id": "alice"})
    assert response.status_code == 201
    assert response.json()["session_id"]


def test_create_session_missing_user(client):
    assert client.post("/sessions", json={}).status_code == 400


def test_create_session_invalid_theta(client):
    response = client.post("/sessions", json={"user_id": "a", "config": {"theta": 1.5}})
    assert response.status_code == 400


def test_create_session_invalid_budgets(client):
    response = client.post(
        "/sessions",
        json={"user_id": "a", "config": {"packet_budget": 100, "summary_budget": 200}},
    )
    assert response.status_code == 400


def test_turn_applies_constraints(client):
    sid = _open_session(client)
    client.post(f"/sessions/{sid}/turns", json={"instruction": SWITCH_SCRIPT[0]})
    response = client.post(f"/sessions/{sid}/turns", json={"instruction": SWITCH_SCRIPT[1]})
    assert response.status_code == 200
    body = response.json()
    constraints = dict(body["concept_after"]["constraints"])
    assert constraints == {"housing": "apartment-friendly", "coat": "low shedding"}
    assert body["operator_id"] == "HIGHLIGHT_CONSTRAINTS"
    assert body["token_stats_row"]["turn"] == 2


def test_turn_rejects_empty_instruction(client):
    sid = _open_session(client)
    assert client.post(f"/sessions/{sid}/turns", json={"instruction": "  "}).status_code == 400


def test_turn_unknown_session(client):
    assert client.post("/sessions/nope/turns", json={"instruction": "hi"}).status_code == 404


def test_concurrent_turn_rejected_with_409(client):
    sid = _open_session(client)
    registry = client.app.state.registry
    _, lock = registry.get(sid)
    assert lock.acquire(blocking=False)
    try:
        response = client.post(f"/sessions/{sid}/turns", json={"instruction": "hello there"})
        assert response.status_code == 409
    finally:
        lock.release()
    assert client.post(f"/sessions/{sid}/turns", json={"instruction": "hello there"}).status_code == 200


def test_state_reflects_topic_switch(client):
    sid = _open_session(client)
    for line in SWITCH_SCRIPT:
        assert client.post(f"/sessions/{sid}/turns", json={"instruction": line}).status_code == 200
    state = client.get(f"/sessions/{sid}/state").json()
    assert state["active_concept"]["task_summary"] == SWITCH_SCRIPT[3]
    dormant_summaries = [d["task_summary"] for d in state["dormant_concepts"]]
    assert SWITCH_SCRIPT[0] in dormant_summaries
    assert state["operator_history"][-1] == "EXPLAIN"
    assert len(state["stats"]["rows"]) == 4


def test_fresh_session_state(client):
    sid = _open_session(client)
    state = client.get(f"/sessions/{sid}/state").json()
    assert state["active_concept"] is None
    assert state["dormant_concepts"] == []


def test_inspect_equals_turn_response_state(client):
    sid = _open_session(client)
    body = client.post(
        f"/sessions/{sid}/turns", json={"instruction": SWITCH_SCRIPT[0]}
    ).json()
    state = client.get(f"/sessions/{sid}/state").json()
    assert state["active_concept"] == body["concept_after"]


def test_manual_reactivation_flow(client):
    sid = _open_session(client)
    for line in SWITCH_SCRIPT:
        client.post(f"/sessions/{sid}/turns", json={"instruction": line})
    state = client.get(f"/sessions/{sid}/state").json()
    dog_id = state["dormant_concepts"][0]["concept_id"]
    after = client.post(f"/sessions/{sid}/reactivate/{dog_id}")
    assert after.status_code == 200
    body = after.json()
    assert body["active_concept"]["concept_id"] == dog_id
    dormant_ids = [d["concept_id"] for d in body["dormant_concepts"]]
    assert state["active_concept"]["concept_id"] in dormant_ids


def test_reactivate_unknown_concept(client):
    sid = _open_session(client)
    assert client.post(f"/sessions/{sid}/reactivate/ghost").status_code == 404


def test_stats_endpoint(client):
    sid = _open_session(client)
    client.post(f"/sessions/{sid}/turns", json={"instruction": "Noted, moving along."})
    stats = client.get(f"/sessions/{sid}/stats").json()
    assert len(stats["rows"]) == 1
    row = stats["rows"][0]
    assert row["core_prompt_tokens"] > 0
    assert row["baseline_prompt_tokens"] is not None


def test_operators_endpoint_returns_document_verbatim(client):
    from corekit.operators import load_default_library

    document = client.get("/operators").json()
    assert document == load_default_library().raw_document
    assert len(document["operators"]) == 40


class _FailingBackend:
    def generate(self, packet):
        raise BackendError("upstream down")


def test_backend_failure_maps_to_502():
    engine = SessionEngine(
        store=WarmStore(StoreConfig()),
        backend=_FailingBackend(),
        config=EngineConfig(seed=1),
    )
    with TestClient(create_app(engine)) as client:
        sid = _open_session(client)
        response = client.post(f"/sessions/{sid}/turns", json={"instruction": "hello there"})
        assert response.status_code == 502
        # Failed turn keeps instruction-derived state and frees the lock.
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["turn_counter"] == 1


def test_parallel_turns_from_threads_serialize(client):
    sid = _open_session(client)
    outcomes = []

    def fire(i):
        response = client.post(
            f"/sessions/{sid}/turns", json={"instruction": f"Log checkpoint number {i}."}
        )
        outcomes.append(response.status_code)

    threads = [threading.Thread(target=fire, args=(i,)) for i in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert set(outcomes) <= {200, 409}
    completed = outcomes.count(200)
    state = client.get(f"/sessions/{sid}/state").json()
    assert state["turn_counter"] == completed
