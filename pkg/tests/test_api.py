from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from workflow_memory import InMemoryStore
from workflow_memory.api import create_app
from workflow_memory.crew import bootstrap_memory, chemist_mock_llm, load_chemist_crew
from workflow_memory.session import SessionGateway


@pytest.fixture
def client():
    store = InMemoryStore()
    bootstrap_memory(20, 1, store)
    gateway = SessionGateway(
        store=store,
        crews={"chemist": load_chemist_crew()},
        llm=chemist_mock_llm(),
    )
    return TestClient(create_app(gateway))


def create_session(client) -> str:
    response = client.post("/sessions", json={"crew_id": "chemist"})
    assert response.status_code == 200
    return response.json()["session_id"]


def test_create_session(client):
    assert create_session(client)


def test_create_session_unknown_crew(client):
    assert client.post("/sessions", json={"crew_id": "bogus"}).status_code == 404


def test_instruction_turn_payload(client):
    session_id = create_session(client)
    response = client.post(
        f"/sessions/{session_id}/instructions",
        json={"text": "Extract all ingredients of sample.sds"},
    )
    assert response.status_code == 200
    body = response.json()
    assert set(body) == {"response", "mode", "suggestions", "matches"}
    assert body["mode"] == "memory"
    assert body["suggestions"]
    assert body["matches"]
    match = body["matches"][0]
    assert set(match) == {"record_id", "score", "window_start", "window_end"}
    assert match["score"] > 0.65


def test_instruction_unknown_session(client):
    response = client.post("/sessions/missing/instructions", json={"text": "hi"})
    assert response.status_code == 404


def test_save_command_through_instructions_endpoint(client):
    session_id = create_session(client)
    client.post(
        f"/sessions/{session_id}/instructions",
        json={"text": "Extract all ingredients of sample.sds"},
    )
    response = client.post(f"/sessions/{session_id}/instructions", json={"text": "\\save"})
    assert response.status_code == 200
    body = response.json()
    assert body["mode"] == "save"
    assert "Workflow saved as rec-" in body["response"]


def test_save_command_on_empty_session_is_400(client):
    session_id = create_session(client)
    response = client.post(f"/sessions/{session_id}/instructions", json={"text": "\\save"})
    assert response.status_code == 400


def test_save_endpoint_and_duplicate(client):
    session_id = create_session(client)
    client.post(
        f"/sessions/{session_id}/instructions",
        json={"text": "Extract all ingredients of sample.sds"},
    )
    first = client.post(f"/sessions/{session_id}/save").json()
    assert first["duplicate"] is False
    second = client.post(f"/sessions/{session_id}/save").json()
    assert second == {"record_id": first["record_id"], "duplicate": True}


def test_get_workflow_schema(client):
    session_id = create_session(client)
    client.post(
        f"/sessions/{session_id}/instructions",
        json={"text": "Extract all ingredients of sample.sds"},
    )
    body = client.get(f"/sessions/{session_id}/workflow").json()
    assert set(body) == {"workflow_id", "created_at", "source", "tags", "steps"}
    step = body["steps"][0]
    assert set(step) == {"step_id", "kind", "name", "instruction", "input", "output", "sub_steps"}
    assert step["kind"] == "user-instruction"
    assert step["sub_steps"][0]["name"] == "sds_extract"


def test_get_memory_summaries(client):
    body = client.get("/memory").json()
    assert body["records"]
    record = body["records"][0]
    assert set(record) == {"record_id", "saved_at", "source", "tags", "leaves"}
    assert record["source"] == "bootstrap"
    assert record["leaves"][0] == "sds_extract"


def test_get_crew_description(client):
    body = client.get("/crews/chemist").json()
    assert body["name"] == "Chemist crew"
    tool_names = [t["name"] for agent in body["agents"] for t in agent["tools"]]
    assert tool_names == ["Product extractor", "PFAS classifier", "Hazard Assessment"]


def test_get_unknown_crew(client):
    assert client.get("/crews/quantum").status_code == 404
