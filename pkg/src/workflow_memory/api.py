"""HTTP JSON API over the session gateway."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .model import StepKind, Workflow, leaf_sequence, workflow_to_dict
from .retrieval import RetrievalMatch
from .session import (
    EmptyWorkflowError,
    SessionGateway,
    UnknownCrewError,
    UnknownSessionError,
    is_save_command,
)
from .store import MemoryRecord
from .timestamps import format_timestamp


class CreateSessionRequest(BaseModel):
    crew_id: str


class InstructionRequest(BaseModel):
    text: str


def _match_to_dict(match: RetrievalMatch) -> dict:
    return {
        "record_id": match.record_id,
        "score": match.score,
        "window_start": match.window_start,
        "window_end": match.window_end,
    }


def _leaf_label(workflow: Workflow) -> list[str]:
    return [
        step.name if step.kind is StepKind.FUNCTION_CALL else step.instruction
        for step in leaf_sequence(workflow)
    ]


def _record_summary(record: MemoryRecord) -> dict:
    return {
        "record_id": record.record_id,
        "saved_at": format_timestamp(record.saved_at),
        "source": record.workflow.source.value,
        "tags": sorted(record.workflow.tags),
        "leaves": _leaf_label(record.workflow),
    }


def create_app(gateway: SessionGateway, static_dir: Path | str | None = None) -> FastAPI:
    app = FastAPI(title="workflow-memory")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest) -> dict:
        try:
            return {"session_id": gateway.create_session(request.crew_id)}
        except UnknownCrewError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.post("/sessions/{session_id}/instructions")
    def post_instruction(session_id: str, request: InstructionRequest) -> dict:
        try:
            if is_save_command(request.text):
                saved = gateway.handle_save(session_id)
                notice = (
                    f"Workflow already saved as {saved.record_id} (duplicate)."
                    if saved.duplicate
                    else f"Workflow saved as {saved.record_id}."
                )
                return {"response": notice, "mode": "save", "suggestions": [], "matches": []}
            outcome = gateway.handle_instruction(session_id, request.text)
        except UnknownSessionError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except EmptyWorkflowError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "response": outcome.response,
            "mode": outcome.mode,
            "suggestions": list(outcome.suggestions),
            "matches": [_match_to_dict(m) for m in outcome.matches],
        }

    @app.post("/sessions/{session_id}/save")
    def post_save(session_id: str) -> dict:
        try:
            saved = gateway.handle_save(session_id)
        except UnknownSessionError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except EmptyWorkflowError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"record_id": saved.record_id, "duplicate": saved.duplicate}

    @app.get("/sessions/{session_id}/workflow")
    def get_workflow(session_id: str) -> dict:
        try:
            state = gateway.get_session(session_id)
        except UnknownSessionError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return workflow_to_dict(state.current_workflow)

    @app.get("/memory")
    def get_memory() -> dict:
        return {"records": [_record_summary(r) for r in gateway.store.scan()]}

    @app.get("/crews/{crew_id}")
    def get_crew(crew_id: str) -> dict:
        try:
            return gateway.crew_description(crew_id).to_dict()
        except UnknownCrewError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    if static_dir is not None:
        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
