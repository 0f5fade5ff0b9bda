"""Compile raw crew execution trajectories into formalized workflows.

A trajectory is the event log of one or more chat turns: user
instructions, agent reasoning, and tool calls with their outcomes. Only
the essentials survive compilation: instructions become top-level steps
and successful tool calls nest under the instruction that triggered
them. Reasoning, failed calls and calls that never completed are
dropped because they are not needed to reproduce the workflow.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Iterable, Sequence

from .model import Step, StepKind, Workflow, WorkflowSource, call_step, instruction_step
from .timestamps import format_timestamp, parse_timestamp, truncate_to_millis, utc_now


class EventKind(str, Enum):
    USER_INSTRUCTION = "user-instruction"
    REASONING = "reasoning"
    TOOL_CALL_START = "tool-call-start"
    TOOL_CALL_END = "tool-call-end"


class CallStatus(str, Enum):
    SUCCESS = "success"
    FAILURE = "failure"


class TrajectoryError(ValueError):
    """An event sequence violated the trajectory invariants."""


@dataclass(frozen=True)
class TrajectoryEvent:
    """One raw crew-execution log entry."""

    event_id: str
    kind: EventKind
    timestamp: datetime
    text: str = ""
    tool_name: str = ""
    call_id: str = ""
    input: dict[str, str] = field(default_factory=dict)
    output: str = ""
    status: CallStatus | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", EventKind(self.kind))
        object.__setattr__(self, "input", dict(self.input))
        object.__setattr__(self, "timestamp", truncate_to_millis(self.timestamp))
        if self.status is not None:
            object.__setattr__(self, "status", CallStatus(self.status))
        if self.kind is EventKind.TOOL_CALL_END and self.status is None:
            raise TrajectoryError(f"event {self.event_id!r}: tool-call-end needs a status")


def _validate(events: Sequence[TrajectoryEvent]) -> None:
    last: datetime | None = None
    open_calls: set[str] = set()
    for event in events:
        if last is not None and event.timestamp < last:
            raise TrajectoryError(f"event {event.event_id!r}: timestamps must be non-decreasing")
        last = event.timestamp
        if event.kind is EventKind.TOOL_CALL_START:
            open_calls.add(event.call_id)
        elif event.kind is EventKind.TOOL_CALL_END:
            if event.call_id not in open_calls:
                raise TrajectoryError(
                    f"event {event.event_id!r}: tool-call-end for unknown call_id {event.call_id!r}"
                )
            open_calls.discard(event.call_id)


def _fresh_step_ids(taken: set[str]) -> Iterable[str]:
    n = len(taken) + 1
    while True:
        candidate = f"s{n}"
        if candidate not in taken:
            taken.add(candidate)
            yield candidate
        n += 1


def _compile_steps(events: Sequence[TrajectoryEvent], taken_ids: set[str]) -> list[Step]:
    ids = _fresh_step_ids(taken_ids)
    top_level: list[Step] = []
    # Children of the instruction step currently being built, or None
    # when no instruction has been seen yet.
    open_instruction: TrajectoryEvent | None = None
    open_children: list[Step] = []
    starts: dict[str, TrajectoryEvent] = {}

    def close_instruction() -> None:
        nonlocal open_instruction, open_children
        if open_instruction is not None:
            top_level.append(
                instruction_step(next(ids), open_instruction.text, tuple(open_children))
            )
        open_instruction = None
        open_children = []

    for event in events:
        if event.kind is EventKind.USER_INSTRUCTION:
            close_instruction()
            open_instruction = event
        elif event.kind is EventKind.TOOL_CALL_START:
            starts[event.call_id] = event
        elif event.kind is EventKind.TOOL_CALL_END:
            start = starts.pop(event.call_id, None)
            if start is None or event.status is not CallStatus.SUCCESS:
                continue
            step = call_step(next(ids), start.tool_name, start.input, event.output)
            if open_instruction is None:
                top_level.append(step)
            else:
                open_children.append(step)
        # reasoning events contribute nothing
    close_instruction()
    return top_level


def compile_trajectory(
    events: Sequence[TrajectoryEvent],
    workflow_id: str = "",
    created_at: datetime | None = None,
) -> Workflow:
    """Compile an event sequence into a session workflow.

    Each instruction event opens a new top-level step; successful tool
    calls attach to the latest open instruction, or become top-level
    steps when no instruction precedes them. An empty sequence yields
    an empty workflow.
    """
    _validate(events)
    steps = _compile_steps(events, set())
    if not workflow_id:
        digest = hashlib.sha256("\n".join(e.event_id for e in events).encode("utf-8"))
        workflow_id = f"wf-{digest.hexdigest()[:12]}"
    return Workflow(
        workflow_id=workflow_id,
        steps=tuple(steps),
        created_at=created_at or (events[0].timestamp if events else utc_now()),
        source=WorkflowSource.SESSION,
    )


def append_trajectory(session_workflow: Workflow, events: Sequence[TrajectoryEvent]) -> Workflow:
    """Extend a compiled session workflow with another turn's events.

    Returns a new workflow; the original is untouched. New steps get
    ids that cannot collide with the existing ones.
    """
    _validate(events)
    taken = {step.step_id for step in _walk_ids(session_workflow.steps)}
    new_steps = _compile_steps(events, taken)
    return Workflow(
        workflow_id=session_workflow.workflow_id,
        steps=session_workflow.steps + tuple(new_steps),
        created_at=session_workflow.created_at,
        source=session_workflow.source,
        tags=session_workflow.tags,
    )


def _walk_ids(steps: tuple[Step, ...]) -> Iterable[Step]:
    for step in steps:
        yield step
        yield from _walk_ids(step.sub_steps)


def event_to_dict(event: TrajectoryEvent) -> dict[str, Any]:
    return {
        "event_id": event.event_id,
        "kind": event.kind.value,
        "text": event.text,
        "tool_name": event.tool_name,
        "call_id": event.call_id,
        "input": dict(event.input),
        "output": event.output,
        "status": event.status.value if event.status is not None else "",
        "timestamp": format_timestamp(event.timestamp),
    }


def event_from_dict(obj: dict[str, Any]) -> TrajectoryEvent:
    if not isinstance(obj, dict):
        raise TrajectoryError(f"expected an event object, got {type(obj).__name__}")
    for key in ("event_id", "kind", "timestamp"):
        if key not in obj:
            raise TrajectoryError(f"event is missing required field {key!r}")
    try:
        kind = EventKind(obj["kind"])
    except ValueError:
        raise TrajectoryError(f"unknown event kind {obj['kind']!r}") from None
    status_raw = obj.get("status", "")
    try:
        status = CallStatus(status_raw) if status_raw else None
    except ValueError:
        raise TrajectoryError(f"unknown call status {status_raw!r}") from None
    try:
        timestamp = parse_timestamp(obj["timestamp"])
    except ValueError as exc:
        raise TrajectoryError(f"event {obj['event_id']!r}: {exc}") from None
    return TrajectoryEvent(
        event_id=str(obj["event_id"]),
        kind=kind,
        timestamp=timestamp,
        text=str(obj.get("text", "")),
        tool_name=str(obj.get("tool_name", "")),
        call_id=str(obj.get("call_id", "")),
        input={str(k): str(v) for k, v in (obj.get("input") or {}).items()},
        output=str(obj.get("output", "")),
        status=status,
    )


def write_jsonl(events: Sequence[TrajectoryEvent]) -> str:
    """One event object per line; the wire format crew adapters emit."""
    return "".join(json.dumps(event_to_dict(e), ensure_ascii=False) + "\n" for e in events)


def read_jsonl(text: str) -> list[TrajectoryEvent]:
    events: list[TrajectoryEvent] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TrajectoryError(f"line {lineno}: invalid JSON: {exc}") from None
        events.append(event_from_dict(obj))
    return events
