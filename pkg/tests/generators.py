"""Seeded random generators for workflows and trajectories.

Used both by hypothesis-driven property tests (seed in, structure out)
and by the fixed-seed acceptance loops. Texts draw from a small
domain-flavored vocabulary so instruction similarities land across the
whole (0, 1) range instead of collapsing to 0.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from random import Random

from workflow_memory import (
    CallStatus,
    EventKind,
    InMemoryStore,
    TrajectoryEvent,
    Workflow,
    WorkflowSource,
    call_step,
    instruction_step,
)

FUNCTION_NAMES = (
    "sds_extract",
    "pfas_classify",
    "hazard_assess",
    "format_markdown",
    "fetch_spectrum",
    "run_simulation",
)

WORDS = (
    "extract",
    "classify",
    "assess",
    "convert",
    "ingredients",
    "pfas",
    "hazard",
    "table",
    "report",
    "sample",
    "materials",
    "data",
)

_BASE = datetime(2025, 6, 1, tzinfo=timezone.utc)


def random_instruction(rng: Random) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(rng.randint(2, 6)))


def random_input(rng: Random) -> dict[str, str]:
    return {
        f"arg{i}": rng.choice(WORDS)
        for i in range(rng.randint(0, 2))
    }


def random_workflow(rng: Random, workflow_id: str, max_leaves: int = 8) -> Workflow:
    """Random tree of depth <= 2 with between 1 and `max_leaves` leaves."""
    target = rng.randint(1, max_leaves)
    steps = []
    leaves = 0
    serial = 0

    def next_id() -> str:
        nonlocal serial
        serial += 1
        return f"s{serial}"

    while leaves < target:
        shape = rng.random()
        if shape < 0.25:
            steps.append(instruction_step(next_id(), random_instruction(rng)))
            leaves += 1
        elif shape < 0.5:
            steps.append(
                call_step(next_id(), rng.choice(FUNCTION_NAMES), random_input(rng), rng.choice(WORDS))
            )
            leaves += 1
        else:
            width = rng.randint(1, min(3, target - leaves))
            children = tuple(
                call_step(next_id(), rng.choice(FUNCTION_NAMES), random_input(rng), rng.choice(WORDS))
                for _ in range(width)
            )
            steps.append(instruction_step(next_id(), random_instruction(rng), children))
            leaves += width
    return Workflow(
        workflow_id=workflow_id,
        steps=tuple(steps),
        created_at=_BASE + timedelta(seconds=rng.randint(0, 10_000)),
        source=rng.choice(list(WorkflowSource)),
        tags=frozenset(rng.sample(WORDS, rng.randint(0, 2))),
    )


def ticking_clock(step_ms: int = 1000):
    """Deterministic store clock; step_ms=0 forces saved_at ties."""
    state = {"n": 0}

    def clock() -> datetime:
        state["n"] += 1
        return _BASE + timedelta(milliseconds=step_ms * state["n"])

    return clock


def seeded_store(rng: Random, max_records: int = 40, query: Workflow | None = None) -> InMemoryStore:
    """Random store exercising duplicates, ties, and query-equal records."""
    store = InMemoryStore(clock=ticking_clock(step_ms=rng.choice((0, 1000))))
    for i in range(rng.randint(0, max_records)):
        roll = rng.random()
        existing = store.scan()
        if query is not None and roll < 0.1:
            store.save(query)
        elif roll < 0.25 and existing:
            store.save(rng.choice(existing).workflow)
        else:
            store.save(random_workflow(rng, f"m{i}"))
    return store


def _stamped(events: list[TrajectoryEvent]) -> list[TrajectoryEvent]:
    return [
        TrajectoryEvent(
            event_id=f"e{i + 1}",
            kind=e.kind,
            timestamp=_BASE + timedelta(milliseconds=i),
            text=e.text,
            tool_name=e.tool_name,
            call_id=e.call_id,
            input=e.input,
            output=e.output,
            status=e.status,
        )
        for i, e in enumerate(events)
    ]


def _instruction_event(rng: Random) -> TrajectoryEvent:
    return TrajectoryEvent(
        event_id="x",
        kind=EventKind.USER_INSTRUCTION,
        timestamp=_BASE,
        text=random_instruction(rng),
    )


def _successful_call(rng: Random, call_id: str) -> list[TrajectoryEvent]:
    name = rng.choice(FUNCTION_NAMES)
    return [
        TrajectoryEvent(
            event_id="x",
            kind=EventKind.TOOL_CALL_START,
            timestamp=_BASE,
            tool_name=name,
            call_id=call_id,
            input=random_input(rng),
        ),
        TrajectoryEvent(
            event_id="x",
            kind=EventKind.TOOL_CALL_END,
            timestamp=_BASE,
            tool_name=name,
            call_id=call_id,
            output=rng.choice(WORDS),
            status=CallStatus.SUCCESS,
        ),
    ]


def random_clean_trajectory(rng: Random, max_turns: int = 3) -> list[TrajectoryEvent]:
    """Instructions and successful tool calls only, freshly stamped."""
    events: list[TrajectoryEvent] = []
    serial = 0
    for _ in range(rng.randint(1, max_turns)):
        events.append(_instruction_event(rng))
        for _ in range(rng.randint(0, 3)):
            serial += 1
            events.extend(_successful_call(rng, f"c{serial}"))
    return _stamped(events)


def with_noise(rng: Random, clean: list[TrajectoryEvent]) -> list[TrajectoryEvent]:
    """Inject reasoning, failed calls, and orphan starts between events.

    The compiled workflow must be identical to the clean trajectory's.
    """
    noisy: list[TrajectoryEvent] = []
    serial = 1000
    for event in clean:
        while rng.random() < 0.3:
            kind = rng.random()
            if kind < 0.4:
                noisy.append(
                    TrajectoryEvent(
                        event_id="x",
                        kind=EventKind.REASONING,
                        timestamp=_BASE,
                        text=random_instruction(rng),
                    )
                )
            elif kind < 0.8:
                serial += 1
                name = rng.choice(FUNCTION_NAMES)
                noisy.append(
                    TrajectoryEvent(
                        event_id="x",
                        kind=EventKind.TOOL_CALL_START,
                        timestamp=_BASE,
                        tool_name=name,
                        call_id=f"n{serial}",
                        input=random_input(rng),
                    )
                )
                noisy.append(
                    TrajectoryEvent(
                        event_id="x",
                        kind=EventKind.TOOL_CALL_END,
                        timestamp=_BASE,
                        tool_name=name,
                        call_id=f"n{serial}",
                        output="",
                        status=CallStatus.FAILURE,
                    )
                )
            else:
                serial += 1
                noisy.append(
                    TrajectoryEvent(
                        event_id="x",
                        kind=EventKind.TOOL_CALL_START,
                        timestamp=_BASE,
                        tool_name=rng.choice(FUNCTION_NAMES),
                        call_id=f"n{serial}",
                        input={},
                    )
                )
        noisy.append(event)
    return _stamped(noisy)
