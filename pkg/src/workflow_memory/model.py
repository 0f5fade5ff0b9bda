"""Workflow tree model: steps, workflows, and their canonical JSON form.

A workflow is an ordered tree of steps. Steps are either user
instructions (which may nest function calls) or function calls (always
leaves). The tree is the unit stored in and retrieved from episodic
memory; similarity comparison operates on its leaf sequence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Iterator

from .timestamps import format_timestamp, parse_timestamp, truncate_to_millis, utc_now


class StepKind(str, Enum):
    USER_INSTRUCTION = "user-instruction"
    FUNCTION_CALL = "function-call"


class WorkflowSource(str, Enum):
    SESSION = "session"
    BOOTSTRAP = "bootstrap"
    IMPORT = "import"


class WorkflowDecodeError(ValueError):
    """A workflow document failed validation; `path` names the bad field."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class Step:
    """One node of a workflow tree.

    Function calls carry a name, input mapping and output, and never
    nest. User instructions carry the verbatim instruction text and may
    hold function-call sub-steps.
    """

    step_id: str
    kind: StepKind
    name: str = ""
    instruction: str = ""
    input: dict[str, str] = field(default_factory=dict)
    output: str = ""
    sub_steps: tuple[Step, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", StepKind(self.kind))
        object.__setattr__(self, "input", dict(self.input))
        object.__setattr__(self, "sub_steps", tuple(self.sub_steps))
        if not self.step_id:
            raise ValueError("step_id must be non-empty")
        if self.kind is StepKind.FUNCTION_CALL:
            if not self.name:
                raise ValueError(f"function-call step {self.step_id!r} needs a name")
            if self.sub_steps:
                raise ValueError(f"function-call step {self.step_id!r} cannot nest sub-steps")
        else:
            if not self.instruction:
                raise ValueError(f"user-instruction step {self.step_id!r} needs instruction text")
            for child in self.sub_steps:
                if child.kind is not StepKind.FUNCTION_CALL:
                    raise ValueError(
                        f"step {self.step_id!r}: only function calls may nest under an instruction"
                    )

    @property
    def is_leaf(self) -> bool:
        return not self.sub_steps


def instruction_step(step_id: str, instruction: str, sub_steps: tuple[Step, ...] | list[Step] = ()) -> Step:
    return Step(step_id=step_id, kind=StepKind.USER_INSTRUCTION, instruction=instruction, sub_steps=tuple(sub_steps))


def call_step(step_id: str, name: str, input: dict[str, str] | None = None, output: str = "") -> Step:
    return Step(step_id=step_id, kind=StepKind.FUNCTION_CALL, name=name, input=dict(input or {}), output=output)


@dataclass(frozen=True)
class Workflow:
    """An ordered tree of steps plus identity and metadata."""

    workflow_id: str
    steps: tuple[Step, ...] = ()
    created_at: datetime = field(default_factory=utc_now)
    source: WorkflowSource = WorkflowSource.SESSION
    tags: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "source", WorkflowSource(self.source))
        object.__setattr__(self, "tags", frozenset(self.tags))
        object.__setattr__(self, "created_at", truncate_to_millis(self.created_at))
        if not self.workflow_id:
            raise ValueError("workflow_id must be non-empty")
        seen: set[str] = set()
        for step in _walk(self.steps):
            if step.step_id in seen:
                raise ValueError(f"duplicate step_id {step.step_id!r} in workflow {self.workflow_id!r}")
            seen.add(step.step_id)

    @property
    def step_count(self) -> int:
        return sum(1 for _ in _walk(self.steps))

    @property
    def is_empty(self) -> bool:
        return not self.steps


@dataclass(frozen=True)
class LeafSequence:
    """The leaf steps of a workflow in depth-first pre-order."""

    leaves: tuple[Step, ...] = ()

    def __len__(self) -> int:
        return len(self.leaves)

    def __iter__(self) -> Iterator[Step]:
        return iter(self.leaves)

    def __getitem__(self, index: int) -> Step:
        return self.leaves[index]


def _walk(steps: tuple[Step, ...]) -> Iterator[Step]:
    for step in steps:
        yield step
        yield from _walk(step.sub_steps)


def leaf_sequence(w: Workflow) -> LeafSequence:
    """All leaves in depth-first pre-order.

    An instruction with sub-steps contributes only its sub-steps'
    leaves; a childless instruction is itself a leaf.
    """
    return LeafSequence(tuple(step for step in _walk(w.steps) if step.is_leaf))


def _steps_equal(a: Step, b: Step) -> bool:
    return (
        a.kind is b.kind
        and a.name == b.name
        and a.instruction == b.instruction
        and list(a.input.items()) == list(b.input.items())
        and len(a.sub_steps) == len(b.sub_steps)
        and all(_steps_equal(x, y) for x, y in zip(a.sub_steps, b.sub_steps))
    )


def workflows_equal(a: Workflow, b: Workflow) -> bool:
    """Structural identity over the action sequence.

    Compares kind, name, instruction, input (order-sensitive) and
    sub-structure per step; ignores ids, outputs, timestamps, source
    and tags, which vary per run without changing the actions taken.
    """
    return len(a.steps) == len(b.steps) and all(
        _steps_equal(x, y) for x, y in zip(a.steps, b.steps)
    )


def _one_line(text: str) -> str:
    return text.replace("\n", "\\n")


def _render_step(step: Step, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    if step.kind is StepKind.FUNCTION_CALL:
        args = ", ".join(f"{k}={_one_line(v)}" for k, v in step.input.items())
        lines.append(f"{pad}- [call] {_one_line(step.name)}({args}) -> {_one_line(step.output)}")
    else:
        lines.append(f"{pad}- [instruction] {_one_line(step.instruction)}")
        for child in step.sub_steps:
            _render_step(child, depth + 1, lines)


def render_text(w: Workflow) -> str:
    """Deterministic human-readable rendering, one line per step.

    Used verbatim inside suggestion prompts, so the format is stable:
    `- [instruction] <text>` / `- [call] <name>(<k=v, ...>) -> <output>`
    with two-space indentation per nesting level.
    """
    lines: list[str] = []
    for step in w.steps:
        _render_step(step, 0, lines)
    return "\n".join(lines)


def step_to_dict(step: Step) -> dict[str, Any]:
    return {
        "step_id": step.step_id,
        "kind": step.kind.value,
        "name": step.name,
        "instruction": step.instruction,
        "input": dict(step.input),
        "output": step.output,
        "sub_steps": [step_to_dict(child) for child in step.sub_steps],
    }


def workflow_to_dict(w: Workflow) -> dict[str, Any]:
    return {
        "workflow_id": w.workflow_id,
        "created_at": format_timestamp(w.created_at),
        "source": w.source.value,
        "tags": sorted(w.tags),
        "steps": [step_to_dict(step) for step in w.steps],
    }


def serialize(w: Workflow) -> bytes:
    """Canonical JSON document for a workflow; inverse of `deserialize`."""
    return (json.dumps(workflow_to_dict(w), ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def _expect_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise WorkflowDecodeError(path, f"expected a string, got {type(value).__name__}")
    return value


def _require(obj: dict[str, Any], key: str, path: str) -> Any:
    if key not in obj:
        raise WorkflowDecodeError(f"{path}.{key}" if path else key, "missing required field")
    return obj[key]


def step_from_dict(obj: Any, path: str = "steps") -> Step:
    if not isinstance(obj, dict):
        raise WorkflowDecodeError(path, f"expected an object, got {type(obj).__name__}")
    step_id = _expect_str(_require(obj, "step_id", path), f"{path}.step_id")
    kind_raw = _expect_str(_require(obj, "kind", path), f"{path}.kind")
    try:
        kind = StepKind(kind_raw)
    except ValueError:
        raise WorkflowDecodeError(f"{path}.kind", f"unknown kind {kind_raw!r}") from None
    name = _expect_str(_require(obj, "name", path), f"{path}.name")
    instruction = _expect_str(_require(obj, "instruction", path), f"{path}.instruction")
    input_raw = _require(obj, "input", path)
    if not isinstance(input_raw, dict):
        raise WorkflowDecodeError(f"{path}.input", "expected an object of string values")
    input_map: dict[str, str] = {}
    for key, value in input_raw.items():
        input_map[_expect_str(key, f"{path}.input")] = _expect_str(value, f"{path}.input.{key}")
    output = _expect_str(_require(obj, "output", path), f"{path}.output")
    subs_raw = _require(obj, "sub_steps", path)
    if not isinstance(subs_raw, list):
        raise WorkflowDecodeError(f"{path}.sub_steps", "expected a list")
    sub_steps = tuple(
        step_from_dict(child, f"{path}.sub_steps[{i}]") for i, child in enumerate(subs_raw)
    )
    try:
        return Step(
            step_id=step_id,
            kind=kind,
            name=name,
            instruction=instruction,
            input=input_map,
            output=output,
            sub_steps=sub_steps,
        )
    except ValueError as exc:
        raise WorkflowDecodeError(path, str(exc)) from None


def workflow_from_dict(obj: Any) -> Workflow:
    if not isinstance(obj, dict):
        raise WorkflowDecodeError("", f"expected an object, got {type(obj).__name__}")
    workflow_id = _expect_str(_require(obj, "workflow_id", ""), "workflow_id")
    created_raw = _expect_str(_require(obj, "created_at", ""), "created_at")
    try:
        created_at = parse_timestamp(created_raw)
    except ValueError as exc:
        raise WorkflowDecodeError("created_at", str(exc)) from None
    source_raw = _expect_str(_require(obj, "source", ""), "source")
    try:
        source = WorkflowSource(source_raw)
    except ValueError:
        raise WorkflowDecodeError("source", f"unknown source {source_raw!r}") from None
    tags_raw = _require(obj, "tags", "")
    if not isinstance(tags_raw, list):
        raise WorkflowDecodeError("tags", "expected a list of strings")
    tags = frozenset(_expect_str(tag, f"tags[{i}]") for i, tag in enumerate(tags_raw))
    steps_raw = _require(obj, "steps", "")
    if not isinstance(steps_raw, list):
        raise WorkflowDecodeError("steps", "expected a list")
    steps = tuple(step_from_dict(step, f"steps[{i}]") for i, step in enumerate(steps_raw))
    try:
        return Workflow(
            workflow_id=workflow_id,
            steps=steps,
            created_at=created_at,
            source=source,
            tags=tags,
        )
    except ValueError as exc:
        raise WorkflowDecodeError("", str(exc)) from None


def deserialize(data: bytes | str) -> Workflow:
    """Parse and validate a workflow document; errors name the bad field."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise WorkflowDecodeError("", f"invalid JSON: {exc}") from None
    return workflow_from_dict(obj)
