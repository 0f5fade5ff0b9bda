"""Deterministic chemist-crew stand-in and memory bootstrap generator.

The mock crew answers instructions from an ordered rule table: the
first rule whose keywords all appear in the instruction emits its
scripted trajectory (tool calls with canned payloads, plus optional
reasoning and failure noise) and its canned result text. Unmatched
instructions fall through to a tool-free knowledge answer with an empty
trajectory. The bootstrap generator seeds a store with plausible
tool-chain workflows so retrieval has something to remember.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from importlib import resources
from random import Random
from typing import Protocol, Sequence

from .llm import ScriptedLLMClient
from .model import Step, Workflow, WorkflowSource, call_step, instruction_step
from .store import WorkflowStore
from .suggest import CrewDescription
from .trajectory import CallStatus, EventKind, TrajectoryEvent
from .timestamps import utc_now

_FILE_RE = re.compile(r"[\w.\-/]*\.(?:sds|fmd)\b", re.IGNORECASE)
_DEFAULT_FILE = "product.sds"

INGREDIENT_TABLE = (
    "ingredient,cas,concentration\n"
    "PTFE,9002-84-0,12%\n"
    "PFOA,335-67-1,0.4%\n"
    "Talc,14807-96-6,8%"
)

# Canned call payloads shared by the crew rules and the bootstrap
# generator; chemistry is out of scope, so outputs are fixed strings.
TOOL_CALL_TEMPLATES: dict[str, tuple[dict[str, str], str]] = {
    "sds_extract": ({"file": _DEFAULT_FILE}, INGREDIENT_TABLE),
    "pfas_classify": (
        {"ingredients": "PTFE, PFOA, Talc"},
        "PTFE: PFAS (fluoropolymer); PFOA: PFAS (perfluoroalkyl acid); Talc: not PFAS",
    ),
    "hazard_assess": (
        {"substances": "PTFE, PFOA"},
        "PFOA: persistence high, bioaccumulation high, toxicity high. "
        "PTFE: persistence high, bioaccumulation low, toxicity low.",
    ),
    "format_markdown": (
        {"table": "ingredient table"},
        "| Ingredient | CAS | Concentration |\n"
        "| --- | --- | --- |\n"
        "| PTFE | 9002-84-0 | 12% |\n"
        "| PFOA | 335-67-1 | 0.4% |\n"
        "| Talc | 14807-96-6 | 8% |",
    ),
}


@dataclass(frozen=True)
class ScriptEntry:
    """One scripted crew action: a reasoning note or a canned tool call."""

    kind: str  # "reasoning" | "tool-call"
    text: str = ""
    tool_name: str = ""
    input: dict[str, str] = field(default_factory=dict)
    output: str = ""
    status: CallStatus = CallStatus.SUCCESS


@dataclass(frozen=True)
class MockCrewRule:
    name: str
    keywords: frozenset[str]
    result_text: str
    script: tuple[ScriptEntry, ...] = ()

    def matches(self, instruction: str) -> bool:
        lowered = instruction.lower()
        return all(keyword in lowered for keyword in self.keywords)


DEFAULT_KNOWLEDGE_RULE = MockCrewRule(
    name="knowledge-answer",
    keywords=frozenset(),
    result_text=(
        "No specialised tool was needed for this request; the crew answered "
        "from its own knowledge."
    ),
    script=(),
)


@dataclass(frozen=True)
class CrewResult:
    result_text: str
    events: tuple[TrajectoryEvent, ...]


class CrewAdapter(Protocol):
    """What the session gateway needs from a domain crew."""

    def describe(self) -> CrewDescription: ...

    def run(self, instruction: str) -> CrewResult: ...


class MockCrew:
    """Rule-table crew: a pure function of the instruction text."""

    def __init__(self, description: CrewDescription, rules: Sequence[MockCrewRule]):
        self.description = description
        self.rules = list(rules)

    def describe(self) -> CrewDescription:
        return self.description

    def _pick_rule(self, instruction: str) -> MockCrewRule:
        for rule in self.rules:
            if rule.keywords and rule.matches(instruction):
                return rule
        return DEFAULT_KNOWLEDGE_RULE

    def run(self, instruction: str) -> CrewResult:
        rule = self._pick_rule(instruction)
        found = _FILE_RE.search(instruction)
        file_name = found.group(0) if found else _DEFAULT_FILE
        base = utc_now()
        events: list[TrajectoryEvent] = []
        call_counter = 0

        def stamp() -> datetime:
            return base + timedelta(milliseconds=len(events))

        for entry in rule.script:
            if entry.kind == "reasoning":
                events.append(
                    TrajectoryEvent(
                        event_id=f"e{len(events) + 1}",
                        kind=EventKind.REASONING,
                        timestamp=stamp(),
                        text=entry.text,
                    )
                )
                continue
            call_counter += 1
            call_id = f"c{call_counter}"
            events.append(
                TrajectoryEvent(
                    event_id=f"e{len(events) + 1}",
                    kind=EventKind.TOOL_CALL_START,
                    timestamp=stamp(),
                    tool_name=entry.tool_name,
                    call_id=call_id,
                    input={k: v.replace("{file}", file_name) for k, v in entry.input.items()},
                )
            )
            events.append(
                TrajectoryEvent(
                    event_id=f"e{len(events) + 1}",
                    kind=EventKind.TOOL_CALL_END,
                    timestamp=stamp(),
                    tool_name=entry.tool_name,
                    call_id=call_id,
                    output=entry.output.replace("{file}", file_name),
                    status=entry.status,
                )
            )
        return CrewResult(
            result_text=rule.result_text.replace("{file}", file_name),
            events=tuple(events),
        )


def _load_fixture_text(relative: str) -> str:
    return (resources.files("workflow_memory") / "fixtures" / relative).read_text(encoding="utf-8")


def rule_from_dict(obj: dict) -> MockCrewRule:
    return MockCrewRule(
        name=str(obj["name"]),
        keywords=frozenset(str(k).lower() for k in obj.get("keywords", [])),
        result_text=str(obj["result_text"]),
        script=tuple(
            ScriptEntry(
                kind=str(entry["kind"]),
                text=str(entry.get("text", "")),
                tool_name=str(entry.get("tool_name", "")),
                input={str(k): str(v) for k, v in (entry.get("input") or {}).items()},
                output=str(entry.get("output", "")),
                status=CallStatus(entry.get("status", "success")),
            )
            for entry in obj.get("script", [])
        ),
    )


def load_chemist_crew() -> MockCrew:
    """The packaged chemist fixture: crew description plus rule table."""
    description = CrewDescription.from_dict(json.loads(_load_fixture_text("crews/chemist.json")))
    rules_dir = resources.files("workflow_memory") / "fixtures" / "rules"
    rules = [
        rule_from_dict(json.loads(path.read_text(encoding="utf-8")))
        for path in sorted(rules_dir.iterdir(), key=lambda p: p.name)
        if path.name.endswith(".json")
    ]
    return MockCrew(description=description, rules=rules)


def chemist_mock_llm() -> ScriptedLLMClient:
    """Scripted suggestion replies for the chemist scenarios."""
    return ScriptedLLMClient(
        rules=[
            (
                lambda p: "PAST WORKFLOW" in p and "pfas_classify" in p,
                "1. Classify the extracted ingredients as PFAS\n"
                "2. Assess persistence, bioaccumulation and toxicity for any PFAS found\n"
                "3. Convert the ingredient table to Markdown",
            ),
            (
                lambda p: "PAST WORKFLOW" in p and "hazard_assess" in p,
                "1. Assess persistence, bioaccumulation and toxicity for the ingredients\n"
                "2. Convert the assessment results to Markdown",
            ),
            (
                lambda p: "PAST WORKFLOW" in p and "format_markdown" in p,
                "1. Convert the ingredient table to Markdown",
            ),
            (
                "PAST WORKFLOW",
                "1. Extract ingredients from another SDS or FMD file",
            ),
            (
                "CREW:",
                "1. Extract product information from an SDS or FMD file\n"
                "2. Classify extracted ingredients as PFAS\n"
                "3. Evaluate persistence, bioaccumulation and toxicity hazards",
            ),
        ]
    )


# Bootstrap workflow space: sds_extract always leads; each optional tool
# joins its chain slot with probability 1/2, then every slot picks one
# of two instruction phrasings. Draw order per workflow: the three
# inclusion draws (pfas, hazard, markdown), then one phrasing draw per
# slot in chain order.
_OPTIONAL_TOOLS = ("pfas_classify", "hazard_assess", "format_markdown")

INSTRUCTION_PHRASINGS: dict[str, tuple[str, str]] = {
    "sds_extract": (
        "Extract all ingredients of product.sds",
        "List the ingredients in product.sds",
    ),
    "pfas_classify": (
        "Classify the extracted ingredients as PFAS",
        "Which of the extracted ingredients are PFAS?",
    ),
    "hazard_assess": (
        "Assess the hazard of the PFAS ingredients",
        "Run a persistence, bioaccumulation and toxicity assessment",
    ),
    "format_markdown": (
        "Convert the ingredient table to Markdown",
        "Format the results as a Markdown table",
    ),
}

_BOOTSTRAP_EPOCH = datetime(2025, 1, 1, tzinfo=timezone.utc)


def _bootstrap_workflow(index: int, seed: int, rng: Random) -> Workflow:
    chain = ["sds_extract"]
    for tool in _OPTIONAL_TOOLS:
        if rng.random() < 0.5:
            chain.append(tool)
    steps: list[Step] = []
    for slot, tool in enumerate(chain):
        phrasing = INSTRUCTION_PHRASINGS[tool][rng.randrange(2)]
        input_map, output = TOOL_CALL_TEMPLATES[tool]
        call = call_step(f"s{2 * slot + 2}", tool, input_map, output)
        steps.append(instruction_step(f"s{2 * slot + 1}", phrasing, (call,)))
    return Workflow(
        workflow_id=f"wf-boot-{seed}-{index:04d}",
        steps=tuple(steps),
        created_at=_BOOTSTRAP_EPOCH + timedelta(seconds=index),
        source=WorkflowSource.BOOTSTRAP,
        tags=frozenset({"bootstrap"}),
    )


def bootstrap_memory(count: int, seed: int, store: WorkflowStore) -> list[str]:
    """Seed the store with generated memory workflows, deduplicated.

    Deterministic for a fixed (count, seed); returns one record id per
    generated workflow, repeating ids where deduplication collapsed
    duplicates.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = Random(seed)
    record_ids: list[str] = []
    for index in range(count):
        workflow = _bootstrap_workflow(index, seed, rng)
        record_ids.append(store.save(workflow, dedupe=True).record_id)
    return record_ids
