"""Next-step suggestion prompts and response composition.

Two prompt shapes: a memory prompt built from retrieved past workflows,
and a fallback prompt built from the crew's capability description when
nothing similar was found. The crew's own result is never regenerated
or rephrased; suggestions are appended after a fixed separator so the
original answer survives byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .llm import LLMClient, LLMReplyParseError
from .model import Workflow, render_text
from .retrieval import RetrievalMatch
from .store import WorkflowStore

SUGGESTION_SEPARATOR = "\n\n--- Suggested next steps ---\n"
SUGGESTIONS_UNAVAILABLE_NOTICE = "\n\n--- Suggestions unavailable ---"
NO_STEPS_MARKER = "(no steps yet)"
MAX_SUGGESTIONS = 5

_NUMBERED_LINE = re.compile(r"^\s*\d+[.)]\s*(.*\S)\s*$")

_MEMORY_HEADER = (
    "You are assisting a user who is building a workflow step by step.\n"
    "Based on similar past workflows, suggest up to 3 plausible next steps\n"
    "for the current workflow. Suggest only; do not execute anything."
)
_FALLBACK_HEADER = (
    "You are assisting a user who is building a workflow step by step.\n"
    "No similar past workflows were found. Based on the crew's capabilities,\n"
    "suggest up to 3 plausible next steps for the current workflow. Suggest\n"
    "only; do not execute anything."
)
_FOOTER = "Reply with a numbered list of the suggested next steps and nothing else."


class SuggestionMode(str, Enum):
    MEMORY = "memory"
    FALLBACK = "fallback"


@dataclass(frozen=True)
class SuggestionSet:
    mode: SuggestionMode
    suggestions: tuple[str, ...]
    prompt_used: str


@dataclass(frozen=True)
class ToolDescription:
    name: str
    description: str


@dataclass(frozen=True)
class AgentDescription:
    role: str
    description: str
    tools: tuple[ToolDescription, ...] = ()


@dataclass(frozen=True)
class CrewDescription:
    name: str
    agents: tuple[AgentDescription, ...] = ()

    def __post_init__(self) -> None:
        names = [tool.name for agent in self.agents for tool in agent.tools]
        if len(names) != len(set(names)):
            raise ValueError(f"crew {self.name!r} has duplicate tool names")

    @staticmethod
    def from_dict(obj: dict) -> CrewDescription:
        return CrewDescription(
            name=str(obj["name"]),
            agents=tuple(
                AgentDescription(
                    role=str(agent["role"]),
                    description=str(agent.get("description", "")),
                    tools=tuple(
                        ToolDescription(name=str(t["name"]), description=str(t.get("description", "")))
                        for t in agent.get("tools", [])
                    ),
                )
                for agent in obj.get("agents", [])
            ),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "agents": [
                {
                    "role": agent.role,
                    "description": agent.description,
                    "tools": [{"name": t.name, "description": t.description} for t in agent.tools],
                }
                for agent in self.agents
            ],
        }


def _current_block(current: Workflow) -> str:
    return "CURRENT WORKFLOW:\n" + (render_text(current) or NO_STEPS_MARKER)


def build_memory_prompt(
    current: Workflow,
    matches: Sequence[RetrievalMatch],
    store: WorkflowStore,
) -> str:
    """Prompt pairing the current workflow with each retrieved one."""
    if not matches:
        raise ValueError("memory prompt needs at least one retrieval match")
    parts = [_MEMORY_HEADER, _current_block(current)]
    for match in matches:
        record = store.load(match.record_id)
        parts.append(f"PAST WORKFLOW (score={match.score:.2f}):\n" + render_text(record.workflow))
    parts.append(_FOOTER)
    return "\n\n".join(parts)


def build_fallback_prompt(current: Workflow, crew: CrewDescription) -> str:
    """Prompt describing what the crew can do, for cold-start sessions."""
    lines = [f"CREW: {crew.name}"]
    for agent in crew.agents:
        lines.append(f"AGENT: {agent.role}")
        if agent.description:
            lines.append(f"  {agent.description}")
        for tool in agent.tools:
            lines.append(f"  TOOL: {tool.name}: {tool.description}")
    return "\n\n".join([_FALLBACK_HEADER, "\n".join(lines), _current_block(current), _FOOTER])


def parse_numbered_list(reply: str) -> list[str]:
    """Extract `N.` / `N)` items from a reply, ignoring surrounding prose."""
    items: list[str] = []
    for line in reply.splitlines():
        found = _NUMBERED_LINE.match(line)
        if found:
            items.append(found.group(1))
    return items


def generate(prompt: str, llm: LLMClient, mode: SuggestionMode) -> SuggestionSet:
    """Run the prompt and parse the reply into at most 5 suggestions."""
    reply = llm.complete(prompt)
    items = parse_numbered_list(reply)
    if not items:
        raise LLMReplyParseError("reply contains no numbered suggestion list", reply)
    return SuggestionSet(
        mode=mode,
        suggestions=tuple(items[:MAX_SUGGESTIONS]),
        prompt_used=prompt,
    )


def compose_response(crew_result: str, s: SuggestionSet) -> str:
    """Append numbered suggestions after the crew result, verbatim.

    The crew result is never altered; with no suggestions it is
    returned unchanged, without the separator.
    """
    if not s.suggestions:
        return crew_result
    numbered = "\n".join(f"{i}. {text}" for i, text in enumerate(s.suggestions, start=1))
    return crew_result + SUGGESTION_SEPARATOR + numbered
