"""Episodic workflow memory and next-step suggestions for agent crews."""

from .embedding import HashingEmbedder, HttpEmbedder, cosine, make_embedder
from .llm import HttpLLMClient, LLMError, LLMReplyParseError, ScriptedLLMClient
from .model import (
    LeafSequence,
    Step,
    StepKind,
    Workflow,
    WorkflowDecodeError,
    WorkflowSource,
    call_step,
    deserialize,
    instruction_step,
    leaf_sequence,
    render_text,
    serialize,
    workflows_equal,
)
from .prov import ProvDecodeError, ProvDocument, from_prov, to_prov
from .retrieval import (
    RetrievalConfig,
    RetrievalMatch,
    best_window,
    retrieve,
    retrieve_oracle,
    step_similarity,
    window_score,
)
from .session import SessionGateway, TurnOutcome, is_save_command
from .store import DirectoryStore, InMemoryStore, MemoryRecord, RecordNotFoundError, SaveResult
from .suggest import (
    CrewDescription,
    SuggestionMode,
    SuggestionSet,
    build_fallback_prompt,
    build_memory_prompt,
    compose_response,
    generate,
)
from .trajectory import (
    CallStatus,
    EventKind,
    TrajectoryError,
    TrajectoryEvent,
    append_trajectory,
    compile_trajectory,
    read_jsonl,
    write_jsonl,
)

__version__ = "0.1.0"

__all__ = [
    "CallStatus",
    "CrewDescription",
    "DirectoryStore",
    "EventKind",
    "HashingEmbedder",
    "HttpEmbedder",
    "HttpLLMClient",
    "InMemoryStore",
    "LLMError",
    "LLMReplyParseError",
    "LeafSequence",
    "MemoryRecord",
    "ProvDecodeError",
    "ProvDocument",
    "RecordNotFoundError",
    "RetrievalConfig",
    "RetrievalMatch",
    "SaveResult",
    "ScriptedLLMClient",
    "SessionGateway",
    "Step",
    "StepKind",
    "SuggestionMode",
    "SuggestionSet",
    "TrajectoryError",
    "TrajectoryEvent",
    "TurnOutcome",
    "Workflow",
    "WorkflowDecodeError",
    "WorkflowSource",
    "append_trajectory",
    "best_window",
    "build_fallback_prompt",
    "build_memory_prompt",
    "call_step",
    "compile_trajectory",
    "compose_response",
    "cosine",
    "deserialize",
    "from_prov",
    "generate",
    "instruction_step",
    "is_save_command",
    "leaf_sequence",
    "make_embedder",
    "read_jsonl",
    "render_text",
    "retrieve",
    "retrieve_oracle",
    "serialize",
    "step_similarity",
    "to_prov",
    "window_score",
    "workflows_equal",
    "write_jsonl",
]
