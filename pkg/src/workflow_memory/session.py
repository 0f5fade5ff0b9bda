"""Per-session orchestration of the capture-retrieve-suggest loop.

Each chat turn follows the same path: the instruction is forwarded
verbatim to the domain crew, the returned trajectory is compiled and
appended to the session workflow, similar past workflows are retrieved,
an LLM proposes next steps (from memory when anything matched, from the
crew description otherwise), and the suggestions are concatenated after
the crew's unaltered result. Sessions live in memory; the workflow
store is the only durable state.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from .crew import CrewAdapter
from .embedding import EmbeddingProvider, HashingEmbedder
from .llm import LLMClient, LLMError
from .model import Workflow, WorkflowSource
from .retrieval import RetrievalConfig, RetrievalMatch, retrieve
from .store import SaveResult, WorkflowStore
from .suggest import (
    SUGGESTIONS_UNAVAILABLE_NOTICE,
    CrewDescription,
    SuggestionMode,
    SuggestionSet,
    build_fallback_prompt,
    build_memory_prompt,
    compose_response,
    generate,
)
from .timestamps import utc_now
from .trajectory import EventKind, TrajectoryEvent, append_trajectory

SAVE_COMMAND = "\\save"


class UnknownCrewError(KeyError):
    def __init__(self, crew_id: str):
        self.crew_id = crew_id
        super().__init__(f"no crew registered as {crew_id!r}")


class UnknownSessionError(KeyError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"no session {session_id!r}")


class EmptyWorkflowError(ValueError):
    pass


def is_save_command(text: str) -> bool:
    return text.strip() == SAVE_COMMAND


@dataclass
class TurnRecord:
    instruction: str
    crew_result: str
    suggestion_set: SuggestionSet | None
    composed_response: str


@dataclass
class SessionState:
    session_id: str
    crew_id: str
    current_workflow: Workflow
    turns: list[TurnRecord] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


@dataclass(frozen=True)
class TurnOutcome:
    response: str
    mode: str
    suggestions: tuple[str, ...]
    matches: tuple[RetrievalMatch, ...]


class SessionGateway:
    """Serves concurrent sessions; turns within one session serialize."""

    def __init__(
        self,
        store: WorkflowStore,
        crews: dict[str, CrewAdapter],
        llm: LLMClient,
        embedder: EmbeddingProvider | None = None,
        retrieval: RetrievalConfig | None = None,
    ):
        self.store = store
        self.crews = dict(crews)
        self.llm = llm
        self.embedder = embedder if embedder is not None else HashingEmbedder()
        self.retrieval = retrieval if retrieval is not None else RetrievalConfig()
        self._sessions: dict[str, SessionState] = {}
        self._registry_lock = threading.Lock()

    def create_session(self, crew_id: str) -> str:
        if crew_id not in self.crews:
            raise UnknownCrewError(crew_id)
        session_id = uuid.uuid4().hex[:12]
        state = SessionState(
            session_id=session_id,
            crew_id=crew_id,
            current_workflow=Workflow(
                workflow_id=f"wf-session-{session_id}",
                source=WorkflowSource.SESSION,
            ),
        )
        with self._registry_lock:
            self._sessions[session_id] = state
        return session_id

    def get_session(self, session_id: str) -> SessionState:
        with self._registry_lock:
            state = self._sessions.get(session_id)
        if state is None:
            raise UnknownSessionError(session_id)
        return state

    def crew_description(self, crew_id: str) -> CrewDescription:
        if crew_id not in self.crews:
            raise UnknownCrewError(crew_id)
        return self.crews[crew_id].describe()

    def handle_instruction(self, session_id: str, text: str) -> TurnOutcome:
        """Run one chat turn and return the composed response.

        The crew result always survives verbatim as a prefix of the
        response. Crew failures propagate and leave the session
        unchanged; LLM failures degrade to the crew result plus a
        fixed notice line, with the turn still recorded.
        """
        if is_save_command(text):
            raise ValueError("the save command is handled by handle_save")
        state = self.get_session(session_id)
        with state.lock:
            crew = self.crews[state.crew_id]
            instruction_event = TrajectoryEvent(
                event_id="e0",
                kind=EventKind.USER_INSTRUCTION,
                timestamp=utc_now(),
                text=text,
            )
            crew_out = crew.run(text)
            events = (instruction_event, *crew_out.events)
            workflow = append_trajectory(state.current_workflow, events)
            matches = tuple(retrieve(workflow, self.store, self.retrieval, self.embedder))
            if matches:
                mode = SuggestionMode.MEMORY
                prompt = build_memory_prompt(workflow, matches, self.store)
            else:
                mode = SuggestionMode.FALLBACK
                prompt = build_fallback_prompt(workflow, crew.describe())
            suggestion_set: SuggestionSet | None
            try:
                suggestion_set = generate(prompt, self.llm, mode)
                composed = compose_response(crew_out.result_text, suggestion_set)
            except LLMError:
                suggestion_set = None
                composed = crew_out.result_text + SUGGESTIONS_UNAVAILABLE_NOTICE
            state.current_workflow = workflow
            state.turns.append(
                TurnRecord(
                    instruction=text,
                    crew_result=crew_out.result_text,
                    suggestion_set=suggestion_set,
                    composed_response=composed,
                )
            )
            return TurnOutcome(
                response=composed,
                mode=mode.value,
                suggestions=suggestion_set.suggestions if suggestion_set else (),
                matches=matches,
            )

    def handle_save(self, session_id: str) -> SaveResult:
        """Persist the session workflow to episodic memory, deduplicated."""
        state = self.get_session(session_id)
        with state.lock:
            if state.current_workflow.is_empty:
                raise EmptyWorkflowError(
                    "this session has no workflow steps yet; nothing to save"
                )
            return self.store.save(state.current_workflow, dedupe=True)
