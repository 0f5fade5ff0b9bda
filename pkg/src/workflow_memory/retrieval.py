"""Similarity search over stored workflows.

The current workflow's leaf sequence is slid across every stored
workflow's leaf sequence; a window matches when the mean per-step
similarity clears a strict threshold. Function calls compare by name
(match or no match), instruction steps by cosine similarity of their
text embeddings, so runs of identical tool calls dominate the score
while tool-free steps still contribute. Records structurally equal to
the query are excluded outright: a workflow the user has already
executed verbatim suggests nothing new.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .embedding import EmbeddingProvider, cosine
from .model import LeafSequence, Step, StepKind, Workflow, leaf_sequence, workflows_equal
from .store import MemoryRecord, WorkflowStore

DEFAULT_THRESHOLD = 0.65
DEFAULT_MAX_RESULTS = 10


class WindowMode(str, Enum):
    CONTIGUOUS = "contiguous"


@dataclass(frozen=True)
class RetrievalConfig:
    threshold: float = DEFAULT_THRESHOLD
    max_results: int = DEFAULT_MAX_RESULTS
    window_mode: WindowMode = WindowMode.CONTIGUOUS

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.max_results < 1:
            raise ValueError(f"max_results must be >= 1, got {self.max_results}")


@dataclass(frozen=True)
class RetrievalMatch:
    """A stored workflow whose leaves contain a window similar to the query.

    `window_start`/`window_end` index the matched half-open window in
    the memory workflow's leaf sequence; `continuation` holds the
    leaves after the window, the raw material for suggestions.
    """

    record_id: str
    score: float
    window_start: int
    window_end: int
    continuation: tuple[Step, ...]


class _CachingEmbedder:
    """Per-retrieval embed cache so each distinct text is hashed once."""

    def __init__(self, inner: EmbeddingProvider):
        self.inner = inner
        self.dimension = inner.dimension
        self._cache: dict[str, np.ndarray] = {}

    def embed(self, text: str) -> np.ndarray:
        vector = self._cache.get(text)
        if vector is None:
            vector = self.inner.embed(text)
            self._cache[text] = vector
        return vector


def step_similarity(a: Step, b: Step, embedder: EmbeddingProvider) -> float:
    """Pairwise leaf similarity in [0, 1].

    Function calls match on name only; instructions compare embedded
    text with negative cosines clamped to zero; mixed kinds never match.
    """
    if a.sub_steps or b.sub_steps:
        raise ValueError("step_similarity compares leaf steps only")
    if a.kind is not b.kind:
        return 0.0
    if a.kind is StepKind.FUNCTION_CALL:
        return 1.0 if a.name == b.name else 0.0
    return min(1.0, max(0.0, cosine(embedder.embed(a.instruction), embedder.embed(b.instruction))))


def window_score(
    current: LeafSequence | Sequence[Step],
    window: LeafSequence | Sequence[Step],
    embedder: EmbeddingProvider,
) -> float:
    """Mean of the aligned per-step similarities."""
    current = list(current)
    window = list(window)
    if not current:
        raise ValueError("cannot score an empty query sequence")
    if len(window) != len(current):
        raise ValueError(f"window length {len(window)} != query length {len(current)}")
    similarities = [step_similarity(a, b, embedder) for a, b in zip(current, window)]
    return sum(similarities) / len(similarities)


def best_window(
    current: LeafSequence | Sequence[Step],
    memory: LeafSequence | Sequence[Step],
    embedder: EmbeddingProvider,
) -> tuple[float, int] | None:
    """Highest-scoring contiguous window of `memory` aligned to `current`.

    Ties break toward the smallest start index. None when the query is
    empty or longer than the memory sequence.
    """
    current = list(current)
    memory = list(memory)
    if not current or len(memory) < len(current):
        return None
    best: tuple[float, int] | None = None
    for start in range(len(memory) - len(current) + 1):
        score = window_score(current, memory[start : start + len(current)], embedder)
        if best is None or score > best[0]:
            best = (score, start)
    return best


def _ranked(matches: list[tuple[MemoryRecord, RetrievalMatch]]) -> list[RetrievalMatch]:
    ordered = sorted(
        matches,
        key=lambda pair: (-pair[1].score, -pair[0].saved_at.timestamp(), pair[1].record_id),
    )
    return [match for _, match in ordered]


def retrieve(
    current: Workflow,
    store: WorkflowStore,
    cfg: RetrievalConfig | None = None,
    embedder: EmbeddingProvider | None = None,
) -> list[RetrievalMatch]:
    """Ranked stored workflows containing a window similar to `current`.

    Only scores strictly above the threshold qualify; exact structural
    duplicates of the query are excluded; results are ordered by score,
    then recency, then record id, and capped at `max_results`.
    """
    if cfg is None:
        cfg = RetrievalConfig()
    if embedder is None:
        from .embedding import HashingEmbedder

        embedder = HashingEmbedder()
    current_leaves = leaf_sequence(current)
    if not current_leaves:
        return []
    cached = _CachingEmbedder(embedder)
    matches: list[tuple[MemoryRecord, RetrievalMatch]] = []
    for record in store.scan():
        if workflows_equal(record.workflow, current):
            continue
        memory_leaves = leaf_sequence(record.workflow)
        found = best_window(current_leaves, memory_leaves, cached)
        if found is None:
            continue
        score, start = found
        if score <= cfg.threshold:
            continue
        end = start + len(current_leaves)
        matches.append(
            (
                record,
                RetrievalMatch(
                    record_id=record.record_id,
                    score=score,
                    window_start=start,
                    window_end=end,
                    continuation=tuple(memory_leaves.leaves[end:]),
                ),
            )
        )
    return _ranked(matches)[: cfg.max_results]


def retrieve_oracle(
    current: Workflow,
    records: Sequence[MemoryRecord],
    cfg: RetrievalConfig | None = None,
    embedder: EmbeddingProvider | None = None,
) -> list[RetrievalMatch]:
    """Brute-force reference for `retrieve`: every record, every window,
    every pair, no caching, no pruning. Exists purely as the
    differential-testing baseline and must agree with `retrieve`
    byte for byte.
    """
    if cfg is None:
        cfg = RetrievalConfig()
    if embedder is None:
        from .embedding import HashingEmbedder

        embedder = HashingEmbedder()
    query = list(leaf_sequence(current))
    if not query:
        return []
    candidates: list[tuple[MemoryRecord, RetrievalMatch]] = []
    for record in records:
        if workflows_equal(record.workflow, current):
            continue
        leaves = list(leaf_sequence(record.workflow))
        if len(leaves) < len(query):
            continue
        windows: list[tuple[float, int]] = []
        for start in range(len(leaves) - len(query) + 1):
            sims: list[float] = []
            for a, b in zip(query, leaves[start : start + len(query)]):
                if a.kind is not b.kind:
                    sims.append(0.0)
                elif a.kind is StepKind.FUNCTION_CALL:
                    sims.append(1.0 if a.name == b.name else 0.0)
                else:
                    sims.append(
                        min(1.0, max(0.0, cosine(embedder.embed(a.instruction), embedder.embed(b.instruction))))
                    )
            windows.append((sum(sims) / len(sims), start))
        score, start = max(windows, key=lambda pair: (pair[0], -pair[1]))
        if score <= cfg.threshold:
            continue
        end = start + len(query)
        candidates.append(
            (
                record,
                RetrievalMatch(
                    record_id=record.record_id,
                    score=score,
                    window_start=start,
                    window_end=end,
                    continuation=tuple(leaves[end:]),
                ),
            )
        )
    ordered = sorted(
        candidates,
        key=lambda pair: (-pair[1].score, -pair[0].saved_at.timestamp(), pair[1].record_id),
    )
    return [match for _, match in ordered][: cfg.max_results]
