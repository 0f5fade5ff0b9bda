"""Durable episodic memory: saved workflows as provenance records.

The default backend is a single-directory document store, one JSON file
per record plus an append-only index, which keeps every record
inspectable with ordinary tools. An in-memory backend with the same
surface backs tests and embedding experiments. Both deduplicate by
action-structure equality, not byte identity.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterable, Protocol

from .model import Workflow, workflow_from_dict, workflow_to_dict, workflows_equal
from .prov import ProvDocument, prov_from_dict, prov_to_dict, to_prov
from .timestamps import format_timestamp, parse_timestamp, utc_now


class RecordNotFoundError(KeyError):
    def __init__(self, record_id: str):
        self.record_id = record_id
        super().__init__(f"no memory record {record_id!r}")


@dataclass(frozen=True)
class MemoryRecord:
    record_id: str
    workflow: Workflow
    prov: ProvDocument
    saved_at: datetime


@dataclass(frozen=True)
class SaveResult:
    record_id: str
    duplicate: bool


class WorkflowStore(Protocol):
    """Storage contract the retrieval and session layers depend on."""

    def save(self, w: Workflow, dedupe: bool = False) -> SaveResult: ...

    def scan(self) -> list[MemoryRecord]: ...

    def load(self, record_id: str) -> MemoryRecord: ...


def _find_duplicate(records: Iterable[MemoryRecord], w: Workflow) -> MemoryRecord | None:
    for record in records:
        if workflows_equal(record.workflow, w):
            return record
    return None


def _record_to_dict(record: MemoryRecord) -> dict:
    return {
        "record_id": record.record_id,
        "saved_at": format_timestamp(record.saved_at),
        "workflow": workflow_to_dict(record.workflow),
        "prov": prov_to_dict(record.prov),
    }


def _record_from_dict(obj: dict) -> MemoryRecord:
    return MemoryRecord(
        record_id=str(obj["record_id"]),
        workflow=workflow_from_dict(obj["workflow"]),
        prov=prov_from_dict(obj["prov"]),
        saved_at=parse_timestamp(obj["saved_at"]),
    )


class DirectoryStore:
    """One JSON file per record under `records/`, ordered by `index.jsonl`.

    Concurrent reads are safe; writes are serialized by an internal
    lock (single-writer contract).
    """

    def __init__(self, root: Path | str, clock: Callable[[], datetime] = utc_now):
        self.root = Path(root)
        self.records_dir = self.root / "records"
        self.index_path = self.root / "index.jsonl"
        self._clock = clock
        self._write_lock = threading.Lock()
        self.records_dir.mkdir(parents=True, exist_ok=True)
        if not self.index_path.exists():
            self.index_path.touch()

    def _index_ids(self) -> list[str]:
        ids: list[str] = []
        for line in self.index_path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                ids.append(str(json.loads(line)["record_id"]))
        return ids

    def save(self, w: Workflow, dedupe: bool = False) -> SaveResult:
        with self._write_lock:
            if dedupe:
                existing = _find_duplicate(self.scan(), w)
                if existing is not None:
                    return SaveResult(record_id=existing.record_id, duplicate=True)
            record = MemoryRecord(
                record_id=f"rec-{len(self._index_ids()) + 1:06d}",
                workflow=w,
                prov=to_prov(w),
                saved_at=self._clock(),
            )
            path = self.records_dir / f"{record.record_id}.json"
            path.write_text(
                json.dumps(_record_to_dict(record), ensure_ascii=False, indent=2) + "\n",
                encoding="utf-8",
            )
            with self.index_path.open("a", encoding="utf-8") as index:
                index.write(
                    json.dumps(
                        {"record_id": record.record_id, "saved_at": format_timestamp(record.saved_at)}
                    )
                    + "\n"
                )
            return SaveResult(record_id=record.record_id, duplicate=False)

    def scan(self) -> list[MemoryRecord]:
        return [self.load(record_id) for record_id in self._index_ids()]

    def load(self, record_id: str) -> MemoryRecord:
        path = self.records_dir / f"{record_id}.json"
        if not path.exists():
            raise RecordNotFoundError(record_id)
        return _record_from_dict(json.loads(path.read_text(encoding="utf-8")))


class InMemoryStore:
    """Volatile store with the same contract as `DirectoryStore`."""

    def __init__(self, clock: Callable[[], datetime] = utc_now):
        self._records: list[MemoryRecord] = []
        self._clock = clock
        self._write_lock = threading.Lock()

    def save(self, w: Workflow, dedupe: bool = False) -> SaveResult:
        with self._write_lock:
            if dedupe:
                existing = _find_duplicate(self._records, w)
                if existing is not None:
                    return SaveResult(record_id=existing.record_id, duplicate=True)
            record = MemoryRecord(
                record_id=f"rec-{len(self._records) + 1:06d}",
                workflow=w,
                prov=to_prov(w),
                saved_at=self._clock(),
            )
            self._records.append(record)
            return SaveResult(record_id=record.record_id, duplicate=False)

    def scan(self) -> list[MemoryRecord]:
        return list(self._records)

    def load(self, record_id: str) -> MemoryRecord:
        for record in self._records:
            if record.record_id == record_id:
                return record
        raise RecordNotFoundError(record_id)
