"""Provenance-document form of a workflow.

Workflows are persisted as documents of entities (step inputs and
outputs), activities (the steps themselves) and relations between them,
in the spirit of the W3C PROV data model: activities `used` input
entities, output entities `wasGeneratedBy` activities, and consecutive
leaf activities are chained with `wasInformedBy` edges reflecting
execution order. Sub-step nesting is encoded by a `parent` attribute on
the child activity.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any

from .model import Step, StepKind, Workflow, WorkflowSource, leaf_sequence
from .timestamps import format_timestamp, parse_timestamp

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


class EntityType(str, Enum):
    INPUT_DATA = "input-data"
    OUTPUT_DATA = "output-data"


class RelationKind(str, Enum):
    USED = "used"
    WAS_GENERATED_BY = "wasGeneratedBy"
    WAS_INFORMED_BY = "wasInformedBy"


class ProvDecodeError(ValueError):
    """A provenance document is malformed or inconsistent."""


@dataclass(frozen=True)
class ProvEntity:
    id: str
    type: EntityType
    attributes: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class ProvActivity:
    id: str
    type: StepKind
    name: str = ""
    attributes: dict[str, str] = field(default_factory=dict)
    startTime: str = ""
    endTime: str = ""


@dataclass(frozen=True)
class ProvRelation:
    kind: RelationKind
    source: str
    target: str


@dataclass(frozen=True)
class ProvDocument:
    entities: tuple[ProvEntity, ...] = ()
    activities: tuple[ProvActivity, ...] = ()
    relations: tuple[ProvRelation, ...] = ()


def to_prov(w: Workflow) -> ProvDocument:
    """Map a workflow onto a provenance document.

    One activity per step with deterministic ids (`act:<step_id>`), one
    input entity per input key, one output entity per non-empty output,
    and a `wasInformedBy` chain over consecutive leaves.
    """
    entities: list[ProvEntity] = []
    activities: list[ProvActivity] = []
    relations: list[ProvRelation] = []
    stamp = format_timestamp(w.created_at)

    def visit(step: Step, parent: Step | None) -> None:
        act_id = f"act:{step.step_id}"
        attributes: dict[str, str] = {}
        if step.kind is StepKind.USER_INSTRUCTION:
            attributes["instruction"] = step.instruction
        if parent is not None:
            attributes["parent"] = parent.step_id
        activities.append(
            ProvActivity(
                id=act_id,
                type=step.kind,
                name=step.name,
                attributes=attributes,
                startTime=stamp,
                endTime=stamp,
            )
        )
        for key, value in step.input.items():
            ent_id = f"ent:{step.step_id}:in:{key}"
            entities.append(
                ProvEntity(id=ent_id, type=EntityType.INPUT_DATA, attributes={"key": key, "value": value})
            )
            relations.append(ProvRelation(kind=RelationKind.USED, source=act_id, target=ent_id))
        if step.output:
            ent_id = f"ent:{step.step_id}:out"
            entities.append(
                ProvEntity(id=ent_id, type=EntityType.OUTPUT_DATA, attributes={"value": step.output})
            )
            relations.append(
                ProvRelation(kind=RelationKind.WAS_GENERATED_BY, source=ent_id, target=act_id)
            )
        for child in step.sub_steps:
            visit(child, step)

    for step in w.steps:
        visit(step, None)

    leaves = leaf_sequence(w)
    for earlier, later in zip(leaves, leaves.leaves[1:]):
        relations.append(
            ProvRelation(
                kind=RelationKind.WAS_INFORMED_BY,
                source=f"act:{later.step_id}",
                target=f"act:{earlier.step_id}",
            )
        )
    return ProvDocument(tuple(entities), tuple(activities), tuple(relations))


def _strip_act(activity_id: str) -> str:
    return activity_id[4:] if activity_id.startswith("act:") else activity_id


def _check_chain_acyclic(doc: ProvDocument) -> None:
    edges: dict[str, list[str]] = {}
    for rel in doc.relations:
        if rel.kind is RelationKind.WAS_INFORMED_BY:
            edges.setdefault(rel.source, []).append(rel.target)
    visiting: set[str] = set()
    done: set[str] = set()

    def dfs(node: str) -> None:
        if node in done:
            return
        if node in visiting:
            raise ProvDecodeError(f"cyclic wasInformedBy chain through {node!r}")
        visiting.add(node)
        for nxt in edges.get(node, ()):
            dfs(nxt)
        visiting.discard(node)
        done.add(node)

    for node in list(edges):
        dfs(node)


def from_prov(d: ProvDocument) -> Workflow:
    """Reconstruct a workflow from a provenance document.

    Inverse of `to_prov` up to structural equality; workflow identity
    and timestamps are synthesized. Dangling relation ids and cyclic
    ordering chains are rejected.
    """
    entity_by_id = {e.id: e for e in d.entities}
    activity_by_id: dict[str, ProvActivity] = {}
    for act in d.activities:
        if act.id in activity_by_id:
            raise ProvDecodeError(f"duplicate activity id {act.id!r}")
        activity_by_id[act.id] = act

    used: dict[str, list[ProvEntity]] = {}
    generated: dict[str, ProvEntity] = {}
    for rel in d.relations:
        if rel.kind is RelationKind.USED:
            if rel.source not in activity_by_id:
                raise ProvDecodeError(f"used relation from unknown activity {rel.source!r}")
            if rel.target not in entity_by_id:
                raise ProvDecodeError(f"used relation to unknown entity {rel.target!r}")
            used.setdefault(rel.source, []).append(entity_by_id[rel.target])
        elif rel.kind is RelationKind.WAS_GENERATED_BY:
            if rel.source not in entity_by_id:
                raise ProvDecodeError(f"wasGeneratedBy relation from unknown entity {rel.source!r}")
            if rel.target not in activity_by_id:
                raise ProvDecodeError(f"wasGeneratedBy relation to unknown activity {rel.target!r}")
            generated[rel.target] = entity_by_id[rel.source]
        else:
            for end in (rel.source, rel.target):
                if end not in activity_by_id:
                    raise ProvDecodeError(f"wasInformedBy relation names unknown activity {end!r}")
    _check_chain_acyclic(d)

    children: dict[str, list[ProvActivity]] = {}
    top_level: list[ProvActivity] = []
    for act in d.activities:
        parent = act.attributes.get("parent", "")
        if parent:
            parent_act_id = f"act:{parent}" if f"act:{parent}" in activity_by_id else parent
            if parent_act_id not in activity_by_id:
                raise ProvDecodeError(f"activity {act.id!r} names unknown parent {parent!r}")
            children.setdefault(parent_act_id, []).append(act)
        else:
            top_level.append(act)

    built = 0

    def build(act: ProvActivity) -> Step:
        nonlocal built
        built += 1
        step_id = _strip_act(act.id)
        sub_steps = tuple(build(child) for child in children.get(act.id, ()))
        input_map: dict[str, str] = {}
        for entity in used.get(act.id, ()):
            input_map[entity.attributes.get("key", entity.id)] = entity.attributes.get("value", "")
        output_entity = generated.get(act.id)
        try:
            return Step(
                step_id=step_id,
                kind=act.type,
                name=act.name,
                instruction=act.attributes.get("instruction", ""),
                input=input_map,
                output=output_entity.attributes.get("value", "") if output_entity else "",
                sub_steps=sub_steps,
            )
        except ValueError as exc:
            raise ProvDecodeError(f"activity {act.id!r}: {exc}") from None

    steps = tuple(build(act) for act in top_level)
    if built != len(d.activities):
        raise ProvDecodeError("activities with unreachable parent chains")

    created_at = _EPOCH
    if d.activities and d.activities[0].startTime:
        try:
            created_at = parse_timestamp(d.activities[0].startTime)
        except ValueError as exc:
            raise ProvDecodeError(f"activity {d.activities[0].id!r}: {exc}") from None
    digest = hashlib.sha256(json.dumps(prov_to_dict(d), sort_keys=True).encode("utf-8"))
    try:
        return Workflow(
            workflow_id=f"wf-{digest.hexdigest()[:12]}",
            steps=steps,
            created_at=created_at,
            source=WorkflowSource.IMPORT,
        )
    except ValueError as exc:
        raise ProvDecodeError(str(exc)) from None


def prov_to_dict(d: ProvDocument) -> dict[str, Any]:
    return {
        "entities": [
            {"id": e.id, "type": e.type.value, "attributes": dict(e.attributes)} for e in d.entities
        ],
        "activities": [
            {
                "id": a.id,
                "type": a.type.value,
                "name": a.name,
                "attributes": dict(a.attributes),
                "startTime": a.startTime,
                "endTime": a.endTime,
            }
            for a in d.activities
        ],
        "relations": [
            {"kind": r.kind.value, "source": r.source, "target": r.target} for r in d.relations
        ],
    }


def prov_from_dict(obj: Any) -> ProvDocument:
    if not isinstance(obj, dict):
        raise ProvDecodeError(f"expected an object, got {type(obj).__name__}")
    try:
        entities = tuple(
            ProvEntity(
                id=str(e["id"]),
                type=EntityType(e["type"]),
                attributes={str(k): str(v) for k, v in (e.get("attributes") or {}).items()},
            )
            for e in obj.get("entities", [])
        )
        activities = tuple(
            ProvActivity(
                id=str(a["id"]),
                type=StepKind(a["type"]),
                name=str(a.get("name", "")),
                attributes={str(k): str(v) for k, v in (a.get("attributes") or {}).items()},
                startTime=str(a.get("startTime", "")),
                endTime=str(a.get("endTime", "")),
            )
            for a in obj.get("activities", [])
        )
        relations = tuple(
            ProvRelation(kind=RelationKind(r["kind"]), source=str(r["source"]), target=str(r["target"]))
            for r in obj.get("relations", [])
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ProvDecodeError(f"malformed provenance document: {exc}") from None
    return ProvDocument(entities, activities, relations)
