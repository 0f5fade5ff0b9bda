from __future__ import annotations

from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from workflow_memory import (
    DirectoryStore,
    InMemoryStore,
    ProvDecodeError,
    RecordNotFoundError,
    Workflow,
    call_step,
    from_prov,
    instruction_step,
    leaf_sequence,
    to_prov,
    workflows_equal,
)
from workflow_memory.prov import (
    ProvDocument,
    ProvRelation,
    RelationKind,
    prov_from_dict,
    prov_to_dict,
)

from generators import random_workflow

SEEDS = st.integers(min_value=0, max_value=10**9)


def nested_fixture() -> Workflow:
    return Workflow(
        workflow_id="wf-nested",
        steps=(
            instruction_step("s1", "extract then classify", (
                call_step("s2", "sds_extract", {"file": "a.sds"}, "table"),
                call_step("s3", "pfas_classify", {"ingredients": "x"}, "PFAS"),
            )),
            instruction_step("s4", "what is PFOA?"),
        ),
    )


# ---------------------------------------------------------------------------
# to_prov


def test_empty_workflow_empty_document():
    doc = to_prov(Workflow(workflow_id="w"))
    assert doc.activities == () and doc.entities == () and doc.relations == ()


def test_single_call_mapping_counts():
    w = Workflow(workflow_id="w", steps=(call_step("s1", "f", {"x": "1"}, "r"),))
    doc = to_prov(w)
    assert len(doc.activities) == 1
    assert len(doc.entities) == 2
    kinds = [r.kind for r in doc.relations]
    assert kinds.count(RelationKind.USED) == 1
    assert kinds.count(RelationKind.WAS_GENERATED_BY) == 1
    assert kinds.count(RelationKind.WAS_INFORMED_BY) == 0
    assert doc.activities[0].id == "act:s1"
    assert {e.id for e in doc.entities} == {"ent:s1:in:x", "ent:s1:out"}


def test_two_leaves_one_informed_by_edge():
    w = Workflow(workflow_id="w", steps=(call_step("s1", "f"), call_step("s2", "g")))
    doc = to_prov(w)
    informed = [r for r in doc.relations if r.kind is RelationKind.WAS_INFORMED_BY]
    assert len(informed) == 1
    assert (informed[0].source, informed[0].target) == ("act:s2", "act:s1")


@given(SEEDS)
@settings(max_examples=80)
def test_activity_and_chain_counts(seed):
    w = random_workflow(Random(seed), "w")
    doc = to_prov(w)
    assert len(doc.activities) == w.step_count
    informed = [r for r in doc.relations if r.kind is RelationKind.WAS_INFORMED_BY]
    assert len(informed) == max(0, len(leaf_sequence(w)) - 1)


# ---------------------------------------------------------------------------
# from_prov


def test_roundtrip_nested_fixture():
    w = nested_fixture()
    restored = from_prov(to_prov(w))
    assert workflows_equal(restored, w)
    assert restored.steps[0].sub_steps[0].input == {"file": "a.sds"}
    assert restored.steps[0].sub_steps[0].output == "table"


@given(SEEDS)
@settings(max_examples=100)
def test_roundtrip_random_workflows(seed):
    w = random_workflow(Random(seed), "w")
    assert workflows_equal(from_prov(to_prov(w)), w)


def test_roundtrip_through_json_dict():
    w = nested_fixture()
    doc = prov_from_dict(prov_to_dict(to_prov(w)))
    assert workflows_equal(from_prov(doc), w)


def test_dangling_relation_rejected():
    doc = to_prov(nested_fixture())
    broken = ProvDocument(
        entities=doc.entities,
        activities=doc.activities,
        relations=doc.relations + (ProvRelation(RelationKind.USED, "act:s1", "ent:ghost"),),
    )
    with pytest.raises(ProvDecodeError, match="ent:ghost"):
        from_prov(broken)


def test_cyclic_chain_rejected():
    doc = to_prov(Workflow(workflow_id="w", steps=(call_step("s1", "f"), call_step("s2", "g"))))
    cyclic = ProvDocument(
        entities=doc.entities,
        activities=doc.activities,
        relations=doc.relations + (ProvRelation(RelationKind.WAS_INFORMED_BY, "act:s1", "act:s2"),),
    )
    with pytest.raises(ProvDecodeError, match="cyclic"):
        from_prov(cyclic)


def test_unknown_parent_rejected():
    doc = to_prov(nested_fixture())
    activities = tuple(
        a if a.id != "act:s2" else type(a)(
            id=a.id, type=a.type, name=a.name,
            attributes={**a.attributes, "parent": "missing"},
            startTime=a.startTime, endTime=a.endTime,
        )
        for a in doc.activities
    )
    with pytest.raises(ProvDecodeError, match="missing"):
        from_prov(ProvDocument(doc.entities, activities, doc.relations))


# ---------------------------------------------------------------------------
# stores


@pytest.mark.parametrize("make_store", [InMemoryStore, lambda: None], ids=["memory", "directory"])
def test_save_scan_load(make_store, tmp_path):
    store = make_store() or DirectoryStore(tmp_path)
    w = nested_fixture()
    result = store.save(w)
    assert not result.duplicate
    records = store.scan()
    assert len(records) == 1
    assert workflows_equal(records[0].workflow, w)
    assert store.load(result.record_id).record_id == result.record_id


@pytest.mark.parametrize("make_store", [InMemoryStore, lambda: None], ids=["memory", "directory"])
def test_dedupe_returns_existing_record(make_store, tmp_path):
    store = make_store() or DirectoryStore(tmp_path)
    w = nested_fixture()
    first = store.save(w)
    again = store.save(w, dedupe=True)
    assert again.record_id == first.record_id
    assert again.duplicate
    assert len(store.scan()) == 1


def test_dedupe_distinguishes_function_names(tmp_path):
    store = DirectoryStore(tmp_path)
    first = store.save(Workflow(workflow_id="a", steps=(call_step("s1", "f"),)))
    second = store.save(Workflow(workflow_id="b", steps=(call_step("s1", "g"),)), dedupe=True)
    assert second.record_id != first.record_id
    assert not second.duplicate


def test_scan_returns_save_order(tmp_path):
    store = DirectoryStore(tmp_path)
    ids = [
        store.save(Workflow(workflow_id=f"w{i}", steps=(call_step("s1", f"f{i}"),))).record_id
        for i in range(3)
    ]
    assert [r.record_id for r in store.scan()] == ids


def test_load_unknown_record(tmp_path):
    store = DirectoryStore(tmp_path)
    with pytest.raises(RecordNotFoundError):
        store.load("rec-999999")


def test_directory_store_survives_reopen(tmp_path):
    w = nested_fixture()
    record_id = DirectoryStore(tmp_path).save(w).record_id
    reopened = DirectoryStore(tmp_path)
    assert [r.record_id for r in reopened.scan()] == [record_id]
    assert workflows_equal(reopened.load(record_id).workflow, w)


def test_directory_layout(tmp_path):
    store = DirectoryStore(tmp_path)
    result = store.save(nested_fixture())
    assert (tmp_path / "records" / f"{result.record_id}.json").exists()
    assert (tmp_path / "index.jsonl").exists()


def test_record_prov_roundtrips_after_reload(tmp_path):
    store = DirectoryStore(tmp_path)
    w = nested_fixture()
    record_id = store.save(w).record_id
    record = DirectoryStore(tmp_path).load(record_id)
    assert workflows_equal(from_prov(record.prov), record.workflow)
