"""HTTP facade: sessions, revisions, status mapping, persistence."""
import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore", DeprecationWarning)
    from fastapi.testclient import TestClient

from axiomforge.ontology import OntologyRegistry, OntologyWarehouse
from axiomforge.service import create_app

from conftest import FIXTURES, LOC, TC, expected, normalize_counter


@pytest.fixture
def client():
    registry = OntologyRegistry(OntologyWarehouse(FIXTURES / "warehouse"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        with TestClient(create_app(registry)) as c:
            yield c


@pytest.fixture
def loaded(client):
    client.post("/ontologies", json={"iri": TC}).raise_for_status()
    client.post("/ontologies", json={"iri": LOC}).raise_for_status()
    return client


def new_session(client):
    state = client.post("/axioms").json()
    return state["session"], state


def op(client, session, body, revision=None):
    if revision is not None:
        body = {**body, "revision": revision}
    return client.post(f"/axioms/{session}/ops", json=body)


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["ontologies"] == 1  # built-ins only


def test_load_ontology_summary(client):
    body = client.post("/ontologies", json={"iri": TC}).json()
    assert body["short_name"] == "trainConnection"
    assert body["concepts"] == 5 and body["relations"] == 1
    assert body["imports"] == [LOC]


def test_load_unknown_ontology_404(client):
    response = client.post("/ontologies", json={"iri": "http://no.such/thing"})
    assert response.status_code == 404
    assert response.json()["code"] == "NotInWarehouse"


def test_ontology_tree_endpoint(loaded):
    body = loaded.get("/ontologies").json()
    names = {entry["display"].split()[0] for entry in body["ontologies"]}
    assert {"trainConnection", "loc", "xsd"} <= names


def test_sessions_number_upwards(client):
    first, state = new_session(client)
    second, _ = new_session(client)
    assert (first, second) == ("ax1", "ax2")
    assert state["axiom_name"] == "autoGeneratedAxiom_1"
    assert state["revision"] == 0
    assert state["mode"] == "standard"
    assert [n["label"] for n in state["nodes"]] == ["Start"]
    assert state["outline"]["label"] == "(start)"
    assert state["can_undo"] is False and state["can_redo"] is False


def test_unknown_session_404(client):
    assert client.get("/axioms/ax99").status_code == 404


def test_apply_operation_advances_revision(loaded):
    session, _ = new_session(loaded)
    state = op(loaded, session, {
        "op": "create_variable", "args": {"concept": TC + "#trip"}}).json()
    assert state["revision"] == 1
    labels = [n["label"] for n in state["nodes"]]
    assert labels == ["Start", "?trip"]
    assert state["text"].rstrip().endswith("?trip memberOf trip.")


def test_stale_revision_conflict(loaded):
    session, _ = new_session(loaded)
    ok = op(loaded, session, {
        "op": "create_variable", "args": {"concept": TC + "#trip"}}, revision=0)
    assert ok.status_code == 200
    stale = op(loaded, session, {
        "op": "create_variable", "args": {"concept": TC + "#trip"}}, revision=0)
    assert stale.status_code == 409
    assert stale.json()["code"] == "StaleRevision"


def test_requests_without_revision_are_not_checked(loaded):
    session, _ = new_session(loaded)
    for _ in range(2):
        response = op(loaded, session, {
            "op": "create_variable", "args": {"concept": TC + "#trip"}})
        assert response.status_code == 200


def test_domain_error_mapping(loaded):
    session, _ = new_session(loaded)
    op(loaded, session, {"op": "create_variable", "args": {"concept": TC + "#trip"}})
    conflict = op(loaded, session, {
        "op": "refine_attribute",
        "args": {"node": 1, "attribute": "start",
                 "binding": {"kind": "new_var_of_concept",
                             "concept": TC + "#distance"}}})
    assert conflict.status_code == 409
    assert conflict.json()["code"] == "Incompatible"
    missing = op(loaded, session, {"op": "delete_node", "args": {"node": 55}})
    assert missing.status_code == 404
    garbage = op(loaded, session, {"op": "frobnicate", "args": {}})
    assert garbage.status_code == 422
    assert garbage.json()["code"] == "BadDocument"


def test_failed_op_keeps_revision(loaded):
    session, _ = new_session(loaded)
    op(loaded, session, {"op": "create_variable", "args": {"concept": TC + "#trip"}})
    op(loaded, session, {"op": "delete_node", "args": {"node": 55}})
    assert loaded.get(f"/axioms/{session}").json()["revision"] == 1


def test_slot_rows_reflect_completion(loaded):
    session, _ = new_session(loaded)
    state = op(loaded, session, {
        "op": "create_variable", "args": {"concept": TC + "#trainTrip"}}).json()
    var = state["nodes"][1]
    rows = {row["attr"]: row for row in var["slots"]}
    assert rows["start"]["inheritance"] == "overridden"
    assert rows["seat"]["inheritance"] == "own"
    assert rows["start"]["types"] == "trainConnection:station"
    state = op(loaded, session, {
        "op": "refine_attribute",
        "args": {"node": 1, "attribute": "seat",
                 "binding": {"kind": "literal_default", "value": "12A"}}}).json()
    rows = {row["attr"]: row for row in state["nodes"][1]["slots"]}
    assert rows["seat"]["bound"] is True and rows["seat"]["name"] == "seat"


def test_candidates_endpoint_encodes_bindings(loaded):
    session, _ = new_session(loaded)
    op(loaded, session, {"op": "create_variable", "args": {"concept": TC + "#trip"}})
    body = loaded.get(f"/axioms/{session}/candidates",
                      params={"target": "slot:1:duration"}).json()
    variants = {c["variant"]: c for c in body["enabled"]
                if c["op"] == "refine_attribute"}
    assert "literal_default" in variants
    [literal] = variants["literal_default"]["options"]
    assert literal["kind"] == "literal_default"
    # options round-trip: apply one as-is
    apply = op(loaded, session, {
        "op": "refine_attribute",
        "args": {"node": 1, "attribute": "duration", "binding": literal}})
    assert apply.status_code == 200


def test_candidates_on_canvas(loaded):
    session, _ = new_session(loaded)
    body = loaded.get(f"/axioms/{session}/candidates",
                      params={"target": "canvas"}).json()
    assert any(c["op"] == "create_variable" for c in body["enabled"])
    assert any(d["op"] == "undo" and d["code"] == "EmptyStack"
               for d in body["disabled"])


def test_candidates_bad_target(loaded):
    session, _ = new_session(loaded)
    response = loaded.get(f"/axioms/{session}/candidates",
                          params={"target": "bogus:stuff:here:x"})
    assert response.status_code == 422


def test_undo_redo_endpoints(loaded):
    session, _ = new_session(loaded)
    op(loaded, session, {"op": "create_variable", "args": {"concept": TC + "#trip"}})
    state = loaded.post(f"/axioms/{session}/undo", json={}).json()
    assert [n["label"] for n in state["nodes"]] == ["Start"]
    assert state["can_redo"] is True
    state = loaded.post(f"/axioms/{session}/redo", json={}).json()
    assert [n["label"] for n in state["nodes"]] == ["Start", "?trip"]
    empty = loaded.post(f"/axioms/{session}/redo", json={})
    assert empty.status_code == 409
    assert empty.json()["code"] == "EmptyStack"


def test_wsml_endpoint_is_plain_text(loaded):
    session, _ = new_session(loaded)
    op(loaded, session, {"op": "create_variable", "args": {"concept": TC + "#trip"}})
    response = loaded.get(f"/axioms/{session}/wsml")
    assert response.headers["content-type"].startswith("text/plain")
    assert normalize_counter(response.text) == \
        normalize_counter("axiom autoGeneratedAxiom_1\n"
                          "  nonFunctionalProperties\n"
                          '    dc:description hasValue '
                          '"Auto-generated axiom by Axiom Editor"\n'
                          "  endNonFunctionalProperties\n"
                          "  definedBy\n"
                          "    ?trip memberOf trip.\n")


def test_geometry_round_trip(loaded):
    session, _ = new_session(loaded)
    op(loaded, session, {"op": "create_variable", "args": {"concept": TC + "#trip"}})
    state = loaded.put(f"/axioms/{session}/geometry", json={
        "positions": {"1": {"x": 120, "y": 45.5}, "77": {"x": 0, "y": 0}}}).json()
    var = next(n for n in state["nodes"] if n["id"] == 1)
    assert (var["x"], var["y"]) == (120, 45.5)
    assert all(n["id"] != 77 for n in state["nodes"])


def test_persist_restore_cycle(loaded):
    session, _ = new_session(loaded)
    op(loaded, session, {"op": "create_variable", "args": {"concept": TC + "#trip"}})
    loaded.put(f"/axioms/{session}/geometry",
               json={"positions": {"1": {"x": 10, "y": 20}}})
    saved = loaded.put(f"/axioms/{session}/persist").json()
    assert saved["document"]["counter"] == 1
    restored = loaded.post("/axioms/restore", json=saved).json()
    assert restored["session"] != session
    assert restored["axiom_name"] == "autoGeneratedAxiom_1"
    var = next(n for n in restored["nodes"] if n["id"] == 1)
    assert (var["label"], var["x"], var["y"]) == ("?trip", 10, 20)


def test_restore_accepts_bare_document(loaded):
    session, _ = new_session(loaded)
    op(loaded, session, {"op": "create_variable", "args": {"concept": TC + "#trip"}})
    saved = loaded.put(f"/axioms/{session}/persist").json()
    restored = loaded.post("/axioms/restore", json=saved["document"])
    assert restored.status_code == 200


def test_restore_loads_required_ontologies():
    registry = OntologyRegistry(OntologyWarehouse(FIXTURES / "warehouse"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        with TestClient(create_app(registry)) as donor:
            donor.post("/ontologies", json={"iri": TC})
            session, _ = new_session(donor)
            op(donor, session, {"op": "create_variable",
                                "args": {"concept": TC + "#trip"}})
            saved = donor.put(f"/axioms/{session}/persist").json()
        fresh_registry = OntologyRegistry(OntologyWarehouse(FIXTURES / "warehouse"))
        with TestClient(create_app(fresh_registry)) as receiver:
            restored = receiver.post("/axioms/restore", json=saved)
            assert restored.status_code == 200
            assert TC in {o.iri for o in fresh_registry.ontologies.values()}


def test_restore_missing_ontology_422(loaded):
    session, _ = new_session(loaded)
    op(loaded, session, {"op": "create_variable", "args": {"concept": TC + "#trip"}})
    saved = loaded.put(f"/axioms/{session}/persist").json()
    registry = OntologyRegistry()  # no warehouse: nothing can be loaded
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        with TestClient(create_app(registry)) as receiver:
            response = receiver.post("/axioms/restore", json=saved)
            assert response.status_code == 422
            assert response.json()["code"] == "MissingOntology"


def test_restore_rejects_malformed_payloads(loaded):
    assert loaded.post("/axioms/restore", json={"document": 5}).status_code == 422
    assert loaded.post("/axioms/restore", json={"nope": 1}).status_code == 422


def test_restored_counter_steers_new_names(loaded):
    session, _ = new_session(loaded)  # counter 1
    saved = loaded.put(f"/axioms/{session}/persist").json()
    saved["document"]["counter"] = 7
    loaded.post("/axioms/restore", json=saved)
    _, state = new_session(loaded)
    number = int(state["axiom_name"].rsplit("_", 1)[1])
    assert number > 7


def test_sessions_are_isolated(loaded):
    a, _ = new_session(loaded)
    b, _ = new_session(loaded)
    op(loaded, a, {"op": "create_variable", "args": {"concept": TC + "#trip"}})
    state_b = loaded.get(f"/axioms/{b}").json()
    assert [n["label"] for n in state_b["nodes"]] == ["Start"]


def test_full_editing_story_over_http(loaded):
    session, _ = new_session(loaded)
    op(loaded, session, {"op": "create_variable", "args": {"concept": TC + "#trip"}})
    op(loaded, session, {
        "op": "refine_attribute",
        "args": {"node": 1, "attribute": "start",
                 "binding": {"kind": "new_var_of_concept",
                             "concept": TC + "#station"}}})
    state = op(loaded, session, {
        "op": "insert_operator",
        "args": {"connection": 1, "kind": "not"}}).json()
    operator = next(n for n in state["nodes"] if n["kind"] == "operator")
    assert operator["label"] == "NOT" and operator["valid"] is True
    assert "not" in state["text"]
    outline = state["outline"]
    assert outline["children"][0]["label"] == "NOT"
