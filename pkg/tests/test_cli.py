"""Command line behavior: exit codes, output bytes, model documents."""
import json

import pytest

from axiomforge.cli import main

from conftest import FIXTURES, LOC, TC, corpus_path, expected, normalize_counter

WAREHOUSE = str(FIXTURES / "warehouse")
APPENDIX = str(FIXTURES / "appendix1.ops.json")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- validate ---------------------------------------------------------------

def test_validate_good_files(capsys):
    code, out, err = run(capsys, "validate",
                         str(corpus_path("concept_human")),
                         str(corpus_path("instance_mary")))
    assert code == 0 and err == ""
    assert out.count(": ok") == 2


def test_validate_reports_position_and_exits_1(capsys, tmp_path):
    bad = tmp_path / "bad.wsml"
    bad.write_text("concept human\n  name ofType ofType\n")
    code, out, err = run(capsys, "validate", str(bad))
    assert code == 1
    assert f"{bad}:2:" in err


def test_validate_unsupported_construct(capsys):
    target = FIXTURES / "corpus" / "unsupported" / "quantified_axiom.wsml"
    code, _, err = run(capsys, "validate", str(target))
    assert code == 1
    assert "unsupported construct 'forAll'" in err
    assert ":3:5" in err


def test_validate_keeps_going_after_a_failure(capsys, tmp_path):
    bad = tmp_path / "bad.wsml"
    bad.write_text("concept ]")
    code, out, err = run(capsys, "validate", str(bad),
                         str(corpus_path("ontology_header")))
    assert code == 1
    assert "ontology_header.wsml: ok" in out


def test_validate_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", str(tmp_path / "absent.wsml"))
    assert code == 2
    assert "cannot read" in err


# --- tree -------------------------------------------------------------------

def test_tree_letters_and_markers(capsys):
    code, out, _ = run(capsys, "tree", "--warehouse", WAREHOUSE, TC, LOC)
    assert code == 0
    lines = out.splitlines()
    assert any(l.strip() == "C trip" for l in lines)
    assert any(l.strip().startswith("@ start") for l in lines)
    assert any("(overridden)" in l for l in lines)
    assert any("(inherited)" in l for l in lines)
    assert any(l.strip() == "I innsbruckHbf" for l in lines)
    assert any(l.strip().startswith("R equalDistance") for l in lines)
    assert any(l.strip().startswith("p d1") for l in lines)


def test_tree_marks_unloaded_supers(capsys):
    # only the travel ontology: its declared loc supers stay stubs
    code, out, _ = run(capsys, "tree", "--warehouse", WAREHOUSE, TC)
    assert code == 0
    assert "[unloaded]" in out


def test_tree_env_var_warehouse(capsys, monkeypatch):
    monkeypatch.setenv("AXIOM_WAREHOUSE", WAREHOUSE)
    code, out, _ = run(capsys, "tree", TC)
    assert code == 0 and "trainConnection" in out


def test_tree_without_warehouse_is_usage_error(capsys, monkeypatch):
    monkeypatch.delenv("AXIOM_WAREHOUSE", raising=False)
    code, _, err = run(capsys, "tree", TC)
    assert code == 2
    assert "AXIOM_WAREHOUSE" in err


def test_tree_loads_plain_files(capsys):
    code, out, _ = run(capsys, "tree", "--warehouse", WAREHOUSE,
                       str(FIXTURES / "warehouse" / "locations.wsml"))
    assert code == 0
    assert "C location" in out


# --- replay -----------------------------------------------------------------

def test_replay_matches_reference_bytes(capsys):
    code, out, err = run(capsys, "replay", APPENDIX, "--warehouse", WAREHOUSE)
    assert (code, err) == (0, "")
    assert normalize_counter(out) == normalize_counter(expected("appendix1_final"))


@pytest.mark.parametrize("step", [2, 12, 27])
def test_replay_at_step(capsys, step):
    code, out, _ = run(capsys, "replay", APPENDIX, "--warehouse", WAREHOUSE,
                       "--at-step", str(step))
    assert code == 0
    assert normalize_counter(out) == \
        normalize_counter(expected(f"appendix1_step{step}"))


def test_replay_output_file(capsys, tmp_path):
    target = tmp_path / "axiom.wsml"
    code, out, _ = run(capsys, "replay", APPENDIX, "--warehouse", WAREHOUSE,
                       "-o", str(target))
    assert code == 0 and out == ""
    assert normalize_counter(target.read_text()) == \
        normalize_counter(expected("appendix1_final"))


def test_replay_failure_names_op_and_step(capsys, tmp_path):
    script = tmp_path / "broken.json"
    script.write_text(json.dumps({"ops": [
        {"step": 1, "op": "load_ontology",
         "iri": "http://www.example.org/travel/loc"},
        {"step": 1, "op": "load_ontology",
         "iri": "http://www.example.org/travel/trainConnection"},
        {"step": 1, "op": "create_variable", "concept": "trip", "as": "t"},
        {"step": 2, "op": "refine_attribute", "var": "t", "attribute": "start",
         "binding": {"kind": "new_var_of_concept", "concept": "distance"}},
    ]}))
    code, _, err = run(capsys, "replay", str(script), "--warehouse", WAREHOUSE)
    assert code == 1
    assert "op 3 (step 2)" in err
    assert "Incompatible" in err


def test_replay_bad_script_shape(capsys, tmp_path):
    script = tmp_path / "broken.json"
    script.write_text("[1, 2, 3]")
    code, _, err = run(capsys, "replay", str(script), "--warehouse", WAREHOUSE)
    assert code == 1
    assert "ops" in err


def test_replay_save_and_continue(capsys, tmp_path):
    saved = tmp_path / "model.json"
    first = tmp_path / "first.json"
    first.write_text(json.dumps({"ops": [
        {"op": "load_ontology",
         "iri": "http://www.example.org/travel/trainConnection"},
        {"op": "create_variable", "concept": "trip", "as": "t"},
        {"op": "refine_attribute", "var": "t", "attribute": "start",
         "binding": {"kind": "new_var_of_concept", "concept": "station"}},
    ]}))
    code, _, _ = run(capsys, "replay", str(first), "--warehouse", WAREHOUSE,
                     "--save-model", str(saved))
    assert code == 0
    document = json.loads(saved.read_text())
    assert document["mode"] == "standard"
    assert {"nodes", "connections"} <= set(document["model"])

    second = tmp_path / "second.json"
    second.write_text(json.dumps({"ops": [
        {"op": "rename", "target": {"node": 2}, "name": "origin"},
    ]}))
    code, out, _ = run(capsys, "replay", str(second), "--warehouse", WAREHOUSE,
                       "--load-model", str(saved))
    assert code == 0
    assert "?origin memberOf station" in out
    # the rename flows into the owning molecule's bracket too
    assert "start hasValue ?origin" in out


def test_replay_negation_flavor_flag(capsys, tmp_path):
    script = tmp_path / "neg.json"
    script.write_text(json.dumps({"ops": [
        {"op": "load_ontology",
         "iri": "http://www.example.org/travel/trainConnection"},
        {"op": "create_variable", "concept": "trip", "as": "t"},
        {"op": "insert_operator", "connection": {"source": "root"},
         "kind": "not"},
    ]}))
    code, out, _ = run(capsys, "replay", str(script), "--warehouse", WAREHOUSE,
                       "--negation-flavor", "naf")
    assert code == 0 and "naf" in out


# --- export-capability ------------------------------------------------------

def capability_spec(tmp_path, sections):
    spec = tmp_path / "capability.json"
    spec.write_text(json.dumps({"sections": sections}))
    return str(spec)


TRIP_OPS = [{"op": "load_ontology",
             "iri": "http://www.example.org/travel/trainConnection"},
            {"op": "create_variable", "concept": "trip", "as": "t"},
            {"op": "refine_attribute", "var": "t", "attribute": "start",
             "binding": {"kind": "new_var_of_concept", "concept": "station"}}]


def test_export_capability_inline_ops(capsys, tmp_path):
    spec = capability_spec(tmp_path, [
        {"kind": "precondition", "description": "trip with a start",
         "shared_variables": ["trip"], "ops": TRIP_OPS},
        {"kind": "effect", "ops": [
            {"op": "load_ontology",
             "iri": "http://www.example.org/travel/trainConnection"},
            {"op": "create_variable", "concept": "itinerary"}]},
    ])
    code, out, err = run(capsys, "export-capability", spec,
                         "--warehouse", WAREHOUSE)
    assert (code, err) == (0, "")
    assert out.startswith("capability\n  sharedVariables ?trip\n  precondition\n")
    assert out.index("precondition") < out.index("effect")
    assert '?itinerary memberOf itinerary.' in out


def test_export_capability_script_reference(capsys, tmp_path):
    (tmp_path / "pre.json").write_text(json.dumps({"ops": TRIP_OPS}))
    spec = capability_spec(tmp_path, [
        {"kind": "assumption", "script": "pre.json"}])
    code, out, _ = run(capsys, "export-capability", spec,
                       "--warehouse", WAREHOUSE)
    assert code == 0
    assert "assumption" in out and "?trip memberOf trip" in out


def test_export_capability_empty_sections(capsys, tmp_path):
    spec = capability_spec(tmp_path, [])
    code, _, err = run(capsys, "export-capability", spec,
                       "--warehouse", WAREHOUSE)
    assert code == 2
    assert "no capability sections" in err


def test_export_capability_bad_kind(capsys, tmp_path):
    spec = capability_spec(tmp_path, [{"kind": "precondishun", "ops": []}])
    code, _, err = run(capsys, "export-capability", spec,
                       "--warehouse", WAREHOUSE)
    assert code == 1
    assert "precondishun" in err


def test_export_capability_invalid_json(capsys, tmp_path):
    spec = tmp_path / "broken.json"
    spec.write_text("{{{{")
    code, _, err = run(capsys, "export-capability", str(spec),
                       "--warehouse", WAREHOUSE)
    assert code == 1
    assert "not valid JSON" in err


# --- serve ------------------------------------------------------------------

def test_serve_rejects_bad_listen(capsys):
    code, _, err = run(capsys, "serve", "--listen", "nonsense",
                       "--warehouse", WAREHOUSE)
    assert code == 2
    assert "host:port" in err
