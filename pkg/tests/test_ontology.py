"""Warehouse scanning, on-demand loading, completion, short names, subsumption."""
import pytest

from axiomforge.errors import (
    DirectoryNotFound, DuplicateIri, NotInWarehouse, UnresolvedStub,
)
from axiomforge.ontology import (
    InheritanceKind, OntologyRegistry, OntologyWarehouse, TypeRef, TypeRefKind,
    make_type_ref,
)

from conftest import FIXTURES, LOC, TC

XSD = "http://www.w3.org/2001/XMLSchema"


# --- warehouse -------------------------------------------------------------

def test_warehouse_indexes_by_declared_iri(warehouse):
    assert set(warehouse.list_iris()) == {LOC, TC}


def test_warehouse_lookup_unknown(warehouse):
    with pytest.raises(NotInWarehouse):
        warehouse.lookup("http://www.example.org/absent")


def test_warehouse_missing_directory():
    with pytest.raises(DirectoryNotFound):
        OntologyWarehouse(FIXTURES / "no_such_dir")


def test_warehouse_duplicate_iri(tmp_path):
    (tmp_path / "a.wsml").write_text('ontology _"http://dup"\nconcept a\n')
    (tmp_path / "b.wsml").write_text('ontology _"http://dup"\nconcept b\n')
    with pytest.raises(DuplicateIri):
        OntologyWarehouse(tmp_path)


def test_warehouse_skips_unparseable(tmp_path):
    (tmp_path / "good.wsml").write_text('ontology _"http://good"\nconcept a\n')
    (tmp_path / "bad.wsml").write_text("concept forAll ..... nonsense [[")
    warehouse = OntologyWarehouse(tmp_path)
    assert warehouse.list_iris() == ["http://good"]
    assert any("bad.wsml" in entry for entry in warehouse.warnings)


# --- registry / loading ----------------------------------------------------

def test_builtin_embedded_with_fixed_short_name(registry):
    assert registry.ontologies[XSD].short_name == "xsd"
    assert registry.find_concept(XSD + "#string") is not None


def test_load_is_idempotent(registry):
    first = registry.load_ontology_by_iri(LOC)
    again = registry.load_ontology_by_iri(LOC)
    assert first is again


def test_short_name_from_last_iri_segment(travel_registry):
    assert travel_registry.ontologies[LOC].short_name == "loc"
    assert travel_registry.ontologies[TC].short_name == "trainConnection"


def test_short_name_collision_numbered(misc_registry):
    first = misc_registry.load_ontology_by_iri("http://www.example.org/ontologies/dateTime")
    second = misc_registry.load_ontology_by_iri("http://www.example.org/repository/dateTime")
    assert first.short_name == "dateTime"
    assert second.short_name == "dateTime1"


def test_display_name_qualified(travel_registry):
    assert travel_registry.display_name(TC + "#trip") == "trainConnection:trip"
    assert travel_registry.display_name(XSD + "#float") == "xsd:float"


def test_unknown_iri_not_in_warehouse(registry):
    with pytest.raises(NotInWarehouse):
        registry.load_ontology_by_iri("http://www.example.org/absent")


# --- attribute completion --------------------------------------------------

def test_own_attributes_in_declaration_order(travel_registry):
    effective = travel_registry.effective_attributes(TC + "#trip")
    assert [a.name for a in effective] == [
        "start", "end", "via", "departure", "arrival", "duration", "distance"]
    assert all(a.inheritance is InheritanceKind.OWN for a in effective)


def test_override_keeps_declaration_order(travel_registry):
    effective = travel_registry.effective_attributes(TC + "#trainTrip")
    assert [a.name for a in effective] == [
        "start", "via", "seat", "train", "class", "departure", "arrival",
        "duration", "distance", "end"]
    by_name = {a.name: a for a in effective}
    assert by_name["start"].inheritance is InheritanceKind.OVERRIDDEN
    assert by_name["seat"].inheritance is InheritanceKind.OWN
    # the override replaces the inherited type
    assert by_name["start"].definition.type_constraints[0].iri == TC + "#station"


def test_inherited_across_ontologies(travel_registry):
    effective = travel_registry.effective_attributes(TC + "#station")
    by_name = {a.name: a for a in effective}
    assert by_name["code"].inheritance is InheritanceKind.INHERITED
    assert by_name["code"].declared_in == LOC + "#location"


def test_stub_super_contributes_nothing_until_loaded(registry):
    registry.load_ontology_by_iri(TC)
    before = registry.effective_attributes(TC + "#station")
    assert [a.name for a in before] == ["borderToCountry"]
    registry.load_ontology_by_iri(LOC)
    after = registry.effective_attributes(TC + "#station")
    assert [a.name for a in after] == ["borderToCountry", "code"]


def test_multi_super_merge_conjoins_types(tmp_path):
    (tmp_path / "m.wsml").write_text(
        'ontology _"http://m"\n'
        "concept a\n  x ofType ta\n"
        "concept b\n  x ofType tb\n"
        "concept c subConceptOf {a, b}\n"
        "concept ta\nconcept tb\n"
    )
    registry = OntologyRegistry(OntologyWarehouse(tmp_path))
    registry.load_ontology_by_iri("http://m")
    effective = registry.effective_attributes("http://m#c")
    assert len(effective) == 1
    merged = effective[0]
    assert merged.inheritance is InheritanceKind.INHERITED
    assert {t.iri for t in merged.definition.type_constraints} == {"http://m#ta", "http://m#tb"}


def test_is_stub(travel_registry):
    assert not travel_registry.is_stub(TC + "#station")
    assert travel_registry.is_stub(TC + "#nowhere")


# --- subsumption -----------------------------------------------------------

def test_compatible_reflexive(travel_registry):
    trip = make_type_ref(TC + "#trip")
    assert travel_registry.is_compatible(trip, (trip,))


def test_compatible_transitive(travel_registry):
    train_trip = make_type_ref(TC + "#trainTrip")
    trip = make_type_ref(TC + "#trip")
    assert travel_registry.is_compatible(train_trip, (trip,))
    assert not travel_registry.is_compatible(trip, (train_trip,))


def test_compatible_across_ontologies(travel_registry):
    station = make_type_ref(TC + "#station")
    location = make_type_ref(LOC + "#location")
    assert travel_registry.is_compatible(station, (location,))


def test_universal_constraint_accepts_all(travel_registry):
    universal = TypeRef("http://www.wsmo.org/wsml/wsml-syntax#true", TypeRefKind.UNIVERSAL)
    anything = make_type_ref(TC + "#trip")
    assert travel_registry.is_compatible(anything, (universal,))


def test_declared_super_decides_even_when_unloaded(registry):
    registry.load_ontology_by_iri(TC)
    station = make_type_ref(TC + "#station")
    location = make_type_ref(LOC + "#location")
    # the declared super IRI is in the closure without loading its ontology
    assert registry.is_compatible(station, (location,))


def test_unresolved_stub_raises_beyond_declared_edge(registry):
    registry.load_ontology_by_iri(TC)
    station = make_type_ref(TC + "#station")
    country = make_type_ref(LOC + "#country")
    with pytest.raises(UnresolvedStub):
        registry.is_compatible(station, (country,))


# --- registry tree ---------------------------------------------------------

def test_registry_tree_shape(travel_registry):
    tree = travel_registry.registry_tree()
    roots = {node["display"].split("  ")[0] for node in tree}
    assert {"xsd", "loc", "trainConnection"} <= roots


def test_registry_tree_concept_under_each_super(tmp_path):
    (tmp_path / "d.wsml").write_text(
        'ontology _"http://d"\n'
        "concept a\nconcept b\n"
        "concept c subConceptOf {a, b}\n"
    )
    registry = OntologyRegistry(OntologyWarehouse(tmp_path))
    registry.load_ontology_by_iri("http://d")
    tree = registry.registry_tree()
    ontology = next(n for n in tree if n["display"].startswith("d "))

    def count_c(node):
        hits = 1 if node.get("kind") == "concept" and node["display"] == "c" else 0
        return hits + sum(count_c(child) for child in node.get("children", ()))

    assert count_c(ontology) == 2
