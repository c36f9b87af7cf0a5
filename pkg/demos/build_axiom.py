"""Grow an axiom from scratch and watch the text change after every edit."""
from axiomforge.codegen import generate_axiom_text
from axiomforge.engine import (
    AxiomEngine, InstanceFromOntology, LiteralDefaultType, NewVarOfConcept,
)
from axiomforge.graph import AxiomModel
from axiomforge.ontology import OntologyRegistry, OntologyWarehouse

TRAVEL = "http://www.example.org/travel/"


def show(engine: AxiomEngine, label: str) -> None:
    print(f"--- {label}")
    print(generate_axiom_text(engine.model, engine.registry))


def main() -> None:
    registry = OntologyRegistry(OntologyWarehouse("fixtures/warehouse"))
    registry.load_ontology_by_iri(TRAVEL + "loc")
    registry.load_ontology_by_iri(TRAVEL + "trainConnection")

    engine = AxiomEngine(AxiomModel("autoGeneratedAxiom_1"), registry)
    show(engine, "empty axiom")

    trip = engine.create_variable(TRAVEL + "trainConnection#trip")
    show(engine, "first variable connects to the start node by itself")

    engine.refine_attribute(
        trip, "start",
        NewVarOfConcept(TRAVEL + "trainConnection#station"))
    engine.refine_attribute(
        trip, "end",
        InstanceFromOntology(TRAVEL + "trainConnection#innsbruckHbf"))
    engine.refine_attribute(trip, "duration", LiteralDefaultType("90.5"))
    show(engine, "three refined attributes: variable, instance, literal")

    slot = ("slot", trip, "start")
    print("candidate operations on the already-bound start slot:")
    for cand in engine.candidates_for(slot).enabled:
        label = cand.op if cand.variant is None else f"{cand.op}/{cand.variant}"
        print(f"  {label}")
    print()

    engine.rename_variable(slot, "origin")
    show(engine, "renaming the bound variable updates every occurrence")

    while engine.undo_stack:
        engine.undo()
    show(engine, "undo all the way back")


if __name__ == "__main__":
    main()
