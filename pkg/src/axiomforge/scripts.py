"""Replay of edit-operation scripts.

A script is a JSON document: ``{"ops": [...]}``.  Each entry names an
operation and its arguments, may label its result with ``"as"`` for later
entries to reference, and may carry a ``"step"`` number so a replay can be
cut short at a chosen point (``run_script(..., at_step=N)`` applies all
entries whose step is at most N).

Node references are labels, raw ids, or ``{"operand": [op, i]}`` /
``{"value_of": [var, attr]}`` selectors.  Connections are addressed
structurally by their source endpoint (and optionally target), never by
raw connection id, so scripts stay stable under renumbering.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from . import engine as eng
from .engine import AxiomEngine, EditMode
from .errors import AxiomForgeError, BadDocument, UnknownElement
from .graph import (
    AxiomModel, OperatorEndpoint, OperatorKind, ParamEndpoint, RootEndpoint,
    SlotEndpoint,
)
from .ontology import OntologyRegistry, OntologyWarehouse


def resolve_element(registry: OntologyRegistry, ref: str, kind: str) -> str:
    """Resolve a concept/instance/relation reference to its IRI.

    Accepts a full IRI, a ``short:local`` display name, or a bare local
    name that is unique across loaded ontologies.
    """
    if "://" in ref:
        return ref
    pools = {"concept": "concepts", "instance": "instances",
             "relation": "relations"}[kind]
    if ":" in ref:
        short, local = ref.split(":", 1)
        onto_key = registry.short_names.get(short)
        if onto_key is None:
            raise UnknownElement(f"unknown ontology short name '{short}'")
        element = getattr(registry.ontologies[onto_key], pools).get(local)
        if element is None:
            raise UnknownElement(f"no {kind} '{local}' in '{short}'")
        return element.iri
    matches = []
    for loaded in registry.ontologies.values():
        element = getattr(loaded, pools).get(ref)
        if element is not None:
            matches.append(element.iri)
    if len(matches) != 1:
        raise UnknownElement(
            f"{kind} reference '{ref}' matches {len(matches)} loaded elements")
    return matches[0]


class ScriptRunner:
    def __init__(self, registry: OntologyRegistry, engine: AxiomEngine):
        self.registry = registry
        self.engine = engine
        self.labels: dict[str, int] = {}

    # --- reference resolution ---

    def node_id(self, ref: Any) -> int:
        if isinstance(ref, int):
            return ref
        if isinstance(ref, str):
            if ref not in self.labels:
                raise BadDocument(f"unknown label '{ref}'")
            return self.labels[ref]
        if isinstance(ref, dict):
            if "operand" in ref:
                op_label, index = ref["operand"]
                conns = self.engine.model.outgoing_of_node(self.node_id(op_label))
                if not 0 <= index < len(conns):
                    raise BadDocument(f"operator has no operand {index}")
                return conns[index].target
            if "value_of" in ref:
                var_label, attr = ref["value_of"]
                conns = self.engine.model.outgoing_from(
                    SlotEndpoint(self.node_id(var_label), attr))
                if not conns:
                    raise BadDocument(f"attribute '{attr}' is not bound")
                return conns[0].target
        raise BadDocument(f"bad node reference: {ref!r}")

    def endpoint(self, spec: Any):
        if spec == "root":
            return RootEndpoint()
        if isinstance(spec, dict):
            if "slot" in spec:
                label, attr = spec["slot"]
                return SlotEndpoint(self.node_id(label), attr)
            if "op" in spec:
                return OperatorEndpoint(self.node_id(spec["op"]))
            if "param" in spec:
                label, index = spec["param"]
                return ParamEndpoint(self.node_id(label), index)
        raise BadDocument(f"bad endpoint reference: {spec!r}")

    def connection_id(self, spec: dict) -> int:
        source = self.endpoint(spec["source"])
        conns = self.engine.model.outgoing_from(source)
        if "target" in spec:
            target = self.node_id(spec["target"])
            conns = [c for c in conns if c.target == target]
        if len(conns) != 1:
            raise BadDocument(
                f"connection reference matches {len(conns)} connections: {spec!r}")
        return conns[0].id

    def binding(self, spec: dict) -> eng.BindingSpec:
        kind = spec.get("kind")
        if kind == "new_var_default":
            return eng.NewVarDefaultType()
        if kind == "new_var_of_concept":
            iri = resolve_element(self.registry, spec["concept"], "concept")
            return eng.NewVarOfConcept(iri)
        if kind == "existing_variable":
            return eng.ExistingVariable(self.node_id(spec["var"]))
        if kind == "instance":
            iri = resolve_element(self.registry, spec["instance"], "instance")
            return eng.InstanceFromOntology(iri)
        if kind == "existing_instance":
            return eng.ExistingInstance(self.node_id(spec["node"]))
        if kind == "literal_default":
            return eng.LiteralDefaultType(spec["value"])
        if kind == "literal_of_type":
            iri = resolve_element(self.registry, spec["type"], "concept")
            return eng.LiteralOfType(iri, spec["value"])
        raise BadDocument(f"bad binding kind: {kind!r}")

    def rename_target(self, spec: Any) -> tuple:
        if isinstance(spec, dict) and "slot" in spec:
            label, attr = spec["slot"]
            return ("slot", self.node_id(label), attr)
        if isinstance(spec, dict) and "node" in spec:
            return ("node", self.node_id(spec["node"]))
        return ("node", self.node_id(spec))

    # --- execution ---

    def apply(self, entry: dict) -> None:
        op = entry.get("op")
        result: int | None = None
        if op == "load_ontology":
            self.registry.load_ontology_by_iri(entry["iri"])
        elif op == "set_mode":
            self.engine.set_mode(EditMode(entry["mode"]))
        elif op == "create_variable":
            iri = resolve_element(self.registry, entry["concept"], "concept")
            result = self.engine.create_variable(iri)
        elif op == "create_operator":
            result = self.engine.create_operator(OperatorKind(entry["kind"]))
        elif op == "create_instance_node":
            iri = resolve_element(self.registry, entry["instance"], "instance")
            result = self.engine.create_instance_node(iri)
        elif op == "create_relation_node":
            iri = resolve_element(self.registry, entry["relation"], "relation")
            result = self.engine.create_relation_node(iri)
        elif op == "refine_attribute":
            result = self.engine.refine_attribute(
                self.node_id(entry["var"]), entry["attribute"],
                self.binding(entry["binding"]))
        elif op == "bind_parameter":
            result = self.engine.bind_parameter(
                self.node_id(entry["relation"]), entry["index"],
                self.binding(entry["binding"]))
        elif op == "insert_operator":
            second = entry.get("second")
            result = self.engine.insert_operator_on_connection(
                self.connection_id(entry["connection"]),
                OperatorKind(entry["kind"]),
                self.binding(second) if second else None)
        elif op == "add_operand":
            result = self.engine.add_operand(
                self.node_id(entry["operator"]), self.binding(entry["binding"]))
        elif op == "rename":
            self.engine.rename_variable(
                self.rename_target(entry["target"]), entry["name"])
        elif op == "copy_variable":
            result = self.engine.copy_variable(self.node_id(entry["var"]))
        elif op == "delete_node":
            self.engine.delete_node(self.node_id(entry["node"]))
        elif op == "create_connection":
            self.engine.create_connection(
                self.endpoint(entry["source"]), self.node_id(entry["target"]))
        elif op == "delete_connection":
            self.engine.delete_connection(self.connection_id(entry["connection"]))
        elif op == "move_endpoint":
            conn = self.connection_id(entry["connection"])
            if "new_target" in entry:
                self.engine.move_endpoint(conn, "target",
                                          self.node_id(entry["new_target"]))
            else:
                self.engine.move_endpoint(conn, "source",
                                          self.endpoint(entry["new_source"]))
        elif op == "change_operator_type":
            self.engine.change_operator_type(
                self.node_id(entry["operator"]), OperatorKind(entry["kind"]))
        elif op == "set_primitive_value":
            self.engine.set_primitive_value(
                self.node_id(entry["node"]), entry["value"])
        elif op == "undo":
            self.engine.undo()
        elif op == "redo":
            self.engine.redo()
        else:
            raise BadDocument(f"unknown script operation: {op!r}")
        if "as" in entry:
            if result is None:
                raise BadDocument(f"operation '{op}' produces nothing to label")
            self.labels[entry["as"]] = result


def load_script(path: str | Path) -> list[dict]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise BadDocument(f"not a valid script: {exc}") from None
    ops = data.get("ops") if isinstance(data, dict) else None
    if not isinstance(ops, list):
        raise BadDocument("a script is an object with an 'ops' list")
    return ops


def run_script(ops: list[dict], registry: OntologyRegistry,
               at_step: int | None = None,
               axiom_name: str = "autoGeneratedAxiom_1",
               engine: AxiomEngine | None = None) -> AxiomEngine:
    if engine is None:
        engine = AxiomEngine(AxiomModel(axiom_name), registry)
    runner = ScriptRunner(registry, engine)
    current_step = 0
    for index, entry in enumerate(ops):
        current_step = entry.get("step", current_step)
        if at_step is not None and current_step > at_step:
            break
        try:
            runner.apply(entry)
        except AxiomForgeError as exc:
            # annotate for callers that report which entry was refused
            exc.op_index = index
            exc.step = current_step
            raise
    return engine


def run_script_file(path: str | Path, warehouse_dir: str | Path,
                    at_step: int | None = None) -> AxiomEngine:
    registry = OntologyRegistry(OntologyWarehouse(warehouse_dir))
    return run_script(load_script(path), registry, at_step=at_step)
