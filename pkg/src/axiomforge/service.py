"""HTTP facade over the edit engine.

One process serves one ontology registry and any number of axiom editing
sessions.  Mutations within a session run strictly one at a time; each
response carries a revision number and a request that presents a stale
revision is rejected, so several clients can share a session safely.

Errors travel as ``{"code", "message", "position"?}`` with the domain
error's class name as the code.
"""

from __future__ import annotations

import threading
from typing import Any

from fastapi import Body, FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import codegen
from . import engine as eng
from .engine import AxiomEngine, EditMode
from .errors import (
    AxiomForgeError, BadDocument, MissingOntology, StaleRevision,
    UnknownSession,
)
from .graph import (
    AxiomModel, InstanceRefNode, OperatorEndpoint, OperatorKind,
    ROOT_LABEL,
    OperatorNode, ParamEndpoint, PrimitiveValueNode, RelationUseNode,
    ROOT_ID, RootEndpoint, RootNode, SlotEndpoint, VariableNode,
)
from .ontology import (
    OntologyRegistry, TypeRefKind, local_name, norm_iri,
)

NOT_FOUND = ("NotInWarehouse", "UnknownSession", "UnknownNode",
             "UnknownConnection")
UNPROCESSABLE = ("LexError", "ParseError", "BadDocument", "MissingOntology",
                 "UnknownElement", "DirectoryNotFound", "DuplicateIri")


def status_for(error: AxiomForgeError) -> int:
    if error.code in NOT_FOUND:
        return 404
    if error.code in UNPROCESSABLE:
        return 422
    return 409


class Session:
    def __init__(self, session_id: str, registry: OntologyRegistry,
                 counter: int, model: AxiomModel | None = None):
        self.id = session_id
        self.counter = counter
        self.engine = AxiomEngine(
            model or AxiomModel(codegen.auto_axiom_name(counter)), registry)
        self.geometry: dict[int, tuple[float, float]] = {}
        self.revision = 0
        self.lock = threading.Lock()


def parse_target(text: str) -> tuple:
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind == "canvas" and len(parts) == 1:
            return ("canvas",)
        if kind == "node" and len(parts) == 2:
            return ("node", int(parts[1]))
        if kind == "slot" and len(parts) == 3:
            return ("slot", int(parts[1]), parts[2])
        if kind == "param" and len(parts) == 3:
            return ("param", int(parts[1]), int(parts[2]))
        if kind == "conn" and len(parts) == 2:
            return ("connection", int(parts[1]))
    except ValueError:
        pass
    raise BadDocument(f"bad target descriptor: {text!r}")


def parse_endpoint(text: str):
    parts = text.split(":")
    try:
        if parts[0] == "root" and len(parts) == 1:
            return RootEndpoint()
        if parts[0] == "slot" and len(parts) == 3:
            return SlotEndpoint(int(parts[1]), parts[2])
        if parts[0] == "op" and len(parts) == 2:
            return OperatorEndpoint(int(parts[1]))
        if parts[0] == "param" and len(parts) == 3:
            return ParamEndpoint(int(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise BadDocument(f"bad endpoint descriptor: {text!r}")


def endpoint_text(endpoint) -> str:
    if isinstance(endpoint, RootEndpoint):
        return "root"
    if isinstance(endpoint, SlotEndpoint):
        return f"slot:{endpoint.node_id}:{endpoint.attr}"
    if isinstance(endpoint, OperatorEndpoint):
        return f"op:{endpoint.node_id}"
    return f"param:{endpoint.node_id}:{endpoint.index}"


def decode_binding(data: dict) -> eng.BindingSpec:
    kind = data.get("kind")
    if kind == "new_var_default":
        return eng.NewVarDefaultType()
    if kind == "new_var_of_concept":
        return eng.NewVarOfConcept(data["concept"])
    if kind == "existing_variable":
        return eng.ExistingVariable(int(data["node"]))
    if kind == "instance":
        return eng.InstanceFromOntology(data["instance"])
    if kind == "existing_instance":
        return eng.ExistingInstance(int(data["node"]))
    if kind == "literal_default":
        return eng.LiteralDefaultType(str(data["value"]))
    if kind == "literal_of_type":
        return eng.LiteralOfType(data["type"], str(data["value"]))
    raise BadDocument(f"bad binding kind: {kind!r}")


def encode_binding(spec) -> Any:
    if spec is None:
        return None
    if isinstance(spec, eng.NewVarDefaultType):
        return {"kind": "new_var_default"}
    if isinstance(spec, eng.NewVarOfConcept):
        return {"kind": "new_var_of_concept", "concept": spec.concept_iri}
    if isinstance(spec, eng.ExistingVariable):
        return {"kind": "existing_variable", "node": spec.node_id}
    if isinstance(spec, eng.InstanceFromOntology):
        return {"kind": "instance", "instance": spec.instance_iri}
    if isinstance(spec, eng.ExistingInstance):
        return {"kind": "existing_instance", "node": spec.node_id}
    if isinstance(spec, eng.LiteralDefaultType):
        return {"kind": "literal_default", "value": spec.value}
    if isinstance(spec, eng.LiteralOfType):
        return {"kind": "literal_of_type", "type": spec.type_iri,
                "value": spec.value}
    if isinstance(spec, tuple):
        return list(spec)
    return spec


def graph_state(session: Session, registry: OntologyRegistry) -> dict:
    engine = session.engine
    model = engine.model
    reachable = model.reachable_from_root()
    nodes = []
    for node_id in sorted(model.nodes):
        node = model.nodes[node_id]
        entry: dict[str, Any] = {
            "id": node_id,
            "kind": node.kind,
            "valid": model.node_valid(node_id, reachable),
            "reachable": node_id in reachable,
        }
        if isinstance(node, RootNode):
            entry["label"] = ROOT_LABEL
        elif isinstance(node, VariableNode):
            entry["label"] = "?" + node.name
            entry["type"] = node.type.iri
            entry["type_display"] = registry.display_name(node.type.iri)
            entry["slots"] = _slot_rows(node, node_id, engine, registry)
        elif isinstance(node, InstanceRefNode):
            entry["label"] = local_name(node.instance_iri)
            entry["instance"] = node.instance_iri
            entry["type_display"] = registry.display_name(node.type.iri)
        elif isinstance(node, PrimitiveValueNode):
            entry["label"] = node.value
            entry["type_display"] = registry.display_name(node.type.iri)
        elif isinstance(node, OperatorNode):
            entry["label"] = node.op.value.upper()
            entry["operator"] = node.op.value
        elif isinstance(node, RelationUseNode):
            entry["label"] = local_name(node.relation_iri)
            entry["relation"] = node.relation_iri
            relation = registry.find_relation(node.relation_iri)
            entry["parameters"] = [
                {"index": i, "name": p.display_name(i),
                 "bound": bool(model.outgoing_from(ParamEndpoint(node_id, i)))}
                for i, p in enumerate(relation.parameters)] if relation else []
        if node_id in session.geometry:
            entry["x"], entry["y"] = session.geometry[node_id]
        nodes.append(entry)
    connections = [
        {"id": conn.id, "source": endpoint_text(conn.source),
         "target": conn.target}
        for conn in sorted(model.connections.values(), key=lambda c: c.id)]
    return {
        "session": session.id,
        "revision": session.revision,
        "axiom_name": model.axiom_name,
        "mode": engine.mode.value,
        "nodes": nodes,
        "connections": connections,
        "text": codegen.generate_axiom_text(model, registry),
        "outline": outline(model, registry),
        "can_undo": bool(engine.undo_stack),
        "can_redo": bool(engine.redo_stack),
    }


def _slot_rows(node: VariableNode, node_id: int, engine: AxiomEngine,
               registry: OntologyRegistry) -> list[dict]:
    rows = []
    if node.type.kind is TypeRefKind.CONCEPT and \
            registry.find_concept(node.type.iri) is not None:
        for eff in registry.effective_attributes(node.type.iri):
            bound = bool(engine.model.outgoing_from(SlotEndpoint(node_id, eff.name)))
            types = ", ".join(
                registry.display_name(tc.iri) if tc.kind is not TypeRefKind.UNIVERSAL
                else "wsml#true"
                for tc in eff.definition.type_constraints)
            rows.append({
                "attr": eff.name,
                "types": types,
                "inheritance": eff.inheritance.value,
                "bound": bound,
                "name": node.slot_bindings.get(eff.name),
            })
    return rows


def outline(model: AxiomModel, registry: OntologyRegistry) -> dict:
    """Tree of the connected model, invalid operators included."""

    def label_of(node_id: int) -> str:
        node = model.nodes[node_id]
        if isinstance(node, RootNode):
            return "(start)"
        if isinstance(node, VariableNode):
            return node.name
        if isinstance(node, InstanceRefNode):
            return local_name(node.instance_iri)
        if isinstance(node, PrimitiveValueNode):
            return node.value
        if isinstance(node, OperatorNode):
            return node.op.value.upper()
        if isinstance(node, RelationUseNode):
            return local_name(node.relation_iri)
        return str(node_id)

    def tree(node_id: int, seen: frozenset[int]) -> dict:
        children = []
        if node_id not in seen:
            for conn in model.outgoing_of_node(node_id):
                if conn.target in model.nodes:
                    children.append(tree(conn.target, seen | {node_id}))
        return {"id": node_id, "label": label_of(node_id),
                "kind": model.nodes[node_id].kind, "children": children}

    return tree(ROOT_ID, frozenset())


def apply_operation(session: Session, registry: OntologyRegistry,
                    op: str, args: dict) -> None:
    engine = session.engine
    if op == "create_variable":
        engine.create_variable(args["concept"])
    elif op == "create_operator":
        engine.create_operator(_op_kind(args["kind"]))
    elif op == "create_instance_node":
        engine.create_instance_node(args["instance"])
    elif op == "create_relation_node":
        engine.create_relation_node(args["relation"])
    elif op == "refine_attribute":
        engine.refine_attribute(int(args["node"]), args["attribute"],
                                decode_binding(args["binding"]))
    elif op == "bind_parameter":
        engine.bind_parameter(int(args["node"]), int(args["index"]),
                              decode_binding(args["binding"]))
    elif op == "insert_operator":
        second = args.get("second")
        engine.insert_operator_on_connection(
            int(args["connection"]), _op_kind(args["kind"]),
            decode_binding(second) if second else None)
    elif op == "add_operand":
        engine.add_operand(int(args["operator"]), decode_binding(args["binding"]))
    elif op == "rename":
        engine.rename_variable(parse_target(args["target"]), args["name"])
    elif op == "copy_variable":
        engine.copy_variable(int(args["node"]))
    elif op == "delete_node":
        engine.delete_node(int(args["node"]))
    elif op == "create_connection":
        engine.create_connection(parse_endpoint(args["source"]),
                                 int(args["target"]))
    elif op == "delete_connection":
        engine.delete_connection(int(args["connection"]))
    elif op == "move_endpoint":
        if "new_target" in args:
            engine.move_endpoint(int(args["connection"]), "target",
                                 int(args["new_target"]))
        else:
            engine.move_endpoint(int(args["connection"]), "source",
                                 parse_endpoint(args["new_source"]))
    elif op == "change_operator_type":
        engine.change_operator_type(int(args["operator"]), _op_kind(args["kind"]))
    elif op == "set_primitive_value":
        engine.set_primitive_value(int(args["node"]), str(args["value"]))
    elif op == "set_mode":
        engine.set_mode(EditMode(args["mode"]))
    else:
        raise BadDocument(f"unknown operation: {op!r}")


def _op_kind(value: str) -> OperatorKind:
    try:
        return OperatorKind(value)
    except ValueError:
        raise BadDocument(f"bad operator kind: {value!r}") from None


def create_app(registry: OntologyRegistry | None = None) -> FastAPI:
    registry = registry or OntologyRegistry()
    app = FastAPI(title="axiomforge", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])
    sessions: dict[str, Session] = {}
    state_lock = threading.Lock()
    last_id = 0

    def next_id() -> int:
        nonlocal last_id
        last_id += 1
        return last_id

    app.state.registry = registry
    app.state.sessions = sessions

    @app.exception_handler(AxiomForgeError)
    async def domain_error(_request: Request, error: AxiomForgeError):
        body: dict[str, Any] = {"code": error.code, "message": str(error)}
        if error.position is not None:
            body["position"] = {"line": error.position.line,
                                "column": error.position.column}
        return JSONResponse(status_code=status_for(error), content=body)

    def session_of(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session '{session_id}'")
        return session

    def check_revision(session: Session, payload: dict) -> None:
        revision = payload.get("revision")
        if revision is not None and int(revision) != session.revision:
            raise StaleRevision(
                f"request is based on revision {revision}, "
                f"current is {session.revision}")

    @app.get("/health")
    async def health():
        return {"status": "ok", "ontologies": len(registry.ontologies)}

    @app.post("/ontologies")
    async def load_ontology(payload: dict = Body(...)):
        if "path" in payload:
            loaded = registry.load_ontology_file(payload["path"])
        else:
            loaded = registry.load_ontology_by_iri(payload["iri"])
        return {
            "iri": loaded.iri,
            "short_name": loaded.short_name,
            "concepts": len(loaded.concepts),
            "instances": len(loaded.instances),
            "relations": len(loaded.relations),
            "imports": list(loaded.imports),
        }

    @app.get("/ontologies")
    async def ontology_tree():
        return {"ontologies": registry.registry_tree()}

    @app.post("/axioms")
    async def new_axiom():
        with state_lock:
            counter = next_id()
            session = Session(f"ax{counter}", registry, counter)
            sessions[session.id] = session
        return graph_state(session, registry)

    @app.post("/axioms/{session_id}/ops")
    async def apply_op(session_id: str, payload: dict = Body(...)):
        session = session_of(session_id)
        with session.lock:
            check_revision(session, payload)
            apply_operation(session, registry, payload.get("op", ""),
                            payload.get("args", {}))
            session.revision += 1
            return graph_state(session, registry)

    @app.get("/axioms/{session_id}")
    async def get_state(session_id: str):
        session = session_of(session_id)
        with session.lock:
            return graph_state(session, registry)

    @app.get("/axioms/{session_id}/candidates")
    async def candidates(session_id: str, target: str = Query(...)):
        session = session_of(session_id)
        with session.lock:
            report = session.engine.candidates_for(parse_target(target))
            return {
                "target": target,
                "enabled": [
                    {"op": c.op, "variant": c.variant,
                     "options": None if c.options is None
                     else [encode_binding(o) for o in c.options]}
                    for c in report.enabled],
                "disabled": [
                    {"op": d.op, "variant": d.variant, "code": d.code,
                     "option": encode_binding(d.option)}
                    for d in report.disabled],
            }

    @app.post("/axioms/{session_id}/undo")
    async def undo(session_id: str, payload: dict = Body(default={})):
        session = session_of(session_id)
        with session.lock:
            check_revision(session, payload)
            session.engine.undo()
            session.revision += 1
            return graph_state(session, registry)

    @app.post("/axioms/{session_id}/redo")
    async def redo(session_id: str, payload: dict = Body(default={})):
        session = session_of(session_id)
        with session.lock:
            check_revision(session, payload)
            session.engine.redo()
            session.revision += 1
            return graph_state(session, registry)

    @app.get("/axioms/{session_id}/wsml")
    async def wsml_text(session_id: str):
        session = session_of(session_id)
        with session.lock:
            return PlainTextResponse(
                codegen.generate_axiom_text(session.engine.model, registry))

    @app.put("/axioms/{session_id}/geometry")
    async def set_geometry(session_id: str, payload: dict = Body(...)):
        session = session_of(session_id)
        with session.lock:
            check_revision(session, payload)
            for key, pos in payload.get("positions", {}).items():
                node_id = int(key)
                if node_id in session.engine.model.nodes:
                    session.geometry[node_id] = (float(pos["x"]), float(pos["y"]))
            session.revision += 1
            return graph_state(session, registry)

    @app.put("/axioms/{session_id}/persist")
    async def persist(session_id: str):
        session = session_of(session_id)
        with session.lock:
            return {
                "document": {
                    "model": session.engine.model.to_dict(session.geometry),
                    "counter": session.counter,
                    "mode": session.engine.mode.value,
                },
            }

    @app.post("/axioms/restore")
    async def restore(payload: dict = Body(...)):
        nonlocal last_id
        document = payload.get("document", payload)
        if not isinstance(document, dict):
            raise BadDocument("restore needs a 'document' object")
        model_data = document.get("model")
        if not isinstance(model_data, dict):
            raise BadDocument("restore needs a 'document' with a 'model'")
        model, geometry = AxiomModel.from_dict(model_data)
        for iri in model.referenced_ontologies():
            if norm_iri(iri) not in registry.ontologies:
                try:
                    registry.load_ontology_by_iri(iri)
                except AxiomForgeError as exc:
                    raise MissingOntology(
                        f"the model needs '{iri}', which is not available: "
                        f"{exc}") from None
        with state_lock:
            counter = int(document.get("counter", 0)) or last_id + 1
            last_id = max(last_id, counter)  # new axioms number past the restored one
            session = Session(f"ax{next_id()}", registry, counter, model)
            session.geometry = dict(geometry)
            if document.get("mode") == "advanced":
                session.engine.set_mode(EditMode.ADVANCED)
            sessions[session.id] = session
        return graph_state(session, registry)

    return app
