"""Semantically gated edit operations over an axiom model.

Every public operation runs in two phases: a side-effect-free probe that
raises a domain error when the edit is not admissible, then the mutation
itself, recorded as an undoable command.  ``candidates_for`` enumerates
operations by running the same probes, which keeps context menus and
direct invocation in agreement by construction.

Undo restores the exact serialized state the command saw, and redo
restores the state it produced.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable

from . import literals
from .errors import (
    AmbiguousDefault, AxiomForgeError, BadLiteral, BadName,
    CannotDeleteRoot, DuplicateName, EmptyStack, HasConnections,
    Incompatible, ModeError, NotAllowed, NotArity, SlotOccupied,
    StubConcept, StubType, UnknownChain, UnknownInstance, UnknownNode,
    UnknownRelation, UnresolvedStub, WouldCycle,
)
from .graph import (
    AxiomModel, ChainKind, Connection, Endpoint, InstanceRefNode, Node,
    OperatorEndpoint, OperatorKind, OperatorNode, ParamEndpoint,
    PrimitiveValueNode, RelationUseNode, ROOT_ID, RootEndpoint, RootNode,
    SlotEndpoint, VariableNode, endpoint_owner,
)
from .ontology import (
    InstanceDef, OntologyRegistry, RelationDef, TypeRef, TypeRefKind,
    local_name, make_type_ref,
)

VARIABLE_NAME = re.compile(r"^[^\W\d]\w*$", re.UNICODE)


class EditMode(Enum):
    STANDARD = "standard"
    ADVANCED = "advanced"


# --- binding specifications ------------------------------------------------

@dataclass(frozen=True)
class NewVarDefaultType:
    kind = "new_var_default"


@dataclass(frozen=True)
class NewVarOfConcept:
    kind = "new_var_of_concept"
    concept_iri: str = ""


@dataclass(frozen=True)
class ExistingVariable:
    kind = "existing_variable"
    node_id: int = 0


@dataclass(frozen=True)
class InstanceFromOntology:
    kind = "instance_from_ontology"
    instance_iri: str = ""


@dataclass(frozen=True)
class ExistingInstance:
    kind = "existing_instance"
    node_id: int = 0


@dataclass(frozen=True)
class LiteralDefaultType:
    kind = "literal_default"
    value: str = ""


@dataclass(frozen=True)
class LiteralOfType:
    kind = "literal_of_type"
    type_iri: str = ""
    value: str = ""


BindingSpec = (NewVarDefaultType | NewVarOfConcept | ExistingVariable |
               InstanceFromOntology | ExistingInstance | LiteralDefaultType |
               LiteralOfType)


# --- candidates ------------------------------------------------------------

@dataclass(frozen=True)
class Candidate:
    """An operation (possibly one binding variant of it) offered on a target."""

    op: str
    variant: str | None = None
    options: tuple[Any, ...] | None = None  # concrete argument choices


@dataclass(frozen=True)
class DisabledOp:
    op: str
    variant: str | None
    code: str  # error code direct invocation would raise
    option: Any = None  # a concrete argument that triggers it, when one exists


@dataclass(frozen=True)
class CandidateReport:
    target: tuple
    enabled: tuple[Candidate, ...]
    disabled: tuple[DisabledOp, ...]


@dataclass
class Command:
    """One applied operation with full state snapshots on both sides."""

    name: str
    before: dict
    after: dict


class AxiomEngine:
    def __init__(self, model: AxiomModel, registry: OntologyRegistry,
                 mode: EditMode = EditMode.STANDARD):
        self.model = model
        self.registry = registry
        self.mode = mode
        self.undo_stack: list[Command] = []
        self.redo_stack: list[Command] = []

    # --- command plumbing ---

    def _execute(self, name: str, mutate: Callable[[], Any]) -> Any:
        before = self.model.to_dict()
        try:
            result = mutate()
        except AxiomForgeError:
            self._restore(before)
            raise
        self.undo_stack.append(Command(name, before, self.model.to_dict()))
        self.redo_stack.clear()
        return result

    def _restore(self, state: dict) -> None:
        restored, _ = AxiomModel.from_dict(state)
        self.model.axiom_name = restored.axiom_name
        self.model.nodes = restored.nodes
        self.model.connections = restored.connections
        self.model._next_node_id = restored._next_node_id
        self.model._next_conn_id = restored._next_conn_id

    def undo(self) -> None:
        if not self.undo_stack:
            raise EmptyStack("nothing to undo")
        command = self.undo_stack.pop()
        self._restore(command.before)
        self.redo_stack.append(command)

    def redo(self) -> None:
        if not self.redo_stack:
            raise EmptyStack("nothing to redo")
        command = self.redo_stack.pop()
        self._restore(command.after)
        self.undo_stack.append(command)

    def set_mode(self, mode: EditMode) -> None:
        self.mode = mode

    # --- naming ---

    def gen_variable_name(self, base: str) -> str:
        base = base.lstrip("?")
        taken = self.model.variable_names()
        if base not in taken:
            return base
        i = 1
        while f"{base}{i}" in taken:
            i += 1
        return f"{base}{i}"

    # --- shared checks ---

    def _variable(self, node_id: int) -> VariableNode:
        node = self.model.node(node_id)
        if not isinstance(node, VariableNode):
            raise NotAllowed(f"node {node_id} is not a variable")
        return node

    def _slot_constraints(self, node_id: int, attr: str) -> tuple[TypeRef, ...]:
        node = self._variable(node_id)
        for eff in self.registry.effective_attributes(node.type.iri):
            if eff.name == attr:
                return eff.definition.type_constraints
        raise UnknownNode(f"variable ?{node.name} has no attribute '{attr}'")

    def _node_memberships(self, node: Node) -> tuple[TypeRef, ...]:
        if isinstance(node, VariableNode):
            return (node.type,)
        if isinstance(node, InstanceRefNode):
            instance = self.registry.find_instance(node.instance_iri)
            if instance and instance.member_of:
                return tuple(make_type_ref(m) for m in instance.member_of)
            return (node.type,)
        if isinstance(node, PrimitiveValueNode):
            return (node.type,)
        raise NotAllowed("node has no type")

    def _compatible(self, memberships: tuple[TypeRef, ...],
                    constraints: tuple[TypeRef, ...]) -> bool:
        stub: UnresolvedStub | None = None
        for membership in memberships:
            try:
                if self.registry.is_compatible(membership, constraints):
                    return True
            except UnresolvedStub as exc:
                stub = exc
        if stub is not None:
            raise stub
        return False

    def _require_compatible(self, memberships, constraints) -> None:
        if not self._compatible(memberships, constraints):
            raise Incompatible("the element does not satisfy the type constraints")

    def _walk_to_origin(self, endpoint: Endpoint) -> Endpoint | None:
        """Follow an endpoint up through operators to root, slot or param."""
        visited: set[int] = set()
        while isinstance(endpoint, OperatorEndpoint):
            if endpoint.node_id in visited:
                return None
            visited.add(endpoint.node_id)
            incoming = self.model.incoming(endpoint.node_id)
            if not incoming:
                return None
            endpoint = incoming[0].source
        return endpoint

    def _probe_connection(self, source: Endpoint, target_id: int,
                          ignore_conn: int | None = None,
                          check_mode: bool = True) -> None:
        """All admissibility checks for wiring ``source`` to ``target_id``."""
        if check_mode and self.mode is not EditMode.ADVANCED:
            raise ModeError("connections can only be wired in advanced mode")
        target = self.model.node(target_id)
        if isinstance(target, RootNode):
            raise NotAllowed("the root cannot be a connection target")

        def others(conns: list[Connection]) -> list[Connection]:
            return [c for c in conns if c.id != ignore_conn]

        # source occupancy / arity
        if isinstance(source, (RootEndpoint, SlotEndpoint, ParamEndpoint)):
            if others(self.model.outgoing_from(source)):
                raise SlotOccupied("the endpoint already has a connection")
        elif isinstance(source, OperatorEndpoint):
            op = self.model.node(source.node_id)
            if not isinstance(op, OperatorNode):
                raise NotAllowed("not an operator endpoint")
            if op.op is OperatorKind.NOT and others(self.model.outgoing_from(source)):
                raise NotArity("a negation takes exactly one operand")

        # target occupancy: operators and relation uses accept one incoming
        if isinstance(target, (OperatorNode, RelationUseNode)):
            if others(self.model.incoming(target_id)):
                raise SlotOccupied("the target already has an incoming connection")

        # shape and type gating per source kind
        if isinstance(source, RootEndpoint):
            if not isinstance(target, (VariableNode, OperatorNode, RelationUseNode)):
                raise NotAllowed("the root connects to a variable, operator or relation")
        elif isinstance(source, SlotEndpoint):
            constraints = self._slot_constraints(source.node_id, source.attr)
            self._check_slot_target(constraints, target, target_id)
        elif isinstance(source, ParamEndpoint):
            constraints = self._param_constraints(source.node_id, source.index)
            if not isinstance(target, VariableNode):
                raise NotAllowed("a parameter binds a variable")
            self._require_compatible((target.type,), constraints)
        elif isinstance(source, OperatorEndpoint):
            origin = self._walk_to_origin(source)
            if origin is None:
                raise UnknownChain("the operator is not connected to any chain yet")
            if isinstance(origin, RootEndpoint):
                if not isinstance(target, (VariableNode, OperatorNode, RelationUseNode)):
                    raise NotAllowed(
                        "operands on a root chain are variables, operators or relations")
            else:
                if isinstance(origin, SlotEndpoint):
                    constraints = self._slot_constraints(origin.node_id, origin.attr)
                else:
                    constraints = self._param_constraints(origin.node_id, origin.index)
                self._check_slot_target(constraints, target, target_id)

        # cycles
        owner = endpoint_owner(source)
        if owner == target_id or owner in self._descendants_ignoring(target_id, ignore_conn):
            raise WouldCycle("the connection would close a cycle")

    def _check_slot_target(self, constraints, target: Node, target_id: int) -> None:
        if isinstance(target, (VariableNode, InstanceRefNode, PrimitiveValueNode)):
            self._require_compatible(self._node_memberships(target), constraints)
        elif isinstance(target, OperatorNode):
            for alt in self.model.slot_alternatives(OperatorEndpoint(target_id)):
                alt_node = self.model.node(alt)
                if isinstance(alt_node, (VariableNode, InstanceRefNode, PrimitiveValueNode)):
                    self._require_compatible(self._node_memberships(alt_node), constraints)
                else:
                    raise NotAllowed("the operator contains an element a slot cannot bind")
        else:
            raise NotAllowed("a slot cannot bind this kind of element")

    def _descendants_ignoring(self, node_id: int, ignore_conn: int | None) -> set[int]:
        seen: set[int] = set()
        queue = [node_id]
        while queue:
            current = queue.pop()
            for conn in self.model.outgoing_of_node(current):
                if conn.id == ignore_conn or conn.target in seen:
                    continue
                seen.add(conn.target)
                queue.append(conn.target)
        return seen

    def _param_constraints(self, node_id: int, index: int) -> tuple[TypeRef, ...]:
        relation = self._relation_def(node_id)
        if not 0 <= index < len(relation.parameters):
            raise UnknownNode(f"relation {relation.name} has no parameter {index}")
        return relation.parameters[index].type_constraints

    def _relation_def(self, node_id: int) -> RelationDef:
        node = self.model.node(node_id)
        if not isinstance(node, RelationUseNode):
            raise NotAllowed(f"node {node_id} is not a relation")
        relation = self.registry.find_relation(node.relation_iri)
        if relation is None:
            raise UnknownRelation(f"relation not loaded: {node.relation_iri}")
        return relation

    # --- node creation ---

    def create_variable(self, concept_iri: str) -> int:
        concept = self.registry.find_concept(concept_iri)
        if concept is None:
            raise StubConcept(
                f"'{local_name(concept_iri)}' is not loaded; load the imported ontology first")

        def mutate() -> int:
            name = self.gen_variable_name(concept.name)
            first = len(self.model.nodes) == 1
            node_id = self.model.add_node(
                VariableNode(name, make_type_ref(concept.iri), {}))
            if first:
                self.model.add_connection(RootEndpoint(), node_id)
            return node_id

        return self._execute("create_variable", mutate)

    def create_operator(self, kind: OperatorKind) -> int:
        return self._execute("create_operator",
                             lambda: self.model.add_node(OperatorNode(kind)))

    def create_instance_node(self, instance_iri: str) -> int:
        instance = self.registry.find_instance(instance_iri)
        if instance is None:
            raise UnknownInstance(f"instance not loaded: {instance_iri}")
        type_ref = (make_type_ref(instance.member_of[0]) if instance.member_of
                    else make_type_ref("http://www.wsmo.org/wsml/wsml-syntax#true"))
        return self._execute(
            "create_instance_node",
            lambda: self.model.add_node(InstanceRefNode(instance.iri, type_ref)))

    def create_relation_node(self, relation_iri: str) -> int:
        relation = self.registry.find_relation(relation_iri)
        if relation is None:
            raise UnknownRelation(f"relation not loaded: {relation_iri}")
        return self._execute(
            "create_relation_node",
            lambda: self.model.add_node(RelationUseNode(relation.iri)))

    # --- connections ---

    def create_connection(self, source: Endpoint, target_id: int) -> int:
        self._probe_connection(source, target_id)

        def mutate() -> int:
            conn = self.model.add_connection(source, target_id)
            if isinstance(source, SlotEndpoint):
                self._set_slot_binding(source, target_id)
            return conn.id

        return self._execute("create_connection", mutate)

    def _set_slot_binding(self, slot: SlotEndpoint, target_id: int,
                          keep_existing: bool = False) -> None:
        owner = self._variable(slot.node_id)
        target = self.model.node(target_id)
        if isinstance(target, VariableNode):
            owner.slot_bindings[slot.attr] = target.name
        elif keep_existing and slot.attr in owner.slot_bindings:
            pass
        else:
            owner.slot_bindings[slot.attr] = self.gen_variable_name(slot.attr)

    def delete_connection(self, conn_id: int) -> None:
        self.model.connection(conn_id)
        self._execute("delete_connection",
                      lambda: self.model.remove_connection(conn_id))

    def move_endpoint(self, conn_id: int, which: str, new_endpoint: Endpoint | int) -> None:
        conn = self.model.connection(conn_id)
        if which == "source":
            if not isinstance(new_endpoint, (RootEndpoint, SlotEndpoint,
                                             OperatorEndpoint, ParamEndpoint)):
                raise NotAllowed("expected an endpoint")
            self._probe_connection(new_endpoint, conn.target, ignore_conn=conn_id)

            def mutate() -> None:
                old = conn.source
                conn.source = new_endpoint
                if isinstance(old, SlotEndpoint) and not self.model.outgoing_from(old):
                    owner = self.model.nodes.get(old.node_id)
                    if isinstance(owner, VariableNode):
                        owner.slot_bindings.pop(old.attr, None)
                if isinstance(new_endpoint, SlotEndpoint):
                    self._set_slot_binding(new_endpoint, conn.target)

            self._execute("move_endpoint", mutate)
        elif which == "target":
            if not isinstance(new_endpoint, int):
                raise NotAllowed("expected a node id")
            self._probe_connection(conn.source, new_endpoint, ignore_conn=conn_id)

            def mutate() -> None:
                conn.target = new_endpoint
                if isinstance(conn.source, SlotEndpoint):
                    self._set_slot_binding(conn.source, new_endpoint, keep_existing=True)

            self._execute("move_endpoint", mutate)
        else:
            raise NotAllowed("which must be 'source' or 'target'")

    # --- refinement ---

    def _probe_refine(self, node_id: int, attr: str, spec: BindingSpec) -> None:
        constraints = self._slot_constraints(node_id, attr)
        slot = SlotEndpoint(node_id, attr)
        if self.model.outgoing_from(slot):
            raise SlotOccupied(f"attribute '{attr}' is already bound")
        self._probe_spec_for_slot(spec, constraints, slot)

    def _probe_spec_for_slot(self, spec: BindingSpec, constraints, slot: SlotEndpoint | None) -> None:
        if isinstance(spec, NewVarDefaultType):
            self._default_constraint(constraints)
        elif isinstance(spec, NewVarOfConcept):
            concept = self.registry.find_concept(spec.concept_iri)
            if concept is None:
                raise StubType(
                    f"'{local_name(spec.concept_iri)}' is not loaded; load the imported ontology first")
            self._require_compatible((make_type_ref(concept.iri),), constraints)
        elif isinstance(spec, ExistingVariable):
            target = self._variable(spec.node_id)
            self._require_compatible((target.type,), constraints)
            if slot is not None:
                self._probe_no_cycle(slot, spec.node_id)
        elif isinstance(spec, InstanceFromOntology):
            instance = self.registry.find_instance(spec.instance_iri)
            if instance is None:
                raise UnknownInstance(f"instance not loaded: {spec.instance_iri}")
            self._require_compatible(self._instance_memberships(instance), constraints)
        elif isinstance(spec, ExistingInstance):
            target = self.model.node(spec.node_id)
            if not isinstance(target, InstanceRefNode):
                raise NotAllowed(f"node {spec.node_id} is not an instance")
            self._require_compatible(self._node_memberships(target), constraints)
        elif isinstance(spec, LiteralDefaultType):
            default = self._default_constraint(constraints)
            if default.kind is not TypeRefKind.BUILTIN:
                raise NotAllowed("the attribute type is not a built-in type")
            if not literals.literal_valid(default, spec.value):
                raise BadLiteral(f"{spec.value!r} is not a valid {local_name(default.iri)}")
        elif isinstance(spec, LiteralOfType):
            type_ref = make_type_ref(spec.type_iri)
            if type_ref.kind is not TypeRefKind.BUILTIN:
                raise NotAllowed("literal values require a built-in type")
            self._require_compatible((type_ref,), constraints)
            if not literals.literal_valid(type_ref, spec.value):
                raise BadLiteral(f"{spec.value!r} is not a valid {local_name(type_ref.iri)}")
        else:
            raise NotAllowed(f"unsupported binding: {spec!r}")

    def _instance_memberships(self, instance: InstanceDef) -> tuple[TypeRef, ...]:
        if instance.member_of:
            return tuple(make_type_ref(m) for m in instance.member_of)
        return (make_type_ref("http://www.wsmo.org/wsml/wsml-syntax#true"),)

    def _default_constraint(self, constraints: tuple[TypeRef, ...]) -> TypeRef:
        if len(constraints) != 1:
            raise AmbiguousDefault(
                "the attribute has several type constraints; pick a concept explicitly")
        default = constraints[0]
        if default.kind is TypeRefKind.UNIVERSAL:
            raise AmbiguousDefault(
                "the attribute allows any type; pick a concept explicitly")
        if default.kind is TypeRefKind.CONCEPT and self.registry.find_concept(default.iri) is None:
            raise StubType(
                f"'{local_name(default.iri)}' is not loaded; load the imported ontology first")
        return default

    def _probe_no_cycle(self, source: Endpoint, target_id: int) -> None:
        owner = endpoint_owner(source)
        if owner == target_id or owner in self.model.descendants(target_id):
            raise WouldCycle("the connection would close a cycle")

    def refine_attribute(self, node_id: int, attr: str, spec: BindingSpec) -> int:
        self._probe_refine(node_id, attr, spec)
        slot = SlotEndpoint(node_id, attr)

        def mutate() -> int:
            target_id = self._realize_spec(spec, slot=slot, forced_name=None)
            self.model.add_connection(slot, target_id)
            self._set_slot_binding(slot, target_id)
            return target_id

        return self._execute("refine_attribute", mutate)

    def _realize_spec(self, spec: BindingSpec, slot: SlotEndpoint | None,
                      forced_name: str | None) -> int:
        """Create or pick the node a binding specification denotes."""
        if isinstance(spec, NewVarDefaultType):
            constraints = (self._slot_constraints(slot.node_id, slot.attr) if slot
                           else ())
            default = self._default_constraint(constraints)
            name = forced_name or self.gen_variable_name(slot.attr)
            return self.model.add_node(VariableNode(name, default, {}))
        if isinstance(spec, NewVarOfConcept):
            concept = self.registry.find_concept(spec.concept_iri)
            assert concept is not None
            base = slot.attr if slot else concept.name
            name = forced_name or self.gen_variable_name(base)
            return self.model.add_node(
                VariableNode(name, make_type_ref(concept.iri), {}))
        if isinstance(spec, (ExistingVariable, ExistingInstance)):
            return spec.node_id
        if isinstance(spec, InstanceFromOntology):
            instance = self.registry.find_instance(spec.instance_iri)
            assert instance is not None
            type_ref = self._instance_memberships(instance)[0]
            return self.model.add_node(InstanceRefNode(instance.iri, type_ref))
        if isinstance(spec, LiteralDefaultType):
            default = self._default_constraint(
                self._slot_constraints(slot.node_id, slot.attr))
            return self.model.add_node(PrimitiveValueNode(default, spec.value))
        if isinstance(spec, LiteralOfType):
            return self.model.add_node(
                PrimitiveValueNode(make_type_ref(spec.type_iri), spec.value))
        raise NotAllowed(f"unsupported binding: {spec!r}")

    # --- relation parameters ---

    def _probe_bind_parameter(self, node_id: int, index: int, spec: BindingSpec) -> None:
        constraints = self._param_constraints(node_id, index)
        endpoint = ParamEndpoint(node_id, index)
        if self.model.outgoing_from(endpoint):
            raise SlotOccupied(f"parameter {index + 1} is already bound")
        if isinstance(spec, NewVarDefaultType):
            self._default_constraint(constraints)
        elif isinstance(spec, ExistingVariable):
            target = self._variable(spec.node_id)
            self._require_compatible((target.type,), constraints)
            self._probe_no_cycle(endpoint, spec.node_id)
        else:
            raise NotAllowed("a parameter binds a new or existing variable")

    def bind_parameter(self, node_id: int, index: int, spec: BindingSpec) -> int:
        self._probe_bind_parameter(node_id, index, spec)
        relation = self._relation_def(node_id)
        endpoint = ParamEndpoint(node_id, index)

        def mutate() -> int:
            if isinstance(spec, NewVarDefaultType):
                constraints = self._param_constraints(node_id, index)
                default = self._default_constraint(constraints)
                base = relation.parameters[index].display_name(index)
                target_id = self.model.add_node(
                    VariableNode(self.gen_variable_name(base), default, {}))
            else:
                assert isinstance(spec, ExistingVariable)
                target_id = spec.node_id
            self.model.add_connection(endpoint, target_id)
            return target_id

        return self._execute("bind_parameter", mutate)

    # --- naming operations ---

    def _coref_group(self, start: tuple) -> tuple[set[int], set[tuple[int, str]], str]:
        """Nodes and slots that must share one variable name.

        ``start`` is ("node", id) or ("slot", id, attr).  Returns the node
        ids, the slot keys and the current shared name.
        """
        nodes: set[int] = set()
        slots: set[tuple[int, str]] = set()
        name: str | None = None
        queue: list[tuple] = [start]
        while queue:
            item = queue.pop()
            if item[0] == "node":
                node_id = item[1]
                if node_id in nodes:
                    continue
                node = self._variable(node_id)
                if name is None:
                    name = node.name
                nodes.add(node_id)
                for conn in self.model.incoming(node_id):
                    origin = self._walk_to_origin(conn.source)
                    if isinstance(origin, SlotEndpoint):
                        queue.append(("slot", origin.node_id, origin.attr))
            else:
                key = (item[1], item[2])
                if key in slots:
                    continue
                owner = self._variable(item[1])
                if name is None:
                    name = owner.slot_bindings.get(item[2], "")
                slots.add(key)
                for alt in self.model.slot_alternatives(SlotEndpoint(*key)):
                    if isinstance(self.model.nodes.get(alt), VariableNode):
                        queue.append(("node", alt))
        return nodes, slots, name or ""

    def _probe_rename(self, target: tuple, new_name: str) -> tuple[set[int], set[tuple[int, str]], str]:
        new_name = new_name.lstrip("?")
        if not VARIABLE_NAME.match(new_name):
            raise BadName(f"{new_name!r} is not a valid variable name")
        nodes, slots, old_name = self._coref_group(target)
        if not nodes and not slots:
            raise UnknownNode("nothing to rename")
        if new_name != old_name:
            taken = self.model.variable_names()
            group_names = {old_name}
            if new_name in taken - group_names:
                raise DuplicateName(f"the name ?{new_name} is already in use")
        return nodes, slots, new_name

    def rename_variable(self, target: tuple, new_name: str) -> None:
        nodes, slots, name = self._probe_rename(target, new_name)

        def mutate() -> None:
            for node_id in nodes:
                node = self.model.nodes[node_id]
                assert isinstance(node, VariableNode)
                node.name = name
            for owner_id, attr in slots:
                owner = self.model.nodes[owner_id]
                assert isinstance(owner, VariableNode)
                owner.slot_bindings[attr] = name

        self._execute("rename_variable", mutate)

    def copy_variable(self, node_id: int) -> int:
        original = self._variable(node_id)

        def mutate() -> int:
            copy_id = self.model.add_node(
                VariableNode(original.name, original.type, {}))
            incoming = self.model.incoming(node_id)
            if not incoming:
                or_id = self.model.add_node(OperatorNode(OperatorKind.OR))
                self.model.add_connection(OperatorEndpoint(or_id), node_id)
                self.model.add_connection(OperatorEndpoint(or_id), copy_id)
                return copy_id
            primary = incoming[0]
            source_node = self.model.nodes.get(endpoint_owner(primary.source))
            if isinstance(primary.source, OperatorEndpoint) \
                    and isinstance(source_node, OperatorNode) \
                    and source_node.op is OperatorKind.OR:
                self.model.add_connection(primary.source, copy_id)
                return copy_id
            or_id = self.model.add_node(OperatorNode(OperatorKind.OR))
            primary.target = or_id
            self.model.add_connection(OperatorEndpoint(or_id), node_id)
            self.model.add_connection(OperatorEndpoint(or_id), copy_id)
            return copy_id

        return self._execute("copy_variable", mutate)

    def delete_node(self, node_id: int) -> None:
        if node_id == ROOT_ID:
            raise CannotDeleteRoot("the start node cannot be deleted")
        self.model.node(node_id)
        self._execute("delete_node", lambda: self.model.remove_node(node_id))

    # --- operators ---

    def _probe_insert_operator(self, conn_id: int, kind: OperatorKind,
                               second: BindingSpec | None) -> None:
        conn = self.model.connection(conn_id)
        chain = self.model.chain_kind(conn)
        if chain is None:
            raise UnknownChain("the connection is not part of a complete chain")
        target = self.model.node(conn.target)
        if kind is OperatorKind.NOT:
            if second is not None:
                raise NotArity("a negation takes exactly one operand")
            return
        if kind is OperatorKind.OR:
            slot_to_value = (isinstance(conn.source, SlotEndpoint)
                             and isinstance(target, (VariableNode, InstanceRefNode,
                                                     PrimitiveValueNode)))
            if not slot_to_value and chain is not ChainKind.ROOT:
                raise NotAllowed(
                    "alternatives go on attribute-to-element connections or root chains")
            if isinstance(conn.source, SlotEndpoint):
                if second is None:
                    raise NotAllowed("an alternative for the attribute is required")
                constraints = self._slot_constraints(conn.source.node_id, conn.source.attr)
                self._probe_spec_for_slot(second, constraints, conn.source)
            elif second is not None:
                self._probe_root_operand(second)
            return
        # AND
        if chain is not ChainKind.ROOT:
            raise NotAllowed("conjunctions can only be inserted on root chains")
        if second is not None:
            self._probe_root_operand(second)

    def _probe_root_operand(self, spec: BindingSpec) -> None:
        if isinstance(spec, NewVarOfConcept):
            concept = self.registry.find_concept(spec.concept_iri)
            if concept is None:
                raise StubType(
                    f"'{local_name(spec.concept_iri)}' is not loaded; load the imported ontology first")
        elif isinstance(spec, ExistingVariable):
            self._variable(spec.node_id)
        else:
            raise NotAllowed("a root-chain operand is a new or existing variable")

    def insert_operator_on_connection(self, conn_id: int, kind: OperatorKind,
                                      second: BindingSpec | None = None) -> int:
        self._probe_insert_operator(conn_id, kind, second)
        conn = self.model.connection(conn_id)

        def mutate() -> int:
            op_id = self.model.add_node(OperatorNode(kind))
            old_target = conn.target
            conn.target = op_id
            self.model.add_connection(OperatorEndpoint(op_id), old_target)
            if second is not None:
                self._wire_operand(op_id, second,
                                   slot=conn.source if isinstance(conn.source, SlotEndpoint) else None)
            return op_id

        return self._execute("insert_operator_on_connection", mutate)

    def _wire_operand(self, op_id: int, spec: BindingSpec,
                      slot: SlotEndpoint | None) -> int:
        if slot is not None:
            owner = self._variable(slot.node_id)
            shared = owner.slot_bindings.get(slot.attr)
            if isinstance(spec, ExistingVariable) and shared:
                target_node = self._variable(spec.node_id)
                if target_node.name != shared:
                    # joining the slot's name group: unify without a clash check
                    nodes, slots, _ = self._coref_group(("node", spec.node_id))
                    for nid in nodes:
                        node = self.model.nodes[nid]
                        assert isinstance(node, VariableNode)
                        node.name = shared
                    for owner_id, attr in slots:
                        holder = self.model.nodes[owner_id]
                        assert isinstance(holder, VariableNode)
                        holder.slot_bindings[attr] = shared
                target_id = spec.node_id
            else:
                forced = shared if isinstance(spec, (NewVarDefaultType, NewVarOfConcept)) else None
                target_id = self._realize_spec(spec, slot=slot, forced_name=forced)
        else:
            if isinstance(spec, NewVarOfConcept):
                concept = self.registry.find_concept(spec.concept_iri)
                assert concept is not None
                target_id = self.model.add_node(VariableNode(
                    self.gen_variable_name(concept.name),
                    make_type_ref(concept.iri), {}))
            else:
                assert isinstance(spec, ExistingVariable)
                target_id = spec.node_id
        self.model.add_connection(OperatorEndpoint(op_id), target_id)
        return target_id

    def _probe_add_operand(self, op_id: int, spec: BindingSpec) -> SlotEndpoint | None:
        node = self.model.node(op_id)
        if not isinstance(node, OperatorNode):
            raise NotAllowed(f"node {op_id} is not an operator")
        if not self.model.incoming(op_id):
            raise UnknownChain("connect the operator to a chain before adding operands")
        if node.op is OperatorKind.NOT and self.model.outgoing_from(OperatorEndpoint(op_id)):
            raise NotArity("a negation takes exactly one operand")
        origin = self._walk_to_origin(OperatorEndpoint(op_id))
        if origin is None:
            raise UnknownChain("the operator is not part of a complete chain")
        if isinstance(origin, SlotEndpoint):
            constraints = self._slot_constraints(origin.node_id, origin.attr)
            self._probe_spec_for_slot(spec, constraints, None)
            if isinstance(spec, ExistingVariable):
                self._probe_no_cycle(OperatorEndpoint(op_id), spec.node_id)
            return origin
        if isinstance(origin, ParamEndpoint):
            raise NotAllowed("parameters bind variables directly")
        self._probe_root_operand(spec)
        if isinstance(spec, ExistingVariable):
            self._probe_no_cycle(OperatorEndpoint(op_id), spec.node_id)
        return None

    def add_operand(self, op_id: int, spec: BindingSpec) -> int:
        origin = self._probe_add_operand(op_id, spec)
        return self._execute(
            "add_operand",
            lambda: self._wire_operand(op_id, spec, slot=origin))

    def change_operator_type(self, op_id: int, kind: OperatorKind) -> None:
        node = self.model.node(op_id)
        if not isinstance(node, OperatorNode):
            raise NotAllowed(f"node {op_id} is not an operator")
        if self.model.incoming(op_id) or self.model.outgoing_from(OperatorEndpoint(op_id)):
            raise HasConnections("disconnect the operator before changing its type")

        def mutate() -> None:
            node.op = kind

        self._execute("change_operator_type", mutate)

    # --- primitive values ---

    def set_primitive_value(self, node_id: int, value: str) -> None:
        node = self.model.node(node_id)
        if not isinstance(node, PrimitiveValueNode):
            raise NotAllowed(f"node {node_id} is not a primitive value")
        if not literals.literal_valid(node.type, value):
            raise BadLiteral(f"{value!r} is not a valid {local_name(node.type.iri)}")

        def mutate() -> None:
            node.value = value

        self._execute("set_primitive_value", mutate)

    # --- candidates ---

    def candidates_for(self, target: tuple) -> CandidateReport:
        """Enumerate admissible operations for a target.

        ``target`` is one of ("canvas",), ("node", id), ("slot", id, attr),
        ("param", id, index) or ("connection", id).  Enabled candidates
        succeed when invoked with any listed option; disabled entries carry
        the error code direct invocation raises.
        """
        kind = target[0]
        if kind == "canvas":
            return self._canvas_candidates(target)
        if kind == "node":
            return self._node_candidates(target)
        if kind == "slot":
            return self._slot_candidates(target)
        if kind == "param":
            return self._param_candidates(target)
        if kind == "connection":
            return self._connection_candidates(target)
        raise NotAllowed(f"unknown target: {target!r}")

    def _canvas_candidates(self, target: tuple) -> CandidateReport:
        enabled: list[Candidate] = []
        disabled: list[DisabledOp] = []
        concepts = tuple(c.iri for c in self.registry.list_concepts())
        if concepts:
            enabled.append(Candidate("create_variable", None, concepts))
        enabled.append(Candidate("create_operator", None,
                                 tuple(k.value for k in OperatorKind)))
        instances = tuple(i.iri for onto in self.registry.ontologies.values()
                          for i in sorted(onto.instances.values(), key=lambda d: d.iri))
        if instances:
            enabled.append(Candidate("create_instance_node", None, tuple(sorted(instances))))
        relations = tuple(r.iri for r in self.registry.list_relations())
        if relations:
            enabled.append(Candidate("create_relation_node", None, relations))
        if self.undo_stack:
            enabled.append(Candidate("undo"))
        else:
            disabled.append(DisabledOp("undo", None, "EmptyStack"))
        if self.redo_stack:
            enabled.append(Candidate("redo"))
        else:
            disabled.append(DisabledOp("redo", None, "EmptyStack"))
        return CandidateReport(target, tuple(enabled), tuple(disabled))

    def _node_candidates(self, target: tuple) -> CandidateReport:
        node_id = target[1]
        node = self.model.node(node_id)
        enabled: list[Candidate] = []
        disabled: list[DisabledOp] = []
        if isinstance(node, RootNode):
            self._connection_source_candidates(RootEndpoint(), enabled, disabled)
            return CandidateReport(target, tuple(enabled), tuple(disabled))
        enabled.append(Candidate("delete_node"))
        if isinstance(node, VariableNode):
            enabled.append(Candidate("rename_variable", None,
                                     (self.gen_variable_name(node.name),)))
            enabled.append(Candidate("copy_variable"))
        elif isinstance(node, PrimitiveValueNode):
            enabled.append(Candidate("set_primitive_value", None,
                                     (literals.sample_value(node.type),)))
        elif isinstance(node, OperatorNode):
            others = tuple(k.value for k in OperatorKind if k is not node.op)
            if self.model.incoming(node_id) or self.model.outgoing_from(OperatorEndpoint(node_id)):
                disabled.append(DisabledOp("change_operator_type", None,
                                           "HasConnections", others[0]))
            else:
                enabled.append(Candidate("change_operator_type", None, others))
            self._operand_candidates(node_id, enabled, disabled)
            self._connection_source_candidates(OperatorEndpoint(node_id), enabled, disabled)
        return CandidateReport(target, tuple(enabled), tuple(disabled))

    def _probe_options(self, op: str, variant: str | None, options, probe,
                       enabled: list, disabled: list) -> None:
        """Sort concrete options into one enabled or one disabled entry."""
        ok_options = []
        failure: tuple[Any, str] | None = None
        for option in options:
            try:
                probe(option)
                ok_options.append(option)
            except AxiomForgeError as exc:
                if failure is None:
                    failure = (option, exc.code)
        if ok_options:
            enabled.append(Candidate(op, variant, tuple(ok_options)))
        elif failure is not None:
            disabled.append(DisabledOp(op, variant, failure[1], failure[0]))

    def _operand_candidates(self, op_id: int, enabled: list, disabled: list) -> None:
        for variant, options in self._spec_variants_for_operator(op_id).items():
            self._probe_options(
                "add_operand", variant, options,
                lambda option: self._probe_add_operand(op_id, option),
                enabled, disabled)

    def _spec_variants_for_operator(self, op_id: int) -> dict[str, list[BindingSpec]]:
        """Concrete binding options per variant, before probing."""
        origin = self._walk_to_origin(OperatorEndpoint(op_id))
        variants: dict[str, list[BindingSpec]] = {}
        if origin is None or not self.model.incoming(op_id):
            # probing will fail with UnknownChain; offer one representative
            variants["new_var_of_concept"] = [
                NewVarOfConcept(c.iri) for c in self.registry.list_concepts()[:1]]
            return variants
        if isinstance(origin, SlotEndpoint):
            constraints = self._slot_constraints(origin.node_id, origin.attr)
            variants.update(self._slot_spec_variants(constraints))
        else:
            variants["new_var_of_concept"] = [
                NewVarOfConcept(c.iri) for c in self.registry.list_concepts()]
            variants["existing_variable"] = [
                ExistingVariable(nid) for nid, n in sorted(self.model.nodes.items())
                if isinstance(n, VariableNode)]
        return variants

    def _slot_spec_variants(self, constraints) -> dict[str, list[BindingSpec]]:
        variants: dict[str, list[BindingSpec]] = {
            "new_var_default": [NewVarDefaultType()],
            "new_var_of_concept": [
                NewVarOfConcept(c.iri)
                for c in self.registry.list_compatible_concepts(constraints)],
            "existing_variable": [
                ExistingVariable(nid) for nid, n in sorted(self.model.nodes.items())
                if isinstance(n, VariableNode)],
            "instance_from_ontology": [
                InstanceFromOntology(i.iri)
                for i in self.registry.list_compatible_instances(constraints)],
            "existing_instance": [
                ExistingInstance(nid) for nid, n in sorted(self.model.nodes.items())
                if isinstance(n, InstanceRefNode)],
            "literal_default": [],
            "literal_of_type": [],
        }
        single = constraints[0] if len(constraints) == 1 else None
        if single is not None and single.kind is TypeRefKind.BUILTIN:
            variants["literal_default"] = [LiteralDefaultType(literals.sample_value(single))]
        else:
            variants["literal_default"] = [LiteralDefaultType("text")]
        builtin_types = [self.registry.concept_type_ref(c)
                         for c in self.registry.list_compatible_concepts(constraints)
                         if c.ontology_iri == self.registry.builtin_ontology_iri.rstrip("#/")]
        variants["literal_of_type"] = [
            LiteralOfType(t.iri, literals.sample_value(t)) for t in builtin_types]
        return variants

    def _slot_candidates(self, target: tuple) -> CandidateReport:
        node_id, attr = target[1], target[2]
        slot = SlotEndpoint(node_id, attr)
        enabled: list[Candidate] = []
        disabled: list[DisabledOp] = []
        bound = bool(self.model.outgoing_from(slot))
        if bound:
            owner = self._variable(node_id)
            enabled.append(Candidate("rename_variable", None,
                                     (self.gen_variable_name(owner.slot_bindings.get(attr, attr)),)))
        variants = self._slot_spec_variants(self._slot_constraints(node_id, attr))
        for variant, options in variants.items():
            self._probe_options(
                "refine_attribute", variant, options,
                lambda option: self._probe_refine(node_id, attr, option),
                enabled, disabled)
        self._connection_source_candidates(slot, enabled, disabled)
        return CandidateReport(target, tuple(enabled), tuple(disabled))

    def _param_candidates(self, target: tuple) -> CandidateReport:
        node_id, index = target[1], target[2]
        enabled: list[Candidate] = []
        disabled: list[DisabledOp] = []
        for variant, options in (
                ("new_var_default", [NewVarDefaultType()]),
                ("existing_variable", [ExistingVariable(nid)
                                       for nid, n in sorted(self.model.nodes.items())
                                       if isinstance(n, VariableNode)])):
            self._probe_options(
                "bind_parameter", variant, options,
                lambda option: self._probe_bind_parameter(node_id, index, option),
                enabled, disabled)
        self._connection_source_candidates(ParamEndpoint(node_id, index), enabled, disabled)
        return CandidateReport(target, tuple(enabled), tuple(disabled))

    def _connection_source_candidates(self, source: Endpoint,
                                      enabled: list, disabled: list) -> None:
        candidates = [nid for nid in sorted(self.model.nodes)
                      if nid != endpoint_owner(source)]
        self._probe_options(
            "create_connection", None, candidates,
            lambda nid: self._probe_connection(source, nid),
            enabled, disabled)

    def _connection_candidates(self, target: tuple) -> CandidateReport:
        conn_id = target[1]
        conn = self.model.connection(conn_id)
        enabled: list[Candidate] = [Candidate("delete_connection")]
        disabled: list[DisabledOp] = []
        for kind in OperatorKind:
            seconds: list[BindingSpec | None] = [None]
            if kind is OperatorKind.OR and isinstance(conn.source, SlotEndpoint):
                constraints = self._slot_constraints(conn.source.node_id, conn.source.attr)
                seconds = []
                for options in self._slot_spec_variants(constraints).values():
                    seconds.extend(options)
            self._probe_options(
                "insert_operator_on_connection", kind.value, seconds,
                lambda second: self._probe_insert_operator(conn_id, kind, second),
                enabled, disabled)
        moves = [("target", nid) for nid in sorted(self.model.nodes)
                 if nid != conn.target]
        self._probe_options(
            "move_endpoint", None, moves,
            lambda move: self._probe_connection(conn.source, move[1], ignore_conn=conn_id),
            enabled, disabled)
        return CandidateReport(target, tuple(enabled), tuple(disabled))
