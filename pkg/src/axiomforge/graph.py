"""Mutable graph model of an axiom under construction.

A model always contains exactly one root node ("Start", id 0).  All other
nodes are variables, instance references, primitive values, relation uses
and logical operators.  Connections run from an endpoint (root, attribute
slot, operator body or relation parameter) to a target node.

The model layer is purely structural: it stores state, answers validity
and reachability queries and (de)serializes.  Semantic gating of edits
lives in the engine on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .errors import BadDocument, UnknownConnection, UnknownNode
from .ontology import TypeRef, TypeRefKind, make_type_ref

ROOT_ID = 0
ROOT_LABEL = "Start"


class OperatorKind(Enum):
    AND = "and"
    OR = "or"
    NOT = "not"


class ChainKind(Enum):
    ROOT = "root_chain"
    ATTRIBUTE = "attribute_chain"


# --- nodes -----------------------------------------------------------------

@dataclass
class RootNode:
    kind = "root"


@dataclass
class VariableNode:
    kind = "variable"
    name: str = ""
    type: TypeRef = None  # type: ignore[assignment]
    # attribute name -> variable name shown beside the attribute; an entry
    # exists exactly while the slot has an outgoing connection
    slot_bindings: dict[str, str] = field(default_factory=dict)


@dataclass
class InstanceRefNode:
    kind = "instance"
    instance_iri: str = ""
    type: TypeRef = None  # type: ignore[assignment]


@dataclass
class PrimitiveValueNode:
    kind = "primitive"
    type: TypeRef = None  # type: ignore[assignment]
    value: str = ""


@dataclass
class RelationUseNode:
    kind = "relation"
    relation_iri: str = ""


@dataclass
class OperatorNode:
    kind = "operator"
    op: OperatorKind = OperatorKind.AND


Node = Union[RootNode, VariableNode, InstanceRefNode, PrimitiveValueNode,
             RelationUseNode, OperatorNode]


# --- endpoints -------------------------------------------------------------

@dataclass(frozen=True)
class RootEndpoint:
    kind = "root"


@dataclass(frozen=True)
class SlotEndpoint:
    kind = "slot"
    node_id: int
    attr: str


@dataclass(frozen=True)
class OperatorEndpoint:
    kind = "operator"
    node_id: int


@dataclass(frozen=True)
class ParamEndpoint:
    kind = "param"
    node_id: int
    index: int


Endpoint = Union[RootEndpoint, SlotEndpoint, OperatorEndpoint, ParamEndpoint]


def endpoint_owner(endpoint: Endpoint) -> int:
    if isinstance(endpoint, RootEndpoint):
        return ROOT_ID
    return endpoint.node_id


@dataclass
class Connection:
    id: int
    source: Endpoint
    target: int


# --- model -----------------------------------------------------------------

class AxiomModel:
    def __init__(self, axiom_name: str = "axiom"):
        self.axiom_name = axiom_name
        self.nodes: dict[int, Node] = {ROOT_ID: RootNode()}
        self.connections: dict[int, Connection] = {}
        self._next_node_id = 1
        self._next_conn_id = 1

    # --- mutation primitives ---

    def add_node(self, node: Node) -> int:
        node_id = self._next_node_id
        self._next_node_id += 1
        self.nodes[node_id] = node
        return node_id

    def add_connection(self, source: Endpoint, target: int) -> Connection:
        conn = Connection(self._next_conn_id, source, target)
        self._next_conn_id += 1
        self.connections[conn.id] = conn
        return conn

    def remove_connection(self, conn_id: int) -> None:
        conn = self.connections.pop(conn_id)
        source = conn.source
        if isinstance(source, SlotEndpoint) and not self.outgoing_from(source):
            node = self.nodes.get(source.node_id)
            if isinstance(node, VariableNode):
                node.slot_bindings.pop(source.attr, None)

    def remove_node(self, node_id: int) -> None:
        self.nodes.pop(node_id)
        dead = [c.id for c in self.connections.values()
                if c.target == node_id or endpoint_owner(c.source) == node_id]
        for cid in dead:
            if cid in self.connections:
                self.remove_connection(cid)

    # --- queries ---

    def node(self, node_id: int) -> Node:
        if node_id not in self.nodes:
            raise UnknownNode(f"no node with id {node_id}")
        return self.nodes[node_id]

    def connection(self, conn_id: int) -> Connection:
        if conn_id not in self.connections:
            raise UnknownConnection(f"no connection with id {conn_id}")
        return self.connections[conn_id]

    def outgoing_from(self, endpoint: Endpoint) -> list[Connection]:
        return sorted((c for c in self.connections.values() if c.source == endpoint),
                      key=lambda c: c.id)

    def outgoing_of_node(self, node_id: int) -> list[Connection]:
        return sorted((c for c in self.connections.values()
                       if endpoint_owner(c.source) == node_id),
                      key=lambda c: c.id)

    def incoming(self, node_id: int) -> list[Connection]:
        return sorted((c for c in self.connections.values() if c.target == node_id),
                      key=lambda c: c.id)

    def primary_incoming(self, node_id: int) -> Connection | None:
        incoming = self.incoming(node_id)
        return incoming[0] if incoming else None

    def variable_names(self) -> set[str]:
        """Every variable name in use, including hidden slot binding names."""
        names: set[str] = set()
        for node in self.nodes.values():
            if isinstance(node, VariableNode):
                names.add(node.name)
                names.update(node.slot_bindings.values())
        return names

    def variables_named(self, name: str) -> list[int]:
        return sorted(nid for nid, node in self.nodes.items()
                      if isinstance(node, VariableNode) and node.name == name)

    # --- validity ---

    def operator_valid(self, node_id: int) -> bool:
        node = self.nodes[node_id]
        assert isinstance(node, OperatorNode)
        if not self.incoming(node_id):
            return False
        operands = len(self.outgoing_from(OperatorEndpoint(node_id)))
        if node.op is OperatorKind.NOT:
            return operands == 1
        return operands >= 2

    def node_valid(self, node_id: int, reachable: set[int] | None = None) -> bool:
        node = self.nodes[node_id]
        if isinstance(node, OperatorNode):
            return self.operator_valid(node_id)
        if isinstance(node, RootNode):
            return True
        if reachable is None:
            reachable = self.reachable_from_root()
        return node_id in reachable

    def reachable_from_root(self, for_generation: bool = False) -> set[int]:
        """Node ids reachable from the root.

        With ``for_generation`` the walk refuses to enter invalid operators,
        so their whole subtrees drop out of the generated text.
        """
        seen: set[int] = {ROOT_ID}
        queue = [ROOT_ID]
        while queue:
            current = queue.pop()
            for conn in self.outgoing_of_node(current):
                target = conn.target
                if target in seen or target not in self.nodes:
                    continue
                node = self.nodes[target]
                if for_generation and isinstance(node, OperatorNode) \
                        and not self.operator_valid(target):
                    continue
                seen.add(target)
                queue.append(target)
        return seen

    def chain_kind(self, conn: Connection) -> ChainKind | None:
        """Classify a connection by walking up to its chain origin.

        Returns None when the walk dead-ends in an operator that has no
        incoming connection yet.
        """
        endpoint = conn.source
        visited: set[int] = set()
        while True:
            if isinstance(endpoint, RootEndpoint):
                return ChainKind.ROOT
            if isinstance(endpoint, (SlotEndpoint, ParamEndpoint)):
                return ChainKind.ATTRIBUTE
            op_id = endpoint.node_id
            if op_id in visited:
                return None
            visited.add(op_id)
            incoming = self.incoming(op_id)
            if not incoming:
                return None
            endpoint = incoming[0].source

    def slot_alternatives(self, slot: SlotEndpoint) -> list[int]:
        """Target nodes bound through a slot, looking through operators."""
        out: list[int] = []
        seen: set[int] = set()

        def walk(endpoint: Endpoint) -> None:
            for conn in self.outgoing_from(endpoint):
                target = conn.target
                if target in seen:
                    continue
                seen.add(target)
                node = self.nodes.get(target)
                if isinstance(node, OperatorNode):
                    walk(OperatorEndpoint(target))
                elif node is not None:
                    out.append(target)

        walk(slot)
        return out

    def descendants(self, node_id: int) -> set[int]:
        seen: set[int] = set()
        queue = [node_id]
        while queue:
            current = queue.pop()
            for conn in self.outgoing_of_node(current):
                if conn.target not in seen:
                    seen.add(conn.target)
                    queue.append(conn.target)
        return seen

    def referenced_ontologies(self) -> list[str]:
        from .ontology import split_element_iri
        iris: set[str] = set()
        for node in self.nodes.values():
            if isinstance(node, VariableNode):
                if node.type.kind is not TypeRefKind.UNIVERSAL:
                    iris.add(split_element_iri(node.type.iri)[0])
            elif isinstance(node, InstanceRefNode):
                iris.add(split_element_iri(node.instance_iri)[0])
                if node.type.kind is not TypeRefKind.UNIVERSAL:
                    iris.add(split_element_iri(node.type.iri)[0])
            elif isinstance(node, PrimitiveValueNode):
                iris.add(split_element_iri(node.type.iri)[0])
            elif isinstance(node, RelationUseNode):
                iris.add(split_element_iri(node.relation_iri)[0])
        return sorted(iris)

    # --- serialization ---

    def to_dict(self, geometry: dict[int, tuple[float, float]] | None = None) -> dict:
        nodes = []
        for node_id in sorted(self.nodes):
            node = self.nodes[node_id]
            entry: dict = {"id": node_id, "kind": node.kind}
            if isinstance(node, VariableNode):
                entry["name"] = node.name
                entry["type"] = node.type.iri
                entry["bindings"] = {k: node.slot_bindings[k]
                                     for k in sorted(node.slot_bindings)}
            elif isinstance(node, InstanceRefNode):
                entry["instance"] = node.instance_iri
                entry["type"] = node.type.iri
            elif isinstance(node, PrimitiveValueNode):
                entry["type"] = node.type.iri
                entry["value"] = node.value
            elif isinstance(node, RelationUseNode):
                entry["relation"] = node.relation_iri
            elif isinstance(node, OperatorNode):
                entry["op"] = node.op.value
            if geometry and node_id in geometry:
                entry["x"], entry["y"] = geometry[node_id]
            nodes.append(entry)
        connections = []
        for conn_id in sorted(self.connections):
            conn = self.connections[conn_id]
            source: dict = {"kind": conn.source.kind}
            if isinstance(conn.source, SlotEndpoint):
                source["node"] = conn.source.node_id
                source["attr"] = conn.source.attr
            elif isinstance(conn.source, OperatorEndpoint):
                source["node"] = conn.source.node_id
            elif isinstance(conn.source, ParamEndpoint):
                source["node"] = conn.source.node_id
                source["index"] = conn.source.index
            connections.append({"id": conn_id, "source": source, "target": conn.target})
        return {
            "axiom_name": self.axiom_name,
            "ontologies": self.referenced_ontologies(),
            "nodes": nodes,
            "connections": connections,
        }

    @classmethod
    def from_dict(cls, data: dict) -> tuple["AxiomModel", dict[int, tuple[float, float]]]:
        if not isinstance(data, dict) or "nodes" not in data or "connections" not in data:
            raise BadDocument("expected an object with nodes and connections")
        model = cls(str(data.get("axiom_name", "axiom")))
        model.nodes.clear()
        geometry: dict[int, tuple[float, float]] = {}
        try:
            for entry in data["nodes"]:
                node_id = int(entry["id"])
                kind = entry["kind"]
                node: Node
                if kind == "root":
                    node = RootNode()
                elif kind == "variable":
                    node = VariableNode(entry["name"], make_type_ref(entry["type"]),
                                        dict(entry.get("bindings", {})))
                elif kind == "instance":
                    node = InstanceRefNode(entry["instance"], make_type_ref(entry["type"]))
                elif kind == "primitive":
                    node = PrimitiveValueNode(make_type_ref(entry["type"]),
                                              str(entry["value"]))
                elif kind == "relation":
                    node = RelationUseNode(entry["relation"])
                elif kind == "operator":
                    node = OperatorNode(OperatorKind(entry["op"]))
                else:
                    raise BadDocument(f"unknown node kind {kind!r}")
                model.nodes[node_id] = node
                if "x" in entry and "y" in entry:
                    geometry[node_id] = (float(entry["x"]), float(entry["y"]))
            for entry in data["connections"]:
                src = entry["source"]
                kind = src["kind"]
                source: Endpoint
                if kind == "root":
                    source = RootEndpoint()
                elif kind == "slot":
                    source = SlotEndpoint(int(src["node"]), src["attr"])
                elif kind == "operator":
                    source = OperatorEndpoint(int(src["node"]))
                elif kind == "param":
                    source = ParamEndpoint(int(src["node"]), int(src["index"]))
                else:
                    raise BadDocument(f"unknown endpoint kind {kind!r}")
                conn = Connection(int(entry["id"]), source, int(entry["target"]))
                model.connections[conn.id] = conn
        except (KeyError, TypeError, ValueError) as exc:
            raise BadDocument(f"malformed model document: {exc}") from exc
        if ROOT_ID not in model.nodes or not isinstance(model.nodes[ROOT_ID], RootNode):
            raise BadDocument("model has no root node")
        for conn in model.connections.values():
            if conn.target not in model.nodes:
                raise BadDocument(f"connection {conn.id} targets missing node {conn.target}")
            if endpoint_owner(conn.source) not in model.nodes:
                raise BadDocument(f"connection {conn.id} starts at a missing node")
        model._next_node_id = max(model.nodes) + 1
        model._next_conn_id = max(model.connections, default=0) + 1
        return model, geometry

    def canonical(self) -> str:
        import json
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)
