"""Deterministic WSML text generation from an axiom model.

The generator walks the model from the root, skipping disconnected nodes
and operators that are not structurally valid, builds an expression tree
and hands it to the canonical serializer.  Identical models therefore
always produce identical bytes.

A variable's full definition (its molecule with the attribute bracket and
the trailing conjuncts) is rendered at its primary connection, the
incoming connection with the lowest id.  Later connections to the same
variable render a bare ``?name memberOf type`` reference.  Attribute
bindings to instances and literals render one equality conjunct per slot,
using the slot's shared variable name.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import literals
from .errors import EmptySections
from .graph import (
    AxiomModel, Connection, InstanceRefNode, OperatorKind, OperatorNode,
    ParamEndpoint, PrimitiveValueNode, RelationUseNode, RootEndpoint,
    SlotEndpoint, VariableNode,
)
from .ontology import OntologyRegistry, TypeRefKind, norm_iri, split_element_iri
from .syntax import (
    AnonVariable, AxiomDecl, Conjunction, Disjunction, Equality, Expr,
    Grouping, INDENT, LocalName, Molecule, Negation, NfpBlock, NfpEntry,
    QualifiedName, RefName, RelationApplication, StringValue, Term,
    AttributeValue, Variable, axiom_lines, serialize_expression, term_text,
    _body_block,
)

AUTO_DESCRIPTION = "Auto-generated axiom by Axiom Editor"
NEGATION_FLAVORS = ("not", "naf", "neg")


@dataclass(frozen=True)
class RenderOptions:
    negation_flavor: str = "not"

    def __post_init__(self):
        if self.negation_flavor not in NEGATION_FLAVORS:
            raise ValueError(f"negation flavor must be one of {NEGATION_FLAVORS}")


def auto_axiom_name(counter: int) -> str:
    return f"autoGeneratedAxiom_{counter}"


class _Renderer:
    def __init__(self, model: AxiomModel, registry: OntologyRegistry,
                 options: RenderOptions):
        self.model = model
        self.registry = registry
        self.options = options
        self.home = self._home_ontology()

    def _home_ontology(self) -> str | None:
        for node_id in sorted(self.model.nodes):
            node = self.model.nodes[node_id]
            if isinstance(node, VariableNode):
                onto, _ = split_element_iri(node.type.iri)
                return onto
        return None

    def _ref(self, iri: str) -> RefName:
        onto, local = split_element_iri(iri)
        loaded = self.registry.ontologies.get(onto)
        if loaded is None or onto == self.home:
            return LocalName(local)
        return QualifiedName(loaded.short_name, local)

    # --- traversal ---

    def root_expression(self) -> Expr | None:
        conns = self.model.outgoing_from(RootEndpoint())
        if not conns:
            return None
        return self._render_via(conns[0], origin_slot=None)

    def _render_via(self, conn: Connection, origin_slot: SlotEndpoint | None) -> Expr | None:
        node = self.model.nodes.get(conn.target)
        if node is None:
            return None
        if isinstance(node, VariableNode):
            if self.model.primary_incoming(conn.target) is conn:
                return self._variable_definition(conn.target)
            return Molecule(Variable(node.name), (self._ref(node.type.iri),))
        if isinstance(node, InstanceRefNode):
            if origin_slot is None:
                return None
            name = self._slot_name(origin_slot)
            return Equality(Variable(name), self._ref(node.instance_iri))
        if isinstance(node, PrimitiveValueNode):
            if origin_slot is None:
                return None
            name = self._slot_name(origin_slot)
            return Equality(Variable(name), literals.literal_term(node.type, node.value))
        if isinstance(node, OperatorNode):
            return self._operator_expression(conn.target, origin_slot)
        if isinstance(node, RelationUseNode):
            return self._relation_group(conn.target)
        return None

    def _slot_name(self, slot: SlotEndpoint) -> str:
        owner = self.model.nodes[slot.node_id]
        assert isinstance(owner, VariableNode)
        return owner.slot_bindings.get(slot.attr, slot.attr)

    def _operator_expression(self, op_id: int, origin_slot: SlotEndpoint | None) -> Expr | None:
        node = self.model.nodes[op_id]
        assert isinstance(node, OperatorNode)
        if not self.model.operator_valid(op_id):
            return None
        rendered = []
        for conn in self.model.outgoing_of_node(op_id):
            expr = self._render_via(conn, origin_slot)
            if expr is not None:
                rendered.append(expr)
        if not rendered:
            return None
        if node.op is OperatorKind.NOT:
            return Negation(self.options.negation_flavor, Grouping(rendered[0]))
        if len(rendered) == 1:
            return rendered[0]
        wrapped = tuple(Grouping(e) for e in rendered)
        if node.op is OperatorKind.AND:
            return Conjunction(wrapped)
        return Disjunction(wrapped)

    def _variable_definition(self, node_id: int) -> Expr:
        node = self.model.nodes[node_id]
        assert isinstance(node, VariableNode)
        entries: list[AttributeValue] = []
        conjuncts: list[Expr] = []
        for attr_name, attr_ref, conn in self._bound_slots(node_id):
            slot = SlotEndpoint(node_id, attr_name)
            entries.append(AttributeValue(attr_ref, (Variable(self._slot_name(slot)),)))
            target = self.model.nodes.get(conn.target)
            if isinstance(target, VariableNode):
                if self.model.primary_incoming(conn.target) is conn:
                    conjuncts.append(self._variable_definition(conn.target))
            else:
                expr = self._render_via(conn, origin_slot=slot)
                if expr is not None:
                    conjuncts.append(expr)
        molecule = Molecule(Variable(node.name), (self._ref(node.type.iri),),
                            tuple(entries))
        if not conjuncts:
            return molecule
        return Conjunction((molecule, *(Grouping(c) for c in conjuncts)))

    def _bound_slots(self, node_id: int):
        """Bound attribute slots of a variable, in effective-attribute order."""
        node = self.model.nodes[node_id]
        assert isinstance(node, VariableNode)
        if node.type.kind is not TypeRefKind.CONCEPT or \
                self.registry.find_concept(node.type.iri) is None:
            ordered = sorted(node.slot_bindings)
        else:
            ordered = [eff.name for eff in
                       self.registry.effective_attributes(node.type.iri)]
        for attr in ordered:
            conns = self.model.outgoing_from(SlotEndpoint(node_id, attr))
            if conns:
                yield attr, self._attr_ref(node.type.iri, attr), conns[0]

    def _attr_ref(self, concept_iri: str, attr: str) -> RefName:
        concept = self.registry.find_concept(concept_iri)
        if concept is not None:
            for eff in self.registry.effective_attributes(concept_iri):
                if eff.name == attr:
                    onto, _ = split_element_iri(eff.declared_in)
                    loaded = self.registry.ontologies.get(onto)
                    if loaded is not None and onto != self.home:
                        return QualifiedName(loaded.short_name, attr)
                    break
        return LocalName(attr)

    def _relation_group(self, node_id: int) -> Expr:
        node = self.model.nodes[node_id]
        assert isinstance(node, RelationUseNode)
        relation = self.registry.find_relation(node.relation_iri)
        arity = len(relation.parameters) if relation else 0
        args: list[Term] = []
        conjuncts: list[Expr] = []
        for index in range(arity):
            conns = self.model.outgoing_from(ParamEndpoint(node_id, index))
            if not conns:
                args.append(AnonVariable())
                continue
            target = self.model.nodes.get(conns[0].target)
            if isinstance(target, VariableNode):
                args.append(Variable(target.name))
                if self.model.primary_incoming(conns[0].target) is conns[0]:
                    conjuncts.append(self._variable_definition(conns[0].target))
            else:
                args.append(AnonVariable())
        application = RelationApplication(self._ref(node.relation_iri), tuple(args))
        if not conjuncts:
            return application
        return Conjunction((application, *(Grouping(c) for c in conjuncts)))


def build_expression(model: AxiomModel, registry: OntologyRegistry,
                     options: RenderOptions | None = None) -> Expr | None:
    return _Renderer(model, registry, options or RenderOptions()).root_expression()


def generate_axiom_text(model: AxiomModel, registry: OntologyRegistry,
                        options: RenderOptions | None = None) -> str:
    body = build_expression(model, registry, options)
    decl = AxiomDecl(model.axiom_name, nfp=_auto_nfp(), body=body)
    return "\n".join(axiom_lines(decl)) + "\n"


def render_node(model: AxiomModel, registry: OntologyRegistry, node_id: int,
                options: RenderOptions | None = None) -> str:
    """Text of the expression a single reachable node contributes."""
    renderer = _Renderer(model, registry, options or RenderOptions())
    incoming = model.primary_incoming(node_id)
    if incoming is None:
        return ""
    origin = incoming.source if isinstance(incoming.source, SlotEndpoint) else None
    expr = renderer._render_via(incoming, origin_slot=origin)
    if expr is None:
        return ""
    return serialize_expression(expr)


def _auto_nfp() -> NfpBlock:
    return NfpBlock((NfpEntry(QualifiedName("dc", "description"),
                              (StringValue(AUTO_DESCRIPTION),)),))


def namespace_preamble(registry: OntologyRegistry, model: AxiomModel) -> str:
    """Namespace declarations for every ontology the model refers to."""
    entries = []
    for iri in model.referenced_ontologies():
        loaded = registry.ontologies.get(norm_iri(iri))
        if loaded is not None:
            entries.append((loaded.short_name, loaded.iri))
    entries.sort()
    if not entries:
        return ""
    lines = ["namespace {"]
    for i, (short, iri) in enumerate(entries):
        line = f'{INDENT}{short} _"{iri}"'
        if i < len(entries) - 1:
            line += ","
        lines.append(line)
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CapabilitySkeleton:
    kind: str  # precondition | postcondition | assumption | effect
    body_text: str  # rendered definedBy block content, dot included
    description: str | None = None
    shared_variables: tuple[str, ...] = ()


SECTION_ORDER = ("precondition", "postcondition", "assumption", "effect")


def axiom_body_block(model: AxiomModel, registry: OntologyRegistry,
                     options: RenderOptions | None = None) -> str:
    """Only the lines below ``definedBy``, reusable inside capabilities."""
    body = build_expression(model, registry, options)
    return "\n".join(_body_block(body)[1:])


def emit_capability(sections: list[CapabilitySkeleton]) -> str:
    if not sections:
        raise EmptySections("a capability needs at least one section")
    ordered = sorted(sections, key=lambda s: SECTION_ORDER.index(s.kind))
    lines = ["capability"]
    shared: list[str] = []
    for section in ordered:
        for name in section.shared_variables:
            if name not in shared:
                shared.append(name)
    if shared:
        text = ", ".join("?" + v for v in shared)
        if len(shared) > 1:
            text = "{" + text + "}"
        lines.append(f"{INDENT}sharedVariables {text}")
    for section in ordered:
        lines.append(f"{INDENT}{section.kind}")
        if section.description:
            value = term_text(StringValue(section.description))
            lines.append(f"{INDENT * 2}nonFunctionalProperties")
            lines.append(f"{INDENT * 3}dc:description hasValue {value}")
            lines.append(f"{INDENT * 2}endNonFunctionalProperties")
        lines.append(f"{INDENT * 2}definedBy")
        for body_line in section.body_text.splitlines():
            lines.append(f"{INDENT * 2}{body_line}" if body_line else "")
    return "\n".join(lines) + "\n"
