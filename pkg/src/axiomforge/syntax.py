"""Abstract syntax for the WSML subset plus the canonical serializer.

The serializer is the single place that decides layout.  Its output is
deterministic: serializing the same tree twice yields identical bytes, and
parsing the serialized form yields an equal tree.

Layout conventions (2-space indent, LF line endings):

* a molecule's attribute bracket opens on its own line and closes either
  with ``]`` or, when conjuncts follow, with ``] and`` on one line;
* conjunctions headed by a bracketed molecule keep connectives glued to
  the preceding closing bracket or parenthesis (``] and`` / ``) and``),
  while operator-style conjunctions put ``and`` / ``or`` on a line of
  their own between parenthesized operands;
* negation renders inline for one-line operands and on its own line
  otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

INDENT = "  "


# --- names -----------------------------------------------------------------

@dataclass(frozen=True)
class LocalName:
    name: str


@dataclass(frozen=True)
class QualifiedName:
    prefix: str
    local: str


@dataclass(frozen=True)
class FullIri:
    iri: str


@dataclass(frozen=True)
class BuiltinName:
    """Underscore-prefixed datatype name such as ``_string`` or ``_float``."""

    name: str


RefName = Union[LocalName, QualifiedName, FullIri, BuiltinName]


def ref_text(ref: RefName) -> str:
    if isinstance(ref, LocalName):
        return ref.name
    if isinstance(ref, QualifiedName):
        return f"{ref.prefix}:{ref.local}"
    if isinstance(ref, FullIri):
        return f'_"{ref.iri}"'
    return ref.name


# --- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Variable:
    name: str  # without the leading '?'


@dataclass(frozen=True)
class AnonVariable:
    pass


@dataclass(frozen=True)
class StringValue:
    text: str


@dataclass(frozen=True)
class NumberValue:
    lexeme: str


@dataclass(frozen=True)
class DateValue:
    ctor: str  # _date or _dateTime
    args: tuple[str, ...]


@dataclass(frozen=True)
class FunctionCall:
    """Functional term such as ``lib:currentDate()`` used as an argument."""

    function: Union[LocalName, QualifiedName, FullIri]
    args: tuple["Term", ...]


Term = Union[Variable, AnonVariable, StringValue, NumberValue, DateValue,
             FunctionCall, LocalName, QualifiedName, FullIri, BuiltinName]


def term_text(term: Term) -> str:
    if isinstance(term, Variable):
        return "?" + term.name
    if isinstance(term, AnonVariable):
        return "?#"
    if isinstance(term, StringValue):
        escaped = term.text.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(term, NumberValue):
        return term.lexeme
    if isinstance(term, DateValue):
        return f"{term.ctor}({','.join(term.args)})"
    if isinstance(term, FunctionCall):
        inner = ", ".join(term_text(a) for a in term.args)
        return f"{ref_text(term.function)}({inner})"
    return ref_text(term)


def _term_set_text(values: tuple[Term, ...]) -> str:
    if len(values) == 1:
        return term_text(values[0])
    return "{" + ", ".join(term_text(v) for v in values) + "}"


def _ref_set_text(refs: tuple[RefName, ...]) -> str:
    if len(refs) == 1:
        return ref_text(refs[0])
    return "{" + ", ".join(ref_text(r) for r in refs) + "}"


# --- logical expressions ---------------------------------------------------

@dataclass(frozen=True)
class AttributeValue:
    attribute: RefName
    values: tuple[Term, ...]


@dataclass(frozen=True)
class Molecule:
    term: Term
    types: tuple[RefName, ...] = ()
    attrs: tuple[AttributeValue, ...] = ()


@dataclass(frozen=True)
class Conjunction:
    children: tuple["Expr", ...]


@dataclass(frozen=True)
class Disjunction:
    children: tuple["Expr", ...]


@dataclass(frozen=True)
class Negation:
    flavor: str  # not | naf | neg
    child: "Expr"


@dataclass(frozen=True)
class Equality:
    left: Term
    right: Term


@dataclass(frozen=True)
class RelationApplication:
    name: RefName
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Grouping:
    child: "Expr"


Expr = Union[Molecule, Conjunction, Disjunction, Negation, Equality,
             RelationApplication, Grouping]


def _indented(lines: list[str]) -> list[str]:
    return [INDENT + line if line else line for line in lines]


def _molecule_lines(m: Molecule) -> list[str]:
    head = term_text(m.term)
    if m.types:
        head += " memberOf " + _ref_set_text(m.types)
    if not m.attrs:
        return [head]
    lines = [head, "["]
    for i, av in enumerate(m.attrs):
        entry = f"{INDENT}{ref_text(av.attribute)} hasValue {_term_set_text(av.values)}"
        if i < len(m.attrs) - 1:
            entry += ","
        lines.append(entry)
    lines.append("]")
    return lines


def _glue_style(children: tuple[Expr, ...]) -> bool:
    first = children[0]
    return isinstance(first, Molecule) and bool(first.attrs)


def _joined_lines(children: tuple[Expr, ...], word: str) -> list[str]:
    glue = _glue_style(children)
    out = expression_lines(children[0])
    for child in children[1:]:
        if glue:
            out[-1] += f" {word}"
            out.extend(expression_lines(child))
        else:
            out.append(word)
            out.extend(expression_lines(child))
    return out


def expression_lines(expr: Expr) -> list[str]:
    """Render ``expr`` as lines indented relative to the expression itself."""
    if isinstance(expr, Molecule):
        return _molecule_lines(expr)
    if isinstance(expr, Conjunction):
        return _joined_lines(expr.children, "and")
    if isinstance(expr, Disjunction):
        return _joined_lines(expr.children, "or")
    if isinstance(expr, Negation):
        child = expr.child
        if isinstance(child, (Conjunction, Disjunction)):
            child = Grouping(child)  # keep the negation scope on reparse
        inner = expression_lines(child)
        if len(inner) == 1:
            return [f"{expr.flavor} {inner[0]}"]
        return [expr.flavor, *inner]
    if isinstance(expr, Equality):
        return [f"{term_text(expr.left)} = {term_text(expr.right)}"]
    if isinstance(expr, RelationApplication):
        args = ", ".join(term_text(a) for a in expr.args)
        return [f"{ref_text(expr.name)}({args})"]
    if isinstance(expr, Grouping):
        return ["(", *_indented(expression_lines(expr.child)), ")"]
    raise TypeError(f"not an expression: {expr!r}")


def serialize_expression(expr: Expr) -> str:
    return "\n".join(expression_lines(expr))


# --- document-level declarations ------------------------------------------

@dataclass(frozen=True)
class NfpEntry:
    key: RefName
    values: tuple[Term, ...]


@dataclass(frozen=True)
class NfpBlock:
    entries: tuple[NfpEntry, ...]


@dataclass(frozen=True)
class AttributeDecl:
    name: str
    kind: str  # ofType | impliesType
    types: tuple[RefName, ...]


@dataclass(frozen=True)
class ConceptDecl:
    name: str
    supers: tuple[RefName, ...] = ()
    nfp: NfpBlock | None = None
    attributes: tuple[AttributeDecl, ...] = ()


@dataclass(frozen=True)
class InstanceDecl:
    name: str
    member_of: tuple[RefName, ...] = ()
    nfp: NfpBlock | None = None
    values: tuple[AttributeValue, ...] = ()


@dataclass(frozen=True)
class ParamDecl:
    name: str | None
    kind: str  # ofType | impliesType
    types: tuple[RefName, ...]


@dataclass(frozen=True)
class RelationDecl:
    name: str
    params: tuple[ParamDecl, ...]
    super_relation: RefName | None = None
    nfp: NfpBlock | None = None


@dataclass(frozen=True)
class AxiomDecl:
    name: str
    nfp: NfpBlock | None = None
    body: Expr | None = None


ElementDecl = Union[ConceptDecl, InstanceDecl, RelationDecl, AxiomDecl]


@dataclass(frozen=True)
class NamespaceDecl:
    prefix: str | None  # None marks the default namespace
    iri: str


@dataclass(frozen=True)
class OntologyDoc:
    identifier: RefName | None  # None for bare element fragments
    namespaces: tuple[NamespaceDecl, ...] = ()
    imports: tuple[RefName, ...] = ()
    nfp: NfpBlock | None = None
    elements: tuple[ElementDecl, ...] = ()
    variant: str | None = None


@dataclass(frozen=True)
class CapabilitySection:
    kind: str  # precondition | postcondition | assumption | effect
    nfp: NfpBlock | None = None
    body: Expr | None = None
    name: str | None = None


@dataclass(frozen=True)
class CapabilityDoc:
    shared_variables: tuple[str, ...] = ()
    sections: tuple[CapabilitySection, ...] = ()
    name: str | None = None
    nfp: NfpBlock | None = None
    imports: tuple[RefName, ...] = ()


Document = Union[OntologyDoc, CapabilityDoc, AxiomDecl]


# --- document serialization ------------------------------------------------

def _nfp_lines(nfp: NfpBlock) -> list[str]:
    lines = ["nonFunctionalProperties"]
    for entry in nfp.entries:
        lines.append(f"{INDENT}{ref_text(entry.key)} hasValue {_term_set_text(entry.values)}")
    lines.append("endNonFunctionalProperties")
    return lines


def _body_block(body: Expr | None, wrap_compound: bool = True) -> list[str]:
    """The definedBy block of an axiom, with the closing dot placed."""
    lines = ["definedBy"]
    if body is None:
        lines.append(".")
        return lines
    expr = expression_lines(body)
    if wrap_compound and isinstance(body, (Conjunction, Disjunction)):
        block = ["(", *_indented(expr), ")"]
    else:
        block = _indented(expr)
    block[-1] += "."
    lines.extend(block)
    return lines


def axiom_lines(decl: AxiomDecl, wrap_compound: bool = True) -> list[str]:
    lines = [f"axiom {decl.name}"]
    if decl.nfp:
        lines.extend(_indented(_nfp_lines(decl.nfp)))
    lines.extend(_indented(_body_block(decl.body, wrap_compound)))
    return lines


def _concept_lines(decl: ConceptDecl) -> list[str]:
    head = f"concept {decl.name}"
    if decl.supers:
        head += " subConceptOf " + _ref_set_text(decl.supers)
    lines = [head]
    if decl.nfp:
        lines.extend(_indented(_nfp_lines(decl.nfp)))
    for attr in decl.attributes:
        lines.append(f"{INDENT}{attr.name} {attr.kind} {_ref_set_text(attr.types)}")
    return lines


def _instance_lines(decl: InstanceDecl) -> list[str]:
    head = f"instance {decl.name}"
    if decl.member_of:
        head += " memberOf " + _ref_set_text(decl.member_of)
    lines = [head]
    if decl.nfp:
        lines.extend(_indented(_nfp_lines(decl.nfp)))
    for av in decl.values:
        lines.append(f"{INDENT}{ref_text(av.attribute)} hasValue {_term_set_text(av.values)}")
    return lines


def _relation_lines(decl: RelationDecl) -> list[str]:
    params = []
    for p in decl.params:
        prefix = f"{p.name} " if p.name else ""
        params.append(f"{prefix}{p.kind} {_ref_set_text(p.types)}")
    head = f"relation {decl.name} ({', '.join(params)})"
    if decl.super_relation:
        head += " subRelationOf " + ref_text(decl.super_relation)
    lines = [head]
    if decl.nfp:
        lines.extend(_indented(_nfp_lines(decl.nfp)))
    return lines


def _element_lines(decl: ElementDecl) -> list[str]:
    if isinstance(decl, ConceptDecl):
        return _concept_lines(decl)
    if isinstance(decl, InstanceDecl):
        return _instance_lines(decl)
    if isinstance(decl, RelationDecl):
        return _relation_lines(decl)
    return axiom_lines(decl, wrap_compound=False)


def _ontology_lines(doc: OntologyDoc) -> list[str]:
    lines: list[str] = []
    if doc.variant:
        lines.append(f'wsmlVariant _"{doc.variant}"')
    if doc.namespaces:
        lines.append("namespace {")
        for i, ns in enumerate(doc.namespaces):
            entry = f'{INDENT}_"{ns.iri}"' if ns.prefix is None else f'{INDENT}{ns.prefix} _"{ns.iri}"'
            if i < len(doc.namespaces) - 1:
                entry += ","
            lines.append(entry)
        lines.append("}")
    if doc.identifier is not None:
        lines.append(f"ontology {ref_text(doc.identifier)}")
    if doc.nfp:
        lines.extend(_indented(_nfp_lines(doc.nfp)))
    for imp in doc.imports:
        lines.append(f"importsOntology {ref_text(imp)}")
    for element in doc.elements:
        if lines:
            lines.append("")
        lines.extend(_element_lines(element))
    return lines


def _capability_lines(doc: CapabilityDoc) -> list[str]:
    lines = ["capability" if doc.name is None else f"capability {doc.name}"]
    if doc.nfp:
        lines.extend(_indented(_nfp_lines(doc.nfp)))
    for imp in doc.imports:
        lines.append(f"{INDENT}importsOntology {ref_text(imp)}")
    if doc.shared_variables:
        names = ", ".join("?" + v for v in doc.shared_variables)
        if len(doc.shared_variables) > 1:
            names = "{" + names + "}"
        lines.append(f"{INDENT}sharedVariables {names}")
    for section in doc.sections:
        head = section.kind if section.name is None else f"{section.kind} {section.name}"
        lines.append(f"{INDENT}{head}")
        if section.nfp:
            lines.extend(_indented(_indented(_nfp_lines(section.nfp))))
        lines.extend(_indented(_indented(_body_block(section.body, wrap_compound=False))))
    return lines


def serialize_document(doc: Document) -> str:
    if isinstance(doc, OntologyDoc):
        lines = _ontology_lines(doc)
    elif isinstance(doc, CapabilityDoc):
        lines = _capability_lines(doc)
    elif isinstance(doc, AxiomDecl):
        lines = axiom_lines(doc, wrap_compound=False)
    else:
        raise TypeError(f"not a document: {doc!r}")
    return "\n".join(lines) + "\n"
