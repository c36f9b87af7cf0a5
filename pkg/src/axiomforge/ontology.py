"""Ontology warehouse, registry and the subsumption relation.

A warehouse is a directory of ``.wsml`` files indexed by the ontology IRI
each file declares.  A registry holds the ontologies actually loaded into
memory, assigns them unique short names, completes inherited attributes
and answers type-compatibility queries.  References to concepts that live
in not-yet-loaded imports stay around as name-only stubs and resolve
automatically once the imported ontology is loaded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from . import parser as wsml_parser
from .errors import (
    BadDocument, CyclicInheritance, DirectoryNotFound, DuplicateIri,
    NotInWarehouse, ParseError, UnknownElement, UnresolvedStub,
)
from .syntax import (
    AttributeValue, AxiomDecl, BuiltinName, ConceptDecl, FullIri,
    InstanceDecl, LocalName, OntologyDoc, QualifiedName, RefName,
    RelationDecl,
)
from .tokens import TokenKind, tokenize

XSD_IRI = "http://www.w3.org/2001/XMLSchema#"
WSML_IRI = "http://www.wsmo.org/wsml/wsml-syntax#"
WSML_TRUE_IRI = WSML_IRI + "true"
DC_IRI = "http://purl.org/dc/elements/1.1#"

# prefixes understood even without a namespace declaration
WELL_KNOWN_PREFIXES = {
    "xsd": XSD_IRI,
    "wsml": WSML_IRI,
    "dc": DC_IRI,
}

BUILTIN_TYPE_NAMES = {
    "_string": "string",
    "_boolean": "boolean",
    "_integer": "integer",
    "_decimal": "decimal",
    "_float": "float",
    "_double": "double",
    "_date": "date",
    "_dateTime": "dateTime",
    "_time": "time",
}


class TypeRefKind(Enum):
    CONCEPT = "concept"
    BUILTIN = "builtin"
    UNIVERSAL = "universal"


@dataclass(frozen=True)
class TypeRef:
    iri: str
    kind: TypeRefKind


def make_type_ref(iri: str) -> TypeRef:
    if iri == WSML_TRUE_IRI:
        return TypeRef(iri, TypeRefKind.UNIVERSAL)
    if iri.startswith(XSD_IRI):
        return TypeRef(iri, TypeRefKind.BUILTIN)
    return TypeRef(iri, TypeRefKind.CONCEPT)


class ConstraintKind(Enum):
    OF_TYPE = "ofType"
    IMPLIES_TYPE = "impliesType"


class InheritanceKind(Enum):
    OWN = "own"
    INHERITED = "inherited"
    OVERRIDDEN = "overridden"


@dataclass(frozen=True)
class AttributeDef:
    name: str
    constraint_kind: ConstraintKind
    type_constraints: tuple[TypeRef, ...]


@dataclass(frozen=True)
class EffectiveAttribute:
    definition: AttributeDef
    inheritance: InheritanceKind
    declared_in: str  # IRI of the concept contributing the first declaration

    @property
    def name(self) -> str:
        return self.definition.name


@dataclass(frozen=True)
class ConceptDef:
    iri: str
    name: str
    ontology_iri: str
    supers: tuple[str, ...]
    own_attributes: tuple[AttributeDef, ...]


@dataclass(frozen=True)
class InstanceDef:
    iri: str
    name: str
    ontology_iri: str
    member_of: tuple[str, ...]
    values: tuple[AttributeValue, ...]


@dataclass(frozen=True)
class ParameterDef:
    name: str | None
    constraint_kind: ConstraintKind
    type_constraints: tuple[TypeRef, ...]

    def display_name(self, index: int) -> str:
        return self.name or f"p{index + 1}"


@dataclass(frozen=True)
class RelationDef:
    iri: str
    name: str
    ontology_iri: str
    parameters: tuple[ParameterDef, ...]
    super_relation: str | None


@dataclass
class LoadedOntology:
    iri: str            # as declared in the file
    norm_iri: str       # trailing '#'/'/' stripped; registry key
    short_name: str
    source_path: Path | None
    imports: tuple[str, ...]
    concepts: dict[str, ConceptDef]
    instances: dict[str, InstanceDef]
    relations: dict[str, RelationDef]
    axioms: dict[str, AxiomDecl]


def norm_iri(iri: str) -> str:
    return iri.rstrip("#/")


def split_element_iri(iri: str) -> tuple[str, str]:
    """Split an element IRI into (normalized ontology IRI, local name)."""
    if "#" in iri:
        onto, local = iri.rsplit("#", 1)
        return norm_iri(onto), local
    if "/" in iri:
        onto, local = iri.rsplit("/", 1)
        return norm_iri(onto), local
    return "", iri


def make_element_iri(ontology_iri: str, local: str) -> str:
    if ontology_iri.endswith(("#", "/")):
        return ontology_iri + local
    return ontology_iri + "#" + local


def local_name(iri: str) -> str:
    return split_element_iri(iri)[1]


def _short_name_base(iri: str) -> str:
    stripped = norm_iri(iri)
    segments = [s for s in re.split(r"[/#]", stripped) if s]
    return segments[-1] if segments else "ns"


# --- warehouse -------------------------------------------------------------

def _declared_iri(text: str, filename: str) -> str | None:
    """Extract the declared ontology IRI without a full parse."""
    tokens = tokenize(text, filename)
    for i, token in enumerate(tokens):
        if token.kind is TokenKind.KEYWORD and token.value == "ontology":
            nxt = tokens[i + 1]
            if nxt.kind is TokenKind.IRI:
                return nxt.value
            if nxt.kind is TokenKind.IDENT:
                return nxt.value
            return None
    return None


class OntologyWarehouse:
    """Index of ``.wsml`` files in a directory, keyed by declared IRI."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        if not self.root.is_dir():
            raise DirectoryNotFound(f"not a directory: {self.root}")
        self.index: dict[str, Path] = {}
        self.declared: dict[str, str] = {}
        self.warnings: list[str] = []
        self._scan()

    def _scan(self) -> None:
        for path in sorted(self.root.glob("*.wsml")):
            try:
                text = path.read_text(encoding="utf-8")
                iri = _declared_iri(text, str(path))
            except (OSError, UnicodeDecodeError) as exc:
                self.warnings.append(f"{path}: {exc}")
                continue
            except ParseError as exc:
                self.warnings.append(f"{path}: {exc.message}")
                continue
            if iri is None:
                self.warnings.append(f"{path}: no ontology declaration found")
                continue
            key = norm_iri(iri)
            if key in self.index:
                raise DuplicateIri(
                    f"ontology {iri} declared by both {self.index[key]} and {path}")
            self.index[key] = path
            self.declared[key] = iri

    def has(self, iri: str) -> bool:
        return norm_iri(iri) in self.index

    def lookup(self, iri: str) -> Path:
        key = norm_iri(iri)
        if key not in self.index:
            raise NotInWarehouse(f"ontology not in warehouse: {iri}")
        return self.index[key]

    def list_iris(self) -> list[str]:
        return sorted(self.declared.values())


def open_warehouse(root: Path | str) -> OntologyWarehouse:
    return OntologyWarehouse(root)


# --- registry --------------------------------------------------------------

class OntologyRegistry:
    """Loaded ontologies with short names, completion and compatibility."""

    builtin_ontology_iri = XSD_IRI

    def __init__(self, warehouse: OntologyWarehouse | None = None):
        self.warehouse = warehouse
        self.ontologies: dict[str, LoadedOntology] = {}
        self.short_names: dict[str, str] = {}  # short -> norm iri
        self._effective: dict[str, tuple[EffectiveAttribute, ...]] = {}
        self._closures: dict[str, tuple[frozenset[str], bool]] = {}
        self._load_builtin()

    def _load_builtin(self) -> None:
        text = resources.files("axiomforge").joinpath("data/xml_schema.wsml").read_text("utf-8")
        doc = wsml_parser.parse_document(text, "xml_schema.wsml")
        assert isinstance(doc, OntologyDoc)
        self._register(doc, None, forced_short="xsd")

    # --- loading ---

    def load_ontology_file(self, path: Path | str) -> LoadedOntology:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise NotInWarehouse(f"cannot read {path}: {exc}") from exc
        doc = wsml_parser.parse_document(text, str(path))
        if not isinstance(doc, OntologyDoc):
            raise ParseError(f"{path}: not an ontology document")
        iri = self._resolve_identifier(doc)
        existing = self.ontologies.get(norm_iri(iri))
        if existing is not None:
            return existing
        return self._register(doc, path)

    def load_ontology_by_iri(self, iri: str) -> LoadedOntology:
        existing = self.ontologies.get(norm_iri(iri))
        if existing is not None:
            return existing
        if self.warehouse is None:
            raise NotInWarehouse(f"no warehouse to resolve {iri}")
        return self.load_ontology_file(self.warehouse.lookup(iri))

    def load_imported_ontology(self, iri: str) -> LoadedOntology:
        """Resolve a stub by loading the imported ontology it points into."""
        return self.load_ontology_by_iri(iri)

    def _resolve_identifier(self, doc: OntologyDoc) -> str:
        ident = doc.identifier
        if ident is None:
            raise BadDocument("document declares no ontology identifier")
        if isinstance(ident, FullIri):
            return ident.iri
        default = next((ns.iri for ns in doc.namespaces if ns.prefix is None), None)
        if isinstance(ident, LocalName):
            return make_element_iri(default, ident.name) if default else ident.name
        if isinstance(ident, QualifiedName):
            table = self._namespace_table(doc)
            return self._expand_qname(ident, table)
        raise ParseError(f"unsupported ontology identifier: {ident!r}")

    def _namespace_table(self, doc: OntologyDoc) -> dict[str, str]:
        table = dict(WELL_KNOWN_PREFIXES)
        for ns in doc.namespaces:
            if ns.prefix is not None:
                table[ns.prefix] = ns.iri
        return table

    def _expand_qname(self, name: QualifiedName, table: dict[str, str]) -> str:
        if name.prefix not in table:
            raise UnknownElement(f"undeclared namespace prefix '{name.prefix}'")
        return make_element_iri(table[name.prefix], name.local)

    def _resolve_ref(self, ref: RefName, home_iri: str, table: dict[str, str]) -> str:
        if isinstance(ref, FullIri):
            return ref.iri
        if isinstance(ref, QualifiedName):
            return self._expand_qname(ref, table)
        if isinstance(ref, BuiltinName):
            if ref.name not in BUILTIN_TYPE_NAMES:
                raise UnknownElement(f"unknown built-in type '{ref.name}'")
            return XSD_IRI + BUILTIN_TYPE_NAMES[ref.name]
        return make_element_iri(home_iri, ref.name)

    def _register(self, doc: OntologyDoc, path: Path | None,
                  forced_short: str | None = None) -> LoadedOntology:
        iri = self._resolve_identifier(doc)
        key = norm_iri(iri)
        table = self._namespace_table(doc)
        resolve = lambda ref: self._resolve_ref(ref, iri, table)

        concepts: dict[str, ConceptDef] = {}
        instances: dict[str, InstanceDef] = {}
        relations: dict[str, RelationDef] = {}
        axioms: dict[str, AxiomDecl] = {}
        imports = tuple(resolve(imp) for imp in doc.imports)

        for element in doc.elements:
            if isinstance(element, ConceptDecl):
                attrs = tuple(
                    AttributeDef(a.name, ConstraintKind(a.kind),
                                 tuple(make_type_ref(resolve(t)) for t in a.types))
                    for a in element.attributes)
                concepts[element.name] = ConceptDef(
                    iri=make_element_iri(iri, element.name),
                    name=element.name,
                    ontology_iri=key,
                    supers=tuple(resolve(s) for s in element.supers),
                    own_attributes=attrs)
            elif isinstance(element, InstanceDecl):
                instances[element.name] = InstanceDef(
                    iri=make_element_iri(iri, element.name),
                    name=element.name,
                    ontology_iri=key,
                    member_of=tuple(resolve(m) for m in element.member_of),
                    values=element.values)
            elif isinstance(element, RelationDecl):
                params = tuple(
                    ParameterDef(p.name, ConstraintKind(p.kind),
                                 tuple(make_type_ref(resolve(t)) for t in p.types))
                    for p in element.params)
                relations[element.name] = RelationDef(
                    iri=make_element_iri(iri, element.name),
                    name=element.name,
                    ontology_iri=key,
                    parameters=params,
                    super_relation=resolve(element.super_relation) if element.super_relation else None)
            elif isinstance(element, AxiomDecl):
                axioms[element.name] = element

        loaded = LoadedOntology(
            iri=iri, norm_iri=key,
            short_name=forced_short or self.assign_short_name(iri),
            source_path=path, imports=imports,
            concepts=concepts, instances=instances,
            relations=relations, axioms=axioms)
        if forced_short:
            self.short_names[forced_short] = key
        self.ontologies[key] = loaded
        self._invalidate()
        try:
            for concept in concepts.values():
                self.effective_attributes(concept.iri)
        except CyclicInheritance:
            del self.ontologies[key]
            del self.short_names[loaded.short_name]
            self._invalidate()
            raise
        return loaded

    def assign_short_name(self, iri: str) -> str:
        base = _short_name_base(iri)
        candidate = base
        suffix = 0
        while candidate in self.short_names:
            suffix += 1
            candidate = f"{base}{suffix}"
        self.short_names[candidate] = norm_iri(iri)
        return candidate

    def _invalidate(self) -> None:
        self._effective.clear()
        self._closures.clear()

    # --- lookups ---

    def ontology_of_element(self, iri: str) -> LoadedOntology | None:
        onto, _ = split_element_iri(iri)
        return self.ontologies.get(onto)

    def find_concept(self, iri: str) -> ConceptDef | None:
        onto, local = split_element_iri(iri)
        loaded = self.ontologies.get(onto)
        return loaded.concepts.get(local) if loaded else None

    def find_instance(self, iri: str) -> InstanceDef | None:
        onto, local = split_element_iri(iri)
        loaded = self.ontologies.get(onto)
        return loaded.instances.get(local) if loaded else None

    def find_relation(self, iri: str) -> RelationDef | None:
        onto, local = split_element_iri(iri)
        loaded = self.ontologies.get(onto)
        return loaded.relations.get(local) if loaded else None

    def is_stub(self, iri: str) -> bool:
        """True for a concept reference whose ontology has no loaded definition."""
        return self.find_concept(iri) is None

    def display_name(self, iri: str) -> str:
        loaded = self.ontology_of_element(iri)
        local = local_name(iri)
        if loaded is None:
            return local
        return f"{loaded.short_name}:{local}"

    def concept_type_ref(self, concept: ConceptDef) -> TypeRef:
        return make_type_ref(concept.iri)

    # --- attribute completion ---

    def effective_attributes(self, concept_iri: str) -> tuple[EffectiveAttribute, ...]:
        return self._complete(concept_iri, ())

    complete_attributes = effective_attributes

    def _complete(self, concept_iri: str, stack: tuple[str, ...]) -> tuple[EffectiveAttribute, ...]:
        cached = self._effective.get(concept_iri)
        if cached is not None:
            return cached
        if concept_iri in stack:
            chain = " -> ".join(local_name(c) for c in (*stack, concept_iri))
            raise CyclicInheritance(f"inheritance cycle: {chain}")
        concept = self.find_concept(concept_iri)
        if concept is None:
            return ()
        result: list[EffectiveAttribute] = [
            EffectiveAttribute(attr, InheritanceKind.OWN, concept_iri)
            for attr in concept.own_attributes
        ]
        by_name = {eff.name: i for i, eff in enumerate(result)}
        for super_iri in concept.supers:
            for inherited in self._complete(super_iri, (*stack, concept_iri)):
                i = by_name.get(inherited.name)
                if i is None:
                    by_name[inherited.name] = len(result)
                    result.append(EffectiveAttribute(
                        inherited.definition, InheritanceKind.INHERITED,
                        inherited.declared_in))
                else:
                    existing = result[i]
                    if existing.inheritance in (InheritanceKind.OWN, InheritanceKind.OVERRIDDEN):
                        # a redeclared attribute replaces what it inherits
                        result[i] = EffectiveAttribute(
                            existing.definition, InheritanceKind.OVERRIDDEN,
                            existing.declared_in)
                    else:
                        # same name from several superconcepts: the constraint
                        # sets conjoin into one effective attribute
                        merged = list(existing.definition.type_constraints)
                        for tc in inherited.definition.type_constraints:
                            if tc not in merged:
                                merged.append(tc)
                        result[i] = EffectiveAttribute(
                            AttributeDef(existing.name,
                                         existing.definition.constraint_kind,
                                         tuple(merged)),
                            InheritanceKind.INHERITED,
                            existing.declared_in)
        completed = tuple(result)
        self._effective[concept_iri] = completed
        return completed

    # --- subsumption ---

    def _super_closure(self, iri: str) -> tuple[frozenset[str], bool]:
        cached = self._closures.get(iri)
        if cached is not None:
            return cached
        closure: set[str] = set()
        saw_stub = False
        queue = [iri]
        while queue:
            current = queue.pop()
            if current in closure:
                continue
            closure.add(current)
            concept = self.find_concept(current)
            if concept is None:
                if current != iri:
                    saw_stub = True
                continue
            queue.extend(concept.supers)
        result = (frozenset(closure), saw_stub)
        self._closures[iri] = result
        return result

    def is_compatible(self, candidate: TypeRef, constraints: tuple[TypeRef, ...] | list[TypeRef]) -> bool:
        """True when ``candidate`` satisfies every type constraint.

        A constraint is satisfied when it is the universal type, names the
        candidate itself, or names a (transitive) superconcept of the
        candidate.  Raises UnresolvedStub when the answer would depend on
        an ontology that is not loaded.
        """
        for required in constraints:
            if required.kind is TypeRefKind.UNIVERSAL:
                continue
            if candidate.iri == required.iri:
                continue
            if candidate.kind is TypeRefKind.UNIVERSAL:
                return False
            if candidate.kind is TypeRefKind.CONCEPT and self.find_concept(candidate.iri) is None:
                raise UnresolvedStub(
                    f"cannot check {local_name(candidate.iri)}: its ontology is not loaded")
            closure, saw_stub = self._super_closure(candidate.iri)
            if required.iri in closure:
                continue
            if saw_stub:
                raise UnresolvedStub(
                    f"cannot decide {local_name(candidate.iri)} against "
                    f"{local_name(required.iri)}: an imported ontology is not loaded")
            if required.kind is TypeRefKind.CONCEPT and self.find_concept(required.iri) is None:
                raise UnresolvedStub(
                    f"constraint {local_name(required.iri)} is not loaded")
            return False
        return True

    def _quietly_compatible(self, candidate: TypeRef, constraints) -> bool:
        try:
            return self.is_compatible(candidate, constraints)
        except UnresolvedStub:
            return False

    # --- candidate listings ---

    def _sorted_ontologies(self) -> list[LoadedOntology]:
        return sorted(self.ontologies.values(), key=lambda o: o.short_name)

    def list_compatible_concepts(self, constraints) -> list[ConceptDef]:
        out = []
        for onto in self._sorted_ontologies():
            for name in sorted(onto.concepts):
                concept = onto.concepts[name]
                if self._quietly_compatible(make_type_ref(concept.iri), constraints):
                    out.append(concept)
        return out

    def list_compatible_instances(self, constraints) -> list[InstanceDef]:
        out = []
        for onto in self._sorted_ontologies():
            for name in sorted(onto.instances):
                instance = onto.instances[name]
                if any(self._quietly_compatible(make_type_ref(m), constraints)
                       for m in instance.member_of):
                    out.append(instance)
        return out

    def list_relations(self) -> list[RelationDef]:
        out = []
        for onto in self._sorted_ontologies():
            for name in sorted(onto.relations):
                out.append(onto.relations[name])
        return out

    def list_concepts(self) -> list[ConceptDef]:
        out = []
        for onto in self._sorted_ontologies():
            for name in sorted(onto.concepts):
                out.append(onto.concepts[name])
        return out

    # --- registry tree view ---

    def registry_tree(self) -> list[dict]:
        """Forest of loaded ontologies for display.

        Within an ontology, a concept is listed under every superconcept
        occurrence; superconcepts defined elsewhere (or not loaded at all)
        appear as shallow placeholder nodes so local children still have a
        visible parent.  Instances sit under their concepts, relations under
        the ontology with one child per parameter.
        """
        forest = []
        for onto in self._sorted_ontologies():
            children_of: dict[str, list[ConceptDef]] = {}
            foreign_parents: dict[str, list[ConceptDef]] = {}
            roots: list[ConceptDef] = []
            for name in sorted(onto.concepts):
                concept = onto.concepts[name]
                if not concept.supers:
                    roots.append(concept)
                for super_iri in concept.supers:
                    s_onto, _ = split_element_iri(super_iri)
                    if s_onto == onto.norm_iri:
                        children_of.setdefault(super_iri, []).append(concept)
                    else:
                        foreign_parents.setdefault(super_iri, []).append(concept)

            def concept_node(concept: ConceptDef) -> dict:
                kids = []
                for eff in self.effective_attributes(concept.iri):
                    type_names = ", ".join(
                        self.display_name(tc.iri) if tc.kind is not TypeRefKind.UNIVERSAL
                        else "wsml#true"
                        for tc in eff.definition.type_constraints)
                    kids.append({
                        "kind": "attribute",
                        "label": eff.name,
                        "display": f"{eff.name} : {type_names}",
                        "inheritance": eff.inheritance.value,
                        "children": [],
                    })
                for iname in sorted(onto.instances):
                    instance = onto.instances[iname]
                    if concept.iri in instance.member_of:
                        kids.append({
                            "kind": "instance",
                            "label": instance.name,
                            "display": instance.name,
                            "iri": instance.iri,
                            "children": [],
                        })
                for child in children_of.get(concept.iri, []):
                    kids.append(concept_node(child))
                return {
                    "kind": "concept",
                    "label": concept.name,
                    "display": concept.name,
                    "iri": concept.iri,
                    "stub": False,
                    "children": kids,
                }

            nodes = [concept_node(c) for c in roots]
            for super_iri in sorted(foreign_parents):
                stub = self.is_stub(super_iri)
                nodes.append({
                    "kind": "concept",
                    "label": local_name(super_iri),
                    "display": self.display_name(super_iri),
                    "iri": super_iri,
                    "stub": stub,
                    "children": [concept_node(c) for c in foreign_parents[super_iri]],
                })
            for rname in sorted(onto.relations):
                relation = onto.relations[rname]
                params = []
                for i, param in enumerate(relation.parameters):
                    type_names = ", ".join(
                        self.display_name(tc.iri) if tc.kind is not TypeRefKind.UNIVERSAL
                        else "wsml#true"
                        for tc in param.type_constraints)
                    params.append({
                        "kind": "parameter",
                        "label": param.display_name(i),
                        "display": f"{param.display_name(i)} : {type_names}",
                        "children": [],
                    })
                nodes.append({
                    "kind": "relation",
                    "label": relation.name,
                    "display": relation.name,
                    "iri": relation.iri,
                    "children": params,
                })
            forest.append({
                "kind": "ontology",
                "label": onto.short_name,
                "display": f"{onto.short_name}  {onto.iri}",
                "iri": onto.iri,
                "children": nodes,
            })
        return forest
