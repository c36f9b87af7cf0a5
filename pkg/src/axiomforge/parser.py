"""Recursive descent parser for the WSML subset.

Accepts ontology documents, standalone axioms, capability skeletons and
bare logical expressions.  Constructs outside the subset (``forAll``,
``exists``, ``implies``, ``impliedBy``, ``equivalent``, ``:-``, ``!-``)
are recognized by the lexer and rejected here with a positioned
"unsupported construct" diagnostic, so the caller can tell them apart
from plain syntax errors.
"""

from __future__ import annotations

from .errors import ParseError, Position
from .syntax import (
    AnonVariable, AttributeDecl, AttributeValue, AxiomDecl, BuiltinName,
    CapabilityDoc, CapabilitySection, ConceptDecl, Conjunction, DateValue,
    Disjunction, Document, Equality, Expr, FullIri, FunctionCall, Grouping,
    InstanceDecl,
    LocalName, Molecule, NamespaceDecl, Negation, NfpBlock, NfpEntry,
    NumberValue, OntologyDoc, ParamDecl, QualifiedName, RefName,
    RelationApplication, RelationDecl, StringValue, Term, Variable,
)
from .tokens import Token, TokenKind, tokenize

UNSUPPORTED_KEYWORDS = frozenset({"implies", "impliedBy", "equivalent", "forAll", "exists"})
UNSUPPORTED_PUNCTS = frozenset({":-", "!-"})
NEGATION_FLAVORS = frozenset({"not", "naf", "neg"})
SECTION_KINDS = ("precondition", "postcondition", "assumption", "effect")
ELEMENT_KEYWORDS = frozenset({"concept", "instance", "relation", "axiom"})


class _Parser:
    def __init__(self, text: str, filename: str | None = None):
        self.tokens = tokenize(text, filename)
        self.filename = filename
        self.index = 0

    # --- token plumbing ---

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def peek(self, offset: int = 0) -> Token:
        i = min(self.index + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        token = self.current
        if token.kind is not TokenKind.EOF:
            self.index += 1
        return token

    def error(self, message: str, token: Token | None = None) -> ParseError:
        token = token or self.current
        where = token.position
        prefix = f"{self.filename}:" if self.filename else ""
        return ParseError(f"{prefix}{where.line}:{where.column}: {message}", position=where)

    def at_keyword(self, *names: str) -> bool:
        return self.current.kind is TokenKind.KEYWORD and self.current.value in names

    def at_punct(self, *values: str) -> bool:
        return self.current.kind is TokenKind.PUNCT and self.current.value in values

    def expect_keyword(self, name: str) -> Token:
        if not self.at_keyword(name):
            raise self.error(f"expected '{name}', found {self._describe()}")
        return self.advance()

    def expect_punct(self, value: str) -> Token:
        if not self.at_punct(value):
            raise self.error(f"expected '{value}', found {self._describe()}")
        return self.advance()

    def expect_ident(self, what: str) -> Token:
        if self.current.kind is not TokenKind.IDENT:
            raise self.error(f"expected {what}, found {self._describe()}")
        return self.advance()

    def _describe(self) -> str:
        token = self.current
        if token.kind is TokenKind.EOF:
            return "end of input"
        return repr(token.text)

    def check_supported(self) -> None:
        token = self.current
        if token.kind is TokenKind.KEYWORD and token.value in UNSUPPORTED_KEYWORDS:
            raise self.error(f"unsupported construct '{token.value}'", token)
        if token.kind is TokenKind.PUNCT and token.value in UNSUPPORTED_PUNCTS:
            raise self.error(f"unsupported construct '{token.value}'", token)

    # --- names and terms ---

    def parse_ref(self) -> RefName:
        token = self.current
        if token.kind is TokenKind.IDENT:
            self.advance()
            if token.value.startswith("_"):
                return BuiltinName(token.value)
            return LocalName(token.value)
        if token.kind is TokenKind.QNAME:
            self.advance()
            sep = "#" if "#" in token.value else ":"
            prefix, local = token.value.split(sep, 1)
            return QualifiedName(prefix, local)
        if token.kind is TokenKind.IRI:
            self.advance()
            return FullIri(token.value)
        if token.kind is TokenKind.DATE_CTOR:
            self.advance()
            return BuiltinName(token.value)
        raise self.error(f"expected a name, found {self._describe()}")

    def parse_ref_set(self) -> tuple[RefName, ...]:
        if self.at_punct("{"):
            self.advance()
            refs = [self.parse_ref()]
            while self.at_punct(","):
                self.advance()
                refs.append(self.parse_ref())
            self.expect_punct("}")
            return tuple(refs)
        return (self.parse_ref(),)

    def parse_term(self) -> Term:
        self.check_supported()
        token = self.current
        if token.kind is TokenKind.VARIABLE:
            self.advance()
            return Variable(token.value[1:])
        if token.kind is TokenKind.ANON_VARIABLE:
            self.advance()
            return AnonVariable()
        if token.kind is TokenKind.STRING:
            self.advance()
            return StringValue(token.value)
        if token.kind is TokenKind.NUMBER:
            self.advance()
            return NumberValue(token.value)
        if token.kind is TokenKind.DATE_CTOR:
            ctor = self.advance().value
            if self.at_punct("("):
                self.advance()
                args = [self.expect_number()]
                while self.at_punct(","):
                    self.advance()
                    args.append(self.expect_number())
                self.expect_punct(")")
                return DateValue(ctor, tuple(args))
            return BuiltinName(ctor)
        return self.parse_ref()

    def parse_call_term(self) -> Term:
        """A term in argument position, where ``f(...)`` calls are legal."""
        term = self.parse_term()
        if self.at_punct("(") and isinstance(term, (LocalName, QualifiedName, FullIri)):
            self.advance()
            args: list[Term] = []
            if not self.at_punct(")"):
                args.append(self.parse_call_term())
                while self.at_punct(","):
                    self.advance()
                    args.append(self.parse_call_term())
            self.expect_punct(")")
            return FunctionCall(term, tuple(args))
        return term

    def expect_number(self) -> str:
        if self.current.kind is not TokenKind.NUMBER:
            raise self.error(f"expected a number, found {self._describe()}")
        return self.advance().value

    def parse_term_set(self) -> tuple[Term, ...]:
        if self.at_punct("{"):
            self.advance()
            values = [self.parse_term()]
            while self.at_punct(","):
                self.advance()
                values.append(self.parse_term())
            self.expect_punct("}")
            return tuple(values)
        return (self.parse_term(),)

    # --- logical expressions ---

    def parse_expression(self) -> Expr:
        expr = self.parse_disjunction()
        self.check_supported()
        return expr

    def parse_disjunction(self) -> Expr:
        children = [self.parse_conjunction()]
        while self.at_keyword("or"):
            self.advance()
            children.append(self.parse_conjunction())
        if len(children) > 1:
            return Disjunction(tuple(children))
        return children[0]

    def parse_conjunction(self) -> Expr:
        children = [self.parse_unary()]
        while self.at_keyword("and"):
            self.advance()
            children.append(self.parse_unary())
        if len(children) > 1:
            return Conjunction(tuple(children))
        return children[0]

    def parse_unary(self) -> Expr:
        self.check_supported()
        if self.current.kind is TokenKind.KEYWORD and self.current.value in NEGATION_FLAVORS:
            flavor = self.advance().value
            return Negation(flavor, self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        self.check_supported()
        if self.at_punct("("):
            self.advance()
            inner = self.parse_expression()
            self.expect_punct(")")
            return Grouping(inner)
        term = self.parse_term()
        if self.at_punct("(") and isinstance(term, (LocalName, QualifiedName, FullIri)):
            self.advance()
            args: list[Term] = []
            if not self.at_punct(")"):
                args.append(self.parse_call_term())
                while self.at_punct(","):
                    self.advance()
                    args.append(self.parse_call_term())
            self.expect_punct(")")
            return RelationApplication(term, tuple(args))
        if self.at_punct("="):
            self.advance()
            return Equality(term, self.parse_term())
        return self.parse_molecule_tail(term)

    def parse_molecule_tail(self, term: Term) -> Molecule:
        types: tuple[RefName, ...] = ()
        attrs: tuple[AttributeValue, ...] = ()
        if self.at_punct("["):
            attrs = self.parse_attr_block()
            if self.at_keyword("memberOf"):
                self.advance()
                types = self.parse_ref_set()
        elif self.at_keyword("memberOf"):
            self.advance()
            types = self.parse_ref_set()
            if self.at_punct("["):
                attrs = self.parse_attr_block()
        return Molecule(term, types, attrs)

    def parse_attr_block(self) -> tuple[AttributeValue, ...]:
        self.expect_punct("[")
        entries = [self.parse_attr_value()]
        while self.at_punct(","):
            self.advance()
            entries.append(self.parse_attr_value())
        self.expect_punct("]")
        return tuple(entries)

    def parse_attr_value(self) -> AttributeValue:
        attribute = self.parse_ref()
        self.expect_keyword("hasValue")
        return AttributeValue(attribute, self.parse_term_set())

    # --- shared document pieces ---

    def parse_nfp(self) -> NfpBlock | None:
        if self.at_keyword("nonFunctionalProperties"):
            closer = "endNonFunctionalProperties"
        elif self.at_keyword("nfp"):
            closer = "endnfp"
        else:
            return None
        self.advance()
        entries: list[NfpEntry] = []
        while not self.at_keyword(closer):
            if self.current.kind is TokenKind.EOF:
                raise self.error(f"expected '{closer}' before end of input")
            key = self.parse_ref()
            self.expect_keyword("hasValue")
            entries.append(NfpEntry(key, self.parse_term_set()))
        self.advance()
        return NfpBlock(tuple(entries))

    def parse_defined_body(self) -> Expr | None:
        self.expect_keyword("definedBy")
        if self.at_punct("."):
            self.advance()
            return None
        body = self.parse_expression()
        if self.at_punct("."):
            self.advance()
        # parens around the whole body are layout, not structure
        while isinstance(body, Grouping):
            body = body.child
        return body

    # --- ontology elements ---

    def parse_concept(self) -> ConceptDecl:
        self.expect_keyword("concept")
        name = self.expect_ident("a concept name").value
        supers: tuple[RefName, ...] = ()
        if self.at_keyword("subConceptOf"):
            self.advance()
            supers = self.parse_ref_set()
        nfp = self.parse_nfp()
        attributes: list[AttributeDecl] = []
        while (self.current.kind is TokenKind.IDENT
               and self.peek(1).kind is TokenKind.KEYWORD
               and self.peek(1).value in ("ofType", "impliesType")):
            attr_name = self.advance().value
            kind = self.advance().value
            attributes.append(AttributeDecl(attr_name, kind, self.parse_ref_set()))
        return ConceptDecl(name, supers, nfp, tuple(attributes))

    def parse_instance(self) -> InstanceDecl:
        self.expect_keyword("instance")
        name = self.expect_ident("an instance name").value
        member_of: tuple[RefName, ...] = ()
        if self.at_keyword("memberOf"):
            self.advance()
            member_of = self.parse_ref_set()
        nfp = self.parse_nfp()
        values: list[AttributeValue] = []
        while (self.current.kind in (TokenKind.IDENT, TokenKind.QNAME)
               and self.peek(1).kind is TokenKind.KEYWORD
               and self.peek(1).value == "hasValue"):
            values.append(self.parse_attr_value())
        return InstanceDecl(name, member_of, nfp, tuple(values))

    def parse_relation(self) -> RelationDecl:
        self.expect_keyword("relation")
        name = self.expect_ident("a relation name").value
        self.expect_punct("(")
        params = [self.parse_param()]
        while self.at_punct(","):
            self.advance()
            params.append(self.parse_param())
        self.expect_punct(")")
        super_relation = None
        if self.at_keyword("subRelationOf"):
            self.advance()
            super_relation = self.parse_ref()
        nfp = self.parse_nfp()
        return RelationDecl(name, tuple(params), super_relation, nfp)

    def parse_param(self) -> ParamDecl:
        name = None
        if self.current.kind is TokenKind.IDENT and self.peek(1).kind is TokenKind.KEYWORD \
                and self.peek(1).value in ("ofType", "impliesType"):
            name = self.advance().value
        if not self.at_keyword("ofType", "impliesType"):
            raise self.error(f"expected 'ofType' or 'impliesType', found {self._describe()}")
        kind = self.advance().value
        return ParamDecl(name, kind, self.parse_ref_set())

    def parse_axiom(self) -> AxiomDecl:
        self.expect_keyword("axiom")
        name = self.expect_ident("an axiom name").value
        nfp = self.parse_nfp()
        body = None
        if self.at_keyword("definedBy"):
            body = self.parse_defined_body()
        return AxiomDecl(name, nfp, body)

    # --- documents ---

    def parse_namespace_decls(self) -> list[NamespaceDecl]:
        decls: list[NamespaceDecl] = []
        while self.at_keyword("namespace"):
            self.advance()
            if self.at_punct("{"):
                self.advance()
                decls.append(self.parse_namespace_entry())
                while self.at_punct(","):
                    self.advance()
                    decls.append(self.parse_namespace_entry())
                self.expect_punct("}")
            else:
                decls.append(self.parse_namespace_entry())
        return decls

    def parse_namespace_entry(self) -> NamespaceDecl:
        if self.current.kind is TokenKind.IRI:
            return NamespaceDecl(None, self.advance().value)
        prefix = self.expect_ident("a namespace prefix").value
        if self.current.kind is not TokenKind.IRI:
            raise self.error(f"expected an IRI literal, found {self._describe()}")
        return NamespaceDecl(prefix, self.advance().value)

    def parse_imports(self) -> list[RefName]:
        imports: list[RefName] = []
        while self.at_keyword("importsOntology"):
            self.advance()
            if self.at_punct("{"):
                self.advance()
                imports.append(self.parse_ref())
                while self.at_punct(","):
                    self.advance()
                    imports.append(self.parse_ref())
                self.expect_punct("}")
            else:
                imports.append(self.parse_ref())
        return imports

    def parse_ontology(self, namespaces: list[NamespaceDecl], variant: str | None) -> OntologyDoc:
        self.expect_keyword("ontology")
        identifier = None
        if self.current.kind in (TokenKind.IRI, TokenKind.IDENT, TokenKind.QNAME):
            identifier = self.parse_ref()
        nfp = self.parse_nfp()
        imports = self.parse_imports()
        elements = self.parse_elements(imports)
        return OntologyDoc(identifier, tuple(namespaces), tuple(imports), nfp,
                           tuple(elements), variant)

    def parse_elements(self, imports: list[RefName]) -> list:
        elements: list = []
        while self.current.kind is not TokenKind.EOF:
            if self.at_keyword("concept"):
                elements.append(self.parse_concept())
            elif self.at_keyword("instance"):
                elements.append(self.parse_instance())
            elif self.at_keyword("relation"):
                elements.append(self.parse_relation())
            elif self.at_keyword("axiom"):
                elements.append(self.parse_axiom())
            elif self.at_keyword("importsOntology"):
                imports.extend(self.parse_imports())
            else:
                self.check_supported()
                raise self.error(f"expected a concept, instance, relation or axiom, found {self._describe()}")
        return elements

    def parse_capability(self) -> CapabilityDoc:
        self.expect_keyword("capability")
        name = None
        if self.current.kind is TokenKind.IDENT:
            name = self.advance().value
        nfp = self.parse_nfp()
        imports = self.parse_imports()
        shared: list[str] = []
        if self.at_keyword("sharedVariables"):
            self.advance()
            if self.at_punct("{"):
                self.advance()
                shared.append(self.expect_variable())
                while self.at_punct(","):
                    self.advance()
                    shared.append(self.expect_variable())
                self.expect_punct("}")
            else:
                shared.append(self.expect_variable())
                while self.at_punct(","):
                    self.advance()
                    shared.append(self.expect_variable())
        sections: list[CapabilitySection] = []
        while self.at_keyword(*SECTION_KINDS):
            kind = self.advance().value
            section_name = None
            if self.current.kind is TokenKind.IDENT:
                section_name = self.advance().value
            section_nfp = self.parse_nfp()
            body = None
            if self.at_keyword("definedBy"):
                body = self.parse_defined_body()
            sections.append(CapabilitySection(kind, section_nfp, body, section_name))
        if self.current.kind is not TokenKind.EOF:
            self.check_supported()
            raise self.error(f"expected a capability section, found {self._describe()}")
        return CapabilityDoc(tuple(shared), tuple(sections), name, nfp, tuple(imports))

    def expect_variable(self) -> str:
        if self.current.kind is not TokenKind.VARIABLE:
            raise self.error(f"expected a variable, found {self._describe()}")
        return self.advance().value[1:]

    def parse_document(self) -> Document:
        variant = None
        if self.at_keyword("wsmlVariant"):
            self.advance()
            if self.current.kind is not TokenKind.IRI:
                raise self.error(f"expected an IRI literal, found {self._describe()}")
            variant = self.advance().value
        namespaces = self.parse_namespace_decls()
        if self.at_keyword("ontology"):
            return self.parse_ontology(namespaces, variant)
        if self.at_keyword("capability"):
            return self.parse_capability()
        if self.at_keyword("axiom"):
            axiom = self.parse_axiom()
            if self.current.kind is TokenKind.EOF and not namespaces:
                return axiom
            imports: list[RefName] = []
            elements = [axiom, *self.parse_elements(imports)]
            return OntologyDoc(None, tuple(namespaces), tuple(imports), None,
                               tuple(elements), variant)
        if self.at_keyword("concept", "instance", "relation", "importsOntology"):
            # headerless element listing
            imports = self.parse_imports()
            elements = self.parse_elements(imports)
            return OntologyDoc(None, tuple(namespaces), tuple(imports), None,
                               tuple(elements), variant)
        self.check_supported()
        raise self.error(f"expected 'ontology', 'capability' or 'axiom', found {self._describe()}")


def parse_document(text: str, filename: str | None = None) -> Document:
    """Parse a full document: ontology, capability or standalone axiom."""
    return _Parser(text, filename).parse_document()


def parse_expression(text: str, filename: str | None = None) -> Expr:
    """Parse a bare logical expression, tolerating one trailing dot."""
    parser = _Parser(text, filename)
    expr = parser.parse_expression()
    if parser.at_punct("."):
        parser.advance()
    if parser.current.kind is not TokenKind.EOF:
        parser.check_supported()
        raise parser.error(f"expected end of input, found {parser._describe()}")
    return expr


parse_logical_expression = parse_expression
