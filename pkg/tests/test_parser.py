"""Grammar coverage: documents, expressions, diagnostics, round-trips."""
import pytest

from axiomforge.errors import ParseError
from axiomforge.parser import parse_document, parse_expression, parse_logical_expression
from axiomforge.syntax import (
    AnonVariable, AxiomDecl, CapabilityDoc, ConceptDecl, Conjunction, DateValue,
    Disjunction, Equality, FunctionCall, Grouping, InstanceDecl, LocalName,
    Molecule, Negation, OntologyDoc, QualifiedName, RelationApplication,
    RelationDecl, Variable, serialize_document, serialize_expression,
)
from axiomforge.tokens import token_signature

from conftest import corpus, corpus_path


# --- documents -------------------------------------------------------------

def test_bare_ontology_header():
    doc = parse_document(corpus("ontology_header"))
    assert isinstance(doc, OntologyDoc)
    assert doc.identifier == LocalName("family")
    assert doc.elements == ()


def test_concept_listing():
    doc = parse_document(corpus("concept_human"))
    concept = doc.elements[0]
    assert isinstance(concept, ConceptDecl)
    assert concept.name == "Human"
    assert len(concept.supers) == 2
    assert len(concept.attributes) == 11
    assert concept.nfp is not None and len(concept.nfp.entries) == 2
    kinds = {a.name: a.kind for a in concept.attributes}
    assert kinds["hasName"] == "ofType"
    assert kinds["hasParent"] == "impliesType"


def test_instance_listing():
    doc = parse_document(corpus("instance_mary"))
    instance = doc.elements[0]
    assert isinstance(instance, InstanceDecl)
    assert instance.name == "Mary"
    assert len(instance.member_of) == 2
    values = {v.attribute: v.values for v in instance.values}
    assert values[LocalName("hasChild")] == (LocalName("Paul"), LocalName("Susan"))
    assert values[LocalName("hasBirthdate")] == (DateValue("_date", ("1949", "9", "12")),)


def test_relation_listing():
    doc = parse_document(corpus("relation_distance"))
    relation = doc.elements[0]
    assert isinstance(relation, RelationDecl)
    assert len(relation.params) == 3
    assert relation.params[0].name is None
    assert relation.params[2].kind == "impliesType"
    assert relation.super_relation == LocalName("measurement")


def test_capability_listing():
    doc = parse_document(corpus("capability_registration"))
    assert isinstance(doc, CapabilityDoc)
    assert doc.shared_variables == ("child",)
    assert [s.kind for s in doc.sections] == ["precondition", "assumption", "effect"]
    pre = doc.sections[0]
    assert isinstance(pre.body, Disjunction)
    left, right = pre.body.children
    assert isinstance(left, Conjunction) and len(left.children) == 5
    call = left.children[2]
    assert isinstance(call, RelationApplication)
    assert call.args[1] == FunctionCall(QualifiedName("wsmI", "currentDate"), ())
    assumption = doc.sections[1].body
    assert isinstance(assumption.children[1], Negation)
    assert assumption.children[1].flavor == "naf"


def test_named_capability_sections_roundtrip():
    text = (
        "capability registerChild\n"
        "  precondition inputOk\n"
        "    definedBy ?x memberOf Child.\n"
    )
    doc = parse_document(text)
    assert doc.name == "registerChild"
    assert doc.sections[0].name == "inputOk"
    assert parse_document(serialize_document(doc)) == doc


def test_standalone_axiom_document():
    doc = parse_document("axiom a1 definedBy ?x memberOf C.")
    assert isinstance(doc, AxiomDecl)
    assert isinstance(doc.body, Molecule)


def test_axiom_empty_body():
    doc = parse_document("axiom a1\n  definedBy\n  .\n")
    assert doc.body is None


def test_fragment_with_namespace():
    text = 'namespace { loc _"http://x/loc#" }\nconcept a subConceptOf loc:b\n'
    doc = parse_document(text)
    assert isinstance(doc, OntologyDoc)
    assert doc.identifier is None
    assert doc.elements[0].supers == (QualifiedName("loc", "b"),)


def test_ontology_full_header():
    text = (
        'wsmlVariant _"http://www.wsmo.org/wsml/wsml-syntax/wsml-flight"\n'
        'namespace { _"http://base#", dc _"http://purl.org/dc/elements/1.1#" }\n'
        'ontology _"http://base"\n'
        '  nfp\n    dc:description hasValue "d"\n  endnfp\n'
        '  importsOntology _"http://other"\n'
        'concept a\n'
    )
    doc = parse_document(text)
    assert doc.variant.endswith("wsml-flight")
    assert doc.namespaces[0].prefix is None
    assert len(doc.imports) == 1
    assert doc.nfp is not None


def test_molecule_both_orders_equal():
    a = parse_expression("?x[b hasValue ?y] memberOf C")
    b = parse_expression("?x memberOf C [b hasValue ?y]")
    assert a == b


# --- expressions -----------------------------------------------------------

def test_equality_expression():
    expr = parse_expression("?end = innsbruckHbf")
    assert expr == Equality(Variable("end"), LocalName("innsbruckHbf"))


def test_relation_application_args():
    expr = parse_expression("equalDistance(?d1, ?#)")
    assert isinstance(expr, RelationApplication)
    assert expr.args == (Variable("d1"), AnonVariable())


def test_precedence_not_and_or():
    expr = parse_expression("not ?a memberOf A and ?b memberOf B or ?c memberOf C")
    assert isinstance(expr, Disjunction)
    first = expr.children[0]
    assert isinstance(first, Conjunction)
    assert isinstance(first.children[0], Negation)


def test_negation_flavors_recorded():
    for flavor in ("not", "naf", "neg"):
        expr = parse_expression(f"{flavor} ?x memberOf C")
        assert isinstance(expr, Negation)
        assert expr.flavor == flavor


def test_wellformed_gender_axiom():
    expr = parse_expression(
        "?x[gender hasValue {?y, ?z}] memberOf Human and ?y = Male and ?z = Female."
    )
    assert isinstance(expr, Conjunction)
    molecule = expr.children[0]
    assert molecule.attrs[0].values == (Variable("y"), Variable("z"))


def test_grouping_preserved_inside_expression():
    expr = parse_expression("?a memberOf A and (?b memberOf B or ?c memberOf C)")
    assert isinstance(expr.children[1], Grouping)


def test_body_top_grouping_is_layout():
    doc = parse_document("axiom a definedBy\n  (\n    ?a memberOf A and ?b memberOf B\n  ).")
    assert isinstance(doc.body, Conjunction)


# --- diagnostics -----------------------------------------------------------

@pytest.mark.parametrize("name,keyword", [
    ("quantified_axiom", "forAll"),
    ("exists_axiom", "exists"),
    ("implication_axiom", "implies"),
    ("inverse_implication", "impliedBy"),
    ("lp_rule", ":-"),
    ("rule_axiom", "!-"),
])
def test_unsupported_constructs_position(name, keyword):
    path = corpus_path(f"unsupported/{name}")
    text = path.read_text(encoding="utf-8")
    with pytest.raises(ParseError) as err:
        parse_document(text, str(path))
    assert "unsupported construct" in str(err.value)
    assert keyword in str(err.value)
    # the reported position is exactly where the construct appears
    offset = text.index(keyword)
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    assert err.value.position.line == line
    assert err.value.position.column == col


def test_parse_error_points_at_offender():
    with pytest.raises(ParseError) as err:
        parse_document("concept a\n  b ofType ofType\n")
    assert err.value.position is not None
    assert err.value.position.line == 2


def test_expression_rejects_unsupported_midway():
    with pytest.raises(ParseError) as err:
        parse_logical_expression("?x memberOf A equivalent ?y memberOf B")
    assert "unsupported construct" in str(err.value)


def test_diagnostic_format_has_file_line_col():
    with pytest.raises(ParseError) as err:
        parse_document("concept a\n  b ofType ofType\n", "some.wsml")
    assert str(err.value).startswith("some.wsml:2:")


# --- round-trips -----------------------------------------------------------

@pytest.mark.parametrize("name", [
    "ontology_header", "concept_human", "instance_mary",
    "relation_distance", "capability_registration",
])
def test_corpus_roundtrip(name):
    source = corpus(name)
    first = parse_document(source)
    text = serialize_document(first)
    assert parse_document(text) == first
    assert token_signature(text) == token_signature(source)


def test_expression_serialize_reparse():
    source = "?a memberOf A and (not ?b memberOf B or equalDistance(?d, ?#))"
    expr = parse_expression(source)
    assert parse_expression(serialize_expression(expr)) == expr


def test_trailing_dot_optional_on_expression():
    assert parse_expression("?x memberOf C.") == parse_expression("?x memberOf C")
