"""Lexer behavior: token kinds, positions, comments, error totality."""
import pytest

from axiomforge.errors import LexError
from axiomforge.tokens import TokenKind, Token, token_signature, tokenize


def kinds(text):
    return [(t.kind, t.value) for t in tokenize(text) if t.kind is not TokenKind.EOF]


def test_member_of_prefix():
    assert kinds("?x memberOf Human") == [
        (TokenKind.VARIABLE, "?x"),
        (TokenKind.KEYWORD, "memberOf"),
        (TokenKind.IDENT, "Human"),
    ]


def test_empty_input_is_empty_stream():
    assert kinds("") == []


def test_anonymous_variable():
    assert kinds("?#") == [(TokenKind.ANON_VARIABLE, "?#")]


def test_qualified_name_both_separators():
    hash_form = kinds("dc#description")
    colon_form = kinds("dc:description")
    assert hash_form[0][0] is TokenKind.QNAME
    assert colon_form[0][0] is TokenKind.QNAME
    assert [t.norm for t in tokenize("dc#description")][0] == "dc:description"


def test_iri_literal():
    assert kinds('_"http://a/b#c"') == [(TokenKind.IRI, "http://a/b#c")]


def test_string_allows_newline():
    toks = kinds('"line one\n  line two"')
    assert toks == [(TokenKind.STRING, "line one\n  line two")]


def test_date_constructor():
    toks = kinds("_date(1949,9,12)")
    assert toks[0] == (TokenKind.DATE_CTOR, "_date")
    assert (TokenKind.NUMBER, "1949") in toks


def test_numbers_sign_and_fraction():
    assert kinds("-3.25")[0] == (TokenKind.NUMBER, "-3.25")
    assert kinds("17")[0] == (TokenKind.NUMBER, "17")


def test_comments_skipped():
    text = "// line\nconcept /* block\nspanning */ c1"
    assert kinds(text) == [(TokenKind.KEYWORD, "concept"), (TokenKind.IDENT, "c1")]


def test_unsupported_keywords_are_keywords():
    for kw in ("implies", "impliedBy", "equivalent", "forAll", "exists"):
        assert kinds(kw) == [(TokenKind.KEYWORD, kw)]


def test_rule_puncts_lexed():
    assert kinds(":-") == [(TokenKind.PUNCT, ":-")]
    assert kinds("!-") == [(TokenKind.PUNCT, "!-")]


def test_cyrillic_identifier():
    assert kinds("Лице")[0] == (TokenKind.IDENT, "Лице")
    assert kinds("?Лице1")[0] == (TokenKind.VARIABLE, "?Лице1")


def test_positions_strictly_increase():
    text = 'concept a\n  b ofType _string\n'
    seen = []
    for t in tokenize(text):
        if t.kind is TokenKind.EOF:
            continue
        seen.append((t.position.line, t.position.column))
    assert seen == sorted(seen)
    assert len(set(seen)) == len(seen)


def test_lex_error_carries_position():
    with pytest.raises(LexError) as err:
        list(tokenize('a \x01 b'))
    assert err.value.position is not None
    assert err.value.position.line == 1


def test_unterminated_string_is_error():
    with pytest.raises(LexError):
        list(tokenize('"never closed'))


def test_signature_ignores_whitespace():
    assert token_signature("a  and\n\tb") == token_signature("a and b")


def test_signature_folds_nfp_forms():
    long = "nonFunctionalProperties endNonFunctionalProperties"
    short = "nfp endnfp"
    assert token_signature(long) == token_signature(short)
