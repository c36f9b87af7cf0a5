"""Tokenizer for the WSML surface syntax subset.

The token stream is also the unit of comparison for generated text:
two documents are considered equivalent when their token signatures match,
which makes comparisons insensitive to indentation and line breaks.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum

from .errors import LexError, Position


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENT = "identifier"
    QNAME = "qname"
    VARIABLE = "variable"
    ANON_VARIABLE = "anon_variable"
    IRI = "iri"
    STRING = "string"
    NUMBER = "number"
    PUNCT = "punct"
    DATE_CTOR = "date_ctor"
    EOF = "eof"


KEYWORDS = frozenset({
    "ontology", "namespace", "importsOntology", "wsmlVariant",
    "concept", "subConceptOf",
    "instance", "memberOf", "hasValue",
    "relation", "subRelationOf",
    "ofType", "impliesType",
    "axiom", "definedBy",
    "nonFunctionalProperties", "endNonFunctionalProperties", "nfp", "endnfp",
    "and", "or", "not", "naf", "neg",
    "capability", "sharedVariables",
    "precondition", "postcondition", "assumption", "effect",
    # recognized so the parser can reject them with a useful diagnostic
    "implies", "impliedBy", "equivalent", "forAll", "exists",
})

DATE_CTORS = frozenset({"_date", "_dateTime"})

# two-character punctuation must be tried before single characters
PUNCTS_2 = (":-", "!-")
PUNCTS_1 = "()[]{},=."


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    value: str
    position: Position

    @property
    def norm(self) -> str:
        """Comparison form: ':' in qualified names, long nfp keywords."""
        if self.kind is TokenKind.QNAME:
            return self.value.replace("#", ":", 1)
        if self.kind is TokenKind.KEYWORD:
            if self.value == "nfp":
                return "nonFunctionalProperties"
            if self.value == "endnfp":
                return "endNonFunctionalProperties"
        return self.value


def _is_ident_start(ch: str) -> bool:
    return bool(ch) and (ch == "_" or unicodedata.category(ch).startswith("L"))


def _is_ident_part(ch: str) -> bool:
    return bool(ch) and (ch == "_" or ch.isdigit() or unicodedata.category(ch).startswith("L"))


class _Lexer:
    def __init__(self, text: str, filename: str | None = None):
        self.text = text
        self.filename = filename
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[Token] = []

    def error(self, message: str, where: Position | None = None) -> LexError:
        where = where or Position(self.line, self.col)
        prefix = f"{self.filename}:" if self.filename else ""
        return LexError(f"{prefix}{where}: {message}", position=where)

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def emit(self, kind: TokenKind, text: str, value: str, pos: Position) -> None:
        self.tokens.append(Token(kind, text, value, pos))

    # a sign can begin a number only where a value may appear, never right
    # after something that could be an operand
    def _sign_allowed(self) -> bool:
        if not self.tokens:
            return True
        prev = self.tokens[-1]
        if prev.kind in (TokenKind.IDENT, TokenKind.QNAME, TokenKind.VARIABLE,
                         TokenKind.ANON_VARIABLE, TokenKind.NUMBER,
                         TokenKind.STRING, TokenKind.IRI):
            return False
        if prev.kind is TokenKind.PUNCT and prev.value in (")", "]", "}"):
            return False
        return True

    def run(self) -> list[Token]:
        while self.pos < len(self.text):
            ch = self.peek()
            if ch in " \t\r\n":
                self.advance()
                continue
            if ch == "/" and self.peek(1) == "/":
                while self.pos < len(self.text) and self.peek() != "\n":
                    self.advance()
                continue
            if ch == "/" and self.peek(1) == "*":
                start = Position(self.line, self.col)
                self.advance()
                self.advance()
                while not (self.peek() == "*" and self.peek(1) == "/"):
                    if self.pos >= len(self.text):
                        raise self.error("unterminated comment", start)
                    self.advance()
                self.advance()
                self.advance()
                continue
            pos = Position(self.line, self.col)
            if ch == "_" and self.peek(1) == '"':
                self.lex_iri(pos)
            elif ch == '"':
                self.lex_string(pos)
            elif ch == "?":
                self.lex_variable(pos)
            elif ch.isdigit() or (ch in "+-" and self.peek(1).isdigit() and self._sign_allowed()):
                self.lex_number(pos)
            elif _is_ident_start(ch):
                self.lex_word(pos)
            elif self.text.startswith(PUNCTS_2[0], self.pos) or self.text.startswith(PUNCTS_2[1], self.pos):
                two = self.text[self.pos:self.pos + 2]
                self.advance()
                self.advance()
                self.emit(TokenKind.PUNCT, two, two, pos)
            elif ch in PUNCTS_1:
                self.advance()
                self.emit(TokenKind.PUNCT, ch, ch, pos)
            else:
                raise self.error(f"unexpected character {ch!r}")
        self.tokens.append(Token(TokenKind.EOF, "", "", Position(self.line, self.col)))
        return self.tokens

    def lex_iri(self, pos: Position) -> None:
        self.advance()  # _
        self.advance()  # "
        chars: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated IRI literal")
            ch = self.advance()
            if ch == '"':
                break
            chars.append(ch)
        value = "".join(chars)
        self.emit(TokenKind.IRI, f'_"{value}"', value, pos)

    def lex_string(self, pos: Position) -> None:
        self.advance()  # opening quote
        chars: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated string literal")
            ch = self.advance()
            if ch == "\\" and self.peek() in ('"', "\\"):
                chars.append(self.advance())
            elif ch == '"':
                break
            else:
                chars.append(ch)
        value = "".join(chars)
        self.emit(TokenKind.STRING, f'"{value}"', value, pos)

    def lex_variable(self, pos: Position) -> None:
        self.advance()  # ?
        if self.peek() == "#":
            self.advance()
            self.emit(TokenKind.ANON_VARIABLE, "?#", "?#", pos)
            return
        if not _is_ident_start(self.peek()):
            raise self.error("expected a name after '?'")
        name = self._ident_body()
        self.emit(TokenKind.VARIABLE, "?" + name, "?" + name, pos)

    def lex_number(self, pos: Position) -> None:
        chars: list[str] = []
        if self.peek() in "+-":
            chars.append(self.advance())
        while self.peek().isdigit():
            chars.append(self.advance())
        if self.peek() == "." and self.peek(1).isdigit():
            chars.append(self.advance())
            while self.peek().isdigit():
                chars.append(self.advance())
        value = "".join(chars)
        self.emit(TokenKind.NUMBER, value, value, pos)

    def _ident_body(self) -> str:
        chars = [self.advance()]
        while True:
            ch = self.peek()
            if _is_ident_part(ch):
                chars.append(self.advance())
            elif ch == "-" and _is_ident_part(self.peek(1)) and not self.peek(1).isdigit():
                # hyphenated names like "member-of"; a digit after '-' would
                # be ambiguous with arithmetic signs, so it ends the name
                chars.append(self.advance())
                chars.append(self.advance())
            else:
                break
        return "".join(chars)

    def lex_word(self, pos: Position) -> None:
        name = self._ident_body()
        sep = self.peek()
        if sep in "#:" and _is_ident_start(self.peek(1)):
            self.advance()
            local = self._ident_body()
            text = f"{name}{sep}{local}"
            self.emit(TokenKind.QNAME, text, text, pos)
            return
        if name in KEYWORDS:
            self.emit(TokenKind.KEYWORD, name, name, pos)
        elif name in DATE_CTORS:
            self.emit(TokenKind.DATE_CTOR, name, name, pos)
        else:
            self.emit(TokenKind.IDENT, name, name, pos)


def tokenize(text: str, filename: str | None = None) -> list[Token]:
    """Tokenize ``text``, returning a list that always ends with an EOF token."""
    return _Lexer(text, filename).run()


def token_signature(text: str, filename: str | None = None) -> list[tuple[str, str]]:
    """Whitespace-insensitive fingerprint used to compare generated documents."""
    return [(t.kind.value, t.norm) for t in tokenize(text, filename) if t.kind is not TokenKind.EOF]
