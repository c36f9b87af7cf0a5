"""Lexical checks and term forms for primitive values of built-in types."""

from __future__ import annotations

import re

from .ontology import TypeRef, local_name
from .syntax import DateValue, LocalName, NumberValue, StringValue, Term

_INT = re.compile(r"^[+-]?\d+$")
_NUM = re.compile(r"^[+-]?\d+(\.\d+)?$")
_TIME = re.compile(r"^\d{2}:\d{2}:\d{2}$")
_DATE = re.compile(r"^_date\(\s*\d+\s*,\s*\d+\s*,\s*\d+\s*\)$")
_DATETIME = re.compile(r"^_dateTime\(\s*\d+(\s*,\s*\d+){2,5}\s*\)$")


def literal_valid(type_ref: TypeRef, value: str) -> bool:
    """True when ``value`` is lexically valid for the built-in ``type_ref``."""
    kind = local_name(type_ref.iri)
    if kind == "string":
        return True
    if kind == "boolean":
        return value in ("true", "false")
    if kind == "integer":
        return bool(_INT.match(value))
    if kind == "dayOfMonth":
        return bool(_INT.match(value)) and 1 <= int(value) <= 31
    if kind in ("decimal", "float", "double"):
        return bool(_NUM.match(value))
    if kind == "date":
        return bool(_DATE.match(value))
    if kind == "dateTime":
        return bool(_DATETIME.match(value))
    if kind == "time":
        return bool(_TIME.match(value))
    return False


def literal_term(type_ref: TypeRef, value: str) -> Term:
    """The expression term a primitive value renders as."""
    kind = local_name(type_ref.iri)
    if kind in ("integer", "dayOfMonth", "decimal", "float", "double"):
        return NumberValue(value)
    if kind == "boolean":
        return LocalName(value)
    if kind in ("date", "dateTime"):
        ctor, rest = value.split("(", 1)
        args = tuple(a.strip() for a in rest.rstrip(")").split(","))
        return DateValue(ctor, args)
    return StringValue(value)


def sample_value(type_ref: TypeRef) -> str:
    """A representative valid value, used when offering literal candidates."""
    kind = local_name(type_ref.iri)
    return {
        "string": "text",
        "boolean": "true",
        "integer": "1",
        "dayOfMonth": "15",
        "decimal": "1.5",
        "float": "1.5",
        "double": "1.5",
        "date": "_date(2005,1,1)",
        "dateTime": "_dateTime(2005,1,1,0,0,0)",
        "time": "12:00:00",
    }.get(kind, "text")
