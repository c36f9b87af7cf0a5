"""Shared fixtures: fixture paths, registries, and token comparison."""
from __future__ import annotations

import re
from pathlib import Path

import pytest

from axiomforge.ontology import OntologyRegistry, OntologyWarehouse

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

TRAVEL = "http://www.example.org/travel/"
BOOKING = "http://www.example.org/booking/"
TC = TRAVEL + "trainConnection"
LOC = TRAVEL + "loc"

COUNTER_RE = re.compile(r"autoGeneratedAxiom_\d+")


def normalize_counter(text: str) -> str:
    return COUNTER_RE.sub("autoGeneratedAxiom_N", text)


def token_equal(a: str, b: str) -> bool:
    """Whitespace-insensitive comparison, counter-insensitive."""
    from axiomforge.tokens import token_signature
    return token_signature(normalize_counter(a)) == token_signature(normalize_counter(b))


@pytest.fixture
def warehouse() -> OntologyWarehouse:
    return OntologyWarehouse(FIXTURES / "warehouse")


@pytest.fixture
def registry(warehouse) -> OntologyRegistry:
    return OntologyRegistry(warehouse)


@pytest.fixture
def travel_registry(registry) -> OntologyRegistry:
    registry.load_ontology_by_iri(LOC)
    registry.load_ontology_by_iri(TC)
    return registry


@pytest.fixture
def booking_registry() -> OntologyRegistry:
    registry = OntologyRegistry(OntologyWarehouse(FIXTURES / "warehouse_reservations"))
    registry.load_ontology_by_iri(BOOKING + "tr")
    registry.load_ontology_by_iri(BOOKING + "loc")
    return registry


@pytest.fixture
def misc_registry() -> OntologyRegistry:
    return OntologyRegistry(OntologyWarehouse(FIXTURES / "warehouse_misc"))


def expected(name: str) -> str:
    return (FIXTURES / "expected" / f"{name}.wsml").read_text(encoding="utf-8")


def corpus(name: str) -> str:
    return (FIXTURES / "corpus" / f"{name}.wsml").read_text(encoding="utf-8")


def corpus_path(name: str) -> Path:
    return FIXTURES / "corpus" / f"{name}.wsml"
