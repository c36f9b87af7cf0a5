"""Error types shared across the package.

Every domain error carries a stable ``code`` (its class name) so that the
HTTP service and the CLI can report failures uniformly without string
matching on messages.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Position:
    """A 1-based source location."""

    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class AxiomForgeError(Exception):
    """Base class for all domain errors."""

    def __init__(self, message: str, *, position: Position | None = None):
        super().__init__(message)
        self.message = message
        self.position = position

    @property
    def code(self) -> str:
        return type(self).__name__


# --- lexing / parsing ------------------------------------------------------

class LexError(AxiomForgeError):
    pass


class ParseError(AxiomForgeError):
    pass


# --- warehouse / registry --------------------------------------------------

class DirectoryNotFound(AxiomForgeError):
    pass


class DuplicateIri(AxiomForgeError):
    pass


class NotInWarehouse(AxiomForgeError):
    pass


class UnknownElement(AxiomForgeError):
    pass


class CyclicInheritance(AxiomForgeError):
    pass


class UnresolvedStub(AxiomForgeError):
    pass


# --- graph / persistence ---------------------------------------------------

class UnknownNode(AxiomForgeError):
    pass


class UnknownConnection(AxiomForgeError):
    pass


class MissingOntology(AxiomForgeError):
    pass


class BadDocument(AxiomForgeError):
    pass


# --- edit operations -------------------------------------------------------

class ModeError(AxiomForgeError):
    pass


class SlotOccupied(AxiomForgeError):
    pass


class Incompatible(AxiomForgeError):
    pass


class WouldCycle(AxiomForgeError):
    pass


class NotArity(AxiomForgeError):
    pass


class NotAllowed(AxiomForgeError):
    pass


class DuplicateName(AxiomForgeError):
    pass


class BadName(AxiomForgeError):
    pass


class BadLiteral(AxiomForgeError):
    pass


class StubConcept(AxiomForgeError):
    pass


class StubType(AxiomForgeError):
    pass


class AmbiguousDefault(AxiomForgeError):
    pass


class UnknownInstance(AxiomForgeError):
    pass


class UnknownRelation(AxiomForgeError):
    pass


class UnknownChain(AxiomForgeError):
    pass


class HasConnections(AxiomForgeError):
    pass


class CannotDeleteRoot(AxiomForgeError):
    pass


class EmptyStack(AxiomForgeError):
    pass


# --- capability export -----------------------------------------------------

class EmptySections(AxiomForgeError):
    pass


# --- service ---------------------------------------------------------------

class StaleRevision(AxiomForgeError):
    pass


class UnknownSession(AxiomForgeError):
    pass
