"""Graph-based construction of WSML axioms over loaded ontologies.

The package splits into a parsing layer (tokens, parser, syntax), an
ontology warehouse and registry (ontology), the editable axiom graph and
its gated operations (graph, engine, scripts), deterministic text
generation (codegen, literals), and two front doors: an HTTP service
(service) and a command line (cli).
"""

from .errors import AxiomForgeError, Position
from .parser import parse_document, parse_expression, parse_logical_expression
from .syntax import serialize_document, serialize_expression
from .tokens import tokenize

__all__ = [
    "AxiomForgeError",
    "Position",
    "parse_document",
    "parse_expression",
    "parse_logical_expression",
    "serialize_document",
    "serialize_expression",
    "tokenize",
]

__version__ = "0.1.0"
