"""Statement-level value types: IRIs, blank nodes, literals, quads, graph ids."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Union


class Iri(str):
    """An absolute IRI. Two IRIs are equal iff their strings are byte-equal."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"Iri({str.__repr__(self)})"


# Characters never allowed inside an IRI we accept or serialize.
_IRI_FORBIDDEN = re.compile(r'[\x00-\x20<>"{}|^`\\]')


def iri_is_wellformed(value: str, base: str | None = None) -> bool:
    """True when `value` is usable as an IRI: non-empty, clean of reserved
    characters, and either scheme-qualified or anchored in `base`."""
    if not value or _IRI_FORBIDDEN.search(value):
        return False
    if "://" in value:
        return True
    return base is not None and value.startswith(base)


@dataclass(frozen=True, slots=True)
class BlankNode:
    """Blank node label. Scope is the graph of the quad that carries it."""

    label: str

    def __repr__(self) -> str:
        return f"BlankNode({self.label!r})"


_XSD = "http://www.w3.org/2001/XMLSchema#"
XSD_STRING = Iri(_XSD + "string")
XSD_INTEGER = Iri(_XSD + "integer")
XSD_DECIMAL = Iri(_XSD + "decimal")
XSD_DOUBLE = Iri(_XSD + "double")
XSD_FLOAT = Iri(_XSD + "float")
XSD_INT = Iri(_XSD + "int")
XSD_LONG = Iri(_XSD + "long")
XSD_BOOLEAN = Iri(_XSD + "boolean")
XSD_DATETIME = Iri(_XSD + "dateTime")

INTEGER_DATATYPES = frozenset({XSD_INTEGER, XSD_INT, XSD_LONG})
FLOAT_DATATYPES = frozenset({XSD_DECIMAL, XSD_DOUBLE, XSD_FLOAT})
NUMERIC_DATATYPES = INTEGER_DATATYPES | FLOAT_DATATYPES


@dataclass(frozen=True, slots=True)
class Literal:
    """Typed literal value. A language tag is only meaningful on plain strings."""

    lexical: str
    datatype: Iri = XSD_STRING
    lang: str | None = None

    def __post_init__(self) -> None:
        if self.lang is not None and self.datatype != XSD_STRING:
            raise ValueError("language tag is only allowed on plain string literals")

    def __repr__(self) -> str:
        if self.lang:
            return f"Literal({self.lexical!r}@{self.lang})"
        if self.datatype != XSD_STRING:
            return f"Literal({self.lexical!r}^^{self.datatype})"
        return f"Literal({self.lexical!r})"


def literal_problem(lit: Literal) -> str | None:
    """Policy-level literal check applied at store boundaries; None when valid."""
    if lit.datatype in INTEGER_DATATYPES:
        try:
            int(lit.lexical)
        except ValueError:
            return f"unparseable integer literal {lit.lexical!r}"
    elif lit.datatype in FLOAT_DATATYPES:
        try:
            float(lit.lexical)
        except ValueError:
            return f"unparseable numeric literal {lit.lexical!r}"
    return None


class GraphId(NamedTuple):
    """Identifies one loaded version of one dataset; the unit of atomic reload."""

    dataset: str
    version: int

    def __str__(self) -> str:
        return f"{self.dataset}@v{self.version}"


_DATASET_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")


def dataset_id_is_wellformed(dataset: str) -> bool:
    return bool(_DATASET_ID.match(dataset))


Node = Union[Iri, BlankNode]
Object = Union[Iri, BlankNode, Literal]


class Quad(NamedTuple):
    subject: Node
    predicate: Iri
    object: Object
    graph: GraphId


def term_sort_key(term: object) -> tuple:
    """Total order over terms, used wherever deterministic output is promised."""
    if isinstance(term, Iri):
        return (0, str(term), "", "")
    if isinstance(term, BlankNode):
        return (1, term.label, "", "")
    if isinstance(term, Literal):
        return (2, term.lexical, str(term.datatype), term.lang or "")
    return (3, str(term), "", "")


def quad_sort_key(quad: Quad) -> tuple:
    return (
        quad.graph.dataset,
        quad.graph.version,
        term_sort_key(quad.subject),
        term_sort_key(quad.predicate),
        term_sort_key(quad.object),
    )
