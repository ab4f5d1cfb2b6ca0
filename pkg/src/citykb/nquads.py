"""Line-based N-Quads serialization: one statement per line, UTF-8.

Graph names encode (dataset, version) under a dedicated namespace so an
export/import round trip reconstructs the same graph partitioning.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator
from urllib.parse import quote, unquote

from .terms import (
    BlankNode,
    GraphId,
    Iri,
    Literal,
    Object,
    Quad,
    XSD_STRING,
)

GRAPH_NAMESPACE = "http://citykb.local/graph/"

_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}

_UNESCAPES = {
    "\\": "\\",
    '"': '"',
    "'": "'",
    "n": "\n",
    "r": "\r",
    "t": "\t",
    "b": "\b",
    "f": "\f",
}


def _escape_lexical(text: str) -> str:
    out = []
    for ch in text:
        esc = _ESCAPES.get(ch)
        if esc is not None:
            out.append(esc)
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def _unescape_lexical(text: str, lineno: int) -> str:
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= n:
            raise NQuadsSyntaxError(lineno, "dangling escape at end of literal")
        nxt = text[i + 1]
        if nxt in _UNESCAPES:
            out.append(_UNESCAPES[nxt])
            i += 2
        elif nxt == "u":
            if i + 6 > n:
                raise NQuadsSyntaxError(lineno, "truncated \\u escape")
            out.append(chr(int(text[i + 2 : i + 6], 16)))
            i += 6
        elif nxt == "U":
            if i + 10 > n:
                raise NQuadsSyntaxError(lineno, "truncated \\U escape")
            out.append(chr(int(text[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise NQuadsSyntaxError(lineno, f"unknown escape \\{nxt}")
    return "".join(out)


def graph_to_iri(graph: GraphId) -> str:
    return f"{GRAPH_NAMESPACE}{quote(graph.dataset, safe='')}/{graph.version}"


def graph_from_iri(iri: str) -> GraphId | None:
    if not iri.startswith(GRAPH_NAMESPACE):
        return None
    rest = iri[len(GRAPH_NAMESPACE) :]
    dataset, _, version = rest.rpartition("/")
    if not dataset or not version.isdigit():
        return None
    return GraphId(unquote(dataset), int(version))


def serialize_term(term: object) -> str:
    if isinstance(term, Iri):
        return f"<{term}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    if isinstance(term, Literal):
        body = f'"{_escape_lexical(term.lexical)}"'
        if term.lang:
            return f"{body}@{term.lang}"
        if term.datatype != XSD_STRING:
            return f"{body}^^<{term.datatype}>"
        return body
    raise TypeError(f"not a serializable term: {term!r}")


def serialize_quad(quad: Quad) -> str:
    return (
        f"{serialize_term(quad.subject)} {serialize_term(quad.predicate)} "
        f"{serialize_term(quad.object)} <{graph_to_iri(quad.graph)}> ."
    )


class NQuadsSyntaxError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
        self.reason = message


@dataclass(frozen=True)
class ParseIssue:
    lineno: int
    message: str


_IRIREF = r'<([^\x00-\x20<>"{}|^`\\]*)>'
_BNODE = r"_:([A-Za-z][A-Za-z0-9_.-]*)"
_LITERAL = r'"((?:[^"\\\n\r]|\\.)*)"(?:\^\^<([^>]*)>|@([A-Za-z][A-Za-z0-9-]*))?'

_LINE = re.compile(
    rf"^\s*(?:{_IRIREF}|{_BNODE})"  # subject: groups 1, 2
    rf"\s+{_IRIREF}"  # predicate: group 3
    rf"\s+(?:{_IRIREF}|{_BNODE}|{_LITERAL})"  # object: groups 4..8
    rf"(?:\s+{_IRIREF})?"  # graph: group 9
    r"\s*\.\s*$"
)


def parse_line(line: str, lineno: int) -> Quad | None:
    """Parse one statement line; None for blank/comment lines."""
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _LINE.match(line)
    if not m:
        raise NQuadsSyntaxError(lineno, f"unparseable statement: {stripped[:80]!r}")
    s_iri, s_bnode, pred, o_iri, o_bnode, o_lex, o_dt, o_lang = m.group(
        1, 2, 3, 4, 5, 6, 7, 8
    )
    subject = Iri(s_iri) if s_iri is not None else BlankNode(s_bnode)
    if o_iri is not None:
        obj: Object = Iri(o_iri)
    elif o_bnode is not None:
        obj = BlankNode(o_bnode)
    else:
        lexical = _unescape_lexical(o_lex, lineno)
        if o_lang is not None:
            obj = Literal(lexical, XSD_STRING, o_lang)
        else:
            obj = Literal(lexical, Iri(o_dt) if o_dt is not None else XSD_STRING)
    graph_iri = m.group(9)
    if graph_iri is None:
        graph = GraphId("default", 1)
    else:
        parsed = graph_from_iri(graph_iri)
        if parsed is None:
            raise NQuadsSyntaxError(
                lineno, f"graph IRI outside the managed namespace: {graph_iri}"
            )
        graph = parsed
    return Quad(subject, Iri(pred), obj, graph)


def parse_lines(lines: Iterable[str]) -> tuple[list[Quad], list[ParseIssue]]:
    quads: list[Quad] = []
    issues: list[ParseIssue] = []
    for lineno, line in enumerate(lines, start=1):
        try:
            quad = parse_line(line, lineno)
        except NQuadsSyntaxError as exc:
            issues.append(ParseIssue(lineno, exc.reason))
            continue
        if quad is not None:
            quads.append(quad)
    return quads, issues


def write_file(path: str | Path, quads: Iterable[Quad]) -> int:
    """Write quads to `path`; returns the number of statements written."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for quad in quads:
            fh.write(serialize_quad(quad))
            fh.write("\n")
            count += 1
    return count


def read_file(path: str | Path) -> tuple[list[Quad], list[ParseIssue]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_lines(fh)


def iter_file(path: str | Path) -> Iterator[Quad]:
    """Strict iteration: raises on the first malformed line."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            quad = parse_line(line, lineno)
            if quad is not None:
                yield quad
