"""Basic graph pattern evaluation with filters, projection, and paging.

This is the query core used by the validation suite and the HTTP service:
conjunctive triple patterns over the store, joined in ascending estimated
cardinality, then filtered and projected. Results are distinct rows sorted
by their term tuple so identical stores always answer identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .store import QuadStore
from .terms import BlankNode, Iri, Literal, Object, Quad, term_sort_key


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return f"?{self.name}"


Term = object  # Var | Iri | BlankNode | Literal


@dataclass(frozen=True)
class TriplePattern:
    subject: Term
    predicate: Term
    object: Term

    def variables(self) -> set[str]:
        return {t.name for t in (self.subject, self.predicate, self.object) if isinstance(t, Var)}


FILTER_OPS = ("lt", "le", "eq", "str-eq", "contains")


@dataclass(frozen=True)
class FilterClause:
    var: str
    op: str
    value: object  # number, string, or Var for variable-to-variable compares

    def __post_init__(self) -> None:
        if self.op not in FILTER_OPS:
            raise QueryCompileError(f"unknown filter op {self.op!r}")


@dataclass(frozen=True)
class GraphPatternQuery:
    patterns: tuple[TriplePattern, ...]
    filters: tuple[FilterClause, ...] = ()
    project: tuple[str, ...] = ()
    limit: int | None = None
    offset: int = 0


@dataclass
class BindingTable:
    columns: list[str]
    rows: list[tuple]

    def __len__(self) -> int:
        return len(self.rows)


class QueryCompileError(ValueError):
    pass


def _numeric(value: object) -> float | None:
    if isinstance(value, Literal):
        try:
            return float(value.lexical)
        except ValueError:
            return None
    if isinstance(value, (int, float)):
        return float(value)
    return None


def _stringy(value: object) -> str:
    if isinstance(value, Literal):
        return value.lexical
    return str(value)


def _filter_passes(clause: FilterClause, binding: dict[str, Object]) -> bool:
    left = binding[clause.var]
    right = binding[clause.value.name] if isinstance(clause.value, Var) else clause.value
    if clause.op in ("lt", "le", "eq"):
        a, b = _numeric(left), _numeric(right)
        if a is None or b is None:
            return False
        if clause.op == "lt":
            return a < b
        if clause.op == "le":
            return a <= b
        return a == b
    if clause.op == "str-eq":
        return _stringy(left) == _stringy(right)
    return _stringy(right) in _stringy(left)  # contains


def compile_query(query: GraphPatternQuery) -> GraphPatternQuery:
    """Sanity pass: every projected/filtered variable must be bound somewhere."""
    if not query.patterns:
        raise QueryCompileError("a query needs at least one pattern")
    bound: set[str] = set()
    for pattern in query.patterns:
        bound |= pattern.variables()
    for name in query.project:
        if name not in bound:
            raise QueryCompileError(f"projected variable ?{name} appears in no pattern")
    for clause in query.filters:
        if clause.var not in bound:
            raise QueryCompileError(f"filtered variable ?{clause.var} appears in no pattern")
        if isinstance(clause.value, Var) and clause.value.name not in bound:
            raise QueryCompileError(
                f"filter compares against unbound ?{clause.value.name}"
            )
    return query


def _resolve(term: Term, binding: dict[str, Object]):
    if isinstance(term, Var):
        return binding.get(term.name)
    return term


def evaluate(query: GraphPatternQuery, store: QuadStore) -> BindingTable:
    query = compile_query(query)
    # Join order: ascending estimated cardinality with constants-only estimates.
    def estimate(pattern: TriplePattern) -> int:
        s = pattern.subject if not isinstance(pattern.subject, Var) else None
        p = pattern.predicate if not isinstance(pattern.predicate, Var) else None
        o = pattern.object if not isinstance(pattern.object, Var) else None
        return store.count(s, p, o)

    ordered = sorted(query.patterns, key=estimate)

    bindings: list[dict[str, Object]] = [{}]
    for pattern in ordered:
        grown: list[dict[str, Object]] = []
        for binding in bindings:
            s = _resolve(pattern.subject, binding)
            p = _resolve(pattern.predicate, binding)
            o = _resolve(pattern.object, binding)
            for quad in store.match(s, p, o):
                extended = _unify(pattern, quad, binding)
                if extended is not None:
                    grown.append(extended)
        bindings = grown
        if not bindings:
            break

    bindings = [
        b for b in bindings if all(_filter_passes(clause, b) for clause in query.filters)
    ]

    columns = list(query.project) if query.project else sorted(
        {name for pattern in query.patterns for name in pattern.variables()}
    )
    rows = {tuple(b[c] for c in columns) for b in bindings}
    ordered_rows = sorted(rows, key=lambda row: tuple(term_sort_key(t) for t in row))
    window = ordered_rows[query.offset :]
    if query.limit is not None:
        window = window[: query.limit]
    return BindingTable(columns, window)


def _unify(
    pattern: TriplePattern, quad: Quad, binding: dict[str, Object]
) -> dict[str, Object] | None:
    extended = None
    for term, value in (
        (pattern.subject, quad.subject),
        (pattern.predicate, quad.predicate),
        (pattern.object, quad.object),
    ):
        if isinstance(term, Var):
            current = (extended or binding).get(term.name)
            if current is None:
                if extended is None:
                    extended = dict(binding)
                extended[term.name] = value
            elif current != value:
                return None  # repeated variable, conflicting assignment
    return extended if extended is not None else dict(binding)


def nested_loop_oracle(query: GraphPatternQuery, quads: Iterable[Quad]) -> BindingTable:
    """Index-free reference evaluator: same semantics, no store machinery.

    Each pattern's candidates come from one linear scan over the statement
    list (constants only); the join is a plain nested loop in textual order.
    """
    query = compile_query(query)
    universe = list(quads)

    def candidates(pattern: TriplePattern) -> list[Quad]:
        out = []
        for quad in universe:
            if not isinstance(pattern.subject, Var) and pattern.subject != quad.subject:
                continue
            if not isinstance(pattern.predicate, Var) and pattern.predicate != quad.predicate:
                continue
            if not isinstance(pattern.object, Var) and pattern.object != quad.object:
                continue
            out.append(quad)
        return out

    bindings: list[dict] = [{}]
    for pattern in query.patterns:  # textual order: no planner in the oracle
        pool = candidates(pattern)
        grown: list[dict] = []
        for binding in bindings:
            for quad in pool:
                candidate = dict(binding)
                ok = True
                for term, value in (
                    (pattern.subject, quad.subject),
                    (pattern.predicate, quad.predicate),
                    (pattern.object, quad.object),
                ):
                    if isinstance(term, Var):
                        if term.name in candidate:
                            if candidate[term.name] != value:
                                ok = False
                                break
                        else:
                            candidate[term.name] = value
                if ok:
                    grown.append(candidate)
        bindings = grown
        if not bindings:
            break
    bindings = [
        b for b in bindings if all(_filter_passes(clause, b) for clause in query.filters)
    ]
    columns = list(query.project) if query.project else sorted(
        {name for pattern in query.patterns for name in pattern.variables()}
    )
    rows = {tuple(b[c] for c in columns) for b in bindings}
    ordered_rows = sorted(rows, key=lambda row: tuple(term_sort_key(t) for t in row))
    window = ordered_rows[query.offset :]
    if query.limit is not None:
        window = window[: query.limit]
    return BindingTable(columns, window)
