"""Forward-chaining inference and closed-world constraint checking.

Three rule families run to a fixpoint:
  * subclass closure      — x a C, C subClassOf D  =>  x a D
  * inverse materialization — (x, p, y), inverseOf(p)=q  =>  (y, q, x)
  * restriction classification — membership conditions on defined classes
    (x a Base and x carries the restricted property / a listed value).

Derived statements land in a reserved graph and are never asserted twice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal as TypingLiteral

from .ontology import SchemaCatalog
from .store import QuadStore
from .terms import BlankNode, GraphId, Iri, Literal, Node, Quad
from .vocab import RDF_TYPE

INFERRED_DATASET = "inference"


def infer(
    store: QuadStore,
    catalog: SchemaCatalog,
    graph: GraphId = GraphId(INFERRED_DATASET, 1),
) -> list[Quad]:
    """Least fixpoint of the three rule families over a store snapshot.

    Returns only statements absent from the store; nothing is inserted.
    """
    asserted: set[tuple[Node, Iri, object]] = {
        (q.subject, q.predicate, q.object) for q in store.match()
    }

    types: dict[Node, set[Iri]] = {}
    links: set[tuple[Node, Iri, Node]] = set()
    values: dict[tuple[Node, Iri], set[str]] = {}
    has_prop: set[tuple[Node, Iri]] = set()

    inverses = {
        p.iri: p.inverse_of for p in catalog.properties.values() if p.inverse_of
    }
    restriction_defs = [
        (cdef.iri, cdef.superclasses[0] if cdef.superclasses else None, cdef.defined_by)
        for cdef in catalog.restriction_classes()
    ]

    for s, p, o in asserted:
        if p == RDF_TYPE and isinstance(o, Iri):
            types.setdefault(s, set()).add(o)
            continue
        has_prop.add((s, p))
        if isinstance(o, (Iri, BlankNode)):
            links.add((s, p, o))
        elif isinstance(o, Literal):
            values.setdefault((s, p), set()).add(o.lexical)

    ancestors: dict[Iri, set[Iri]] = {
        iri: catalog.superclass_closure(iri) for iri in catalog.classes
    }

    new_types: set[tuple[Node, Iri]] = set()
    new_links: set[tuple[Node, Iri, Node]] = set()

    changed = True
    while changed:
        changed = False
        # Subclass closure.
        for subject, current in types.items():
            derived: set[Iri] = set()
            for cls in current:
                derived |= ancestors.get(cls, set())
            fresh = derived - current
            if fresh:
                current |= fresh
                changed = True
                for cls in fresh:
                    new_types.add((subject, cls))
        # Inverse materialization.
        fresh_links: list[tuple[Node, Iri, Node]] = []
        for s, p, o in links:
            q = inverses.get(p)
            if q is not None and (o, q, s) not in links:
                fresh_links.append((o, q, s))
        for link in fresh_links:
            links.add(link)
            has_prop.add((link[0], link[1]))
            new_links.add(link)
            changed = True
        # Restriction classification.
        for class_iri, base, rule in restriction_defs:
            if rule is None:
                continue
            for subject, current in types.items():
                if class_iri in current:
                    continue
                if base is not None and base not in current:
                    continue
                if rule.mode == "has-some-value":
                    satisfied = (subject, rule.on_property) in has_prop
                else:
                    satisfied = bool(
                        values.get((subject, rule.on_property), set()) & rule.value_set
                    )
                if satisfied:
                    current.add(class_iri)
                    new_types.add((subject, class_iri))
                    changed = True

    out: list[Quad] = []
    for subject, cls in new_types:
        if (subject, RDF_TYPE, cls) not in asserted:
            out.append(Quad(subject, RDF_TYPE, cls, graph))
    for s, p, o in new_links:
        if (s, p, o) not in asserted:
            out.append(Quad(s, p, o, graph))
    return out


def materialize_inference(store: QuadStore, catalog: SchemaCatalog) -> GraphId:
    """Recompute the derived graph and swap it into the store."""
    current = store.active_version(INFERRED_DATASET) or 0
    graph = GraphId(INFERRED_DATASET, current + 1)
    derived = infer(store, catalog, graph)
    store.replace_graph(INFERRED_DATASET, graph.version, derived)
    return graph


ViolationKind = TypingLiteral["missing", "excess"]


@dataclass(frozen=True)
class Violation:
    subject: Node
    property_iri: Iri
    kind: ViolationKind
    detail: str


def check_constraints(store: QuadStore, catalog: SchemaCatalog) -> list[Violation]:
    """Closed-world cardinality check over the (already materialized) view.

    One violation per breached (subject, property) pair.
    """
    violations: list[Violation] = []
    for rule in catalog.cardinalities:
        subjects = {q.subject for q in store.match(None, RDF_TYPE, rule.class_iri)}
        for subject in sorted(subjects, key=str):
            # Distinct values, not raw quads: the same statement may be
            # asserted in several graphs without changing the cardinality.
            found = len({q.object for q in store.match(subject, rule.property_iri)})
            if rule.min_card is not None and found < rule.min_card:
                violations.append(
                    Violation(
                        subject,
                        rule.property_iri,
                        "missing",
                        f"{rule.class_iri} requires >= {rule.min_card} "
                        f"{rule.property_iri}, found {found}",
                    )
                )
            elif rule.max_card is not None and found > rule.max_card:
                violations.append(
                    Violation(
                        subject,
                        rule.property_iri,
                        "excess",
                        f"{rule.class_iri} allows <= {rule.max_card} "
                        f"{rule.property_iri}, found {found}",
                    )
                )
    return violations
