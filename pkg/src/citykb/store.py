"""Embedded in-memory quad store.

Quads are held per graph under three permutation indexes (SPO, POS, OSP) so
any bound/unbound pattern combination resolves without a full scan. One lock
guards structural changes; every read materializes its result under that lock,
so a returned list is a stable snapshot and a graph swap is observed either
entirely before or entirely after any read.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from . import nquads
from .terms import (
    BlankNode,
    GraphId,
    Iri,
    Literal,
    Node,
    Object,
    Quad,
    dataset_id_is_wellformed,
    iri_is_wellformed,
    literal_problem,
)


class StoreError(Exception):
    pass


class StaleVersionError(StoreError):
    """Raised when a graph replacement does not advance the dataset version."""

    def __init__(self, dataset: str, offered: int, current: int):
        super().__init__(
            f"dataset {dataset!r}: offered version {offered} "
            f"does not supersede current version {current}"
        )
        self.dataset = dataset
        self.offered = offered
        self.current = current


@dataclass(frozen=True)
class QuadIssue:
    position: int
    message: str


@dataclass
class InsertReport:
    added: int = 0
    errors: list[QuadIssue] = field(default_factory=list)


@dataclass
class ReplaceReport:
    graph: GraphId
    added: int = 0
    errors: list[QuadIssue] = field(default_factory=list)


class _GraphSlice:
    """Index bundle for the triples of one graph."""

    __slots__ = ("triples", "spo", "pos", "osp")

    def __init__(self) -> None:
        self.triples: set[tuple[Node, Iri, Object]] = set()
        self.spo: dict[Node, dict[Iri, set[Object]]] = {}
        self.pos: dict[Iri, dict[Object, set[Node]]] = {}
        self.osp: dict[Object, dict[Node, set[Iri]]] = {}

    def add(self, s: Node, p: Iri, o: Object) -> bool:
        key = (s, p, o)
        if key in self.triples:
            return False
        self.triples.add(key)
        self.spo.setdefault(s, {}).setdefault(p, set()).add(o)
        self.pos.setdefault(p, {}).setdefault(o, set()).add(s)
        self.osp.setdefault(o, {}).setdefault(s, set()).add(p)
        return True

    def match(self, s, p, o) -> Iterator[tuple[Node, Iri, Object]]:
        if s is not None and p is not None and o is not None:
            if (s, p, o) in self.triples:
                yield (s, p, o)
        elif s is not None and p is not None:
            for oo in self.spo.get(s, {}).get(p, ()):
                yield (s, p, oo)
        elif s is not None and o is not None:
            for pp in self.osp.get(o, {}).get(s, ()):
                yield (s, pp, o)
        elif s is not None:
            for pp, objects in self.spo.get(s, {}).items():
                for oo in objects:
                    yield (s, pp, oo)
        elif p is not None and o is not None:
            for ss in self.pos.get(p, {}).get(o, ()):
                yield (ss, p, o)
        elif p is not None:
            for oo, subjects in self.pos.get(p, {}).items():
                for ss in subjects:
                    yield (ss, p, oo)
        elif o is not None:
            for ss, preds in self.osp.get(o, {}).items():
                for pp in preds:
                    yield (ss, pp, o)
        else:
            yield from self.triples

    def count(self, s, p, o) -> int:
        if s is not None and p is not None and o is not None:
            return 1 if (s, p, o) in self.triples else 0
        if s is not None and p is not None:
            return len(self.spo.get(s, {}).get(p, ()))
        if s is not None and o is not None:
            return len(self.osp.get(o, {}).get(s, ()))
        if s is not None:
            return sum(len(v) for v in self.spo.get(s, {}).values())
        if p is not None and o is not None:
            return len(self.pos.get(p, {}).get(o, ()))
        if p is not None:
            return sum(len(v) for v in self.pos.get(p, {}).values())
        if o is not None:
            return sum(len(v) for v in self.osp.get(o, {}).values())
        return len(self.triples)


class QuadStore:
    """Set-semantics quad store with per-dataset versioned graphs."""

    def __init__(self, base_namespace: str | None = None):
        self._base = base_namespace
        self._lock = threading.RLock()
        self._graphs: dict[GraphId, _GraphSlice] = {}
        self._active: dict[str, int] = {}
        self._generation = 0
        self._vetted_iris: set[str] = set()

    # -- validation -------------------------------------------------------

    def _iri_ok(self, value: Iri) -> bool:
        if value in self._vetted_iris:
            return True
        if iri_is_wellformed(value, self._base):
            # Unbounded in principle, but in practice bounded by vocabulary
            # plus subject churn, all of which the indexes retain anyway.
            self._vetted_iris.add(value)
            return True
        return False

    def _quad_problem(self, quad: Quad) -> str | None:
        s, p, o, g = quad
        if isinstance(s, Iri):
            if not self._iri_ok(s):
                return f"malformed subject IRI {str(s)!r}"
        elif not isinstance(s, BlankNode):
            return f"subject must be an IRI or blank node, got {type(s).__name__}"
        if not isinstance(p, Iri) or not self._iri_ok(p):
            return f"malformed predicate {p!r}"
        if isinstance(o, Iri):
            if not self._iri_ok(o):
                return f"malformed object IRI {str(o)!r}"
        elif isinstance(o, Literal):
            problem = literal_problem(o)
            if problem:
                return problem
        elif not isinstance(o, BlankNode):
            return f"object must be an IRI, blank node or literal, got {type(o).__name__}"
        if not isinstance(g, GraphId) or not dataset_id_is_wellformed(g.dataset):
            return f"malformed graph id {g!r}"
        if g.version < 1:
            return f"graph version must be >= 1, got {g.version}"
        return None

    # -- mutation ---------------------------------------------------------

    def insert(self, quads: Iterable[Quad]) -> InsertReport:
        """Add quads. Malformed quads are reported with their stream position
        and skipped; the rest of the batch still loads."""
        report = InsertReport()
        with self._lock:
            for position, quad in enumerate(quads):
                problem = self._quad_problem(quad)
                if problem is None:
                    active = self._active.get(quad.graph.dataset)
                    if active is not None and active != quad.graph.version:
                        problem = (
                            f"dataset {quad.graph.dataset!r} is active at version "
                            f"{active}; use replace_graph to move to {quad.graph.version}"
                        )
                if problem is not None:
                    report.errors.append(QuadIssue(position, problem))
                    continue
                graph_slice = self._graphs.get(quad.graph)
                if graph_slice is None:
                    graph_slice = _GraphSlice()
                    self._graphs[quad.graph] = graph_slice
                    self._active[quad.graph.dataset] = quad.graph.version
                if graph_slice.add(quad.subject, quad.predicate, quad.object):
                    report.added += 1
            if report.added:
                self._generation += 1
        return report

    def replace_graph(
        self, dataset: str, version: int, quads: Iterable[Quad]
    ) -> ReplaceReport:
        """Atomically swap the active graph of `dataset` for `version`.

        The incoming quads are re-keyed to the new graph; readers observe
        either the complete old graph or the complete new one, never a mix.
        """
        if not dataset_id_is_wellformed(dataset):
            raise StoreError(f"malformed dataset id {dataset!r}")
        current = self._active.get(dataset)
        if current is not None and version <= current:
            raise StaleVersionError(dataset, version, current)
        new_graph = GraphId(dataset, version)
        report = ReplaceReport(graph=new_graph)
        # Build the replacement slice outside the lock: readers stay live
        # through the expensive part and only wait for the pointer swap.
        fresh = _GraphSlice()
        for position, quad in enumerate(quads):
            rekeyed = Quad(quad.subject, quad.predicate, quad.object, new_graph)
            problem = self._quad_problem(rekeyed)
            if problem is not None:
                report.errors.append(QuadIssue(position, problem))
                continue
            if fresh.add(rekeyed.subject, rekeyed.predicate, rekeyed.object):
                report.added += 1
        with self._lock:
            current = self._active.get(dataset)
            if current is not None and version <= current:
                raise StaleVersionError(dataset, version, current)
            if current is not None:
                self._graphs.pop(GraphId(dataset, current), None)
            self._graphs[new_graph] = fresh
            self._active[dataset] = version
            self._generation += 1
        return report

    def drop_graph(self, dataset: str) -> bool:
        with self._lock:
            current = self._active.pop(dataset, None)
            if current is None:
                return False
            self._graphs.pop(GraphId(dataset, current), None)
            self._generation += 1
            return True

    # -- reads ------------------------------------------------------------

    def match(
        self,
        subject: Node | None = None,
        predicate: Iri | None = None,
        obj: Object | None = None,
        graph: GraphId | None = None,
    ) -> list[Quad]:
        """All quads matching the bound positions; wildcards are None.

        The result is a materialized snapshot: later writes do not affect it.
        """
        out: list[Quad] = []
        with self._lock:
            if graph is not None:
                slices = [(graph, self._graphs.get(graph))]
            else:
                slices = list(self._graphs.items())
            for graph_id, graph_slice in slices:
                if graph_slice is None:
                    continue
                for s, p, o in graph_slice.match(subject, predicate, obj):
                    out.append(Quad(s, p, o, graph_id))
        return out

    def count(
        self,
        subject: Node | None = None,
        predicate: Iri | None = None,
        obj: Object | None = None,
        graph: GraphId | None = None,
    ) -> int:
        with self._lock:
            if graph is not None:
                graph_slice = self._graphs.get(graph)
                return graph_slice.count(subject, predicate, obj) if graph_slice else 0
            return sum(
                graph_slice.count(subject, predicate, obj)
                for graph_slice in self._graphs.values()
            )

    def __len__(self) -> int:
        with self._lock:
            return sum(len(g.triples) for g in self._graphs.values())

    def __contains__(self, quad: Quad) -> bool:
        with self._lock:
            graph_slice = self._graphs.get(quad.graph)
            if graph_slice is None:
                return False
            return (quad.subject, quad.predicate, quad.object) in graph_slice.triples

    def graphs(self) -> list[GraphId]:
        with self._lock:
            return list(self._graphs.keys())

    def active_version(self, dataset: str) -> int | None:
        with self._lock:
            return self._active.get(dataset)

    @property
    def generation(self) -> int:
        """Monotone change counter; lets callers cache derived indexes."""
        with self._lock:
            return self._generation

    # -- persistence ------------------------------------------------------

    def export_nquads(self, path: str | Path, graph: GraphId | None = None) -> int:
        quads = self.match(graph=graph)
        try:
            return nquads.write_file(path, quads)
        except OSError as exc:
            raise StoreError(f"export to {path} failed: {exc}") from exc

    def import_nquads(self, path: str | Path) -> InsertReport:
        try:
            quads, issues = nquads.read_file(path)
        except OSError as exc:
            raise StoreError(f"import from {path} failed: {exc}") from exc
        report = self.insert(quads)
        for issue in issues:
            report.errors.append(QuadIssue(issue.lineno, issue.message))
        return report
