import itertools
import threading

import pytest
from hypothesis import given, settings, strategies as st

from citykb.store import QuadStore, StaleVersionError
from citykb.terms import BlankNode, GraphId, Iri, Literal, Quad, XSD_INTEGER

from conftest import make_quads

RES = "http://citykb.local/resource/"
ONT = "http://citykb.local/ontology#"


def iri(local):
    return Iri(RES + local)


def prop(local):
    return Iri(ONT + local)


def quad(s, p, o, g=GraphId("testdata", 1)):
    return Quad(iri(s), prop(p), iri(o) if isinstance(o, str) else o, g)


class TestInsert:
    def test_three_distinct_quads(self):
        store = QuadStore()
        report = store.insert([quad("a", "p", "b"), quad("a", "p", "c"), quad("b", "p", "c")])
        assert report.added == 3
        assert not report.errors
        assert len(store) == 3

    def test_duplicate_is_deduplicated(self):
        store = QuadStore()
        q = quad("a", "p", "b")
        report = store.insert([q, q])
        assert report.added == 1
        assert len(store) == 1
        assert store.insert([q]).added == 0

    def test_malformed_iri_rejected_with_position(self):
        store = QuadStore()
        bad = Quad(Iri("not an iri"), prop("p"), iri("b"), GraphId("testdata", 1))
        report = store.insert([quad("a", "p", "b"), bad, quad("c", "p", "d")])
        assert report.added == 2
        assert len(report.errors) == 1
        assert report.errors[0].position == 1
        assert "subject" in report.errors[0].message

    def test_unparseable_numeric_literal_rejected(self):
        store = QuadStore()
        bad = quad("a", "p", Literal("twelve", XSD_INTEGER))
        report = store.insert([bad])
        assert report.added == 0
        assert "unparseable" in report.errors[0].message

    def test_insert_into_non_active_version_rejected(self):
        store = QuadStore()
        store.insert([quad("a", "p", "b", GraphId("d", 2))])
        report = store.insert([quad("c", "p", "d", GraphId("d", 1))])
        assert report.added == 0
        assert "active at version 2" in report.errors[0].message

    def test_blank_node_subject_allowed(self):
        store = QuadStore()
        q = Quad(BlankNode("b0"), prop("p"), iri("x"), GraphId("testdata", 1))
        assert store.insert([q]).added == 1

    def test_million_quads_with_known_cardinalities(self):
        # 1000 subjects x 10 predicates x 100 objects = 1,000,000 distinct quads.
        g = GraphId("bulk", 1)
        store = QuadStore()

        def gen():
            for i in range(1000):
                s = Iri(f"{RES}s{i}")
                for j in range(10):
                    p = Iri(f"{ONT}p{j}")
                    for k in range(100):
                        yield Quad(s, p, Iri(f"{RES}o{i}_{k}"), g)

        report = store.insert(gen())
        assert report.added == 1_000_000
        assert len(store) == 1_000_000
        # One probe per access pattern family, against known layout.
        assert store.count(subject=Iri(f"{RES}s5")) == 1000
        assert store.count(predicate=Iri(f"{ONT}p3")) == 100_000
        assert store.count(obj=Iri(f"{RES}o7_42")) == 10
        assert store.count(subject=Iri(f"{RES}s5"), predicate=Iri(f"{ONT}p3")) == 100


class TestMatch:
    def test_empty_store_any_pattern(self):
        store = QuadStore()
        assert store.match() == []
        assert store.match(subject=iri("a")) == []

    @pytest.mark.parametrize("n", [100, 2000])
    def test_every_pattern_combination_equals_scan(self, n, graph):
        quads = make_quads(n, graph)
        store = QuadStore()
        store.insert(quads)
        universe = list({(q.subject, q.predicate, q.object) for q in quads})
        probes = universe[:: max(1, len(universe) // 25)]
        for s, p, o in probes:
            for mask in itertools.product([True, False], repeat=3):
                qs = s if mask[0] else None
                qp = p if mask[1] else None
                qo = o if mask[2] else None
                got = {(q.subject, q.predicate, q.object) for q in store.match(qs, qp, qo)}
                want = {
                    t
                    for t in universe
                    if (qs is None or t[0] == qs)
                    and (qp is None or t[1] == qp)
                    and (qo is None or t[2] == qo)
                }
                assert got == want

    def test_match_result_is_snapshot(self, graph):
        store = QuadStore()
        store.insert([quad("a", "p", "b")])
        snapshot = store.match()
        store.insert([quad("c", "p", "d")])
        assert len(snapshot) == 1

    def test_deterministic_for_fixed_state(self, graph):
        store = QuadStore()
        store.insert(make_quads(500, graph))
        assert store.match() == store.match()


class TestReplaceGraph:
    def test_old_version_quads_gone(self):
        store = QuadStore()
        store.insert([quad("a", "p", "old", GraphId("d", 1))])
        store.replace_graph("d", 2, [quad("a", "p", "new")])
        assert store.match(obj=iri("old")) == []
        assert len(store.match(obj=iri("new"))) == 1
        assert store.active_version("d") == 2

    def test_identical_content_only_version_changes(self):
        store = QuadStore()
        qs = [quad("a", "p", "b"), quad("a", "p", "c")]
        store.replace_graph("d", 1, qs)
        before = {(q.subject, q.predicate, q.object) for q in store.match()}
        store.replace_graph("d", 2, qs)
        after = {(q.subject, q.predicate, q.object) for q in store.match()}
        assert before == after
        assert store.graphs() == [GraphId("d", 2)]

    def test_stale_version_rejected_with_current(self):
        store = QuadStore()
        store.replace_graph("d", 3, [quad("a", "p", "b")])
        with pytest.raises(StaleVersionError) as exc:
            store.replace_graph("d", 3, [])
        assert exc.value.current == 3

    def test_graph_isolation(self):
        store = QuadStore()
        store.insert([quad("a", "p", "b", GraphId("keep", 1))])
        store.replace_graph("churn", 1, [quad("x", "p", "y")])
        keep_before = store.match(graph=GraphId("keep", 1))
        store.replace_graph("churn", 2, [quad("x", "p", "z")])
        assert store.match(graph=GraphId("keep", 1)) == keep_before
        store.drop_graph("churn")
        assert store.match(graph=GraphId("keep", 1)) == keep_before

    def test_concurrent_readers_never_see_mixed_graph(self):
        store = QuadStore()
        old = [quad("s", "p", f"old{i}", GraphId("d", 1)) for i in range(200)]
        new = [quad("s", "p", f"new{i}") for i in range(200)]
        store.replace_graph("d", 1, old)
        old_set = {(q.subject, q.predicate, q.object) for q in old}
        new_set = {
            (q.subject, q.predicate, Quad(q.subject, q.predicate, q.object, GraphId("d", 2)).object)
            for q in new
        }
        violations = []
        stop = threading.Event()

        def reader():
            while not stop.is_set():
                seen = {(q.subject, q.predicate, q.object) for q in store.match()}
                if seen != old_set and seen != new_set:
                    violations.append(seen)
                    return

        threads = [threading.Thread(target=reader) for _ in range(8)]
        for t in threads:
            t.start()
        store.replace_graph("d", 2, new)
        stop.set()
        for t in threads:
            t.join()
        assert violations == []


class TestSetSemantics:
    @settings(max_examples=30, deadline=None)
    @given(st.permutations(list(range(12))))
    def test_insert_order_irrelevant(self, order):
        g = GraphId("perm", 1)
        quads = make_quads(12, g, seed=3)
        store = QuadStore()
        store.insert([quads[i] for i in order])
        baseline = QuadStore()
        baseline.insert(quads)
        assert set(store.match()) == set(baseline.match())
