import pytest

from citykb.reconcile import CandidateMatch, ReconciliationOutcome
from citykb.review import REJECT, ReviewError, ReviewQueue, toponym_node
from citykb.store import QuadStore
from citykb.terms import Iri
from citykb.vocab import OWL_SAME_AS, RESOURCE_NS, city


def res(local):
    return Iri(RESOURCE_NS + local)


def pending_outcome(sid="s1", n=2, with_entries=True):
    candidates = tuple(
        CandidateMatch(
            road_iri=res(f"Road/r{i}"),
            entry_iri=res(f"Entry/e{i}") if with_entries else None,
            street_number_iri=res(f"StreetNumber/n{i}") if with_entries else None,
            step=1,
        )
        for i in range(n)
    )
    return ReconciliationOutcome(res(f"Service/{sid}"), "pending-review", 1, candidates)


class TestQueue:
    def test_only_pending_outcomes_enqueued(self):
        queue = ReviewQueue()
        accepted = ReconciliationOutcome(res("Service/ok"), "street-number", 1)
        assert queue.add_outcome(accepted) is None
        item = queue.add_outcome(pending_outcome())
        assert item is not None and item.status == "pending"
        assert len(item.candidates) == 2

    def test_fifo_order_by_discovery(self):
        queue = ReviewQueue()
        first = queue.add_outcome(pending_outcome("a"))
        second = queue.add_outcome(pending_outcome("b"))
        ids = [i.review_id for i in queue.list_items()]
        assert ids == [first.review_id, second.review_id]

    def test_same_service_not_double_queued(self):
        queue = ReviewQueue()
        a = queue.add_outcome(pending_outcome("a"))
        b = queue.add_outcome(pending_outcome("a"))
        assert a.review_id == b.review_id
        assert len(queue.list_items()) == 1

    def test_persistence_round_trip(self, tmp_path):
        path = tmp_path / "reviews.json"
        queue = ReviewQueue(path)
        item = queue.add_outcome(pending_outcome())
        reloaded = ReviewQueue(path)
        got = reloaded.get(item.review_id)
        assert got is not None
        assert got.candidates[0].iri == item.candidates[0].iri
        # counter continues, no id reuse
        again = reloaded.add_outcome(pending_outcome("zz"))
        assert again.review_id != item.review_id


class TestResolve:
    def test_choosing_candidate_emits_link_and_sameas(self):
        queue = ReviewQueue()
        item = queue.add_outcome(pending_outcome())
        chosen = item.candidates[0]
        result = queue.resolve(item.review_id, chosen.iri, "key-1", reviewer="anna")
        assert result.item.status == "resolved"
        preds = {q.predicate for q in result.emitted}
        assert preds == {city("hasAccess"), OWL_SAME_AS}
        same_as = next(q for q in result.emitted if q.predicate == OWL_SAME_AS)
        assert same_as.subject == toponym_node(item.service_iri)
        assert same_as.object == Iri(chosen.road_iri)
        # only the chosen entry is referenced
        link = next(q for q in result.emitted if q.predicate == city("hasAccess"))
        assert link.object == Iri(chosen.iri)

    def test_street_level_candidate_emits_isin(self):
        queue = ReviewQueue()
        item = queue.add_outcome(pending_outcome(with_entries=False))
        result = queue.resolve(item.review_id, item.candidates[1].iri, "k")
        preds = {q.predicate for q in result.emitted}
        assert city("isIn") in preds

    def test_reject_closes_without_quads(self):
        queue = ReviewQueue()
        item = queue.add_outcome(pending_outcome())
        result = queue.resolve(item.review_id, REJECT, "k")
        assert result.item.status == "rejected"
        assert result.emitted == []
        assert queue.list_items(status="pending") == []

    def test_choice_outside_candidates_rejected(self):
        queue = ReviewQueue()
        item = queue.add_outcome(pending_outcome())
        with pytest.raises(ReviewError) as exc:
            queue.resolve(item.review_id, str(res("Entry/other")), "k")
        assert exc.value.code == "bad-choice"
        assert queue.get(item.review_id).status == "pending"

    def test_double_resolution_with_new_key_conflicts(self):
        queue = ReviewQueue()
        item = queue.add_outcome(pending_outcome())
        queue.resolve(item.review_id, item.candidates[0].iri, "k1")
        with pytest.raises(ReviewError) as exc:
            queue.resolve(item.review_id, item.candidates[1].iri, "k2")
        assert exc.value.code == "already-resolved"

    def test_same_key_replay_returns_original_without_side_effects(self):
        queue = ReviewQueue()
        store = QuadStore()
        item = queue.add_outcome(pending_outcome())
        first = queue.resolve(item.review_id, item.candidates[0].iri, "k1")
        store.insert(first.emitted)
        size = len(store)
        replay = queue.resolve(item.review_id, item.candidates[0].iri, "k1")
        assert replay.replay
        assert {tuple(q) for q in replay.emitted} == {tuple(q) for q in first.emitted}
        store.insert(replay.emitted)
        assert len(store) == size

    def test_unknown_item(self):
        with pytest.raises(ReviewError):
            ReviewQueue().resolve("rev-999999", REJECT, "k")
