"""Human review queue for ambiguous reconciliation matches.

Every ambiguous outcome becomes a pending item, FIFO by discovery. A
resolution commits the service link (hasAccess or isIn) plus a sameAs bridge
from the service's raw-toponym node to the chosen road, exactly once: the
first decision wins and replays are only acknowledged for the same
idempotency key.
"""

from __future__ import annotations

import json
import threading
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .reconcile import ReconciliationOutcome, RECONCILIATION_DATASET
from .terms import GraphId, Iri, Quad
from .vocab import OWL_SAME_AS, city

REJECT = "reject"


class ReviewError(Exception):
    def __init__(self, message: str, code: str = "review-error"):
        super().__init__(message)
        self.code = code


@dataclass
class ReviewCandidate:
    iri: str  # entry IRI at number level, road IRI at street level
    road_iri: str
    road_name: str = ""
    matched_field: str = "official-name"
    level: str = "street"
    step: int = 0
    lat: float | None = None
    lon: float | None = None


@dataclass
class ReviewItem:
    review_id: str
    service_iri: str
    street: str = ""
    number: str = ""
    municipality: str = ""
    candidates: list[ReviewCandidate] = field(default_factory=list)
    discovered_at: str = ""
    status: str = "pending"  # pending | resolved | rejected
    chosen_iri: str | None = None
    reviewer: str | None = None
    resolved_at: str | None = None
    idempotency_key: str | None = None


@dataclass
class Resolution:
    item: ReviewItem
    emitted: list[Quad]
    replay: bool = False


def toponym_node(service_iri: str) -> Iri:
    """The service-side node the sameAs bridge hangs from."""
    return Iri(f"{service_iri}/toponym")


class ReviewQueue:
    def __init__(self, path: str | Path | None = None):
        self._path = Path(path) if path else None
        self._items: dict[str, ReviewItem] = {}
        self._order: list[str] = []
        self._lock = threading.Lock()
        self._counter = 0
        if self._path and self._path.exists():
            self._load()

    # -- intake ---------------------------------------------------------------

    def add_outcome(
        self,
        outcome: ReconciliationOutcome,
        road_names: dict[str, str] | None = None,
        entry_coords: dict[str, tuple[float, float]] | None = None,
        discovered_at: str = "",
    ) -> ReviewItem | None:
        """Queue a pending-review outcome; anything else is ignored."""
        if outcome.level != "pending-review":
            return None
        road_names = road_names or {}
        entry_coords = entry_coords or {}
        with self._lock:
            for item in self._items.values():
                if item.service_iri == str(outcome.service_iri) and item.status == "pending":
                    return item  # already queued
            self._counter += 1
            review_id = f"rev-{self._counter:06d}"
            candidates = []
            for cand in outcome.candidates:
                target = cand.entry_iri or cand.road_iri
                coords = entry_coords.get(str(target))
                candidates.append(
                    ReviewCandidate(
                        iri=str(target),
                        road_iri=str(cand.road_iri),
                        road_name=road_names.get(str(cand.road_iri), ""),
                        matched_field=cand.matched_field,
                        level="street-number" if cand.entry_iri else "street",
                        step=cand.step,
                        lat=coords[0] if coords else None,
                        lon=coords[1] if coords else None,
                    )
                )
            addr = outcome.address
            item = ReviewItem(
                review_id=review_id,
                service_iri=str(outcome.service_iri),
                street=addr.raw_street if addr else "",
                number=addr.raw_number if addr else "",
                municipality=addr.municipality_raw if addr else "",
                candidates=candidates,
                discovered_at=discovered_at,
            )
            self._items[review_id] = item
            self._order.append(review_id)
            self._save()
            return item

    # -- queries ---------------------------------------------------------------

    def get(self, review_id: str) -> ReviewItem | None:
        with self._lock:
            return self._items.get(review_id)

    def list_items(
        self,
        status: str | None = "pending",
        municipality: str | None = None,
        step: int | None = None,
    ) -> list[ReviewItem]:
        with self._lock:
            out = []
            for review_id in self._order:
                item = self._items[review_id]
                if status and item.status != status:
                    continue
                if municipality and item.municipality.upper() != municipality.upper():
                    continue
                if step is not None and not any(c.step == step for c in item.candidates):
                    continue
                out.append(item)
            return out

    def counts(self) -> dict[str, int]:
        with self._lock:
            out: dict[str, int] = {}
            for item in self._items.values():
                out[item.status] = out.get(item.status, 0) + 1
            return out

    # -- resolution --------------------------------------------------------------

    def resolve(
        self,
        review_id: str,
        choice: str,
        idempotency_key: str,
        reviewer: str = "",
        resolved_at: str = "",
        output_graph: GraphId = GraphId(RECONCILIATION_DATASET, 1),
    ) -> Resolution:
        """Commit a decision. `choice` is a candidate IRI or "reject".

        Replaying the same (item, key) returns the original result without
        side effects; a different key on a settled item is a conflict.
        """
        with self._lock:
            item = self._items.get(review_id)
            if item is None:
                raise ReviewError(f"no such review item {review_id!r}", "not-found")
            if item.status != "pending":
                if item.idempotency_key == idempotency_key:
                    return Resolution(item, self._emitted_for(item), replay=True)
                raise ReviewError(
                    f"review item {review_id} already {item.status}", "already-resolved"
                )
            if choice != REJECT and choice not in {c.iri for c in item.candidates}:
                raise ReviewError(
                    f"choice {choice!r} is not among the candidates", "bad-choice"
                )
            item.idempotency_key = idempotency_key
            item.reviewer = reviewer
            item.resolved_at = resolved_at
            if choice == REJECT:
                item.status = "rejected"
                item.chosen_iri = None
                self._save()
                return Resolution(item, [])
            item.status = "resolved"
            item.chosen_iri = choice
            self._save()
            return Resolution(item, self._emitted_for(item, output_graph))

    def _emitted_for(
        self,
        item: ReviewItem,
        graph: GraphId = GraphId(RECONCILIATION_DATASET, 1),
    ) -> list[Quad]:
        if item.status != "resolved" or item.chosen_iri is None:
            return []
        chosen = next(c for c in item.candidates if c.iri == item.chosen_iri)
        service = Iri(item.service_iri)
        if chosen.level == "street-number":
            link = Quad(service, city("hasAccess"), Iri(chosen.iri), graph)
        else:
            link = Quad(service, city("isIn"), Iri(chosen.iri), graph)
        same_as = Quad(toponym_node(item.service_iri), OWL_SAME_AS, Iri(chosen.road_iri), graph)
        return [link, same_as]

    # -- persistence ----------------------------------------------------------------

    def _save(self) -> None:
        if self._path is None:
            return
        payload = {
            "counter": self._counter,
            "items": [asdict(self._items[rid]) for rid in self._order],
        }
        tmp = self._path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, indent=1), encoding="utf-8")
        tmp.replace(self._path)

    def _load(self) -> None:
        payload = json.loads(self._path.read_text(encoding="utf-8"))
        self._counter = payload.get("counter", 0)
        for raw in payload.get("items", []):
            candidates = [ReviewCandidate(**c) for c in raw.pop("candidates", [])]
            item = ReviewItem(candidates=candidates, **raw)
            self._items[item.review_id] = item
            self._order.append(item.review_id)
