"""Connects point-of-interest services to the street guide.

A cascade of matching steps runs twice per service: first demanding a civic
number match (the accepted link is service -> entry), then ignoring numbers
(service -> road). A step that finds exactly one candidate wins; two or more
candidates push the service to the human review queue; none anywhere leaves
it unresolved. Matching never guesses: no step uses string distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Protocol

from .addresses import (
    DEFAULT_STRANGE_CHARS,
    MunicipalityAliases,
    NormalizedAddress,
    QualifierTable,
    StreetNumberToken,
    lenient_number_field,
    parse_address,
    tokenize_street,
)
from .ontology import SchemaCatalog, builtin_catalog
from .store import QuadStore
from .terms import GraphId, Iri, Literal, Quad
from .vocab import (
    GEO_LAT,
    GEO_LONG,
    RDF_TYPE,
    VCARD_LOCALITY,
    VCARD_STREET_ADDRESS,
    city,
)

RECONCILIATION_DATASET = "reconciliation"

OFFICIAL_NAME = "official-name"
ALTERNATIVE_NAME = "alternative-name"


@dataclass(frozen=True)
class CandidateMatch:
    road_iri: Iri
    entry_iri: Iri | None = None  # present iff the match is street-number level
    street_number_iri: Iri | None = None
    matched_field: str = OFFICIAL_NAME
    step: int = 0


@dataclass(frozen=True)
class ReconciliationOutcome:
    service_iri: Iri
    level: str  # street-number | street | pending-review | unresolved
    step: int | str | None = None
    candidates: tuple[CandidateMatch, ...] = ()
    emitted_quads: tuple[Quad, ...] = ()
    address: NormalizedAddress | None = None
    geocoded: tuple[float, float] | None = None
    notes: tuple[str, ...] = ()


class GeocoderError(Exception):
    pass


@dataclass(frozen=True)
class GeocodeHit:
    street: str
    municipality: str
    lat: float
    lon: float


class Geocoder(Protocol):
    def geocode(self, street: str, number: str, municipality: str) -> GeocodeHit | None: ...


@dataclass
class PipelineConfig:
    qualifier_table: QualifierTable = field(default_factory=QualifierTable.builtin)
    municipality_aliases: MunicipalityAliases = field(default_factory=MunicipalityAliases)
    geocoder: Geocoder | None = None
    strange_chars: str = DEFAULT_STRANGE_CHARS
    output_graph: GraphId = GraphId(RECONCILIATION_DATASET, 1)


# -- gazetteer view ------------------------------------------------------------


@dataclass
class RoadView:
    iri: Iri
    municipality: Iri
    official: str = ""  # normalized name
    alternative: str = ""
    # (number, exponent, color) -> sorted list of (street number, external entry)
    numbers: dict[tuple[int, str, str], list[tuple[Iri, Iri]]] = field(default_factory=dict)

    def entry_for(
        self, tokens: Iterable[StreetNumberToken]
    ) -> tuple[Iri, Iri] | None:
        """Entry of the first address token this road can serve, if any."""
        for token in tokens:
            if not token.usable:
                continue
            hits = self.numbers.get(token.key())
            if hits:
                return hits[0]
        return None


class Gazetteer:
    """Name- and word-indexed snapshot of the street guide, built once per
    reconciliation run from the store."""

    def __init__(self, store: QuadStore):
        self.municipalities: dict[str, Iri] = {}
        self.municipality_names: dict[Iri, str] = {}
        self.roads: dict[Iri, RoadView] = {}
        self.by_name: dict[tuple[Iri, str], list[tuple[RoadView, str]]] = {}
        self.by_word: dict[tuple[Iri, str], set[Iri]] = {}
        self._build(store)

    @staticmethod
    def _norm(text: str) -> str:
        return " ".join(tokenize_street(text))

    def _build(self, store: QuadStore) -> None:
        for quad in store.match(None, RDF_TYPE, city("Municipality")):
            muni = quad.subject
            if not isinstance(muni, Iri):
                continue
            for name_quad in store.match(muni, city("name")):
                if isinstance(name_quad.object, Literal):
                    norm = self._norm(name_quad.object.lexical)
                    self.municipalities[norm] = muni
                    self.municipality_names[muni] = norm

        for quad in store.match(None, RDF_TYPE, city("Road")):
            road = quad.subject
            if not isinstance(road, Iri) or road in self.roads:
                continue
            muni_links = store.match(road, city("inMunicipalityOf"))
            if not muni_links:
                continue
            view = RoadView(iri=road, municipality=muni_links[0].object)
            for name_quad in store.match(road, city("officialName")):
                if isinstance(name_quad.object, Literal):
                    view.official = self._norm(name_quad.object.lexical)
            for name_quad in store.match(road, city("alternativeName")):
                if isinstance(name_quad.object, Literal):
                    view.alternative = self._norm(name_quad.object.lexical)
            self.roads[road] = view
            if view.official:
                self.by_name.setdefault((view.municipality, view.official), []).append(
                    (view, OFFICIAL_NAME)
                )
                for word in view.official.split():
                    self.by_word.setdefault((view.municipality, word), set()).add(road)
            if view.alternative and view.alternative != view.official:
                self.by_name.setdefault((view.municipality, view.alternative), []).append(
                    (view, ALTERNATIVE_NAME)
                )
                for word in view.alternative.split():
                    self.by_word.setdefault((view.municipality, word), set()).add(road)

        # Street numbers and their external entries.
        for quad in store.match(None, RDF_TYPE, city("StreetNumber")):
            sn = quad.subject
            if not isinstance(sn, Iri):
                continue
            road_links = store.match(sn, city("belongsTo"))
            if not road_links:
                continue
            view = self.roads.get(road_links[0].object)
            if view is None:
                continue
            number = None
            exponent = ""
            color = "B"
            for v in store.match(sn, city("civicNumber")):
                if isinstance(v.object, Literal):
                    number = int(v.object.lexical)
            for v in store.match(sn, city("exponent")):
                if isinstance(v.object, Literal):
                    exponent = v.object.lexical
            for v in store.match(sn, city("classCode")):
                if isinstance(v.object, Literal):
                    color = v.object.lexical or "B"
            if number is None:
                continue
            for access in store.match(sn, city("hasExternalAccess")):
                if isinstance(access.object, Iri):
                    view.numbers.setdefault((number, exponent, color), []).append(
                        (sn, access.object)
                    )
        for view in self.roads.values():
            for hits in view.numbers.values():
                hits.sort()

    def resolve_municipality(self, name_norm: str) -> Iri | None:
        return self.municipalities.get(name_norm)


# -- matching steps --------------------------------------------------------------


def _dedupe(candidates: list[CandidateMatch]) -> list[CandidateMatch]:
    seen: set[tuple[Iri, Iri | None]] = set()
    out = []
    for cand in sorted(
        candidates, key=lambda c: (c.road_iri, c.matched_field != OFFICIAL_NAME)
    ):
        key = (cand.road_iri, cand.entry_iri)
        if key not in seen:
            seen.add(key)
            out.append(cand)
    return out


def _candidates_for_name(
    gazetteer: Gazetteer,
    municipality: Iri,
    name: str,
    tokens: tuple[StreetNumberToken, ...],
    with_numbers: bool,
    step: int,
) -> list[CandidateMatch]:
    usable = [t for t in tokens if t.usable]
    if with_numbers and not usable:
        return []  # nothing is acceptable at number level without a civic
    out = []
    for view, matched_field in gazetteer.by_name.get((municipality, name), []):
        if with_numbers:
            hit = view.entry_for(usable)
            if hit is None:
                continue
            sn, entry = hit
            out.append(CandidateMatch(view.iri, entry, sn, matched_field, step))
        else:
            out.append(CandidateMatch(view.iri, None, None, matched_field, step))
    return _dedupe(out)


def step1_exact(
    addr: NormalizedAddress, gazetteer: Gazetteer, with_numbers: bool, step: int = 1
) -> list[CandidateMatch]:
    """Exact search of the street name, official and alternative fields."""
    if addr.municipality_canonical is None or not addr.street_tokens:
        return []
    municipality = gazetteer.resolve_municipality(addr.municipality_canonical)
    if municipality is None:
        return []
    return _candidates_for_name(
        gazetteer, municipality, addr.street_key, addr.number_tokens, with_numbers, step
    )


def step2_qualifier_variants(
    addr: NormalizedAddress,
    table: QualifierTable,
    gazetteer: Gazetteer,
    with_numbers: bool,
    step: int = 2,
) -> list[CandidateMatch]:
    """Exact search again, over every notation-variant rewriting."""
    if addr.municipality_canonical is None or not addr.street_tokens:
        return []
    municipality = gazetteer.resolve_municipality(addr.municipality_canonical)
    if municipality is None:
        return []
    out: list[CandidateMatch] = []
    for combo in table.expansions(addr.street_tokens):
        out.extend(
            _candidates_for_name(
                gazetteer,
                municipality,
                " ".join(combo),
                addr.number_tokens,
                with_numbers,
                step,
            )
        )
    return _dedupe(out)


def step3_last_word(
    addr: NormalizedAddress, gazetteer: Gazetteer, with_numbers: bool, step: int = 3
) -> list[CandidateMatch]:
    """Whole-word containment of the last street token in road names."""
    if addr.municipality_canonical is None or not addr.street_tokens:
        return []
    municipality = gazetteer.resolve_municipality(addr.municipality_canonical)
    if municipality is None:
        return []
    last = addr.street_tokens[-1]
    usable = [t for t in addr.number_tokens if t.usable]
    if with_numbers and not usable:
        return []
    out = []
    for road_iri in gazetteer.by_word.get((municipality, last), set()):
        view = gazetteer.roads[road_iri]
        matched_field = (
            OFFICIAL_NAME if last in view.official.split() else ALTERNATIVE_NAME
        )
        if with_numbers:
            hit = view.entry_for(usable)
            if hit is None:
                continue
            sn, entry = hit
            out.append(CandidateMatch(view.iri, entry, sn, matched_field, step))
        else:
            out.append(CandidateMatch(view.iri, None, None, matched_field, step))
    return _dedupe(out)


# -- the pipeline ---------------------------------------------------------------


class Reconciler:
    def __init__(
        self,
        store: QuadStore,
        config: PipelineConfig | None = None,
        catalog: SchemaCatalog | None = None,
    ):
        self.store = store
        self.config = config or PipelineConfig()
        self.catalog = catalog or builtin_catalog()
        self.gazetteer = Gazetteer(store)
        self._last_geocode: tuple[float, float] | None = None

    # address assembly ------------------------------------------------------

    def _service_address(self, service: Iri) -> NormalizedAddress:
        def first_literal(prop) -> str:
            for quad in self.store.match(service, prop):
                if isinstance(quad.object, Literal):
                    return quad.object.lexical
            return ""

        addr = parse_address(
            first_literal(VCARD_STREET_ADDRESS),
            first_literal(city("streetNumberText")),
            first_literal(VCARD_LOCALITY),
            self.config.strange_chars,
        )
        canonical = addr.municipality_raw if addr.municipality_raw in self.gazetteer.municipalities else None
        return replace(addr, municipality_canonical=canonical)

    # step drivers ----------------------------------------------------------

    def _basic_cascade(
        self, addr: NormalizedAddress, with_numbers: bool, tag_as: int | None = None
    ) -> tuple[int, list[CandidateMatch]] | None:
        """Steps 1-3 in order; the first step with any candidates decides."""
        runners = (
            (1, lambda t: step1_exact(addr, self.gazetteer, with_numbers, t)),
            (
                2,
                lambda t: step2_qualifier_variants(
                    addr, self.config.qualifier_table, self.gazetteer, with_numbers, t
                ),
            ),
            (3, lambda t: step3_last_word(addr, self.gazetteer, with_numbers, t)),
        )
        for step_no, run in runners:
            found = run(tag_as or step_no)
            if found:
                return (tag_as or step_no), found
        return None

    def _step4_geocode(
        self, addr: NormalizedAddress, with_numbers: bool, notes: list[str]
    ) -> tuple[int, list[CandidateMatch]] | None:
        geocoder = self.config.geocoder
        if geocoder is None:
            return None
        try:
            hit = geocoder.geocode(addr.raw_street, addr.raw_number, addr.municipality_raw)
        except Exception as exc:
            notes.append(f"step4=skipped:{exc}")
            return None
        if hit is None:
            return None
        self._last_geocode = (hit.lat, hit.lon)
        rewritten = addr.with_street(tokenize_street(hit.street, self.config.strange_chars))
        muni_norm = " ".join(tokenize_street(hit.municipality or addr.municipality_raw))
        if muni_norm in self.gazetteer.municipalities:
            rewritten = replace(rewritten, municipality_canonical=muni_norm)
        found = step1_exact(rewritten, self.gazetteer, with_numbers, step=4)
        if not found:
            found = step2_qualifier_variants(
                rewritten, self.config.qualifier_table, self.gazetteer, with_numbers, step=4
            )
        return (4, found) if found else None

    def _step5_strip_retry(
        self, addr: NormalizedAddress, with_numbers: bool
    ) -> tuple[int, list[CandidateMatch]] | None:
        cleaned_tokens = [t for t in addr.street_tokens if t != "ANG"]
        cleaned = addr.with_street(cleaned_tokens)
        cleaned = replace(
            cleaned,
            number_tokens=tuple(
                lenient_number_field(addr.raw_number, self.config.strange_chars)
            ),
        )
        result = self._basic_cascade(cleaned, with_numbers, tag_as=5)
        return (5, result[1]) if result else None

    def _step6_municipality(
        self, addr: NormalizedAddress, with_numbers: bool
    ) -> tuple[int, list[CandidateMatch]] | None:
        canonical = self.config.municipality_aliases.resolve(addr.municipality_raw)
        if canonical is None or canonical not in self.gazetteer.municipalities:
            return None
        remapped = replace(addr, municipality_canonical=canonical)
        result = self._basic_cascade(remapped, with_numbers, tag_as=6)
        return (6, result[1]) if result else None

    def _pass(
        self, addr: NormalizedAddress, with_numbers: bool, notes: list[str]
    ) -> tuple[int, list[CandidateMatch]] | None:
        """One full cascade at the requested level; geocoding only applies to
        the number-level pass."""
        result = self._basic_cascade(addr, with_numbers)
        if result:
            return result
        if with_numbers:
            result = self._step4_geocode(addr, with_numbers, notes)
            if result:
                return result
        result = self._step5_strip_retry(addr, with_numbers)
        if result:
            return result
        return self._step6_municipality(addr, with_numbers)

    # public API --------------------------------------------------------------

    def reconcile(self, service: Iri) -> ReconciliationOutcome:
        self._last_geocode = None
        addr = self._service_address(service)
        notes: list[str] = []
        if addr.empty:
            return ReconciliationOutcome(service, "unresolved", None, address=addr)

        found = self._pass(addr, with_numbers=True, notes=notes)
        if found is not None:
            step, candidates = found  # number-level candidates always carry entries
            if len(candidates) == 1:
                return self._accept(service, addr, step, candidates[0], notes)
            return ReconciliationOutcome(
                service, "pending-review", step, tuple(candidates),
                address=addr, geocoded=self._last_geocode, notes=tuple(notes),
            )

        found = self._pass(addr, with_numbers=False, notes=notes)
        if found is not None:
            step, candidates = found
            if len(candidates) == 1:
                return self._accept(service, addr, step, candidates[0], notes)
            if len(candidates) >= 2:
                return ReconciliationOutcome(
                    service, "pending-review", step, tuple(candidates),
                    address=addr, geocoded=self._last_geocode, notes=tuple(notes),
                )
        return ReconciliationOutcome(
            service, "unresolved", None, address=addr,
            geocoded=self._last_geocode, notes=tuple(notes),
        )

    def _accept(
        self,
        service: Iri,
        addr: NormalizedAddress,
        step: int,
        candidate: CandidateMatch,
        notes: list[str],
    ) -> ReconciliationOutcome:
        graph = self.config.output_graph
        if candidate.entry_iri is not None:
            level = "street-number"
            quads = (Quad(service, city("hasAccess"), candidate.entry_iri, graph),)
        else:
            level = "street"
            quads = (Quad(service, city("isIn"), candidate.road_iri, graph),)
        return ReconciliationOutcome(
            service, level, step, (candidate,), quads,
            address=addr, geocoded=self._last_geocode, notes=tuple(notes),
        )

    def services(self) -> list[Iri]:
        subjects = {
            q.subject
            for q in self.store.match(None, RDF_TYPE, city("Service"))
            if isinstance(q.subject, Iri)
        }
        return sorted(subjects)

    def reconcile_all(self) -> dict[Iri, ReconciliationOutcome]:
        """Deterministic full run; processing order cannot matter because each
        service only reads the shared snapshot."""
        return {service: self.reconcile(service) for service in self.services()}


def entry_coordinates(store: QuadStore, entry: Iri) -> tuple[float, float] | None:
    lat = lon = None
    for quad in store.match(entry, GEO_LAT):
        if isinstance(quad.object, Literal):
            lat = float(quad.object.lexical)
    for quad in store.match(entry, GEO_LONG):
        if isinstance(quad.object, Literal):
            lon = float(quad.object.lexical)
    if lat is None or lon is None:
        return None
    return (lat, lon)
