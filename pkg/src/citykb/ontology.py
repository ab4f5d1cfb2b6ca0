"""The smart-city ontology catalog: classes, properties, and restrictions.

The catalog is a plain data structure. It drives three consumers: the
inference engine (subclass closure, inverse links, restriction-based
classification), the constraint checker (per-class cardinality), and the
mapping compiler (domain/range validation).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal as TypingLiteral

from .terms import (
    GraphId,
    Iri,
    Literal,
    Quad,
    XSD_DATETIME,
    XSD_DECIMAL,
    XSD_INTEGER,
    XSD_STRING,
)
from . import vocab
from .vocab import city, otn

PropertyKind = TypingLiteral["object-property", "data-property"]
RestrictionMode = TypingLiteral["has-some-value", "has-value-in-set"]


@dataclass(frozen=True)
class RestrictionRule:
    on_property: Iri
    mode: RestrictionMode
    value_set: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.mode == "has-value-in-set" and not self.value_set:
            raise ValueError("has-value-in-set requires a non-empty value set")


@dataclass(frozen=True)
class ClassDef:
    iri: Iri
    superclasses: tuple[Iri, ...] = ()
    defined_by: RestrictionRule | None = None
    label: str = ""


@dataclass(frozen=True)
class PropertyDef:
    iri: Iri
    kind: PropertyKind
    domain: tuple[Iri, ...] = ()
    range: Iri | None = None
    inverse_of: Iri | None = None
    min_card: int | None = None
    max_card: int | None = None

    def __post_init__(self) -> None:
        if self.inverse_of is not None and self.kind != "object-property":
            raise ValueError(f"{self.iri}: only object properties can have inverses")
        if (
            self.min_card is not None
            and self.max_card is not None
            and self.min_card > self.max_card
        ):
            raise ValueError(f"{self.iri}: min cardinality exceeds max")


@dataclass(frozen=True)
class CardinalityRule:
    """Cardinality of `property` on instances of `class_iri` (closed-world)."""

    class_iri: Iri
    property_iri: Iri
    min_card: int | None = None
    max_card: int | None = None


@dataclass
class SchemaCatalog:
    classes: dict[Iri, ClassDef] = field(default_factory=dict)
    properties: dict[Iri, PropertyDef] = field(default_factory=dict)
    cardinalities: list[CardinalityRule] = field(default_factory=list)
    namespaces: dict[str, str] = field(default_factory=lambda: dict(vocab.PREFIXES))

    # -- lookups ------------------------------------------------------------

    def superclass_closure(self, class_iri: Iri) -> set[Iri]:
        """All ancestors of `class_iri`, excluding itself."""
        seen: set[Iri] = set()
        frontier = [class_iri]
        while frontier:
            current = frontier.pop()
            cdef = self.classes.get(current)
            if cdef is None:
                continue
            for sup in cdef.superclasses:
                if sup not in seen:
                    seen.add(sup)
                    frontier.append(sup)
        return seen

    def is_subclass_of(self, class_iri: Iri, ancestor: Iri) -> bool:
        return class_iri == ancestor or ancestor in self.superclass_closure(class_iri)

    def restriction_classes(self) -> list[ClassDef]:
        return [c for c in self.classes.values() if c.defined_by is not None]

    def inverse_of(self, prop: Iri) -> Iri | None:
        pdef = self.properties.get(prop)
        return pdef.inverse_of if pdef else None

    def resolve(self, name: str) -> Iri:
        return vocab.expand(name, self.namespaces)

    def validate(self) -> list[str]:
        """Internal consistency problems, empty when the catalog is sound."""
        problems: list[str] = []
        for cdef in self.classes.values():
            for sup in cdef.superclasses:
                if sup not in self.classes:
                    problems.append(f"{cdef.iri}: unknown superclass {sup}")
            if cdef.defined_by and cdef.defined_by.on_property not in self.properties:
                problems.append(
                    f"{cdef.iri}: restriction on unknown property "
                    f"{cdef.defined_by.on_property}"
                )
            if cdef.iri in self.superclass_closure(cdef.iri):
                problems.append(f"{cdef.iri}: superclass cycle")
        for pdef in self.properties.values():
            for d in pdef.domain:
                if d not in self.classes:
                    problems.append(f"{pdef.iri}: unknown domain {d}")
            if pdef.kind == "object-property" and pdef.range is not None:
                if pdef.range not in self.classes:
                    problems.append(f"{pdef.iri}: unknown range {pdef.range}")
            if pdef.inverse_of is not None:
                other = self.properties.get(pdef.inverse_of)
                if other is None:
                    problems.append(f"{pdef.iri}: unknown inverse {pdef.inverse_of}")
                elif other.inverse_of != pdef.iri:
                    problems.append(
                        f"{pdef.iri}: inverse relation with {other.iri} is not symmetric"
                    )
        for rule in self.cardinalities:
            if rule.class_iri not in self.classes:
                problems.append(f"cardinality rule on unknown class {rule.class_iri}")
            if rule.property_iri not in self.properties:
                problems.append(
                    f"cardinality rule on unknown property {rule.property_iri}"
                )
        return problems

    # -- export -------------------------------------------------------------

    def to_quads(self, graph: GraphId = GraphId("ontology", 1)) -> list[Quad]:
        """Statement-file form of the catalog, for external consumption."""
        quads: list[Quad] = []

        def add(s: Iri, p: Iri, o) -> None:
            quads.append(Quad(s, p, o, graph))

        for cdef in sorted(self.classes.values(), key=lambda c: c.iri):
            add(cdef.iri, vocab.RDF_TYPE, vocab.OWL_CLASS)
            for sup in cdef.superclasses:
                add(cdef.iri, vocab.RDFS_SUBCLASS_OF, sup)
            if cdef.defined_by:
                add(cdef.iri, city("definedByProperty"), cdef.defined_by.on_property)
                for value in sorted(cdef.defined_by.value_set):
                    add(cdef.iri, city("definedByValue"), Literal(value))
        for pdef in sorted(self.properties.values(), key=lambda p: p.iri):
            kind = (
                vocab.OWL_OBJECT_PROPERTY
                if pdef.kind == "object-property"
                else vocab.OWL_DATATYPE_PROPERTY
            )
            add(pdef.iri, vocab.RDF_TYPE, kind)
            for d in pdef.domain:
                add(pdef.iri, vocab.RDFS_DOMAIN, d)
            if pdef.range is not None:
                add(pdef.iri, vocab.RDFS_RANGE, pdef.range)
            if pdef.inverse_of is not None:
                add(pdef.iri, vocab.OWL_INVERSE_OF, pdef.inverse_of)
        for rule in self.cardinalities:
            if rule.min_card is not None:
                add(
                    rule.class_iri,
                    city("minCardinalityOn"),
                    Literal(f"{rule.property_iri} {rule.min_card}"),
                )
            if rule.max_card is not None:
                add(
                    rule.class_iri,
                    city("maxCardinalityOn"),
                    Literal(f"{rule.property_iri} {rule.max_card}"),
                )
        return quads


# ---------------------------------------------------------------------------
# Built-in catalog
# ---------------------------------------------------------------------------

# Service category values per top-level category. The lodging list is the
# authoritative one; the others follow the same regional-category slug style.
SERVICE_CATEGORY_VALUES: dict[str, tuple[str, ...]] = {
    "Accommodation": (
        "villaggio_vacanze",
        "albergo_hotel",
        "casa_per_vacanze",
        "casa_di_riposo",
        "casa_per_ferie",
        "bed_and_breakfast",
        "hostel",
        "residenza_turistica_alberghiera",
        "residence_di_villeggiatura",
        "farmhouse",
        "centri_accoglienza_e_case_alloggio",
        "camping",
        "residenze_epoca",
        "rifugio_alpino",
    ),
    "GovernmentOffice": (
        "comune",
        "prefettura",
        "ufficio_postale",
        "questura",
        "agenzia_entrate",
        "tribunale",
        "motorizzazione_civile",
    ),
    "TourismService": (
        "ufficio_turistico",
        "agenzia_viaggi",
        "guida_turistica",
        "pro_loco",
    ),
    "TransferService": (
        "parcheggio",
        "autonoleggio",
        "taxi",
        "stazione_di_servizio",
        "noleggio_bici",
        "porto",
        "aeroporto",
    ),
    "CulturalActivity": (
        "museo",
        "biblioteca",
        "teatro",
        "cinema",
        "galleria_arte",
        "monumento",
        "archivio_storico",
    ),
    "FinancialService": ("banca", "bancomat", "assicurazione", "ufficio_cambio"),
    "Shopping": (
        "abbigliamento",
        "supermercato",
        "libreria",
        "ferramenta",
        "gioielleria",
        "mercato",
        "centro_commerciale",
    ),
    "Healthcare": (
        "ospedale",
        "farmacia",
        "ambulatorio",
        "pronto_soccorso",
        "clinica_veterinaria",
        "laboratorio_analisi",
    ),
    "Education": (
        "scuola_primaria",
        "scuola_secondaria",
        "universita",
        "asilo_nido",
        "scuola_infanzia",
    ),
    "Entertainment": (
        "discoteca",
        "parco_divertimenti",
        "sala_giochi",
        "stadio",
        "piscina",
        "palestra",
    ),
    "Emergency": (
        "vigili_del_fuoco",
        "carabinieri",
        "polizia",
        "guardia_medica",
        "protezione_civile",
    ),
    "WineAndFood": (
        "ristorante",
        "trattoria",
        "pizzeria",
        "bar",
        "enoteca",
        "gelateria",
        "pasticceria",
        "osteria",
    ),
}

SERVICE_CATEGORY_CLASSES = tuple(SERVICE_CATEGORY_VALUES)

# Temporal link kinds: kind -> (resource->instant property, instant->resource property).
TEMPORAL_PAIRS: dict[str, tuple[Iri, Iri]] = {
    "parking": (city("observationTime"), city("instantParking")),
    "wreport": (city("updateTime"), city("instantWReport")),
    "observation": (city("measuredTime"), city("instantObserv")),
    "forecast": (city("hasExpectedTime"), city("instantForecast")),
    "avm": (city("hasLastStopTime"), city("instantAVM")),
}

TEMPORAL_RESOURCE_CLASS: dict[str, str] = {
    "parking": "SituationRecord",
    "wreport": "WeatherReport",
    "observation": "Observation",
    "forecast": "BusStopForecast",
    "avm": "AVMRecord",
}


def _classes() -> list[ClassDef]:
    c = city
    defs: list[ClassDef] = [
        # External anchor terms (only the ones actually referenced).
        ClassDef(vocab.FOAF_ORGANIZATION),
        ClassDef(vocab.GEO_SPATIAL_THING),
        ClassDef(vocab.TIME_INSTANT, label="Instant"),
        ClassDef(otn("Road_Element")),
        ClassDef(otn("Node")),
        ClassDef(otn("Road")),
        ClassDef(otn("Line")),
        ClassDef(otn("StopPoint")),
        # Administration.
        ClassDef(c("PA"), (vocab.FOAF_ORGANIZATION,)),
        ClassDef(
            c("Region"),
            (c("PA"),),
            defined_by=RestrictionRule(c("hasProvince"), "has-some-value"),
        ),
        ClassDef(c("Province"), (c("PA"),)),
        ClassDef(c("Municipality"), (c("PA"),)),
        ClassDef(c("Resolution")),
        ClassDef(c("StatisticalData")),
        # Street guide.
        ClassDef(c("Road"), (otn("Road"),)),
        ClassDef(c("AdministrativeRoad")),
        ClassDef(c("RoadElement"), (otn("Road_Element"),)),
        ClassDef(c("Node"), (otn("Node"), vocab.GEO_SPATIAL_THING)),
        ClassDef(c("Junction"), (vocab.GEO_SPATIAL_THING,)),
        ClassDef(c("RoadLink")),
        ClassDef(c("Milestone"), (vocab.GEO_SPATIAL_THING,)),
        ClassDef(c("StreetNumber")),
        ClassDef(c("Entry"), (vocab.GEO_SPATIAL_THING,)),
        ClassDef(c("EntryRule")),
        ClassDef(c("Manoeuvre")),
        # Points of interest.
        ClassDef(c("Service")),
        # Local public transport.
        ClassDef(c("TPLLine"), (otn("Line"),)),
        ClassDef(c("Lot")),
        ClassDef(c("Ride")),
        ClassDef(c("Route")),
        ClassDef(c("RouteSection")),
        ClassDef(c("BusStop"), (otn("StopPoint"), vocab.GEO_SPATIAL_THING)),
        ClassDef(c("RouteLink")),
        ClassDef(c("TPLJunction"), (vocab.GEO_SPATIAL_THING,)),
        ClassDef(c("RailwayElement")),
        ClassDef(c("RailwayDirection")),
        ClassDef(c("RailwaySection")),
        ClassDef(c("RailwayLine")),
        ClassDef(c("RailwayJunction"), (otn("Node"),)),
        ClassDef(c("TrainStation")),
        ClassDef(c("GoodsYard")),
        # Sensors.
        ClassDef(c("CarParkSensor")),
        ClassDef(c("SituationRecord")),
        ClassDef(c("WeatherReport")),
        ClassDef(c("WeatherPrediction")),
        ClassDef(c("SensorSiteTable")),
        ClassDef(c("SensorSite")),
        ClassDef(c("Observation")),
        ClassDef(c("TrafficConcentration"), (c("Observation"),)),
        ClassDef(c("TrafficHeadway"), (c("Observation"),)),
        ClassDef(c("TrafficSpeed"), (c("Observation"),)),
        ClassDef(c("TrafficFlow"), (c("Observation"),)),
        ClassDef(c("AVMRecord")),
        ClassDef(c("BusStopForecast")),
    ]
    for name, values in SERVICE_CATEGORY_VALUES.items():
        defs.append(
            ClassDef(
                c(name),
                (c("Service"),),
                defined_by=RestrictionRule(
                    c("serviceCategory"), "has-value-in-set", frozenset(values)
                ),
            )
        )
    return defs


def _properties() -> list[PropertyDef]:
    c = city
    obj = "object-property"
    data = "data-property"

    def inverse_pair(
        a: str, b: str, dom_a: tuple[Iri, ...], rng_a: Iri, **kw
    ) -> list[PropertyDef]:
        return [
            PropertyDef(c(a), obj, dom_a, rng_a, inverse_of=c(b), **kw),
            PropertyDef(c(b), obj, (rng_a,), dom_a[0], inverse_of=c(a)),
        ]

    props: list[PropertyDef] = [
        # Administration.
        PropertyDef(c("hasProvince"), obj, (c("PA"),), c("Province")),
        *inverse_pair("hasApproved", "approvedBy", (c("PA"),), c("Resolution")),
        PropertyDef(c("hasStatistic"), obj, (c("PA"), c("Road")), c("StatisticalData")),
        # Street guide topology.
        PropertyDef(c("contains"), obj, (c("Road"),), c("RoadElement"), min_card=1),
        PropertyDef(c("starts"), obj, (c("RoadElement"),), c("Node"), min_card=1, max_card=1),
        PropertyDef(c("ends"), obj, (c("RoadElement"),), c("Node"), min_card=1, max_card=1),
        *inverse_pair("isComposed", "forming", (c("AdministrativeRoad"),), c("RoadElement")),
        PropertyDef(c("coincideWith"), obj, (c("AdministrativeRoad"),), c("Road")),
        *inverse_pair("hasRule", "accessTo", (c("RoadElement"),), c("EntryRule")),
        PropertyDef(c("isDescribed"), obj, (c("EntryRule"),), c("Manoeuvre")),
        PropertyDef(c("hasFirstElem"), obj, (c("Manoeuvre"),), c("RoadElement")),
        PropertyDef(c("hasSecondElem"), obj, (c("Manoeuvre"),), c("RoadElement")),
        PropertyDef(c("hasThirdElem"), obj, (c("Manoeuvre"),), c("RoadElement")),
        PropertyDef(c("concerning"), obj, (c("Manoeuvre"),), c("Node")),
        PropertyDef(
            c("placedIn"), obj, (c("Milestone"),), c("AdministrativeRoad"),
            min_card=1, max_card=1,
        ),
        PropertyDef(c("standsIn"), obj, (c("StreetNumber"),), c("RoadElement")),
        PropertyDef(c("belongsTo"), obj, (c("StreetNumber"),), c("Road")),
        PropertyDef(c("hasInternalAccess"), obj, (c("StreetNumber"),), c("Entry")),
        PropertyDef(c("hasExternalAccess"), obj, (c("StreetNumber"),), c("Entry")),
        PropertyDef(c("starting"), obj, (c("RoadLink"),), c("Junction"), min_card=1, max_card=1),
        PropertyDef(c("ending"), obj, (c("RoadLink"),), c("Junction"), min_card=1, max_card=1),
        PropertyDef(c("ownerAuthority"), obj, (c("AdministrativeRoad"),), c("PA")),
        PropertyDef(c("managingAuthority"), obj, (c("RoadElement"),), c("PA")),
        PropertyDef(c("inMunicipalityOf"), obj, (c("Road"),), c("Municipality")),
        # Points of interest.
        PropertyDef(c("hasAccess"), obj, (c("Service"),), c("Entry"), max_card=1),
        PropertyDef(c("isIn"), obj, (c("Service"),), c("Road")),
        # Local public transport.
        PropertyDef(c("isPartOfLot"), obj, (c("TPLLine"), c("BusStop")), c("Lot")),
        PropertyDef(c("scheduledOn"), obj, (c("Ride"),), c("TPLLine"), min_card=1, max_card=1),
        PropertyDef(c("hasFirstSection"), obj, (c("Route"),), c("RouteSection")),
        PropertyDef(c("hasSection"), obj, (c("Route"),), c("RouteSection")),
        PropertyDef(c("hasFirstStop"), obj, (c("Route"),), c("BusStop")),
        PropertyDef(c("startsAt"), obj, (c("RouteSection"),), c("BusStop")),
        PropertyDef(c("endsAt"), obj, (c("RouteSection"),), c("BusStop")),
        PropertyDef(c("beginsAt"), obj, (c("RouteLink"),), c("TPLJunction")),
        PropertyDef(c("finishesAt"), obj, (c("RouteLink"),), c("TPLJunction")),
        PropertyDef(c("isMadeUp"), obj, (c("Route"),), c("RouteLink")),
        *inverse_pair(
            "isComposedBy", "composing",
            (c("RailwayDirection"), c("RailwaySection")), c("RailwayElement"),
        ),
        *inverse_pair("isPartOfLine", "hasElement", (c("RailwayElement"),), c("RailwayLine")),
        PropertyDef(c("startAt"), obj, (c("RailwayElement"),), c("RailwayJunction")),
        PropertyDef(c("endAt"), obj, (c("RailwayElement"),), c("RailwayJunction")),
        PropertyDef(
            c("correspondTo"), obj, (c("TrainStation"), c("GoodsYard")), c("RailwayJunction")
        ),
        # Sensors.
        *inverse_pair("hasRecord", "relatedTo", (c("CarParkSensor"),), c("SituationRecord")),
        *inverse_pair("observe", "isObservedBy", (c("CarParkSensor"),), c("TransferService")),
        PropertyDef(c("isComposedOf"), obj, (c("WeatherReport"),), c("WeatherPrediction")),
        *inverse_pair("refersTo", "has", (c("WeatherReport"),), c("Municipality")),
        PropertyDef(c("forms"), obj, (c("SensorSite"),), c("SensorSiteTable")),
        PropertyDef(c("installedOn"), obj, (c("SensorSite"),), c("Road")),
        *inverse_pair("hasProduced", "measuredBy", (c("SensorSite"),), c("Observation")),
        PropertyDef(c("lastStop"), obj, (c("AVMRecord"),), c("BusStop")),
        PropertyDef(c("atThe"), obj, (c("BusStopForecast"),), c("BusStop")),
        PropertyDef(c("concern"), obj, (c("AVMRecord"),), c("TPLLine")),
        # Data properties: identity, naming, addresses.
        PropertyDef(c("name"), data, (), XSD_STRING),
        PropertyDef(c("officialName"), data, (c("Road"),), XSD_STRING),
        PropertyDef(c("alternativeName"), data, (c("Road"),), XSD_STRING),
        PropertyDef(c("serviceCategory"), data, (c("Service"),), XSD_STRING),
        PropertyDef(c("ATECOcode"), data, (c("Service"),), XSD_STRING),
        PropertyDef(Iri(vocab.VCARD_STREET_ADDRESS), data, (c("Service"),), XSD_STRING),
        PropertyDef(Iri(vocab.VCARD_LOCALITY), data, (c("Service"),), XSD_STRING),
        PropertyDef(c("streetNumberText"), data, (c("Service"),), XSD_STRING),
        PropertyDef(c("civicNumber"), data, (c("StreetNumber"),), XSD_INTEGER),
        PropertyDef(c("exponent"), data, (c("StreetNumber"),), XSD_STRING),
        PropertyDef(c("classCode"), data, (c("StreetNumber"),), XSD_STRING),
        PropertyDef(c("istatCode"), data, (c("Municipality"),), XSD_STRING),
        # Coordinates (per-class cardinalities live in the rules table).
        PropertyDef(Iri(vocab.GEO_LAT), data, (vocab.GEO_SPATIAL_THING,), XSD_DECIMAL),
        PropertyDef(Iri(vocab.GEO_LONG), data, (vocab.GEO_SPATIAL_THING,), XSD_DECIMAL),
        # Weather payload.
        PropertyDef(c("reportedLocality"), data, (c("WeatherReport"),), XSD_STRING),
        PropertyDef(c("predictionDay"), data, (c("WeatherPrediction"),), XSD_STRING),
        PropertyDef(c("predictionRange"), data, (c("WeatherPrediction"),), XSD_STRING),
        PropertyDef(c("description"), data, (c("WeatherPrediction"),), XSD_STRING),
        PropertyDef(c("temperatureMin"), data, (c("WeatherPrediction"),), XSD_DECIMAL),
        PropertyDef(c("temperatureMax"), data, (c("WeatherPrediction"),), XSD_DECIMAL),
        PropertyDef(c("precipitationProbability"), data, (c("WeatherPrediction"),), XSD_DECIMAL),
        PropertyDef(c("windSpeed"), data, (c("WeatherPrediction"),), XSD_DECIMAL),
        # Parking / AVM payload.
        PropertyDef(c("freePlaces"), data, (c("SituationRecord"),), XSD_INTEGER),
        PropertyDef(c("occupiedPlaces"), data, (c("SituationRecord"),), XSD_INTEGER),
        PropertyDef(c("vehicleId"), data, (c("AVMRecord"),), XSD_STRING),
        PropertyDef(c("observedValue"), data, (c("Observation"),), XSD_DECIMAL),
        # Temporal.
        PropertyDef(Iri(vocab.TIME_IN_XSD_DATETIME), data, (vocab.TIME_INSTANT,), XSD_DATETIME),
    ]
    for kind, (forward, backward) in TEMPORAL_PAIRS.items():
        resource_class = c(TEMPORAL_RESOURCE_CLASS[kind])
        props.append(
            PropertyDef(
                forward, obj, (resource_class,), vocab.TIME_INSTANT, inverse_of=backward
            )
        )
        props.append(
            PropertyDef(
                backward, obj, (vocab.TIME_INSTANT,), resource_class, inverse_of=forward
            )
        )
    return props


def _cardinalities(properties: Iterable[PropertyDef]) -> list[CardinalityRule]:
    rules: list[CardinalityRule] = []
    # Property-level min/max apply to every declared domain class.
    for pdef in properties:
        if pdef.min_card is None and pdef.max_card is None:
            continue
        for dom in pdef.domain:
            rules.append(CardinalityRule(dom, pdef.iri, pdef.min_card, pdef.max_card))
    # Coordinate mandates differ per class; mandatory on graph nodes, at most
    # one pair on entries and milestones.
    c = city
    lat, long_ = Iri(vocab.GEO_LAT), Iri(vocab.GEO_LONG)
    for cls in (c("Node"), c("Junction"), c("BusStop")):
        rules.append(CardinalityRule(cls, lat, 1, 1))
        rules.append(CardinalityRule(cls, long_, 1, 1))
    for cls in (c("Entry"), c("Milestone")):
        rules.append(CardinalityRule(cls, lat, None, 1))
        rules.append(CardinalityRule(cls, long_, None, 1))
    return rules


_BUILTIN: SchemaCatalog | None = None


def builtin_catalog() -> SchemaCatalog:
    """The fixed smart-city catalog. Built once; treat as immutable."""
    global _BUILTIN
    if _BUILTIN is None:
        classes = {cd.iri: cd for cd in _classes()}
        properties = {pd.iri: pd for pd in _properties()}
        catalog = SchemaCatalog(
            classes=classes,
            properties=properties,
            cardinalities=_cardinalities(properties.values()),
        )
        problems = catalog.validate()
        if problems:
            raise AssertionError("built-in catalog is inconsistent: " + "; ".join(problems))
        _BUILTIN = catalog
    return _BUILTIN
