"""Synthetic street guides and service rosters with planted ground truth.

The generator builds a constraint-clean street guide, then derives service
address records from it, corrupting each address according to its assigned
corruption class. Because every service records which road/entry it really
belongs to, pipeline precision and per-class recall are measurable exactly.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field

from .addresses import MunicipalityAliases
from .ingestion import RawRecord
from .mapping import compile_mapping, parse_model_text
from .ontology import SERVICE_CATEGORY_VALUES, builtin_catalog
from .reconcile import ReconciliationOutcome
from .store import QuadStore
from .terms import GraphId, Iri, Literal, Quad, XSD_DECIMAL, XSD_INTEGER
from .validation import IstatTable
from .vocab import GEO_LAT, GEO_LONG, RDF_TYPE, RESOURCE_NS, city

STREET_GUIDE_GRAPH = GraphId("street_guide", 1)
SERVICES_DATASET = "services"

CORRUPTION_CLASSES = (
    "clean",
    "qualifier-variant",
    "word-swap",
    "strange-chars",
    "municipality-alias",
    "typo",
    "missing-number",
    "snc",
    "red-number",
    "roman-numeral",
)

# Expected automated behaviour per class, used by score readers; ambiguous
# word-swap plants and off-guide services carry their own expectations.
EXPECTED_LEVEL = {
    "clean": ("street-number", 1),
    "qualifier-variant": ("street-number", 2),
    "word-swap": ("street-number", 3),
    "strange-chars": ("street-number", 5),
    "municipality-alias": ("street-number", 6),
    "typo": ("unresolved", None),
    "missing-number": ("street", 1),
    "snc": ("street", 1),
    "red-number": ("street-number", 1),
    "roman-numeral": ("street-number", 1),
    "off-guide": ("unresolved", None),
}

_SYLLABLES = (
    "BA", "CO", "DI", "FE", "GA", "LI", "MO", "NE", "PA", "RO",
    "SA", "TU", "VE", "ZI", "LA", "MI", "TO", "RE", "CA", "SO",
)
_QUALIFIERS = ("VIA", "PIAZZA", "VIALE", "CORSO", "BORGO", "VICOLO", "LARGO")
_QUALIFIER_VARIANTS = {
    "VIA": "V.",
    "PIAZZA": "P.ZZA",
    "VIALE": "V.LE",
    "CORSO": "C.SO",
    "BORGO": "B.GO",
    "VICOLO": "V.LO",
    "LARGO": "L.GO",
}
_ROMAN = ("II", "III", "IV", "IX", "XI", "XXIII")
_MUNI_ALIAS_SUFFIXES = ("DEL MUGELLO", "IN CHIANTI", "DI SOTTO", "DI SOPRA", "SUL COLLE")
_NUMBER_GARBLE = ("({n})", "{n}?", "{n}°", "{n}.", "ANG. {n}", "{n}//")


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 0
    municipalities: int = 3
    roads_per_municipality: int = 40
    entries_per_road: tuple[int, int] = (2, 5)
    services: int = 300
    corruption_mix: dict[str, float] = field(
        default_factory=lambda: {name: 1.0 / len(CORRUPTION_CLASSES) for name in CORRUPTION_CLASSES}
    )
    # Fraction of the word-swap class planted with a deliberate last-word
    # collision (two candidate roads): these must end in human review.
    ambiguous_share: float = 0.1
    # Services whose street exists nowhere in the guide (but with coordinates).
    off_guide_services: int = 0

    def __post_init__(self) -> None:
        total = sum(self.corruption_mix.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"corruption mix fractions sum to {total}, expected 1")
        for name in self.corruption_mix:
            if name not in CORRUPTION_CLASSES:
                raise ValueError(f"unknown corruption class {name!r}")

    @classmethod
    def from_json(cls, payload: dict) -> "CorpusSpec":
        if "entries_per_road" in payload:
            payload = dict(payload, entries_per_road=tuple(payload["entries_per_road"]))
        return cls(**payload)


@dataclass(frozen=True)
class TruthEntry:
    expected_level: str  # street-number | street | pending-review | unresolved
    road_iri: str | None
    entry_iri: str | None
    corruption: str


GroundTruth = dict[str, TruthEntry]  # service IRI -> planted truth


@dataclass
class Corpus:
    spec: CorpusSpec
    street_guide_quads: list[Quad]
    service_records: list[RawRecord]
    ground_truth: GroundTruth
    municipality_aliases: MunicipalityAliases
    istat_table: IstatTable
    municipality_names: list[str]


SERVICE_MAPPING_TEXT = """\
dataset services

entity svc
  class Service
  uri {base}/Service/{service_id}
  prop name from name
  prop serviceCategory from category
  prop vcard:street-address from street
  prop streetNumberText from number
  prop vcard:locality from municipality
  prop geo:lat from lat as decimal
  prop geo:long from lon as decimal
"""


def service_mapping_model():
    return parse_model_text(SERVICE_MAPPING_TEXT, "services.map")


# -- internal generation helpers ------------------------------------------------


class _Names:
    """Seeded word factory; unique words are what keeps matching collision-free."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.used: set[str] = set()

    def word(self, syllables: int = 3) -> str:
        for attempt in range(10_000):
            n = syllables + attempt // 1_000  # widen when a pool runs dry
            candidate = "".join(self.rng.choice(_SYLLABLES) for _ in range(n))
            if candidate not in self.used:
                self.used.add(candidate)
                return candidate
        raise RuntimeError("name pool exhausted")

    def label(self, syllables: int = 2) -> str:
        """Non-unique cosmetic name (business labels and the like)."""
        return "".join(self.rng.choice(_SYLLABLES) for _ in range(syllables))


@dataclass
class _RoadPlan:
    iri: Iri
    municipality_index: int
    qualifier: str
    words: tuple[str, ...]
    official: str
    numbers: dict[tuple[int, str, str], tuple[Iri, Iri, float, float]] = field(
        default_factory=dict
    )  # key -> (street number, entry, lat, lon)


def _res(local: str) -> Iri:
    return Iri(RESOURCE_NS + local)


def generate_corpus(spec: CorpusSpec) -> Corpus:
    rng = random.Random(spec.seed)
    names = _Names(rng)
    quads: list[Quad] = []
    g = STREET_GUIDE_GRAPH

    def add(s, p, o):
        quads.append(Quad(s, p, o, g))

    # Administrative skeleton: one regional authority holding the provinces.
    region = _res("PA/region")
    add(region, RDF_TYPE, city("PA"))
    add(region, city("name"), Literal("REGIONE " + names.word(3)))

    munis: list[tuple[Iri, str, float, float]] = []
    alias_pairs: list[tuple[str, str]] = []
    istat_rows: list[tuple[str, str]] = []
    for mi in range(spec.municipalities):
        muni = _res(f"Municipality/m{mi}")
        name = names.word(3)
        lat = 43.2 + rng.random() * 0.9
        lon = 10.7 + rng.random() * 0.9
        code = f"{48000 + mi:06d}"
        province = _res(f"Province/p{mi // 3}")
        if mi % 3 == 0:
            add(province, RDF_TYPE, city("Province"))
            add(province, city("name"), Literal("PROVINCIA " + names.word(2)))
            add(region, city("hasProvince"), province)
        add(muni, RDF_TYPE, city("Municipality"))
        add(muni, city("name"), Literal(name))
        add(muni, city("istatCode"), Literal(code))
        alias = f"{name} {rng.choice(_MUNI_ALIAS_SUFFIXES)}"
        alias_pairs.append((name, alias))
        istat_rows.append((name, code))
        istat_rows.append((alias, code))
        munis.append((muni, name, lat, lon))

    # Street guide: roads, elements, nodes, numbers, entries.
    roads: list[_RoadPlan] = []
    muni_words: list[set[str]] = [set() for _ in range(spec.municipalities)]
    entry_counter = 0

    def plant_road(mi: int, word_list: list[str], qualifier: str | None = None) -> _RoadPlan:
        nonlocal entry_counter
        muni, _, base_lat, base_lon = munis[mi]
        index = len(roads)
        road = _res(f"Road/r{index}")
        qual = qualifier or rng.choice(_QUALIFIERS)
        official = " ".join([qual, *word_list])
        plan = _RoadPlan(road, mi, qual, tuple(word_list), official)
        add(road, RDF_TYPE, city("Road"))
        add(road, city("officialName"), Literal(official))
        add(road, city("inMunicipalityOf"), muni)
        element = _res(f"RoadElement/re{index}")
        add(element, RDF_TYPE, city("RoadElement"))
        add(road, city("contains"), element)
        for which in ("a", "b"):
            node = _res(f"Node/n{index}{which}")
            add(element, city("starts" if which == "a" else "ends"), node)
            add(node, RDF_TYPE, city("Node"))
            add(node, GEO_LAT, Literal(f"{base_lat + rng.uniform(-0.01, 0.01):.7f}", XSD_DECIMAL))
            add(node, GEO_LONG, Literal(f"{base_lon + rng.uniform(-0.01, 0.01):.7f}", XSD_DECIMAL))
        low, high = spec.entries_per_road
        civics = rng.sample(range(1, 200), rng.randint(low, high))
        for civic in civics:
            plant_number(plan, civic, "", "B", base_lat, base_lon)
        roads.append(plan)
        muni_words[mi].update(word_list)
        return plan

    def plant_number(plan: _RoadPlan, civic: int, exponent: str, color: str, base_lat, base_lon):
        nonlocal entry_counter
        key = (civic, exponent, color)
        if key in plan.numbers:
            return plan.numbers[key]
        entry_counter += 1
        sn = _res(f"StreetNumber/sn{entry_counter}")
        entry = _res(f"Entry/e{entry_counter}")
        lat = round(base_lat + rng.uniform(-0.01, 0.01), 7)
        lon = round(base_lon + rng.uniform(-0.01, 0.01), 7)
        add(sn, RDF_TYPE, city("StreetNumber"))
        add(sn, city("belongsTo"), plan.iri)
        add(sn, city("civicNumber"), Literal(str(civic), XSD_INTEGER))
        if exponent:
            add(sn, city("exponent"), Literal(exponent))
        if color != "B":
            add(sn, city("classCode"), Literal(color))
        add(sn, city("hasExternalAccess"), entry)
        add(entry, RDF_TYPE, city("Entry"))
        add(entry, GEO_LAT, Literal(f"{lat:.7f}", XSD_DECIMAL))
        add(entry, GEO_LONG, Literal(f"{lon:.7f}", XSD_DECIMAL))
        plan.numbers[key] = (sn, entry, lat, lon)
        return plan.numbers[key]

    for mi in range(spec.municipalities):
        for _ in range(spec.roads_per_municipality):
            plant_road(mi, [names.word(3), names.word(3)])

    # Service roster.
    assignments: list[str] = []
    for cls in CORRUPTION_CLASSES:
        share = spec.corruption_mix.get(cls, 0.0)
        assignments.extend([cls] * round(share * spec.services))
    while len(assignments) < spec.services:
        assignments.append("clean")
    del assignments[spec.services :]
    assignments.sort()  # deterministic; per-service shuffle comes from rng pairing
    rng.shuffle(assignments)

    categories = sorted(v for values in SERVICE_CATEGORY_VALUES.values() for v in values)
    records: list[RawRecord] = []
    truth: GroundTruth = {}
    # Words that name two roads of one municipality (deliberate ambiguity
    # plants). Word-swap matching keys on words, so later word-swap services
    # must stay clear of these.
    contested: list[set[str]] = [set() for _ in range(spec.municipalities)]
    ambiguous_budget = round(
        spec.ambiguous_share * sum(1 for a in assignments if a == "word-swap")
    )

    for si, corruption in enumerate(assignments):
        service_id = f"svc{si:05d}"
        plan = roads[rng.randrange(len(roads))]
        if corruption == "word-swap":
            while set(plan.words) & contested[plan.municipality_index]:
                plan = roads[rng.randrange(len(roads))]
        mi = plan.municipality_index
        muni, muni_name, base_lat, base_lon = munis[mi]
        # default: a plain black civic on the chosen road
        plain_keys = [k for k in plan.numbers if k[1] == "" and k[2] == "B"]
        key = rng.choice(plain_keys)
        sn, entry, lat, lon = plan.numbers[key]
        street_text = plan.official
        number_text = str(key[0])
        muni_text = muni_name
        expected_level, expected_step = EXPECTED_LEVEL[corruption]
        expected_road: str | None = str(plan.iri)
        expected_entry: str | None = str(entry)

        if corruption == "qualifier-variant":
            variant = _QUALIFIER_VARIANTS[plan.qualifier]
            if rng.random() < 0.5:
                # also fold a SANTA word in, written as its shorthand
                saint_road = plant_road(mi, ["SANTA", names.word(3)], qualifier=plan.qualifier)
                key = rng.choice(list(saint_road.numbers))
                sn, entry, lat, lon = saint_road.numbers[key]
                street_text = " ".join([variant, "S.", *saint_road.words[1:]])
                expected_road, expected_entry = str(saint_road.iri), str(entry)
            else:
                street_text = " ".join([variant, *plan.words])
            number_text = str(key[0])
        elif corruption == "word-swap":
            swapped = [plan.qualifier, *reversed(plan.words)]
            street_text = " ".join(swapped)
            if ambiguous_budget > 0:
                ambiguous_budget -= 1
                # second road sharing the swapped address's last word (words[0])
                # and the same civic: two usable candidates, human decides
                rival = plant_road(mi, [plan.words[0], names.word(3)])
                plant_number(rival, key[0], "", "B", base_lat, base_lon)
                contested[mi].update(plan.words)
                contested[mi].update(rival.words)
                expected_level, expected_step = "pending-review", 3
                expected_road, expected_entry = None, None
        elif corruption == "strange-chars":
            if rng.random() < 0.5:
                garble = rng.choice(_NUMBER_GARBLE)
                number_text = garble.format(n=key[0])
            else:
                # garbled exponent notations; "7/D" would be well-formed, so
                # single letters only appear glued ("403D"-style)
                exponent, joiner = rng.choice(
                    (("D", ""), ("A", ""), ("AB", ""), ("AB", "/"), ("INT1", ""), ("INT1", "/"))
                )
                sn, entry, lat, lon = plant_number(
                    plan, key[0], exponent, "B", base_lat, base_lon
                )
                number_text = f"{key[0]}{joiner}{exponent}"
                expected_entry = str(entry)
        elif corruption == "municipality-alias":
            muni_text = alias_pairs[mi][1]
        elif corruption == "typo":
            word = plan.words[-1]
            pos = rng.randrange(len(word))
            alphabet = "ABCDEFGHILMNOPQRSTUVZ"
            repl = rng.choice([c for c in alphabet if c != word[pos]])
            typo_word = word[:pos] + repl + word[pos + 1 :]
            while typo_word in muni_words[mi]:
                pos = rng.randrange(len(word))
                repl = rng.choice([c for c in alphabet if c != word[pos]])
                typo_word = word[:pos] + repl + word[pos + 1 :]
            street_text = " ".join([plan.qualifier, *plan.words[:-1], typo_word])
            expected_road = str(plan.iri)
            expected_entry = None
        elif corruption == "missing-number":
            number_text = ""
            expected_entry = None
        elif corruption == "snc":
            number_text = "SNC" if rng.random() < 0.7 else "0"
            expected_entry = None
        elif corruption == "red-number":
            red_road = plant_road(mi, [names.word(3), names.word(3)])
            civic = rng.randrange(1, 200)
            plant_number(red_road, civic, "", "B", base_lat, base_lon)
            sn, entry, lat, lon = plant_number(red_road, civic, "", "R", base_lat, base_lon)
            street_text = red_road.official
            number_text = f"{civic}/R"
            expected_road, expected_entry = str(red_road.iri), str(entry)
        elif corruption == "roman-numeral":
            roman_road = plant_road(
                mi, [names.word(3), rng.choice(_ROMAN), names.word(3)]
            )
            key = rng.choice(list(roman_road.numbers))
            sn, entry, lat, lon = roman_road.numbers[key]
            street_text = roman_road.official
            number_text = str(key[0])
            expected_road, expected_entry = str(roman_road.iri), str(entry)

        records.append(
            RawRecord(
                SERVICES_DATASET,
                1,
                si,
                {
                    "service_id": service_id,
                    "name": f"{names.label()} {names.label()}",
                    "category": rng.choice(categories),
                    "street": street_text,
                    "number": number_text,
                    "municipality": muni_text,
                    "lat": f"{lat + rng.uniform(-0.0002, 0.0002):.7f}",
                    "lon": f"{lon + rng.uniform(-0.0002, 0.0002):.7f}",
                },
            )
        )
        truth[str(_res(f"Service/{service_id}"))] = TruthEntry(
            expected_level, expected_road, expected_entry, corruption
        )

    # Off-guide services: coordinates but streets missing from the guide.
    for oi in range(spec.off_guide_services):
        si = spec.services + oi
        service_id = f"svc{si:05d}"
        mi = rng.randrange(spec.municipalities)
        muni, muni_name, base_lat, base_lon = munis[mi]
        street = " ".join([rng.choice(_QUALIFIERS), names.word(4), names.word(4)])
        records.append(
            RawRecord(
                SERVICES_DATASET,
                1,
                si,
                {
                    "service_id": service_id,
                    "name": f"{names.label()} {names.label()}",
                    "category": rng.choice(categories),
                    "street": street,
                    "number": str(rng.randrange(1, 100)),
                    "municipality": muni_name,
                    "lat": f"{base_lat + rng.uniform(-0.01, 0.01):.7f}",
                    "lon": f"{base_lon + rng.uniform(-0.01, 0.01):.7f}",
                },
            )
        )
        truth[str(_res(f"Service/{service_id}"))] = TruthEntry(
            "unresolved", None, None, "off-guide"
        )

    return Corpus(
        spec=spec,
        street_guide_quads=quads,
        service_records=records,
        ground_truth=truth,
        municipality_aliases=MunicipalityAliases(alias_pairs),
        istat_table=IstatTable(istat_rows),
        municipality_names=[name for _, name, _, _ in munis],
    )


def build_store(corpus: Corpus, store: QuadStore | None = None) -> QuadStore:
    """Street guide plus mapped services, ready for reconciliation."""
    store = store or QuadStore()
    report = store.insert(corpus.street_guide_quads)
    if report.errors:
        raise AssertionError(f"generated street guide has bad quads: {report.errors[:3]}")
    compiled = compile_mapping(service_mapping_model(), builtin_catalog())
    from .mapping import apply_mapping

    mapped = apply_mapping(compiled, corpus.service_records)
    if mapped.issues:
        raise AssertionError(f"generated services do not map cleanly: {mapped.issues[:3]}")
    store.insert(mapped.quads)
    return store


# -- scoring ---------------------------------------------------------------------


@dataclass
class ClassScore:
    attempted: int = 0
    street_number: int = 0
    street: int = 0
    pending_review: int = 0
    unresolved: int = 0
    wrong_link: int = 0


@dataclass
class ScoreReport:
    per_class: dict[str, ClassScore] = field(default_factory=dict)
    step_accepts: dict[str, int] = field(default_factory=dict)

    def wrong_links(self) -> int:
        return sum(score.wrong_link for score in self.per_class.values())

    def to_json(self) -> dict:
        return {
            "per_class": {k: asdict(v) for k, v in sorted(self.per_class.items())},
            "step_accepts": dict(sorted(self.step_accepts.items())),
            "wrong_links": self.wrong_links(),
        }

    def to_text(self) -> str:
        header = f"{'class':20} {'tried':>6} {'number':>7} {'street':>7} {'review':>7} {'unres':>6} {'wrong':>6}"
        lines = [header, "-" * len(header)]
        for name, s in sorted(self.per_class.items()):
            lines.append(
                f"{name:20} {s.attempted:>6} {s.street_number:>7} {s.street:>7} "
                f"{s.pending_review:>7} {s.unresolved:>6} {s.wrong_link:>6}"
            )
        accepted = ", ".join(f"step {k}: {v}" for k, v in sorted(self.step_accepts.items()))
        lines.append(f"accepted by {accepted or 'no step'}")
        return "\n".join(lines)


def score_pipeline(
    outcomes: dict[Iri, ReconciliationOutcome] | list[ReconciliationOutcome],
    truth: GroundTruth,
) -> ScoreReport:
    if isinstance(outcomes, dict):
        outcome_list = list(outcomes.values())
    else:
        outcome_list = list(outcomes)
    report = ScoreReport()
    for outcome in outcome_list:
        entry = truth.get(str(outcome.service_iri))
        if entry is None:
            continue
        score = report.per_class.setdefault(entry.corruption, ClassScore())
        score.attempted += 1
        if outcome.level == "street-number":
            score.street_number += 1
        elif outcome.level == "street":
            score.street += 1
        elif outcome.level == "pending-review":
            score.pending_review += 1
        else:
            score.unresolved += 1
        if outcome.level in ("street-number", "street"):
            report.step_accepts[str(outcome.step)] = (
                report.step_accepts.get(str(outcome.step), 0) + 1
            )
            accepted = outcome.candidates[0]
            road_ok = entry.road_iri is not None and str(accepted.road_iri) == entry.road_iri
            entry_ok = (
                outcome.level != "street-number"
                or (entry.entry_iri is not None and str(accepted.entry_iri) == entry.entry_iri)
            )
            if not (road_ok and entry_ok):
                score.wrong_link += 1
    return report


def recall_at_step(outcomes, truth: GroundTruth, corruption: str, level: str, step: int | None) -> float:
    """Fraction of a class reconciled at the expected level (and step, if given)."""
    if isinstance(outcomes, dict):
        outcomes = list(outcomes.values())
    total = hits = 0
    for outcome in outcomes:
        entry = truth.get(str(outcome.service_iri))
        if entry is None or entry.corruption != corruption:
            continue
        total += 1
        if outcome.level == level and (step is None or outcome.step == step):
            hits += 1
    return hits / total if total else 0.0


# -- weather feed simulation --------------------------------------------------------

WEATHER_MAPPING_TEXT = """\
dataset weather

entity report
  class WeatherReport
  uri {base}/WeatherReport/{istat}/{day}/{slot}
  prop reportedLocality from municipality
  temporal wreport from updated_at

entity muni
  class Municipality
  uri {base}/Municipality/{istat}

entity pred
  class WeatherPrediction
  uri {base}/WeatherReport/{istat}/{day}/{slot}/row/{row}
  prop predictionDay from pred_day
  prop predictionRange from pred_range
  prop description from description
  prop temperatureMin from temp_min as decimal
  prop temperatureMax from temp_max as decimal
  prop precipitationProbability from precip_prob as decimal
  prop windSpeed from wind as decimal

link report refersTo muni
link report isComposedOf pred
"""

_WEATHER_WORDS = ("SERENO", "NUVOLOSO", "PIOGGIA", "TEMPORALE", "NEBBIA", "VARIABILE")

# Five forecast days, finer-grained ranges for the near ones: 16 rows/report.
_FORECAST_ROWS = (
    (1, "notte"), (1, "mattina"), (1, "pomeriggio"), (1, "sera"),
    (2, "notte"), (2, "mattina"), (2, "pomeriggio"), (2, "sera"),
    (3, "mattina"), (3, "pomeriggio"), (3, "sera"),
    (4, "mattina"), (4, "pomeriggio"), (4, "sera"),
    (5, "giornata"), (5, "notte"),
)


def weather_mapping_model():
    return parse_model_text(WEATHER_MAPPING_TEXT, "weather.map")


def generate_weather_slot(
    day: int, slot: int, municipality_count: int = 286
) -> bytes:
    """One update of the simulated regional weather feed as CSV bytes.

    The records already carry the ISTAT code (the support-table completion
    happens at ingestion time); rows per report follow the fixed 16-range
    forecast layout.
    """
    hour = "06" if slot == 0 else "18"
    updated = f"2024-03-{day:02d}T{hour}:00:00Z"
    lines = [
        "istat,municipality,updated_at,day,slot,row,pred_day,pred_range,"
        "description,temp_min,temp_max,precip_prob,wind"
    ]
    for mi in range(municipality_count):
        istat = f"{48001 + mi:06d}"
        name = f"COMUNE {mi:03d}"
        for row, (pred_day, pred_range) in enumerate(_FORECAST_ROWS):
            word = _WEATHER_WORDS[(mi + day + row) % len(_WEATHER_WORDS)]
            t_min = 4 + (mi + row + day) % 11
            t_max = t_min + 4 + (row + slot) % 7
            prob = 1 + (mi * 7 + row * 13 + day) % 100  # never the suppressed "0"
            wind = 2 + (mi + row * 3) % 40
            lines.append(
                f"{istat},{name},{updated},{day},{slot},{row},"
                f"{pred_day},{pred_range},{word},{t_min},{t_max},{prob},{wind}"
            )
    return ("\n".join(lines) + "\n").encode("utf-8")


# -- corpus files -----------------------------------------------------------------


def write_corpus(corpus: Corpus, out_dir) -> dict[str, str]:
    """Materialize a corpus as workspace-consumable files."""
    from pathlib import Path

    from . import nquads

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    paths["street_guide"] = str(out / "street_guide.nq")
    nquads.write_file(paths["street_guide"], corpus.street_guide_quads)
    paths["services"] = str(out / "services.csv")
    columns = ["service_id", "name", "category", "street", "number", "municipality", "lat", "lon"]
    with open(paths["services"], "w", encoding="utf-8", newline="") as fh:
        import csv

        writer = csv.writer(fh)
        writer.writerow(columns)
        for record in corpus.service_records:
            writer.writerow([record.fields[c] for c in columns])
    paths["mapping"] = str(out / "services.map")
    Path(paths["mapping"]).write_text(SERVICE_MAPPING_TEXT, encoding="utf-8")
    paths["aliases"] = str(out / "municipality_aliases.txt")
    Path(paths["aliases"]).write_text(corpus.municipality_aliases.to_text(), encoding="utf-8")
    paths["istat"] = str(out / "istat.txt")
    Path(paths["istat"]).write_text(corpus.istat_table.to_text(), encoding="utf-8")
    paths["truth"] = str(out / "ground_truth.json")
    Path(paths["truth"]).write_text(
        json.dumps({k: asdict(v) for k, v in sorted(corpus.ground_truth.items())}, indent=1),
        encoding="utf-8",
    )
    return paths
