"""Acceptance suite: one test per criterion, each printing a PASS line with
its measured numbers (run with -s or -rA to see them all).
"""

import random
import threading
import time

import pytest

from citykb.geo import GeoIndex, GeoPoint, haversine_meters
from citykb.inference import check_constraints, infer, materialize_inference
from citykb.ingestion import DatasetDescriptor, RecordStore, ingest_once
from citykb.mapping import apply_mapping, compile_mapping
from citykb.ontology import SERVICE_CATEGORY_VALUES, builtin_catalog
from citykb.querylang import evaluate, nested_loop_oracle
from citykb.reconcile import PipelineConfig, Reconciler
from citykb.store import QuadStore
from citykb.terms import GraphId, Iri, Literal, Quad, XSD_DECIMAL, XSD_INTEGER
from citykb.testkit import (
    CORRUPTION_CLASSES,
    CorpusSpec,
    build_store,
    generate_corpus,
    generate_weather_slot,
    recall_at_step,
    score_pipeline,
    weather_mapping_model,
)
from citykb.validation import builtin_checks, run_checks
from citykb.vocab import GEO_LAT, GEO_LONG, RDF_TYPE, RESOURCE_NS, city

from test_geo import reference_haversine
from test_query import build_random_store, random_query

CATALOG = builtin_catalog()


def res(local):
    return Iri(RESOURCE_NS + local)


def announce(name, detail):
    print(f"\nACCEPTANCE PASS: {name} -- {detail}")


# ---------------------------------------------------------------------------
# Criterion 1: weather-volume arithmetic
# ---------------------------------------------------------------------------


def test_weather_volume_arithmetic(tmp_path):
    started = time.monotonic()
    record_store = RecordStore(tmp_path / "records")
    compiled = compile_mapping(weather_mapping_model(), CATALOG)

    slots = [(day, slot) for day in range(1, 31) for slot in (0, 1)]
    feeds = {}

    def fetch(source):
        return feeds[source]

    total_records = 0
    triples = set()  # hashed (s, p, o) across the whole month
    per_record_floor = None
    for day, slot in slots:
        source = f"feed://weather/{day}/{slot}"
        feeds[source] = generate_weather_slot(day, slot)
        descriptor = DatasetDescriptor(
            "weather", source, "csv", period_seconds=43200, category="realtime"
        )
        report = ingest_once(descriptor, record_store, fetch=fetch)
        assert report.new_version is not None and not report.error
        records = record_store.read_records("weather", report.new_version)
        total_records += len(records)
        output = apply_mapping(compiled, records)
        assert not output.issues
        # distinct statements contributed by each record, for the floor check
        by_row = {}
        for quad in output.quads:
            triples.add(hash((quad.subject, quad.predicate, quad.object)))
        counts = {}
        for record in records[:50]:  # spot-check the per-record emission floor
            row_suffix = (
                f"{record.fields['istat']}/{record.fields['day']}"
                f"/{record.fields['slot']}/row/{record.fields['row']}"
            )
            n = sum(
                1
                for q in output.quads
                if str(q.subject).endswith(row_suffix)
                or (isinstance(q.object, Iri) and str(q.object).endswith(row_suffix))
            )
            counts[record.row_index] = n
        floor = min(counts.values())
        per_record_floor = floor if per_record_floor is None else min(per_record_floor, floor)

    elapsed = time.monotonic() - started
    total_triples = len(triples)

    assert total_records == 274_560  # 286 x 2/day x 16 rows x 30 days, exact
    assert per_record_floor >= 9
    assert total_triples >= 2_470_000
    assert abs(total_triples - 2_500_000) <= 250_000  # within 10% of 2.5M
    assert elapsed < 300
    announce(
        "weather volume",
        f"{total_records} records, {total_triples} statements, {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# Criterion 2: reconciliation step coverage
# ---------------------------------------------------------------------------


def test_reconciliation_step_coverage():
    started = time.monotonic()
    spec = CorpusSpec(
        seed=20240,
        municipalities=4,
        roads_per_municipality=60,
        services=2000,
        corruption_mix={name: 0.1 for name in CORRUPTION_CLASSES},
    )
    corpus = generate_corpus(spec)
    per_class = {}
    for entry in corpus.ground_truth.values():
        per_class[entry.corruption] = per_class.get(entry.corruption, 0) + 1
    assert all(per_class[name] == 200 for name in CORRUPTION_CLASSES)

    store = build_store(corpus)
    reconciler = Reconciler(
        store, PipelineConfig(municipality_aliases=corpus.municipality_aliases)
    )
    outcomes = reconciler.reconcile_all()
    truth = corpus.ground_truth
    report = score_pipeline(outcomes, truth)

    assert report.wrong_links() == 0  # exact: every accepted link matches truth
    assert recall_at_step(outcomes, truth, "clean", "street-number", 1) == 1.0
    assert recall_at_step(outcomes, truth, "qualifier-variant", "street-number", 2) >= 0.95
    assert recall_at_step(outcomes, truth, "municipality-alias", "street-number", 6) >= 0.95
    typo = report.per_class["typo"]
    assert typo.street_number == 0 and typo.street == 0  # exact negative
    pending_expected = [
        iri for iri, entry in truth.items() if entry.expected_level == "pending-review"
    ]
    assert pending_expected, "corpus must plant ambiguous cases"
    for iri in pending_expected:
        assert outcomes[Iri(iri)].level == "pending-review"

    elapsed = time.monotonic() - started
    assert elapsed < 120
    announce(
        "reconciliation coverage",
        f"2000 services, 0 wrong links, {len(pending_expected)} ambiguous -> review, "
        f"{elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# Criterion 3: inference fixpoint
# ---------------------------------------------------------------------------


def test_inference_fixpoint_and_classification():
    spec = CorpusSpec(seed=77, municipalities=5, roads_per_municipality=25, services=600)
    corpus = generate_corpus(spec)
    store = build_store(corpus)
    materialize_inference(store, CATALOG)
    assert infer(store, CATALOG) == []  # second pass derives nothing

    # exhaustive scan: every PA with a province link is typed Region
    pa_typed = {q.subject for q in store.match(None, RDF_TYPE, city("PA"))}
    region_typed = {q.subject for q in store.match(None, RDF_TYPE, city("Region"))}
    with_province = {
        q.subject for q in store.match(None, city("hasProvince")) if q.subject in pa_typed
    }
    assert with_province, "corpus must contain a province-holding authority"
    assert with_province <= region_typed

    # exhaustive scan: every lodging-category service is typed Accommodation
    lodging_values = set(SERVICE_CATEGORY_VALUES["Accommodation"])
    lodging_typed = {q.subject for q in store.match(None, RDF_TYPE, city("Accommodation"))}
    should_be = set()
    for quad in store.match(None, city("serviceCategory")):
        if isinstance(quad.object, Literal) and quad.object.lexical in lodging_values:
            should_be.add(quad.subject)
    assert should_be, "corpus must contain lodging services"
    assert should_be == lodging_typed
    announce(
        "inference fixpoint",
        f"{len(region_typed)} regions, {len(lodging_typed)} lodgings classified, "
        "re-inference empty",
    )


# ---------------------------------------------------------------------------
# Criterion 4: constraint/check oracle equivalence, 100 seeds
# ---------------------------------------------------------------------------


def _random_constraint_store(seed):
    rng = random.Random(seed)
    g = GraphId("fuzz", 1)
    classes = sorted({r.class_iri for r in CATALOG.cardinalities}) + [
        city("Service"),
        city("WeatherReport"),
        city("Route"),
    ]
    props = sorted({r.property_iri for r in CATALOG.cardinalities}) + [
        city("hasAccess"),
        city("isIn"),
        city("refersTo"),
        city("hasFirstSection"),
        city("hasFirstStop"),
    ]
    quads = []
    for _ in range(rng.randrange(200, 2000)):
        s = res(f"x{rng.randrange(120)}")
        if rng.random() < 0.45:
            quads.append(Quad(s, RDF_TYPE, rng.choice(classes), g))
        else:
            quads.append(Quad(s, rng.choice(props), res(f"x{rng.randrange(160)}"), g))
    store = QuadStore()
    store.insert(quads)
    return store


def _counting_oracle(store):
    """Shared naive scan for both the constraint checker and the check suite."""
    types, values, subjects_with = {}, {}, set()
    everything = store.match()
    for q in everything:
        if q.predicate == RDF_TYPE:
            types.setdefault(q.subject, set()).add(q.object)
        values.setdefault((q.subject, q.predicate), set()).add(q.object)
        subjects_with.add(q.subject)
    per_rule: dict[tuple, set] = {}
    for rule in CATALOG.cardinalities:
        breaches = set()
        for subject, classes in types.items():
            if rule.class_iri not in classes:
                continue
            n = len(values.get((subject, rule.property_iri), set()))
            if rule.min_card is not None and n < rule.min_card:
                breaches.add((subject, "missing"))
            elif rule.max_card is not None and n > rule.max_card:
                breaches.add((subject, "excess"))
        per_rule[(rule.class_iri, rule.property_iri)] = breaches
    unreconciled = {
        str(s)
        for s, classes in types.items()
        if city("Service") in classes
        and not values.get((s, city("hasAccess")))
        and not values.get((s, city("isIn")))
    }
    object_props = {p.iri for p in CATALOG.properties.values() if p.kind == "object-property"}
    dangling = {
        str(q.object)
        for q in everything
        if q.predicate in object_props
        and isinstance(q.object, Iri)
        and q.object not in subjects_with
    }
    return per_rule, unreconciled, dangling


def test_constraint_and_check_oracle_equivalence():
    checks = builtin_checks(CATALOG)
    for seed in range(100):
        store = _random_constraint_store(seed)
        per_rule_oracle, unreconciled_oracle, dangling_oracle = _counting_oracle(store)

        flat_oracle = {
            (subject, prop, kind)
            for (_, prop), breaches in per_rule_oracle.items()
            for subject, kind in breaches
        }
        got = {
            (v.subject, v.property_iri, v.kind)
            for v in check_constraints(store, CATALOG)
        }
        assert got == flat_oracle, f"seed {seed}"

        run = run_checks(store, CATALOG, checks)
        assert run.count_for("service-unreconciled") == len(unreconciled_oracle), seed
        assert run.count_for("dangling-object-targets") == len(dangling_oracle), seed
        for rule in CATALOG.cardinalities:
            check_id = (
                f"card-{rule.class_iri.rpartition('#')[2]}"
                f"-{rule.property_iri.rpartition('#')[2]}"
            )
            expected = per_rule_oracle[(rule.class_iri, rule.property_iri)]
            assert run.count_for(check_id) == len(expected), (seed, check_id)
    announce("constraint/check oracle equivalence", "100 seeds, exact agreement")


# ---------------------------------------------------------------------------
# Criterion 5: query oracle equivalence
# ---------------------------------------------------------------------------


def test_query_oracle_equivalence_200_queries():
    rng = random.Random(5150)
    store, subjects, predicates, literals = build_random_store(rng)
    universe = store.match()
    assert len(universe) == 50_000
    for i in range(200):
        query = random_query(rng, subjects, predicates, literals)
        mine = evaluate(query, store)
        reference = nested_loop_oracle(query, universe)
        assert set(mine.rows) == set(reference.rows), f"query {i}"
    announce("query oracle equivalence", "200 random BGPs over 50k statements, exact")


# ---------------------------------------------------------------------------
# Criterion 6: geo correctness
# ---------------------------------------------------------------------------


def test_geo_oracle_equivalence():
    rng = random.Random(616)
    g = GraphId("geo", 1)
    quads = []
    planted_entries = []
    planted_services = []
    for i in range(1000):
        lat = round(43.2 + rng.random() * 0.9, 7)
        lon = round(10.8 + rng.random() * 0.9, 7)
        entry = res(f"Entry/{i:04d}")
        sn = res(f"StreetNumber/sn{i}")
        quads += [
            Quad(sn, RDF_TYPE, city("StreetNumber"), g),
            Quad(sn, city("belongsTo"), res(f"Road/r{i % 97}"), g),
            Quad(sn, city("hasExternalAccess"), entry, g),
            Quad(entry, RDF_TYPE, city("Entry"), g),
            Quad(entry, GEO_LAT, Literal(f"{lat:.7f}", XSD_DECIMAL), g),
            Quad(entry, GEO_LONG, Literal(f"{lon:.7f}", XSD_DECIMAL), g),
        ]
        planted_entries.append((entry, GeoPoint(lat, lon)))
        if i % 2 == 0:
            svc = res(f"Service/{i:04d}")
            quads += [
                Quad(svc, RDF_TYPE, city("Service"), g),
                Quad(svc, GEO_LAT, Literal(f"{lat:.7f}", XSD_DECIMAL), g),
                Quad(svc, GEO_LONG, Literal(f"{lon:.7f}", XSD_DECIMAL), g),
            ]
            planted_services.append((svc, GeoPoint(lat, lon)))
    store = QuadStore()
    assert not store.insert(quads).errors
    index = GeoIndex(store)

    checked = 0
    for _ in range(100):
        p = GeoPoint(43.2 + rng.random() * 0.9, 10.8 + rng.random() * 0.9)
        radius = 500 + rng.random() * 20_000

        got_near = index.near_services(p, radius)
        want_near = sorted(
            (
                (svc, haversine_meters(p, point))
                for svc, point in planted_services
                if haversine_meters(p, point) <= radius
            ),
            key=lambda pair: (pair[1], pair[0]),
        )
        assert got_near == want_near

        got_entry, _, _, got_d = index.closest_street_number(p)
        want_entry, want_d = min(
            ((e, haversine_meters(p, point)) for e, point in planted_entries),
            key=lambda pair: (pair[1], pair[0]),
        )
        assert got_entry == want_entry and got_d == want_d
        checked += 1

        a = GeoPoint(43.2 + rng.random() * 0.9, 10.8 + rng.random() * 0.9)
        mine = haversine_meters(p, a)
        ref = reference_haversine(p, a)
        assert mine == pytest.approx(ref, rel=1e-6, abs=1e-6)
    announce("geo correctness", f"{checked} query points vs scan oracle, exact")


# ---------------------------------------------------------------------------
# Criterion 7: reload atomicity under 100 readers
# ---------------------------------------------------------------------------


def test_reload_atomicity_100_readers():
    store = QuadStore()
    versions = {}
    for version in range(1, 7):
        quads = [
            Quad(res(f"s{i}"), city("relatedTo"), res(f"sentinel-v{version}"), GraphId("d", version))
            for i in range(300)
        ]
        versions[version] = {(q.subject, q.predicate, q.object) for q in quads}
    store.replace_graph("d", 1, [Quad(s, p, o, GraphId("d", 1)) for s, p, o in versions[1]])

    valid_views = set(map(frozenset, versions.values()))
    violations = []
    reads = [0]
    reads_lock = threading.Lock()
    stop = threading.Event()

    def reader():
        local = 0
        while not stop.is_set():
            seen = frozenset(
                (q.subject, q.predicate, q.object) for q in store.match(graph=None)
            )
            if seen not in valid_views:
                violations.append(len(seen))
                return
            local += 1
        with reads_lock:
            reads[0] += local

    threads = [threading.Thread(target=reader) for _ in range(100)]
    for t in threads:
        t.start()
    for version in range(2, 7):
        store.replace_graph(
            "d", version, [Quad(s, p, o, GraphId("d", version)) for s, p, o in versions[version]]
        )
        time.sleep(0.05)
    stop.set()
    for t in threads:
        t.join()
    assert violations == []
    assert reads[0] > 100  # the readers really did overlap the swaps
    announce("reload atomicity", f"100 readers, 5 swaps, {reads[0]} clean snapshots")


# ---------------------------------------------------------------------------
# Criterion 8: scale smoke, 1M statements + full validation < 60 s
# ---------------------------------------------------------------------------


def _bulk_clean_quads(n_roads=48_000):  # 21 statements per road: just over 1M
    """Constraint-clean bulk corpus reaching ~1M statements."""
    g = GraphId("bulk", 1)
    muni = res("Municipality/m0")
    yield Quad(muni, RDF_TYPE, city("Municipality"), g)
    yield Quad(muni, city("name"), Literal("BULKTOWN"), g)
    categories = sorted(SERVICE_CATEGORY_VALUES)
    for i in range(n_roads):
        road = res(f"Road/r{i}")
        element = res(f"RoadElement/re{i}")
        yield Quad(road, RDF_TYPE, city("Road"), g)
        yield Quad(road, city("officialName"), Literal(f"VIA BULK {i}"), g)
        yield Quad(road, city("inMunicipalityOf"), muni, g)
        yield Quad(road, city("contains"), element, g)
        yield Quad(element, RDF_TYPE, city("RoadElement"), g)
        for which in ("a", "b"):
            node = res(f"Node/n{i}{which}")
            yield Quad(element, city("starts" if which == "a" else "ends"), node, g)
            yield Quad(node, RDF_TYPE, city("Node"), g)
            yield Quad(node, GEO_LAT, Literal(f"43.{i % 1000:03d}", XSD_DECIMAL), g)
            yield Quad(node, GEO_LONG, Literal(f"11.{i % 1000:03d}", XSD_DECIMAL), g)
        sn = res(f"StreetNumber/sn{i}")
        entry = res(f"Entry/e{i}")
        yield Quad(sn, RDF_TYPE, city("StreetNumber"), g)
        yield Quad(sn, city("belongsTo"), road, g)
        yield Quad(sn, city("civicNumber"), Literal(str(1 + i % 200), XSD_INTEGER), g)
        yield Quad(sn, city("hasExternalAccess"), entry, g)
        yield Quad(entry, RDF_TYPE, city("Entry"), g)
        svc = res(f"Service/s{i}")
        yield Quad(svc, RDF_TYPE, city("Service"), g)
        yield Quad(svc, city("serviceCategory"), Literal(categories[i % len(categories)].lower()), g)
        yield Quad(svc, city("hasAccess"), entry, g)


def test_scale_smoke_million_quads_validated_under_60s():
    started = time.monotonic()
    store = QuadStore()
    report = store.insert(_bulk_clean_quads())
    assert not report.errors
    size = len(store)
    assert size >= 1_000_000
    run = run_checks(store, CATALOG, builtin_checks(CATALOG))
    elapsed = time.monotonic() - started
    dirty = [r for r in run.results if r.violation_count]
    assert dirty == []
    assert elapsed < 60, f"scale smoke took {elapsed:.1f}s"
    announce("scale smoke", f"{size} statements inserted + validated in {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# Review resolution over plain HTTP (no console needed)
# ---------------------------------------------------------------------------


def test_review_resolution_via_direct_http(tmp_path):
    from fastapi.testclient import TestClient

    from citykb.service.app import create_app
    from citykb.workspace import create_demo_workspace

    workspace, _ = create_demo_workspace(tmp_path / "ws", seed=31, services=200)
    client = TestClient(create_app(workspace))
    page = client.get("/reviews", params={"page_size": 1}).json()
    assert page["total"] >= 1
    card = page["items"][0]
    chosen = card["candidates"][0]
    response = client.post(
        f"/reviews/{card['review_id']}/resolution",
        json={"choice": chosen["iri"], "idempotencyKey": "acc-1"},
    )
    assert response.status_code == 200
    rows = client.post(
        "/query",
        json={
            "patterns": [[f"{card['service_iri']}/toponym", "owl:sameAs", "?road"]],
            "project": ["road"],
        },
    ).json()["rows"]
    assert [r[0]["value"] for r in rows] == [chosen["road_iri"]]
    announce("http review resolution", "resolution + sameAs visible through /query")
