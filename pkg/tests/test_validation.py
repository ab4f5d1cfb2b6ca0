import random

from citykb.ontology import builtin_catalog
from citykb.store import QuadStore
from citykb.terms import GraphId, Iri, Literal, Quad, XSD_DECIMAL
from citykb.validation import (
    CheckDefinition,
    IstatTable,
    RunRegistry,
    builtin_checks,
    diff_runs,
    istat_normalize,
    load_checks,
    run_check,
    run_checks,
    save_checks,
)
from citykb.vocab import GEO_LAT, GEO_LONG, RDF_TYPE, RESOURCE_NS, city

G = GraphId("facts", 1)
CATALOG = builtin_catalog()


def res(local):
    return Iri(RESOURCE_NS + local)


def t(s, c):
    return Quad(res(s), RDF_TYPE, city(c), G)


def link(s, p, o):
    return Quad(res(s), city(p), res(o), G)


def check_by_id(check_id):
    return next(c for c in builtin_checks(CATALOG) if c.check_id == check_id)


def clean_corpus():
    """Small store satisfying every builtin check."""
    quads = [
        t("muni1", "Municipality"),
        Quad(res("muni1"), city("name"), Literal("FIRENZE"), G),
        t("road1", "Road"),
        t("re1", "RoadElement"),
        link("road1", "contains", "re1"),
        t("n1", "Node"),
        t("n2", "Node"),
        link("re1", "starts", "n1"),
        link("re1", "ends", "n2"),
        t("svc1", "Service"),
        link("svc1", "isIn", "road1"),
        t("w1", "WeatherReport"),
        link("w1", "refersTo", "muni1"),
    ]
    for node, lat in (("n1", "43.1"), ("n2", "43.2")):
        quads.append(Quad(res(node), GEO_LAT, Literal(lat, XSD_DECIMAL), G))
        quads.append(Quad(res(node), GEO_LONG, Literal("11.1", XSD_DECIMAL), G))
    store = QuadStore()
    assert not store.insert(quads).errors
    return store


class TestBuiltinChecks:
    def test_clean_corpus_all_zero(self):
        run = run_checks(clean_corpus(), CATALOG, builtin_checks(CATALOG))
        dirty = [r for r in run.results if r.violation_count]
        assert dirty == []

    def test_unreconciled_services_counted(self):
        store = clean_corpus()
        extra = [t(f"lost{i}", "Service") for i in range(5)]
        store.insert(extra)
        result = run_check(store, CATALOG, check_by_id("service-unreconciled"))
        assert result.violation_count == 5

    def test_weather_report_with_unknown_municipality(self):
        store = clean_corpus()
        store.insert([t("w2", "WeatherReport")])
        result = run_check(store, CATALOG, check_by_id("weather-report-unlinked"))
        assert result.violation_count == 1
        assert result.samples == [str(res("w2"))]

    def test_dangling_object_target(self):
        store = clean_corpus()
        store.insert([link("road1", "contains", "ghost")])
        result = run_check(store, CATALOG, check_by_id("dangling-object-targets"))
        assert result.violation_count == 1
        assert result.samples == [str(res("ghost"))]

    def test_instant_targets_with_statements_not_dangling(self):
        from citykb.mapping import temporal_link

        store = clean_corpus()
        store.insert([t("sr1", "SituationRecord")])
        store.insert(temporal_link(res("sr1"), "parking", "2024-01-01T08:00:00Z", G))
        result = run_check(store, CATALOG, check_by_id("dangling-object-targets"))
        assert result.violation_count == 0

    def test_entry_with_two_coordinate_pairs(self):
        store = clean_corpus()
        store.insert(
            [
                t("e1", "Entry"),
                Quad(res("e1"), GEO_LAT, Literal("43.0", XSD_DECIMAL), G),
                Quad(res("e1"), GEO_LAT, Literal("43.5", XSD_DECIMAL), G),
            ]
        )
        result = run_check(store, CATALOG, check_by_id("entry-coordinate-excess"))
        assert result.violation_count == 1

    def test_route_checks(self):
        store = clean_corpus()
        store.insert([t("route1", "Route")])
        assert run_check(store, CATALOG, check_by_id("route-no-first-section")).violation_count == 1
        assert run_check(store, CATALOG, check_by_id("route-no-first-stop")).violation_count == 1

    def test_every_catalog_cardinality_rule_has_a_check(self):
        ids = {c.check_id for c in builtin_checks(CATALOG)}
        for rule in CATALOG.cardinalities:
            cls_local = rule.class_iri.rpartition("#")[2]
            prop_local = rule.property_iri.rpartition("#")[2]
            assert f"card-{cls_local}-{prop_local}" in ids

    def test_sample_cap_at_twenty(self):
        store = clean_corpus()
        store.insert([t(f"lost{i}", "Service") for i in range(30)])
        result = run_check(store, CATALOG, check_by_id("service-unreconciled"))
        assert result.violation_count == 30
        assert len(result.samples) == 20


class TestCheckOracle:
    def test_cardinality_checks_agree_with_counting_oracle(self):
        classes = [r.class_iri for r in CATALOG.cardinalities]
        props = [r.property_iri for r in CATALOG.cardinalities]
        for seed in range(20):
            rng = random.Random(seed)
            quads = []
            for _ in range(rng.randrange(80, 600)):
                s = res(f"x{rng.randrange(50)}")
                if rng.random() < 0.4:
                    quads.append(Quad(s, RDF_TYPE, rng.choice(classes), G))
                else:
                    quads.append(Quad(s, rng.choice(props), res(f"y{rng.randrange(40)}"), G))
            store = QuadStore()
            store.insert(quads)
            # independent counting oracle over the raw quads
            types, values = {}, {}
            for q in store.match():
                if q.predicate == RDF_TYPE:
                    types.setdefault(q.subject, set()).add(q.object)
                values.setdefault((q.subject, q.predicate), set()).add(q.object)
            for rule in CATALOG.cardinalities:
                cls_local = rule.class_iri.rpartition("#")[2]
                prop_local = rule.property_iri.rpartition("#")[2]
                expected = set()
                for subject, cls in types.items():
                    if rule.class_iri not in cls:
                        continue
                    n = len(values.get((subject, rule.property_iri), set()))
                    if (rule.min_card is not None and n < rule.min_card) or (
                        rule.max_card is not None and n > rule.max_card
                    ):
                        expected.add(str(subject))
                result = run_check(store, CATALOG, check_by_id(f"card-{cls_local}-{prop_local}"))
                assert result.violation_count == len(expected), (seed, rule)


class TestDiffRuns:
    def test_identical_store_no_regressions(self):
        store = clean_corpus()
        checks = builtin_checks(CATALOG)
        a = run_checks(store, CATALOG, checks)
        b = run_checks(store, CATALOG, checks)
        report = diff_runs(a, b)
        assert report.regressions == [] and report.improvements == []

    def test_injected_dangling_link_is_exactly_one_regression(self):
        store = clean_corpus()
        checks = builtin_checks(CATALOG)
        before = run_checks(store, CATALOG, checks)
        store.insert([link("road1", "contains", "ghost")])
        after = run_checks(store, CATALOG, checks)
        report = diff_runs(before, after)
        assert [e.check_id for e in report.regressions] == ["dangling-object-targets"]
        assert report.regressions[0].current - report.regressions[0].baseline == 1

    def test_fixing_two_services_is_an_improvement_of_two(self):
        store = clean_corpus()
        store.insert([t("lostA", "Service"), t("lostB", "Service")])
        checks = builtin_checks(CATALOG)
        before = run_checks(store, CATALOG, checks)
        store.insert([link("lostA", "isIn", "road1"), link("lostB", "isIn", "road1")])
        after = run_checks(store, CATALOG, checks)
        report = diff_runs(before, after)
        entry = next(e for e in report.improvements if e.check_id == "service-unreconciled")
        assert entry.baseline - entry.current == 2
        assert report.regressions == []

    def test_antisymmetric(self):
        store = clean_corpus()
        checks = builtin_checks(CATALOG)
        a = run_checks(store, CATALOG, checks)
        store.insert([t("lost", "Service")])
        b = run_checks(store, CATALOG, checks)
        fwd = diff_runs(a, b)
        rev = diff_runs(b, a)
        assert {e.check_id for e in fwd.regressions} == {e.check_id for e in rev.improvements}


class TestIstat:
    table = IstatTable([("FIRENZE", "048017"), ("Vicchio", "048049"), ("Vicchio del Mugello", "048049")])

    def test_exact_lookup(self):
        assert istat_normalize("FIRENZE", self.table) == "048017"

    def test_case_and_punctuation_insensitive(self):
        assert istat_normalize("  firenze. ", self.table) == "048017"

    def test_alias_row(self):
        assert istat_normalize("Vicchio del Mugello", self.table) == "048049"

    def test_unknown_returns_none(self):
        assert istat_normalize("Atlantide", self.table) is None

    def test_text_round_trip(self):
        again = IstatTable.from_text(self.table.to_text())
        assert again.lookup("FIRENZE") == "048017"


class TestPersistence:
    def test_check_file_round_trip(self, tmp_path):
        checks = builtin_checks(CATALOG)[:4]
        path = tmp_path / "checks.json"
        save_checks(checks, path)
        loaded = load_checks(path)
        assert loaded == checks

    def test_pattern_check_from_file(self, tmp_path):
        store = clean_corpus()
        check = CheckDefinition(
            "has-some-municipality",
            "the store must contain at least one municipality",
            "pattern",
            expectation="nonempty-result",
            params={
                "patterns": [["?m", str(RDF_TYPE), str(city("Municipality"))]],
                "project": ["m"],
            },
        )
        assert run_check(store, CATALOG, check).violation_count == 0
        assert run_check(QuadStore(), CATALOG, check).violation_count == 1

    def test_registry_round_trip(self, tmp_path):
        registry = RunRegistry(tmp_path / "runs")
        run = run_checks(clean_corpus(), CATALOG, builtin_checks(CATALOG), run_id="base1")
        registry.save(run)
        loaded = registry.get("base1")
        assert loaded is not None
        assert diff_runs(run, loaded).regressions == []
        assert registry.run_ids() == ["base1"]
