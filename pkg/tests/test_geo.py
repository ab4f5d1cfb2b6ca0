import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from citykb.geo import (
    EARTH_RADIUS_M,
    GeoError,
    GeoIndex,
    GeoPoint,
    haversine_meters,
    validate_point,
)
from citykb.store import QuadStore
from citykb.terms import GraphId, Iri, Literal, Quad, XSD_DECIMAL
from citykb.vocab import GEO_LAT, GEO_LONG, RDF_TYPE, RESOURCE_NS, city

G = GraphId("geo", 1)


def res(local):
    return Iri(RESOURCE_NS + local)


def reference_haversine(a, b):
    """Alternate formulation (atan2 over chord) for cross-checking."""
    lat1, lon1, lat2, lon2 = map(math.radians, (a.lat, a.lon, b.lat, b.lon))
    h = (
        math.sin((lat2 - lat1) / 2) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    )
    return 2 * EARTH_RADIUS_M * math.atan2(math.sqrt(h), math.sqrt(1 - h))


coords = st.tuples(
    st.floats(min_value=-90, max_value=90, allow_nan=False),
    st.floats(min_value=-180, max_value=180, allow_nan=False),
)


class TestHaversine:
    def test_identical_points_zero(self):
        p = GeoPoint(43.7731, 11.256)
        assert haversine_meters(p, p) == 0.0

    def test_antipodal_half_circumference(self):
        a = GeoPoint(0.0, 0.0)
        b = GeoPoint(0.0, 180.0)
        assert haversine_meters(a, b) == pytest.approx(math.pi * EARTH_RADIUS_M, rel=1e-9)

    def test_florence_block_matches_reference(self):
        a = GeoPoint(43.7731, 11.2560)
        b = GeoPoint(43.7693, 11.2558)
        assert haversine_meters(a, b) == pytest.approx(reference_haversine(a, b), rel=1e-6)

    @settings(max_examples=300, deadline=None)
    @given(coords, coords)
    def test_matches_reference_formulation_everywhere(self, p1, p2):
        a, b = GeoPoint(*p1), GeoPoint(*p2)
        mine = haversine_meters(a, b)
        ref = reference_haversine(a, b)
        assert mine == pytest.approx(ref, rel=1e-6, abs=1e-6)

    @settings(max_examples=200, deadline=None)
    @given(coords, coords)
    def test_symmetric_and_nonnegative(self, p1, p2):
        a, b = GeoPoint(*p1), GeoPoint(*p2)
        d1, d2 = haversine_meters(a, b), haversine_meters(b, a)
        assert d1 >= 0
        assert d1 == pytest.approx(d2, rel=1e-9, abs=1e-9)

    def test_point_validation(self):
        with pytest.raises(GeoError):
            validate_point(91, 0)
        with pytest.raises(GeoError):
            validate_point(0, 181)


def plant_entry(quads, i, lat, lon, road="r1"):
    lat, lon = round(lat, 7), round(lon, 7)  # stored precision
    sn = res(f"StreetNumber/{i}")
    entry = res(f"Entry/{i:04d}")
    quads += [
        Quad(sn, RDF_TYPE, city("StreetNumber"), G),
        Quad(sn, city("belongsTo"), res(f"Road/{road}"), G),
        Quad(sn, city("hasExternalAccess"), entry, G),
        Quad(entry, RDF_TYPE, city("Entry"), G),
        Quad(entry, GEO_LAT, Literal(f"{lat:.7f}", XSD_DECIMAL), G),
        Quad(entry, GEO_LONG, Literal(f"{lon:.7f}", XSD_DECIMAL), G),
    ]
    return entry


def plant_service(quads, i, lat, lon, category=None):
    lat, lon = round(lat, 7), round(lon, 7)
    svc = res(f"Service/{i:04d}")
    quads += [
        Quad(svc, RDF_TYPE, city("Service"), G),
        Quad(svc, GEO_LAT, Literal(f"{lat:.7f}", XSD_DECIMAL), G),
        Quad(svc, GEO_LONG, Literal(f"{lon:.7f}", XSD_DECIMAL), G),
    ]
    if category:
        quads.append(Quad(svc, city("serviceCategory"), Literal(category), G))
    return svc


class TestNearServices:
    CENTER = GeoPoint(43.77, 11.25)

    def ring_store(self):
        quads = []
        # ring of 10 services at growing distances (~100 m apart going north)
        for i in range(10):
            plant_service(quads, i, 43.77 + (i + 1) * 0.0009, 11.25, category="camping" if i % 2 else "bar")
        store = QuadStore()
        store.insert(quads)
        return store

    def test_service_at_center_distance_zero_first(self):
        quads = []
        plant_service(quads, 0, self.CENTER.lat, self.CENTER.lon)
        plant_service(quads, 1, self.CENTER.lat + 0.001, self.CENTER.lon)
        store = QuadStore()
        store.insert(quads)
        got = GeoIndex(store).near_services(self.CENTER, 500)
        assert got[0][0] == res("Service/0000")
        assert got[0][1] == 0.0

    def test_radius_smaller_than_nearest_empty(self):
        store = self.ring_store()
        assert GeoIndex(store).near_services(self.CENTER, 10) == []

    def test_ring_radius_covers_exactly_four(self):
        store = self.ring_store()
        index = GeoIndex(store)
        # independent scan oracle
        def oracle(radius):
            out = []
            for i in range(10):
                p = GeoPoint(round(43.77 + (i + 1) * 0.0009, 7), 11.25)
                d = haversine_meters(self.CENTER, p)
                if d <= radius:
                    out.append((res(f"Service/{i:04d}"), d))
            return sorted(out, key=lambda x: (x[1], x[0]))

        radius = haversine_meters(self.CENTER, GeoPoint(43.77 + 4 * 0.0009, 11.25)) + 1
        got = index.near_services(self.CENTER, radius)
        assert got == oracle(radius)
        assert len(got) == 4

    def test_category_filter(self):
        store = self.ring_store()
        index = GeoIndex(store)
        got = index.near_services(self.CENTER, 10_000, category="Accommodation")
        assert all(str(s).startswith(f"{RESOURCE_NS}Service") for s, _ in got)
        assert len(got) == 5  # the odd-indexed camping ones
        with pytest.raises(GeoError):
            index.near_services(self.CENTER, 100, category="NoSuchCategory")

    def test_monotone_in_radius(self):
        store = self.ring_store()
        index = GeoIndex(store)
        small = {s for s, _ in index.near_services(self.CENTER, 200)}
        large = {s for s, _ in index.near_services(self.CENTER, 900)}
        assert small <= large

    def test_service_falls_back_to_entry_coordinates(self):
        quads = []
        entry = plant_entry(quads, 1, 43.8, 11.3)
        svc = res("Service/via-entry")
        quads += [
            Quad(svc, RDF_TYPE, city("Service"), G),
            Quad(svc, city("hasAccess"), entry, G),
        ]
        store = QuadStore()
        store.insert(quads)
        got = GeoIndex(store).near_services(GeoPoint(43.8, 11.3), 50)
        assert [s for s, _ in got] == [svc]


class TestClosestStreetNumber:
    def test_exact_hit_distance_zero(self):
        quads = []
        plant_entry(quads, 1, 43.77, 11.25)
        plant_entry(quads, 2, 43.78, 11.26)
        store = QuadStore()
        store.insert(quads)
        entry, sn, road, distance = GeoIndex(store).closest_street_number(
            GeoPoint(43.77, 11.25)
        )
        assert entry == res("Entry/0001")
        assert sn == res("StreetNumber/1")
        assert road == res("Road/r1")
        assert distance == 0.0

    def test_tie_breaks_to_smaller_iri(self):
        quads = []
        plant_entry(quads, 2, 43.77, 11.25)
        plant_entry(quads, 1, 43.77, 11.25)
        store = QuadStore()
        store.insert(quads)
        entry, *_ = GeoIndex(store).closest_street_number(GeoPoint(43.77, 11.25))
        assert entry == res("Entry/0001")

    def test_empty_store_returns_none(self):
        assert GeoIndex(QuadStore()).closest_street_number(GeoPoint(0, 0)) is None

    def test_random_points_match_scan_oracle(self):
        rng = random.Random(7)
        quads = []
        planted = []
        for i in range(1000):
            lat = 43.5 + rng.random() * 0.5
            lon = 11.0 + rng.random() * 0.5
            planted.append(
                (plant_entry(quads, i, lat, lon), GeoPoint(round(lat, 7), round(lon, 7)))
            )
        store = QuadStore()
        store.insert(quads)
        index = GeoIndex(store)
        for _ in range(100):
            p = GeoPoint(43.5 + rng.random() * 0.5, 11.0 + rng.random() * 0.5)
            got_entry, _, _, got_d = index.closest_street_number(p)
            want_entry, want_d = min(
                ((e, haversine_meters(p, point)) for e, point in planted),
                key=lambda pair: (pair[1], pair[0]),
            )
            assert got_entry == want_entry
            assert got_d == pytest.approx(want_d, rel=1e-12)

    def test_cache_invalidates_on_store_change(self):
        quads = []
        plant_entry(quads, 1, 43.77, 11.25)
        store = QuadStore()
        store.insert(quads)
        index = GeoIndex(store)
        assert index.closest_street_number(GeoPoint(43.77, 11.25))[0] == res("Entry/0001")
        more = []
        plant_entry(more, 2, 43.0, 11.0)
        store.insert(more)
        entry, *_ = index.closest_street_number(GeoPoint(43.0, 11.0))
        assert entry == res("Entry/0002")
