"""Geospatial helpers: great-circle distance and proximity lookups.

Proximity queries scan a coordinate index extracted from the store and
cached against the store generation; at desk scale a linear scan beats the
bookkeeping of a spatial tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .ontology import SERVICE_CATEGORY_VALUES, SchemaCatalog, builtin_catalog
from .store import QuadStore
from .terms import Iri, Literal
from .vocab import GEO_LAT, GEO_LONG, RDF_TYPE, city

EARTH_RADIUS_M = 6_371_000.0


class GeoPoint(NamedTuple):
    lat: float
    lon: float


class GeoError(ValueError):
    pass


def validate_point(lat: float, lon: float) -> GeoPoint:
    if not (-90.0 <= lat <= 90.0):
        raise GeoError(f"latitude out of range: {lat}")
    if not (-180.0 <= lon <= 180.0):
        raise GeoError(f"longitude out of range: {lon}")
    return GeoPoint(lat, lon)


def haversine_meters(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance on the WGS84 sphere approximation."""
    lat1, lon1, lat2, lon2 = map(math.radians, (a.lat, a.lon, b.lat, b.lon))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


@dataclass
class _CoordIndex:
    generation: int
    services: list[tuple[Iri, GeoPoint]]
    entries: list[tuple[Iri, Iri, Iri, GeoPoint]]  # entry, street number, road
    categories: dict[Iri, set[str]]


class GeoIndex:
    """Coordinate index over services and entries, rebuilt when the store moves."""

    def __init__(self, store: QuadStore, catalog: SchemaCatalog | None = None):
        self.store = store
        self.catalog = catalog or builtin_catalog()
        self._cache: _CoordIndex | None = None

    # -- construction -----------------------------------------------------

    def _coords_of(self, subject) -> GeoPoint | None:
        lat = lon = None
        for quad in self.store.match(subject, GEO_LAT):
            if isinstance(quad.object, Literal):
                try:
                    lat = float(quad.object.lexical)
                except ValueError:
                    pass
        for quad in self.store.match(subject, GEO_LONG):
            if isinstance(quad.object, Literal):
                try:
                    lon = float(quad.object.lexical)
                except ValueError:
                    pass
        if lat is None or lon is None:
            return None
        return GeoPoint(lat, lon)

    def _build(self) -> _CoordIndex:
        store = self.store
        entry_points: dict[Iri, GeoPoint] = {}
        entries: list[tuple[Iri, Iri, Iri, GeoPoint]] = []
        for quad in store.match(None, city("hasExternalAccess")):
            sn, entry = quad.subject, quad.object
            if not isinstance(entry, Iri) or not isinstance(sn, Iri):
                continue
            point = self._coords_of(entry)
            if point is None:
                continue
            entry_points[entry] = point
            road = None
            for road_quad in store.match(sn, city("belongsTo")):
                road = road_quad.object
            if isinstance(road, Iri):
                entries.append((entry, sn, road, point))
        entries.sort(key=lambda e: e[0])

        services: list[tuple[Iri, GeoPoint]] = []
        categories: dict[Iri, set[str]] = {}
        for quad in store.match(None, RDF_TYPE, city("Service")):
            service = quad.subject
            if not isinstance(service, Iri):
                continue
            point = self._coords_of(service)
            if point is None:
                # fall back to the coordinates of the reconciled entry
                for access in store.match(service, city("hasAccess")):
                    point = entry_points.get(access.object) or self._coords_of(access.object)
                    if point:
                        break
            if point is None:
                continue
            services.append((service, point))
            values = {
                q.object.lexical
                for q in store.match(service, city("serviceCategory"))
                if isinstance(q.object, Literal)
            }
            if values:
                categories[service] = values
        services.sort(key=lambda s: s[0])
        return _CoordIndex(store.generation, services, entries, categories)

    def _index(self) -> _CoordIndex:
        generation = self.store.generation
        if self._cache is None or self._cache.generation != generation:
            self._cache = self._build()
        return self._cache

    # -- queries ------------------------------------------------------------

    def near_services(
        self,
        center: GeoPoint,
        radius_meters: float,
        category: str | None = None,
    ) -> list[tuple[Iri, float]]:
        """Services within the radius, nearest first (ties by IRI)."""
        if radius_meters <= 0:
            raise GeoError("radius must be positive")
        validate_point(*center)
        wanted_values: set[str] | None = None
        if category:
            local = category.rpartition("#")[2]
            values = SERVICE_CATEGORY_VALUES.get(local)
            if values is None:
                raise GeoError(f"unknown service category {category!r}")
            wanted_values = set(values)
        index = self._index()
        out = []
        for service, point in index.services:
            if wanted_values is not None:
                have = index.categories.get(service, set())
                if not (have & wanted_values):
                    continue
            distance = haversine_meters(center, point)
            if distance <= radius_meters:
                out.append((service, distance))
        out.sort(key=lambda pair: (pair[1], pair[0]))
        return out

    def closest_street_number(
        self, point: GeoPoint
    ) -> tuple[Iri, Iri, Iri, float] | None:
        """(entry, street number, road, meters) nearest to `point`;
        ties break toward the lexicographically smaller entry IRI."""
        validate_point(*point)
        best: tuple[float, Iri, Iri, Iri] | None = None
        for entry, sn, road, coords in self._index().entries:
            distance = haversine_meters(point, coords)
            key = (distance, entry)
            if best is None or key < (best[0], best[1]):
                best = (distance, entry, sn, road)
        if best is None:
            return None
        distance, entry, sn, road = best
        return (entry, sn, road, distance)
