"""Namespace constants and the handful of external vocabulary terms in use."""

from __future__ import annotations

from .terms import Iri

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
GEO_NS = "http://www.w3.org/2003/01/geo/wgs84_pos#"
FOAF_NS = "http://xmlns.com/foaf/0.1/"
TIME_NS = "http://www.w3.org/2006/time#"
VCARD_NS = "http://www.w3.org/2006/vcard/ns#"

# Project-owned namespaces.
CITY_NS = "http://citykb.local/ontology#"
OTN_NS = "http://citykb.local/otn#"
RESOURCE_NS = "http://citykb.local/resource/"

RDF_TYPE = Iri(RDF_NS + "type")
RDFS_SUBCLASS_OF = Iri(RDFS_NS + "subClassOf")
RDFS_DOMAIN = Iri(RDFS_NS + "domain")
RDFS_RANGE = Iri(RDFS_NS + "range")
RDFS_COMMENT = Iri(RDFS_NS + "comment")
OWL_CLASS = Iri(OWL_NS + "Class")
OWL_OBJECT_PROPERTY = Iri(OWL_NS + "ObjectProperty")
OWL_DATATYPE_PROPERTY = Iri(OWL_NS + "DatatypeProperty")
OWL_INVERSE_OF = Iri(OWL_NS + "inverseOf")
OWL_SAME_AS = Iri(OWL_NS + "sameAs")

GEO_LAT = Iri(GEO_NS + "lat")
GEO_LONG = Iri(GEO_NS + "long")
GEO_SPATIAL_THING = Iri(GEO_NS + "SpatialThing")
FOAF_ORGANIZATION = Iri(FOAF_NS + "Organization")
TIME_INSTANT = Iri(TIME_NS + "Instant")
TIME_IN_XSD_DATETIME = Iri(TIME_NS + "inXSDDateTime")
VCARD_STREET_ADDRESS = Iri(VCARD_NS + "street-address")
VCARD_LOCALITY = Iri(VCARD_NS + "locality")

PREFIXES: dict[str, str] = {
    "rdf": RDF_NS,
    "rdfs": RDFS_NS,
    "owl": OWL_NS,
    "xsd": XSD_NS,
    "geo": GEO_NS,
    "foaf": FOAF_NS,
    "time": TIME_NS,
    "vcard": VCARD_NS,
    "city": CITY_NS,
    "otn": OTN_NS,
    "res": RESOURCE_NS,
}


def city(local: str) -> Iri:
    return Iri(CITY_NS + local)


def otn(local: str) -> Iri:
    return Iri(OTN_NS + local)


def expand(name: str, extra: dict[str, str] | None = None) -> Iri:
    """Expand `prefix:local` using the known prefixes; absolute IRIs pass through."""
    if "://" in name:
        return Iri(name)
    prefix, sep, local = name.partition(":")
    if sep:
        table = dict(PREFIXES)
        if extra:
            table.update(extra)
        ns = table.get(prefix)
        if ns is not None:
            return Iri(ns + local)
    raise ValueError(f"cannot expand {name!r} to an IRI")


def compact(iri: str, extra: dict[str, str] | None = None) -> str:
    """Best-effort reverse of expand(), for human-facing output."""
    table = dict(PREFIXES)
    if extra:
        table.update(extra)
    best_prefix, best_ns = "", ""
    for prefix, ns in table.items():
        if iri.startswith(ns) and len(ns) > len(best_ns):
            best_prefix, best_ns = prefix, ns
    if best_ns:
        return f"{best_prefix}:{iri[len(best_ns):]}"
    return iri
