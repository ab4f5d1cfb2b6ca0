"""citykb: a smart-city knowledge base toolkit.

Heterogeneous municipal datasets go in (CSV tables, KML geometries, JSON
feeds); a versioned record store keeps the raw rows; declarative mappings
turn them into statements typed against the built-in smart-city ontology;
a six-step pipeline reconciles point-of-interest addresses to the street
guide, with a human review queue for the ambiguous rest; and a check suite
watches the whole knowledge base for regressions.
"""

__version__ = "0.1.0"

from .ontology import builtin_catalog
from .store import QuadStore
from .terms import BlankNode, GraphId, Iri, Literal, Quad

__all__ = [
    "BlankNode",
    "GraphId",
    "Iri",
    "Literal",
    "Quad",
    "QuadStore",
    "builtin_catalog",
    "__version__",
]
