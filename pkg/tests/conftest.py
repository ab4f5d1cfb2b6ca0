import random

import pytest

from citykb.terms import GraphId, Iri, Literal, Quad, XSD_INTEGER


@pytest.fixture
def graph():
    return GraphId("testdata", 1)


def make_quads(n: int, graph: GraphId, seed: int = 7) -> list[Quad]:
    """Deterministic quad soup: n distinct statements over a small vocabulary."""
    rng = random.Random(seed)
    base = "http://citykb.local/resource/"
    preds = [Iri(f"http://citykb.local/ontology#p{i}") for i in range(12)]
    out: list[Quad] = []
    seen = set()
    while len(out) < n:
        s = Iri(f"{base}s{rng.randrange(max(4, n // 2))}")
        p = rng.choice(preds)
        if rng.random() < 0.5:
            o = Iri(f"{base}o{rng.randrange(max(4, n // 2))}")
        else:
            o = Literal(str(rng.randrange(1000)), XSD_INTEGER)
        key = (s, p, o)
        if key in seen:
            continue
        seen.add(key)
        out.append(Quad(s, p, o, graph))
    return out
