from hypothesis import given, settings, strategies as st

from citykb import nquads
from citykb.store import QuadStore
from citykb.terms import BlankNode, GraphId, Iri, Literal, Quad, XSD_INTEGER

from conftest import make_quads


def test_export_empty_store(tmp_path):
    path = tmp_path / "empty.nq"
    QuadStore().export_nquads(path)
    assert path.read_text() == ""


def test_round_trip_random_quads(tmp_path, graph):
    quads = make_quads(10_000, graph)
    store = QuadStore()
    store.insert(quads)
    path = tmp_path / "dump.nq"
    store.export_nquads(path)
    loaded = QuadStore()
    report = loaded.import_nquads(path)
    assert not report.errors
    assert set(loaded.match()) == set(store.match())


def test_literal_with_quote_and_newline_survives(tmp_path, graph):
    nasty = Literal('va "bene"\nriga due\ttab\\fine')
    q = Quad(Iri("http://x.local/res/a"), Iri("http://x.local/ont#p"), nasty, graph)
    path = tmp_path / "nasty.nq"
    nquads.write_file(path, [q])
    loaded, issues = nquads.read_file(path)
    assert not issues
    assert loaded == [q]


def test_graph_id_round_trip():
    g = GraphId("street guide/2024", 7)
    assert nquads.graph_from_iri(nquads.graph_to_iri(g)) == g


def test_blank_node_and_typed_literal_round_trip(tmp_path, graph):
    quads = [
        Quad(BlankNode("n0"), Iri("http://x.local/ont#p"), Literal("5", XSD_INTEGER), graph),
        Quad(Iri("http://x.local/res/a"), Iri("http://x.local/ont#q"), BlankNode("n0"), graph),
        Quad(
            Iri("http://x.local/res/a"),
            Iri("http://x.local/ont#label"),
            Literal("ciao", lang="it"),
            graph,
        ),
    ]
    path = tmp_path / "mixed.nq"
    nquads.write_file(path, quads)
    loaded, issues = nquads.read_file(path)
    assert not issues
    assert loaded == quads


def test_malformed_lines_reported_and_skipped():
    lines = [
        '<http://a.local/x> <http://a.local/p> "ok" .',
        "this is not a statement",
        '<http://a.local/x> <http://a.local/p> "also ok" .',
    ]
    quads, issues = nquads.parse_lines(lines)
    assert len(quads) == 2
    assert len(issues) == 1 and issues[0].lineno == 2


def test_blank_and_comment_lines_ignored():
    quads, issues = nquads.parse_lines(["", "# header", "   "])
    assert quads == [] and issues == []


@settings(max_examples=150, deadline=None)
@given(
    st.text(
        alphabet=st.characters(blacklist_categories=("Cs",)),
        max_size=60,
    )
)
def test_any_lexical_survives_round_trip(text):
    g = GraphId("fuzz", 1)
    q = Quad(Iri("http://x.local/res/s"), Iri("http://x.local/ont#p"), Literal(text), g)
    line = nquads.serialize_quad(q)
    parsed = nquads.parse_line(line, 1)
    assert parsed == q
