import io

from hypothesis import given, strategies as st

from rdfindex.model import Triple
from rdfindex.ntriples import IngestConfig, NTriplesParser, clean, ingest, parse_ntriples, sample, truncate_utf8

DOC = b"""# a comment
<http://ex.org/a> <http://ex.org/p> <http://ex.org/b> .
_:b1 <http://ex.org/p> "plain" .

<http://ex.org/a> <http://ex.org/name> "caf\\u00e9"@fr .
<http://ex.org/a> <http://ex.org/age> "42"^^<http://www.w3.org/2001/XMLSchema#integer> .
<http://ex.org/a> <http://ex.org/q> "tab\\tand \\"quote\\"" . # trailing comment
this is not a triple
<http://ex.org/a> "literal predicate" <http://ex.org/b> .
<http://ex.org/a> <http://ex.org/p> <http://ex.org/b>
"""


def test_parse_terms():
    triples, skipped = parse_ntriples(io.BytesIO(DOC))
    assert skipped == 3
    assert triples[0] == Triple(b"http://ex.org/a", b"http://ex.org/p", b"http://ex.org/b")
    assert triples[1].s == b"_:b1" and triples[1].o == b"plain"
    assert triples[2].o == "café@fr".encode()
    assert triples[3].o == b"42^^<http://www.w3.org/2001/XMLSchema#integer>"
    assert triples[4].o == b'tab\tand "quote"'


def test_parser_counts():
    p = NTriplesParser()
    list(p.parse([b"<a> <b> <c> .\n", b"\xff\xfe\n", "<a> <b> <d> .\n"]))
    assert (p.parsed, p.skipped) == (2, 1)


def test_truncate_utf8_keeps_code_points():
    s = "aé日".encode()  # 1 + 2 + 3 bytes
    assert truncate_utf8(s, 6) == s
    assert truncate_utf8(s, 5) == "aé".encode()
    assert truncate_utf8(s, 2) == b"a"
    assert truncate_utf8(b"\xe6\x97\xa5", 2) == b""


@given(st.text(min_size=1, max_size=40), st.integers(1, 20))
def test_truncate_property(text, limit):
    raw = text.encode()
    cut = truncate_utf8(raw, limit)
    assert len(cut) <= limit and raw.startswith(cut)
    cut.decode("utf-8")


def test_clean_report():
    ts = [
        Triple(b"a", b"b", b"c"),
        Triple(b"a", b"b", b"c"),
        Triple(b"x" * 70, b"b", b"c"),
        Triple(b"\xe6\x97\xa5", b"b", b"c"),
        Triple(b"n\x00l", b"b", b"c"),
    ]
    g, rep = clean(ts, IngestConfig(max_atom_len=64))
    assert Triple(b"x" * 64, b"b", b"c") in g
    assert Triple(b"n\x01l", b"b", b"c") in g
    assert (rep.input_triples, rep.output_triples, rep.truncated_atoms, rep.duplicates) == (5, 4, 1, 1)
    g, rep = clean([Triple(b"\xe6\x97\xa5", b"b", b"c")], IngestConfig(max_atom_len=2))
    assert len(g) == 0 and rep.dropped_empty == 1


def test_sample_is_uniform_subset_and_seeded():
    items = list(range(1000))
    a = sample(items, 50, seed=3)
    assert len(a) == 50 and a <= set(items)
    assert a == sample(items, 50, seed=3)
    assert sample(items, 5000) == set(items)
    assert sample(items, 0) == frozenset()


def test_ingest_pipeline():
    g, rep, skipped = ingest(io.BytesIO(DOC), IngestConfig(max_atom_len=10, sample_size=3, seed=1))
    assert skipped == 3 and len(g) <= 3
    assert all(len(a) <= 10 for t in g for a in t)
