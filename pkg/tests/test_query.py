import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import DOCS_QUERY
from rdfindex import build_index
from rdfindex.joins import merge_join
from rdfindex.model import BGP, SAP, BindingSet, Triple, Variable
from rdfindex.query import eval_bgp, eval_k1, k1_shape_error, oracle_eval, plan_bgp
from rdfindex.sparql import parse_bgp


def test_merge_join_natural():
    left = BindingSet(("a", "b"), [(b"1", b"x"), (b"2", b"y"), (b"2", b"z")])
    right = BindingSet(("b", "c"), [(b"y", b"p"), (b"z", b"q"), (b"w", b"r")])
    assert merge_join(left, right) == BindingSet(("a", "b", "c"), [(b"2", b"y", b"p"), (b"2", b"z", b"q")])


def test_merge_join_cross_product_and_unit():
    left = BindingSet(("a",), [(b"1",), (b"2",)])
    right = BindingSet(("b",), [(b"x",)])
    assert len(merge_join(left, right)) == 2
    assert merge_join(BindingSet.unit(), left) == left
    assert len(merge_join(left, BindingSet(("a",)))) == 0


def test_docs_query_all_families(docs_index):
    bgp, select = parse_bgp(DOCS_QUERY)
    res = eval_bgp(docs_index, bgp, select)
    assert res.bindings.as_dicts() == [{"date": b"26.10.08", "type": b"MP3"}]
    assert res.cost.reads > 0
    assert res.plan.root.reads == res.cost.reads


def test_docs_query_oracle_binds_doc3(docs):
    bgp, _ = parse_bgp(DOCS_QUERY)
    assert [r["doc"] for r in oracle_eval(docs, bgp)] == [b"doc3"]


def test_select_must_be_bound(docs_index):
    with pytest.raises(ValueError):
        eval_bgp(docs_index, BGP((SAP.parse("?s", "type", "?o"),)), ["zz"])


def test_triplet_plan_groups_shared_atoms(docs):
    tt = build_index("triplet", docs)
    bgp = BGP((SAP.parse("?a", "authored", "?d"), SAP.parse("?d", "type", "?t"), SAP.parse("McShea", "past_action", "authored")))
    plan = plan_bgp(tt, bgp)
    ops = [(s.op, s.saps) for s in plan.root.walk()]
    assert ("self_join", (0, 2)) in ops and ("lookup", (1,)) in ops
    res = eval_bgp(tt, bgp)
    assert res.bindings == oracle_eval(docs, bgp)
    assert sum(s.descents for s in res.plan.root.walk()) == 2


def test_plan_flags_scans(docs):
    for fam in ("triplet", "map", "hex"):
        plan = plan_bgp(build_index(fam, docs), BGP((SAP.parse("?s", "?p", "?o"),)))
        assert [s.op for s in plan.scans] == ["scan"]


def test_plan_render_and_json(docs):
    res = eval_bgp(build_index("hex", docs), parse_bgp(DOCS_QUERY)[0])
    text = res.plan.render()
    assert text.splitlines()[0].startswith("merge_join[0,1,2]")
    assert "reads=" in text
    assert json.loads(res.plan.to_json())["op"] == "merge_join"


def test_k1_shapes():
    v = "?v"
    assert k1_shape_error(1, SAP.parse("a", "b", "c"), SAP.parse("a", "d", "e")) is None
    assert k1_shape_error(1, SAP.parse("a", "b", "c"), SAP.parse("x", "d", "e"))
    assert k1_shape_error(2, SAP.parse("a", "b", "c"), SAP.parse("a", "d", v)) is None
    assert k1_shape_error(3, SAP.parse("a", "b", v), SAP.parse(v, "d", "e")) is None
    assert k1_shape_error(3, SAP.parse("a", "b", v), SAP.parse(v, "b", "e"))
    assert k1_shape_error(4, SAP.parse("a", "b", v), SAP.parse(v, "b", "e")) is None
    assert k1_shape_error(4, SAP.parse("a", "b", v), SAP.parse("?w", "b", "e"))
    assert k1_shape_error(9, SAP.parse("a", "b", "c"), SAP.parse("a", "b", "c"))


def test_eval_k1_scenario4_docs(docs_index, docs):
    pair = (SAP.parse("?doc", "created_on", "26.10.08"), SAP.parse("?doc", "type", "MP3"))
    with pytest.raises(ValueError):
        eval_k1(docs_index, 4, pair)  # no shared atom
    pair = (SAP.parse("Herzog", "authored", "?doc"), SAP.parse("?doc", "authored", "x"))
    assert eval_k1(docs_index, 4, pair).bindings == oracle_eval(docs, BGP(pair))


ATOMS = [b"a", b"b", b"c", b"d"]
terms = st.one_of(st.sampled_from(ATOMS), st.sampled_from([Variable("x"), Variable("y")]))
saps = st.builds(SAP, terms, terms, terms)


@settings(max_examples=60, deadline=None)
@given(
    st.sets(st.tuples(*[st.sampled_from(ATOMS)] * 3), min_size=1, max_size=40),
    st.lists(saps, min_size=1, max_size=3),
)
def test_all_families_agree_with_oracle(raw, pattern):
    g = frozenset(Triple(*t) for t in raw)
    bgp = BGP(tuple(pattern))
    want = oracle_eval(g, bgp)
    for fam in ("triplet", "map", "hex"):
        assert eval_bgp(build_index(fam, g, atom_width=8, block_size=512), bgp).bindings == want
