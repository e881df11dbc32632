import pytest

from rdfindex.model import (
    BGP, SAP, BindingSet, JoinType, Role, Triple, Variable, graph, join_types, make_atom, matches, role_sets,
)


def test_make_atom_validates():
    assert make_atom("abc") == b"abc"
    assert make_atom(b"\xff") == b"\xff"
    with pytest.raises(ValueError):
        make_atom("")
    with pytest.raises(ValueError):
        make_atom("x" * 65)
    with pytest.raises(TypeError):
        make_atom(3)


def test_graph_has_set_semantics():
    g = graph([("a", "b", "c"), ("a", "b", "c"), (b"a", b"b", b"c")])
    assert g == {Triple(b"a", b"b", b"c")}


def test_role_sets_docs(docs):
    st = role_sets(docs)
    assert (st.triples, st.subjects, st.predicates, st.objects, st.atoms) == (12, 7, 8, 10, 19)
    assert (st.subject_object, st.subject_predicate, st.predicate_object) == (4, 1, 1)


def test_role_sets_empty():
    st = role_sets([])
    assert st.triples == 0 and st.mean_atom_len == 0.0


def test_sap_parse_and_parts():
    sap = SAP.parse("?x", "knows", "?x")
    assert sap.variables() == ("x",)
    assert sap.constants() == {Role.P: b"knows"}
    assert str(sap) == "?x knows ?x"


def test_bgp_rejects_empty():
    with pytest.raises(ValueError):
        BGP(())


def test_matches_repeated_variable():
    sap = SAP.parse("?x", "p", "?x")
    assert matches((b"a", b"p", b"a"), sap) == {"x": b"a"}
    assert matches((b"a", b"p", b"b"), sap) is None
    assert matches((b"a", b"q", b"a"), sap) is None


def test_join_types_enumerates_shared_positions():
    a = SAP.parse("?doc", "type", "MP3")
    b = SAP.parse("Herzog", "authored", "?doc")
    edges = join_types(a, b)
    assert {(e.type, e.kind) for e in edges} == {(JoinType.SO, "variable")}
    c = SAP.parse("authored", "x", "y")
    d = SAP.parse("Yamada", "authored", "?z")
    assert {e.type for e in join_types(c, d)} == {JoinType.SP}
    assert JoinType.from_roles(Role.O, Role.P) is JoinType.PO


def test_binding_set_equality_ignores_column_order():
    a = BindingSet(("x", "y"), [(b"1", b"2")])
    b = BindingSet(("y", "x"), [(b"2", b"1")])
    assert a == b
    assert a != BindingSet(("x", "y"), [(b"2", b"1")])


def test_binding_set_project_and_unit():
    bs = BindingSet.from_dicts(["y", "x"], [{"x": b"1", "y": b"2"}, {"x": b"1", "y": b"3"}])
    assert bs.variables == ("x", "y")
    assert bs.project(["x"]).rows == {(b"1",)}
    assert len(BindingSet.unit()) == 1
    with pytest.raises(ValueError):
        bs.project(["z"])


def test_variable_needs_name():
    with pytest.raises(ValueError):
        Variable("")
