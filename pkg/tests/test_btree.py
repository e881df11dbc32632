import random

import pytest
from hypothesis import given, settings, strategies as st

from rdfindex.btree import BTree, DuplicateKeyError, chunk_sizes, interior_fanout, leaf_capacity
from rdfindex.pager import PageStore


def _key(i):
    return i.to_bytes(8, "big")


def test_geometry_arithmetic():
    assert interior_fanout(8192, 64) == 120
    assert interior_fanout(8192, 128) == 62
    assert interior_fanout(8192, 192) == 41
    assert leaf_capacity(8192, 64, 18) == 99
    assert leaf_capacity(8192, 192, 0) == 42


@given(st.integers(1, 5000), st.integers(2, 200))
def test_chunk_sizes(n, cap):
    sizes = chunk_sizes(n, cap)
    assert sum(sizes) == n
    assert len(sizes) == -(-n // cap)
    assert all(s <= cap for s in sizes)
    if len(sizes) > 1:
        assert all(s >= (cap + 1) // 2 for s in sizes)


def test_empty_tree():
    store = PageStore.create(block_size=512)
    t = BTree.create(store, "t", 8, 2)
    assert t.height == 1 and len(t) == 0
    assert t.lookup(b"x") is None
    assert list(t.scan()) == []
    t2 = BTree.bulk_load(store, "u", 8, 2, [])
    assert t2.height == 1


@pytest.mark.parametrize("n", [1, 50, 51, 2000, 30000])
def test_bulk_load_height_and_lookup_cost(n):
    store = PageStore.create(block_size=512)
    items = [(_key(i * 3), (i % 65536).to_bytes(2, "little")) for i in range(n)]
    t = BTree.bulk_load(store, "t", 8, 2, items)
    cap, fan = leaf_capacity(512, 8, 2), interior_fanout(512, 8)
    nodes, height = -(-n // cap), 1
    while nodes > 1:
        nodes, height = -(-nodes // fan), height + 1
    assert t.height == height
    rng = random.Random(n)
    for i in rng.sample(range(n), min(n, 50)):
        before = store.stats().reads
        assert t.lookup(_key(i * 3)) == (i % 65536).to_bytes(2, "little")
        assert store.stats().reads - before == height
        assert t.lookup(_key(i * 3 + 1)) is None
    depths = {d for _, d, kind, _ in t.walk() if kind == "leaf"}
    assert depths == {height}
    assert [k for k, _ in t.scan()] == [k for k, _ in items]


def test_bulk_load_requires_strict_order():
    store = PageStore.create(block_size=512)
    with pytest.raises(ValueError):
        BTree.bulk_load(store, "t", 8, 0, [(_key(2), b""), (_key(1), b"")])
    with pytest.raises(ValueError):
        BTree.bulk_load(store, "u", 8, 0, [(_key(1), b""), (_key(1), b"")])


def test_insert_rejects_duplicates_and_bad_values():
    store = PageStore.create(block_size=512)
    t = BTree.create(store, "t", 8, 1)
    t.insert(b"a", b"1")
    with pytest.raises(DuplicateKeyError):
        t.insert(b"a", b"2")
    with pytest.raises(ValueError):
        t.insert(b"b", b"22")


@settings(max_examples=30, deadline=None)
@given(st.lists(st.binary(min_size=1, max_size=6).filter(lambda b: not b.endswith(b"\x00")), unique=True, max_size=600))
def test_insert_matches_sorted_dict(keys):
    store = PageStore.create(block_size=512)
    t = BTree.create(store, "t", 6, 2)
    for i, k in enumerate(keys):
        t.insert(k, (i % 65536).to_bytes(2, "little"))
    got = [(k.rstrip(b"\x00"), v) for k, v in t.scan()]
    want = sorted((k, (i % 65536).to_bytes(2, "little")) for i, k in enumerate(keys))
    assert got == want
    assert len(t) == len(keys)
    assert {d for _, d, kind, _ in t.walk() if kind == "leaf"} == {t.height}
    for k, v in want[:20]:
        assert t.lookup(k) == v


def test_prefix_scan():
    store = PageStore.create(block_size=512)
    items = sorted((bytes([a, b]), b"") for a in range(1, 30) for b in range(1, 30))
    t = BTree.bulk_load(store, "t", 2, 0, items)
    got = [k for k, _ in t.prefix_scan(bytes([7]))]
    assert got == [bytes([7, b]) for b in range(1, 30)]
    assert list(t.prefix_scan(bytes([99]))) == []
    with pytest.raises(ValueError):
        list(t.prefix_scan(b"abc"))


def test_tree_survives_reopen(tmp_path):
    path = str(tmp_path / "t.idx")
    store = PageStore.create(path, block_size=512)
    BTree.bulk_load(store, "t", 8, 0, [(_key(i), b"") for i in range(1000)])
    store.close()
    store = PageStore.open(path)
    t = BTree(store, "t")
    assert len(t) == 1000 and t.lookup(_key(999)) == b""


def test_config_checks():
    store = PageStore.create(block_size=512)
    with pytest.raises(ValueError):
        BTree.create(store, "t", 200, 0)
    with pytest.raises(KeyError):
        BTree(store, "missing")
