import pytest

from rdfindex.pager import IoStats, PageStore, PagerError, TreeEntry


def test_reads_are_counted_exactly():
    st = PageStore.create(block_size=512)
    pids = [st.alloc() for _ in range(3)]
    for p in pids:
        st.write(p, bytes([p]) * 512)
    st.reset_read_counter()
    for p in pids + pids:
        assert st.read(p) == bytes([p]) * 512
    assert st.stats().reads == 6


def test_reset_keeps_allocation_and_writes():
    st = PageStore.create()
    p = st.alloc()
    st.write(p, bytes(8192))
    st.read(p)
    s = st.reset_read_counter()
    assert s == IoStats(0, 1, 2)


def test_cache_counts_only_misses():
    st = PageStore.create(block_size=512, cache_blocks=2)
    pids = [st.alloc() for _ in range(3)]
    for p in pids:
        st.write(p, bytes(512))
    st.reset_read_counter()
    st.read(pids[0])
    st.read(pids[0])
    assert st.stats().reads == 1
    st.read(pids[1])
    st.read(pids[2])  # evicts pids[0]
    st.read(pids[0])
    assert st.stats().reads == 4


@pytest.mark.parametrize("bs", [0, 100, 1000, 131072])
def test_bad_block_size(bs):
    with pytest.raises(PagerError):
        PageStore.create(block_size=bs)


def test_write_size_and_page_ids_checked():
    st = PageStore.create(block_size=512)
    p = st.alloc()
    with pytest.raises(PagerError):
        st.write(p, b"short")
    with pytest.raises(PagerError):
        st.read(0)
    with pytest.raises(PagerError):
        st.read(p + 1)


def test_persist_and_reopen(tmp_path):
    path = str(tmp_path / "x.idx")
    with PageStore.create(path, block_size=1024) as st:
        p = st.alloc()
        st.write(p, b"\x07" * 1024)
        st.alloc()  # never written
        st.set_tree("t", TreeEntry(p, 8, 4, 1, 0))
    with PageStore.open(path) as st:
        assert st.block_size == 1024
        assert st.stats().allocated == 3
        assert st.directory["t"] == TreeEntry(2, 8, 4, 1, 0)
        assert st.read(2) == b"\x07" * 1024
        assert st.read(3) == bytes(1024)
    assert (tmp_path / "x.idx").stat().st_size == 3 * 1024


def test_open_rejects_foreign_files(tmp_path):
    junk = tmp_path / "junk"
    junk.write_bytes(b"hello world" * 100)
    with pytest.raises(PagerError):
        PageStore.open(str(junk))
    with pytest.raises(PagerError):
        PageStore.create(str(junk))
    good = tmp_path / "good"
    PageStore.create(str(good), block_size=512).close()
    with pytest.raises(PagerError):
        PageStore.open(str(good), block_size=1024)
    with pytest.raises(PagerError):
        PageStore.create(str(good), block_size=1024)


def test_tree_name_length_limit():
    st = PageStore.create()
    with pytest.raises(PagerError):
        st.set_tree("x" * 17, TreeEntry(2, 1, 1, 1, 0))
