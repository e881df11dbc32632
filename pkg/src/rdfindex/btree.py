"""B+tree over fixed-width byte keys stored in a :class:`~rdfindex.pager.PageStore`.

Node layout (little-endian)::

    header   u8 node_type (1 leaf, 2 interior), u16 count, u32 right_sibling
    leaf     count x (key[key_width] value[value_width]) packed from offset 7
    interior child ids u32 x fanout from offset 7, then keys x (fanout - 1);
             count is the number of keys, children = count + 1

Keys shorter than ``key_width`` are right-padded with 0x00.
"""
from __future__ import annotations

import bisect
import struct
from typing import Iterable, Iterator, List, Optional, Tuple

from .pager import PageStore, TreeEntry

LEAF = 1
INTERIOR = 2
NODE_HEADER = struct.Struct("<BHI")
NODE_HEADER_SIZE = NODE_HEADER.size
_U32 = struct.Struct("<I")


class DuplicateKeyError(KeyError):
    pass


def interior_fanout(block_size: int, key_width: int) -> int:
    return (block_size - NODE_HEADER_SIZE) // (key_width + 4)


def leaf_capacity(block_size: int, key_width: int, value_width: int) -> int:
    return (block_size - NODE_HEADER_SIZE) // (key_width + value_width)


def chunk_sizes(n: int, cap: int) -> List[int]:
    """Split ``n`` entries into nodes of at most ``cap``, none but a lone root under half full."""
    if n == 0:
        return []
    sizes = [cap] * (n // cap)
    if n % cap:
        sizes.append(n % cap)
    if len(sizes) > 1 and sizes[-1] < (cap + 1) // 2:
        both = sizes[-2] + sizes[-1]
        sizes[-2:] = [(both + 1) // 2, both // 2]
    return sizes


class _Node:
    __slots__ = ("kind", "keys", "values", "children", "sibling")

    def __init__(self, kind, keys, values=None, children=None, sibling=0):
        self.kind = kind
        self.keys = keys
        self.values = values
        self.children = children
        self.sibling = sibling


class BTree:
    def __init__(self, store: PageStore, name: str):
        if name not in store.directory:
            raise KeyError(f"no tree named {name!r} in store")
        self.store = store
        self.name = name
        e = store.directory[name]
        self.key_width = e.key_width
        self.value_width = e.value_width
        bs = store.block_size
        self.fanout = interior_fanout(bs, self.key_width)
        self.leaf_cap = leaf_capacity(bs, self.key_width, self.value_width)

    @property
    def entry(self) -> TreeEntry:
        return self.store.directory[self.name]

    @property
    def height(self) -> int:
        """Root-to-leaf path length in pages; equals the reads of one lookup."""
        return self.entry.height

    def __len__(self) -> int:
        return self.entry.count

    @staticmethod
    def _check_config(store: PageStore, key_width: int, value_width: int) -> None:
        if key_width < 1 or value_width < 0:
            raise ValueError("key_width must be >= 1 and value_width >= 0")
        if interior_fanout(store.block_size, key_width) < 3:
            raise ValueError(f"key_width {key_width} leaves interior fan-out below 3")
        if leaf_capacity(store.block_size, key_width, value_width) < 2:
            raise ValueError("leaf holds fewer than two entries")

    @classmethod
    def create(cls, store: PageStore, name: str, key_width: int, value_width: int) -> "BTree":
        cls._check_config(store, key_width, value_width)
        if name in store.directory:
            raise ValueError(f"tree {name!r} already exists")
        root = store.alloc()
        tree_entry = TreeEntry(root, key_width, value_width, 1, 0)
        store.set_tree(name, tree_entry)
        tree = cls(store, name)
        tree._write(root, _Node(LEAF, [], []))
        return tree

    @classmethod
    def bulk_load(
        cls, store: PageStore, name: str, key_width: int, value_width: int, items: Iterable[Tuple[bytes, bytes]]
    ) -> "BTree":
        """Build from entries in strictly ascending key order, leaves 100% full."""
        cls._check_config(store, key_width, value_width)
        if name in store.directory:
            raise ValueError(f"tree {name!r} already exists")
        bs = store.block_size
        cap = leaf_capacity(bs, key_width, value_width)
        fan = interior_fanout(bs, key_width)
        keys: List[bytes] = []
        values: List[bytes] = []
        prev = None
        for k, v in items:
            k = _pad(k, key_width)
            if prev is not None and k <= prev:
                raise ValueError("bulk_load input must be strictly ascending")
            if len(v) != value_width:
                raise ValueError(f"value must be {value_width} bytes")
            keys.append(k)
            values.append(v)
            prev = k
        if not keys:
            return cls.create(store, name, key_width, value_width)

        sizes = chunk_sizes(len(keys), cap)
        pids = [store.alloc() for _ in sizes]
        level: List[Tuple[bytes, int]] = []
        pos = 0
        for i, (size, pid) in enumerate(zip(sizes, pids)):
            sibling = pids[i + 1] if i + 1 < len(pids) else 0
            buf = bytearray(bs)
            NODE_HEADER.pack_into(buf, 0, LEAF, size, sibling)
            off = NODE_HEADER_SIZE
            for j in range(pos, pos + size):
                buf[off : off + key_width] = keys[j]
                off += key_width
                buf[off : off + value_width] = values[j]
                off += value_width
            store.write(pid, bytes(buf))
            level.append((keys[pos], pid))
            pos += size

        height = 1
        while len(level) > 1:
            upper: List[Tuple[bytes, int]] = []
            pos = 0
            for size in chunk_sizes(len(level), fan):
                group = level[pos : pos + size]
                pid = store.alloc()
                node = _Node(INTERIOR, [k for k, _ in group[1:]], children=[c for _, c in group])
                _write_node(store, pid, node, key_width, value_width, fan)
                upper.append((group[0][0], pid))
                pos += size
            level = upper
            height += 1

        store.set_tree(name, TreeEntry(level[0][1], key_width, value_width, height, len(keys)))
        return cls(store, name)

    # node io

    def _read(self, pid: int) -> _Node:
        return _read_node(self.store.read(pid), self.key_width, self.value_width, self.fanout)

    def _write(self, pid: int, node: _Node) -> None:
        _write_node(self.store, pid, node, self.key_width, self.value_width, self.fanout)

    # operations

    def lookup(self, key: bytes) -> Optional[bytes]:
        key = _pad(key, self.key_width)
        node = self._read(self.entry.root)
        while node.kind == INTERIOR:
            node = self._read(node.children[bisect.bisect_right(node.keys, key)])
        i = bisect.bisect_left(node.keys, key)
        if i < len(node.keys) and node.keys[i] == key:
            return node.values[i]
        return None

    def prefix_scan(self, prefix: bytes = b"") -> Iterator[Tuple[bytes, bytes]]:
        """Yield ``(key, value)`` for every key starting with ``prefix``, in key order."""
        if len(prefix) > self.key_width:
            raise ValueError("prefix longer than key_width")
        lo = _pad(prefix, self.key_width)
        node = self._read(self.entry.root)
        while node.kind == INTERIOR:
            node = self._read(node.children[bisect.bisect_right(node.keys, lo)])
        i = bisect.bisect_left(node.keys, lo)
        while True:
            for j in range(i, len(node.keys)):
                k = node.keys[j]
                if not k.startswith(prefix):
                    return
                yield k, node.values[j]
            if not node.sibling:
                return
            node = self._read(node.sibling)
            i = 0

    def scan(self) -> Iterator[Tuple[bytes, bytes]]:
        return self.prefix_scan(b"")

    def insert(self, key: bytes, value: bytes) -> None:
        if len(value) != self.value_width:
            raise ValueError(f"value must be {self.value_width} bytes")
        key = _pad(key, self.key_width)
        e = self.entry
        split = self._insert(e.root, key, value)
        if split is not None:
            sep, right = split
            new_root = self.store.alloc()
            self._write(new_root, _Node(INTERIOR, [sep], children=[e.root, right]))
            e = TreeEntry(new_root, e.key_width, e.value_width, e.height + 1, e.count)
        e = TreeEntry(e.root, e.key_width, e.value_width, e.height, e.count + 1)
        self.store.set_tree(self.name, e)

    def _insert(self, pid: int, key: bytes, value: bytes) -> Optional[Tuple[bytes, int]]:
        node = self._read(pid)
        if node.kind == LEAF:
            i = bisect.bisect_left(node.keys, key)
            if i < len(node.keys) and node.keys[i] == key:
                raise DuplicateKeyError(key)
            node.keys.insert(i, key)
            node.values.insert(i, value)
            if len(node.keys) <= self.leaf_cap:
                self._write(pid, node)
                return None
            mid = len(node.keys) // 2
            right_pid = self.store.alloc()
            right = _Node(LEAF, node.keys[mid:], node.values[mid:], sibling=node.sibling)
            left = _Node(LEAF, node.keys[:mid], node.values[:mid], sibling=right_pid)
            self._write(right_pid, right)
            self._write(pid, left)
            return right.keys[0], right_pid

        i = bisect.bisect_right(node.keys, key)
        split = self._insert(node.children[i], key, value)
        if split is None:
            return None
        sep, right_child = split
        node.keys.insert(i, sep)
        node.children.insert(i + 1, right_child)
        if len(node.children) <= self.fanout:
            self._write(pid, node)
            return None
        mid = len(node.keys) // 2
        promoted = node.keys[mid]
        right_pid = self.store.alloc()
        self._write(right_pid, _Node(INTERIOR, node.keys[mid + 1 :], children=node.children[mid + 1 :]))
        self._write(pid, _Node(INTERIOR, node.keys[:mid], children=node.children[: mid + 1]))
        return promoted, right_pid

    def walk(self) -> Iterator[Tuple[int, int, str, int]]:
        """Yield ``(pid, depth, kind, fill)`` for every node; test and audit helper."""
        stack = [(self.entry.root, 1)]
        while stack:
            pid, depth = stack.pop()
            node = self._read(pid)
            if node.kind == LEAF:
                yield pid, depth, "leaf", len(node.keys)
            else:
                yield pid, depth, "interior", len(node.children)
                stack.extend((c, depth + 1) for c in reversed(node.children))


def _pad(key: bytes, width: int) -> bytes:
    if len(key) > width:
        raise ValueError(f"key of {len(key)} bytes exceeds key_width={width}")
    return key + b"\x00" * (width - len(key))


def _read_node(buf: bytes, kw: int, vw: int, fanout: int) -> _Node:
    kind, count, sibling = NODE_HEADER.unpack_from(buf, 0)
    if kind == LEAF:
        step = kw + vw
        base = NODE_HEADER_SIZE
        keys = [buf[base + i * step : base + i * step + kw] for i in range(count)]
        values = [buf[base + i * step + kw : base + (i + 1) * step] for i in range(count)]
        return _Node(LEAF, keys, values, sibling=sibling)
    if kind != INTERIOR:
        raise ValueError(f"corrupt node type {kind}")
    base = NODE_HEADER_SIZE
    children = list(struct.unpack_from(f"<{count + 1}I", buf, base))
    kbase = base + 4 * fanout
    keys = [buf[kbase + i * kw : kbase + (i + 1) * kw] for i in range(count)]
    return _Node(INTERIOR, keys, children=children)


def _write_node(store: PageStore, pid: int, node: _Node, kw: int, vw: int, fanout: int) -> None:
    buf = bytearray(store.block_size)
    if node.kind == LEAF:
        NODE_HEADER.pack_into(buf, 0, LEAF, len(node.keys), node.sibling)
        off = NODE_HEADER_SIZE
        for k, v in zip(node.keys, node.values):
            buf[off : off + kw] = k
            buf[off + kw : off + kw + vw] = v
            off += kw + vw
    else:
        NODE_HEADER.pack_into(buf, 0, INTERIOR, len(node.keys), 0)
        struct.pack_into(f"<{len(node.children)}I", buf, NODE_HEADER_SIZE, *node.children)
        kbase = NODE_HEADER_SIZE + 4 * fanout
        for i, k in enumerate(node.keys):
            buf[kbase + i * kw : kbase + (i + 1) * kw] = k
    store.write(pid, bytes(buf))
