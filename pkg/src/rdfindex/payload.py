"""Out-of-line payload heap shared by the TripleT and HexTree indexes.

Payloads are appended to a heap of consecutive pages. A payload no larger than
a block never straddles a page boundary: it goes at the current heap position
when it fits in the rest of the page, otherwise on a fresh page. Larger
payloads start page-aligned and run over consecutive pages. Reading a whole
payload of ``n`` bytes therefore costs exactly ``ceil(n / block_size)`` reads.

Atoms inside payloads are stored as ``varint(len) bytes``. A pair bucket is a
run of groups ``atom(first) varint(count) atom(second) * count`` sorted by
``(first, second)``; an atom list is a plain run of atoms.
"""
from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Sequence, Set, Tuple

from .pager import PageStore


def encode_varint(n: int) -> bytes:
    out = bytearray()
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def decode_varint(buf: bytes, pos: int) -> Tuple[int, int]:
    shift = result = 0
    while True:
        b = buf[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            return result, pos
        shift += 7


def encode_atom(atom: bytes) -> bytes:
    return encode_varint(len(atom)) + atom


def encode_atom_list(atoms: Iterable[bytes]) -> bytes:
    return b"".join(encode_atom(a) for a in atoms)


def decode_atom_list(buf: bytes) -> List[bytes]:
    out = []
    pos = 0
    while pos < len(buf):
        n, pos = decode_varint(buf, pos)
        out.append(buf[pos : pos + n])
        pos += n
    return out


def encode_pairs(pairs: Sequence[Tuple[bytes, bytes]]) -> bytes:
    """Encode pairs sorted by ``(first, second)``, grouping equal firsts."""
    out = bytearray()
    i = 0
    while i < len(pairs):
        first = pairs[i][0]
        j = i
        while j < len(pairs) and pairs[j][0] == first:
            j += 1
        out += encode_atom(first)
        out += encode_varint(j - i)
        for _, second in pairs[i:j]:
            out += encode_atom(second)
        i = j
    return bytes(out)


def decode_groups(buf: bytes) -> List[Tuple[bytes, List[bytes]]]:
    groups = []
    pos = 0
    while pos < len(buf):
        n, pos = decode_varint(buf, pos)
        first = buf[pos : pos + n]
        pos += n
        count, pos = decode_varint(buf, pos)
        seconds = []
        for _ in range(count):
            n, pos = decode_varint(buf, pos)
            seconds.append(buf[pos : pos + n])
            pos += n
        groups.append((first, seconds))
    return groups


def decode_pairs(buf: bytes) -> List[Tuple[bytes, bytes]]:
    return [(f, s) for f, seconds in decode_groups(buf) for s in seconds]


class HeapWriter:
    """Append-only payload heap; call :meth:`close` before allocating anything else."""

    def __init__(self, store: PageStore):
        self.store = store
        self.bs = store.block_size
        self._page = 0
        self._buf = bytearray()
        self.pages = 0

    def _flush(self) -> None:
        if self._page:
            self.store.write(self._page, bytes(self._buf.ljust(self.bs, b"\x00")))
            self._page = 0
            self._buf = bytearray()

    def _new_page(self) -> int:
        self.pages += 1
        return self.store.alloc()

    def append(self, data: bytes) -> Tuple[int, int]:
        """Store ``data``; return ``(first_page, offset)``."""
        if not data:
            raise ValueError("empty payload")
        if len(data) <= self.bs:
            if not self._page or len(self._buf) + len(data) > self.bs:
                self._flush()
                self._page = self._new_page()
            off = len(self._buf)
            self._buf += data
            return self._page, off
        self._flush()
        first = self._new_page()
        npages = -(-len(data) // self.bs)
        pids = [first] + [self._new_page() for _ in range(npages - 1)]
        for i, pid in enumerate(pids):
            if pid != first + i:
                raise RuntimeError("payload heap pages are not consecutive")
            self.store.write(pid, data[i * self.bs : (i + 1) * self.bs].ljust(self.bs, b"\x00"))
        return first, 0

    def close(self) -> None:
        self._flush()


def span_pages(page: int, offset: int, start: int, end: int, block_size: int) -> range:
    """Page ids covering bytes ``[start, end)`` of a payload at ``(page, offset)``."""
    if end <= start:
        return range(0)
    first = (offset + start) // block_size
    last = (offset + end - 1) // block_size
    return range(page + first, page + last + 1)


class PayloadReader:
    """Reads byte ranges of one stored payload, each page at most once."""

    def __init__(self, store: PageStore, page: int, offset: int, length: int):
        self.store = store
        self.page = page
        self.offset = offset
        self.length = length
        self._pages: Dict[int, bytes] = {}

    def read_range(self, start: int, end: int) -> bytes:
        bs = self.store.block_size
        pids = span_pages(self.page, self.offset, start, end, bs)
        for pid in pids:
            if pid not in self._pages:
                self._pages[pid] = self.store.read(pid)
        if not pids:
            return b""
        raw = b"".join(self._pages[p] for p in pids)
        base = (self.offset + start) - (pids.start - self.page) * bs
        return raw[base : base + (end - start)]

    @property
    def pages_read(self) -> Set[int]:
        return set(self._pages)


def iter_runs(items: Iterable[Tuple[bytes, bytes]]) -> Iterator[Tuple[bytes, List[bytes]]]:
    """Group an iterable of ``(key, x)`` sorted by key into ``(key, [x...])``."""
    cur = None
    acc: List[bytes] = []
    for k, x in items:
        if k != cur:
            if acc:
                yield cur, acc
            cur, acc = k, []
        acc.append(x)
    if acc:
        yield cur, acc
