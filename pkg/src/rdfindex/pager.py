"""Fixed-size block storage with 32-bit page ids and exact read metering.

Page id 0 is null. Page 1 is the header, stored at file offset 0; page ``i``
lives at offset ``(i - 1) * block_size``.

Header layout (little-endian)::

    magic      8s   b"RDFIDX01"
    version    u16
    block_size u32
    allocated  u32
    n_entries  u16
    entries    n_entries x DIR_ENTRY

    DIR_ENTRY: name 16s, root u32, key_width u16, value_width u16,
               height u8, count u64
"""
from __future__ import annotations

import os
import struct
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, Optional

MAGIC = b"RDFIDX01"
VERSION = 1
DEFAULT_BLOCK_SIZE = 8192
MAX_PAGE_ID = 2**32 - 1

_HEADER = struct.Struct("<8sHIIH")
_DIR_ENTRY = struct.Struct("<16sIHHBQ")


class PagerError(Exception):
    pass


@dataclass(frozen=True)
class IoStats:
    reads: int = 0
    writes: int = 0
    allocated: int = 0

    def __sub__(self, other: "IoStats") -> "IoStats":
        return IoStats(self.reads - other.reads, self.writes - other.writes, self.allocated - other.allocated)


@dataclass
class TreeEntry:
    """Directory record for one named B+tree in a page file."""

    root: int
    key_width: int
    value_width: int
    height: int = 1
    count: int = 0


class PageStore:
    """A page file (or an in-memory one when ``path`` is None).

    With ``cache_blocks == 0`` (metered mode) every :meth:`read` call is one
    counted block read. A positive cache size enables an LRU cache and then
    only misses are counted; benchmark runs never use it.
    """

    def __init__(self, path: Optional[str], block_size: int, *, _create: bool, cache_blocks: int = 0):
        if block_size < 512 or block_size & (block_size - 1) or block_size > 65536:
            raise PagerError(f"block_size must be a power of two in [512, 65536], got {block_size}")
        self.path = path
        self.block_size = block_size
        self.cache_blocks = cache_blocks
        self._cache: "OrderedDict[int, bytes]" = OrderedDict()
        self._mem: Dict[int, bytes] = {}
        self._file = None
        self.directory: Dict[str, TreeEntry] = {}
        self._reads = 0
        self._writes = 0
        self._allocated = 1
        if path is not None:
            mode = "w+b" if _create else "r+b"
            self._file = open(path, mode)
        if _create:
            self._write_header()
        else:
            self._load_header()

    @classmethod
    def create(cls, path: Optional[str] = None, block_size: int = DEFAULT_BLOCK_SIZE, cache_blocks: int = 0) -> "PageStore":
        if path is not None and os.path.exists(path) and os.path.getsize(path) > 0:
            with open(path, "rb") as f:
                head = f.read(_HEADER.size)
            if len(head) < _HEADER.size or head[:8] != MAGIC:
                raise PagerError(f"{path}: refusing to overwrite a file that is not a page file")
            if _HEADER.unpack(head)[2] != block_size:
                raise PagerError(f"{path}: existing page file has a different block_size")
        return cls(path, block_size, _create=True, cache_blocks=cache_blocks)

    @classmethod
    def open(cls, path: str, block_size: Optional[int] = None, cache_blocks: int = 0) -> "PageStore":
        with open(path, "rb") as f:
            head = f.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise PagerError(f"{path}: truncated header")
        magic, _version, stored_bs, _alloc, _n = _HEADER.unpack(head)
        if magic != MAGIC:
            raise PagerError(f"{path}: bad magic {magic!r}")
        if block_size is not None and block_size != stored_bs:
            raise PagerError(f"{path}: block_size {stored_bs} does not match requested {block_size}")
        return cls(path, stored_bs, _create=False, cache_blocks=cache_blocks)

    # raw page access, unmetered

    def _raw_read(self, pid: int) -> bytes:
        if self._file is None:
            return self._mem.get(pid, bytes(self.block_size))
        self._file.seek((pid - 1) * self.block_size)
        data = self._file.read(self.block_size)
        return data.ljust(self.block_size, b"\x00")

    def _raw_write(self, pid: int, data: bytes) -> None:
        if self._file is None:
            self._mem[pid] = bytes(data)
        else:
            self._file.seek((pid - 1) * self.block_size)
            self._file.write(data)

    def _write_header(self) -> None:
        if len(self.directory) > 0xFFFF:
            raise PagerError("too many directory entries")
        buf = bytearray(self.block_size)
        _HEADER.pack_into(buf, 0, MAGIC, VERSION, self.block_size, self._allocated, len(self.directory))
        off = _HEADER.size
        for name, e in self.directory.items():
            raw = name.encode("ascii")
            if len(raw) > 16:
                raise PagerError(f"tree name {name!r} longer than 16 bytes")
            if off + _DIR_ENTRY.size > self.block_size:
                raise PagerError("directory does not fit in the header page")
            _DIR_ENTRY.pack_into(buf, off, raw, e.root, e.key_width, e.value_width, e.height, e.count)
            off += _DIR_ENTRY.size
        self._raw_write(1, bytes(buf))

    def _load_header(self) -> None:
        buf = self._raw_read(1)
        magic, version, bs, allocated, n = _HEADER.unpack_from(buf, 0)
        if magic != MAGIC or bs != self.block_size:
            raise PagerError("header mismatch")
        if version != VERSION:
            raise PagerError(f"unsupported page file version {version}")
        self._allocated = allocated
        off = _HEADER.size
        for _ in range(n):
            raw, root, kw, vw, height, count = _DIR_ENTRY.unpack_from(buf, off)
            self.directory[raw.rstrip(b"\x00").decode("ascii")] = TreeEntry(root, kw, vw, height, count)
            off += _DIR_ENTRY.size

    # public interface

    def alloc(self) -> int:
        if self._allocated >= MAX_PAGE_ID:
            raise PagerError("page id space exhausted")
        self._allocated += 1
        return self._allocated

    def _check(self, pid: int) -> None:
        if not 1 <= pid <= self._allocated:
            raise PagerError(f"invalid page id {pid}")

    def read(self, pid: int) -> bytes:
        self._check(pid)
        if self.cache_blocks:
            hit = self._cache.get(pid)
            if hit is not None:
                self._cache.move_to_end(pid)
                return hit
        self._reads += 1
        data = self._raw_read(pid)
        if self.cache_blocks:
            self._cache[pid] = data
            if len(self._cache) > self.cache_blocks:
                self._cache.popitem(last=False)
        return data

    def write(self, pid: int, data: bytes) -> None:
        self._check(pid)
        if len(data) != self.block_size:
            raise PagerError(f"block must be exactly {self.block_size} bytes, got {len(data)}")
        self._writes += 1
        self._raw_write(pid, data)
        if self.cache_blocks and pid in self._cache:
            self._cache[pid] = bytes(data)

    def stats(self) -> IoStats:
        return IoStats(self._reads, self._writes, self._allocated)

    def reset_read_counter(self) -> IoStats:
        self._reads = 0
        return self.stats()

    def set_tree(self, name: str, entry: TreeEntry) -> None:
        self.directory[name] = entry
        self._write_header()

    def flush(self) -> None:
        self._write_header()
        if self._file is not None:
            # materialise trailing unwritten pages so reopen sees the full extent
            self._file.seek(0, os.SEEK_END)
            want = self._allocated * self.block_size
            if self._file.tell() < want:
                self._file.truncate(want)
            self._file.flush()

    def close(self) -> None:
        if self._file is not None and not self._file.closed:
            self.flush()
            self._file.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
