"""Canonical sorted-run file: the bulk-load input format.

Layout (little-endian)::

    magic       8s  b"RDFRUN01"
    atom_width  u16
    count       u64
    count x (s p o), each atom right-padded with 0x00 to atom_width,
    sorted bytewise in SPO order.
"""
from __future__ import annotations

import struct
from typing import BinaryIO, Iterable, List

from .model import Graph, Triple
from .triplet import check_atoms

RUN_MAGIC = b"RDFRUN01"
_HEAD = struct.Struct("<8sHQ")


def write_run(f: BinaryIO, triples: Iterable[Triple], atom_width: int) -> int:
    ts = sorted(set(triples))
    check_atoms(ts, atom_width)
    f.write(_HEAD.pack(RUN_MAGIC, atom_width, len(ts)))
    for t in ts:
        f.write(b"".join(a.ljust(atom_width, b"\x00") for a in t))
    return len(ts)


def read_run(f: BinaryIO) -> List[Triple]:
    head = f.read(_HEAD.size)
    if len(head) != _HEAD.size:
        raise ValueError("truncated run file header")
    magic, w, count = _HEAD.unpack(head)
    if magic != RUN_MAGIC:
        raise ValueError("not a run file")
    rec = 3 * w
    out = []
    for _ in range(count):
        raw = f.read(rec)
        if len(raw) != rec:
            raise ValueError("truncated run file body")
        out.append(Triple(*(raw[i * w : (i + 1) * w].rstrip(b"\x00") for i in range(3))))
    return out


def save_run(path: str, g: Graph, atom_width: int) -> int:
    with open(path, "wb") as f:
        return write_run(f, g, atom_width)


def load_run(path: str) -> Graph:
    with open(path, "rb") as f:
        return frozenset(read_run(f))


def is_run_file(path: str) -> bool:
    with open(path, "rb") as f:
        return f.read(8) == RUN_MAGIC
