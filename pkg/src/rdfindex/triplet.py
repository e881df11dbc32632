"""The TripleT index: one B+tree over every atom, regardless of role.

Each key's payload holds three buckets of atom pairs::

    S bucket  (o, p) for every (k, p, o)   sorted OP
    P bucket  (s, o) for every (s, k, o)   sorted SO
    O bucket  (s, p) for every (s, p, k)   sorted SP

Leaf value: u32 first payload page, u16 offset, u32 x 3 bucket byte lengths.
The lengths let a query fetch only the pages of the buckets it needs.
"""
from __future__ import annotations

import bisect
import struct
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .btree import BTree
from .joins import merge_join
from .model import SAP, BindingSet, Role, Triple, Variable, matches
from .pager import PageStore
from .payload import HeapWriter, PayloadReader, decode_groups, decode_pairs, encode_pairs, span_pages

TREE_NAME = "triplet"
VALUE = struct.Struct("<IHIII")

# bucket role -> (role of the leading pair component, role of the trailing one)
BUCKET_ORDER = {Role.S: (Role.O, Role.P), Role.P: (Role.S, Role.O), Role.O: (Role.S, Role.P)}
ROLE_PRIORITY = {Role.S: 0, Role.O: 1, Role.P: 2}


def check_atoms(triples: Iterable[Triple], atom_width: int) -> None:
    for t in triples:
        for a in t:
            if not a or len(a) > atom_width or b"\x00" in a:
                raise ValueError(f"atom {a[:40]!r}... does not fit a {atom_width}-byte key (clean it first)")


@dataclass(frozen=True)
class Payload:
    s_bucket: Tuple[Tuple[bytes, bytes], ...]
    p_bucket: Tuple[Tuple[bytes, bytes], ...]
    o_bucket: Tuple[Tuple[bytes, bytes], ...]

    def bucket(self, role: Role):
        return (self.s_bucket, self.p_bucket, self.o_bucket)[role]

    def triples(self, key: bytes) -> List[Triple]:
        out = [Triple(key, p, o) for o, p in self.s_bucket]
        out += [Triple(s, key, o) for s, o in self.p_bucket]
        out += [Triple(s, p, key) for s, p in self.o_bucket]
        return out


class LoadedPayload:
    """A payload located by one tree descent; bucket pages are read on demand."""

    def __init__(self, store: PageStore, key: bytes, value: bytes):
        page, offset, *lens = VALUE.unpack(value)
        self.key = key
        self.lens = lens
        self.reader = PayloadReader(store, page, offset, sum(lens))
        self._groups: Dict[Role, list] = {}

    def bucket_range(self, role: Role) -> Tuple[int, int]:
        start = sum(self.lens[:role])
        return start, start + self.lens[role]

    def groups(self, role: Role) -> List[Tuple[bytes, List[bytes]]]:
        if role not in self._groups:
            self._groups[role] = decode_groups(self.reader.read_range(*self.bucket_range(role)))
        return self._groups[role]

    def match(self, role: Role, sap: SAP) -> BindingSet:
        """Bindings of ``sap`` among the triples of this key's ``role`` bucket."""
        first_role, second_role = BUCKET_ORDER[role]
        groups = self.groups(role)
        lead = sap[first_role]
        if not isinstance(lead, Variable):
            i = bisect.bisect_left([g[0] for g in groups], lead)
            groups = groups[i : i + 1] if i < len(groups) and groups[i][0] == lead else []
        rows = []
        t = [b""] * 3
        t[role] = self.key
        for first, seconds in groups:
            t[first_role] = first
            for second in seconds:
                t[second_role] = second
                m = matches(t, sap)
                if m is not None:
                    rows.append(m)
        return BindingSet.from_dicts(sap.variables(), rows)


class TripleTIndex:
    family = "triplet"

    def __init__(self, store: PageStore):
        self.store = store
        self.tree = BTree(store, TREE_NAME)
        self.atom_width = self.tree.key_width

    @classmethod
    def build(cls, g: Iterable[Triple], store: Optional[PageStore] = None, atom_width: int = 64) -> "TripleTIndex":
        store = store if store is not None else PageStore.create()
        g = list(g)
        check_atoms(g, atom_width)
        buckets: Dict[bytes, Tuple[list, list, list]] = {}
        for s, p, o in g:
            buckets.setdefault(s, ([], [], []))[0].append((o, p))
            buckets.setdefault(p, ([], [], []))[1].append((s, o))
            buckets.setdefault(o, ([], [], []))[2].append((s, p))
        heap = HeapWriter(store)
        entries = []
        for atom in sorted(buckets):
            enc = [encode_pairs(sorted(set(b))) for b in buckets[atom]]
            page, offset = heap.append(b"".join(enc))
            entries.append((atom, VALUE.pack(page, offset, *(len(e) for e in enc))))
        heap.close()
        BTree.bulk_load(store, TREE_NAME, atom_width, VALUE.size, entries)
        return cls(store)

    # access

    def fetch(self, key: bytes) -> Optional[LoadedPayload]:
        """One tree descent for ``key``; no payload pages are read yet."""
        if len(key) > self.atom_width or b"\x00" in key:
            # cannot be a stored atom; still pay the descent like any miss
            self.tree.lookup(b"")
            return None
        value = self.tree.lookup(key)
        return None if value is None else LoadedPayload(self.store, key, value)

    def payload(self, key: bytes) -> Optional[Payload]:
        lp = self.fetch(key)
        if lp is None:
            return None
        raw = lp.reader.read_range(0, lp.reader.length)
        parts = []
        for role in Role:
            a, b = lp.bucket_range(role)
            parts.append(tuple(decode_pairs(raw[a:b])))
        return Payload(*parts)

    def payload_pages(self, key: bytes) -> Optional[Dict[Role, range]]:
        """Pages each bucket of ``key`` occupies; unmetered apart from the descent."""
        lp = self.fetch(key)
        if lp is None:
            return None
        r = lp.reader
        return {role: span_pages(r.page, r.offset, *lp.bucket_range(role), self.store.block_size) for role in Role}

    def keys(self) -> List[bytes]:
        return [k.rstrip(b"\x00") for k, _ in self.tree.scan()]

    # planning

    @staticmethod
    def choose_role(sap: SAP, atom: Optional[bytes] = None) -> Optional[Role]:
        """Role whose constant to look up.

        Prefer a constant whose bucket sort order lets the other constants act
        as a prefix; break ties S > O > P. With ``atom`` given, only positions
        holding that atom are candidates.
        """
        consts = sap.constants()
        cands = [r for r in consts if atom is None or consts[r] == atom]
        if not cands:
            return None

        def rank(r: Role):
            rest = set(consts) - {r}
            first, second = BUCKET_ORDER[r]
            prefix_ok = rest != {second}
            return (not prefix_ok, ROLE_PRIORITY[r])

        return min(cands, key=rank)

    def describe(self, sap: SAP) -> str:
        role = self.choose_role(sap)
        if role is None:
            return "full scan of triplet (S buckets)"
        return f"lookup triplet key={sap[role].decode('utf-8', 'replace')} bucket={role.name}"

    # evaluation

    def eval_sap(self, sap: SAP) -> BindingSet:
        role = self.choose_role(sap)
        if role is None:
            return self.scan_sap(sap)
        lp = self.fetch(sap[role])
        if lp is None:
            return BindingSet(sorted(sap.variables()))
        return lp.match(role, sap)

    def scan_sap(self, sap: SAP) -> BindingSet:
        """All-variable pattern: every triple appears once among the S buckets."""
        parts = []
        for k, v in self.tree.scan():
            parts.append(LoadedPayload(self.store, k.rstrip(b"\x00"), v).match(Role.S, sap).as_dicts())
        return BindingSet.from_dicts(sap.variables(), (row for rows in parts for row in rows))

    def join_on_atom(self, key: bytes, saps: Sequence[SAP]) -> List[BindingSet]:
        """Evaluate several SAPs that all contain constant ``key`` from one payload fetch."""
        roles = []
        for sap in saps:
            r = self.choose_role(sap, key)
            if r is None:
                raise ValueError(f"{key!r} is not a constant of {sap}")
            roles.append(r)
        lp = self.fetch(key)
        if lp is None:
            return [BindingSet(sorted(sap.variables())) for sap in saps]
        # the reader keeps fetched pages, so buckets sharing a page cost one read
        return [lp.match(r, sap) for r, sap in zip(roles, saps)]

    def self_join(self, key: bytes, a: SAP, b: SAP) -> BindingSet:
        """Atom-induced join of ``a`` and ``b`` on ``key``: one lookup, then a merge of two buckets."""
        left, right = self.join_on_atom(key, [a, b])
        return merge_join(left, right)

    def close(self) -> None:
        self.store.close()
