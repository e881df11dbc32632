"""The two competitor indexes, MAP and HexTree, on the same pager/B+tree substrate.

Only the SOP/PSO/OSP MAP trees and the SO/PS/OS HexTree trees are built. MAP
keys are whole triples with empty values. HexTree keys are role pairs whose
value points to a sorted atom list in the payload heap; an SO key and its
mirrored OS key point to the same stored list.
"""
from __future__ import annotations

import struct
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .btree import BTree
from .model import SAP, BindingSet, Role, Triple, matches
from .pager import PageStore
from .payload import HeapWriter, PayloadReader, decode_atom_list, encode_atom_list
from .triplet import check_atoms

S, P, O = Role.S, Role.P, Role.O


def _pad(atom: bytes, width: int) -> bytes:
    return atom + b"\x00" * (width - len(atom))


def _split(key: bytes, width: int, n: int) -> List[bytes]:
    return [key[i * width : (i + 1) * width].rstrip(b"\x00") for i in range(n)]


def _best_tree(orders: Dict[str, Sequence[Role]], bound: Iterable[Role]) -> Tuple[str, int]:
    """Tree whose key order has the longest prefix of bound roles; first listed wins ties."""
    bound = set(bound)
    best, best_len = None, -1
    for name, order in orders.items():
        n = 0
        while n < len(order) and order[n] in bound:
            n += 1
        if n > best_len:
            best, best_len = name, n
    return best, best_len


def _unusable(sap: SAP, width: int) -> bool:
    return any(len(a) > width or b"\x00" in a for a in sap.constants().values())


class MapIndex:
    family = "map"
    ORDERS: Dict[str, Tuple[Role, ...]] = {"SOP": (S, O, P), "PSO": (P, S, O), "OSP": (O, S, P)}

    def __init__(self, store: PageStore):
        self.store = store
        self.trees = {name: BTree(store, name) for name in self.ORDERS}
        self.atom_width = self.trees["SOP"].key_width // 3

    @classmethod
    def build(cls, g: Iterable[Triple], store: Optional[PageStore] = None, atom_width: int = 64) -> "MapIndex":
        store = store if store is not None else PageStore.create()
        g = list(g)
        check_atoms(g, atom_width)
        for name, order in cls.ORDERS.items():
            keys = sorted(tuple(t[r] for r in order) for t in g)
            items = ((b"".join(_pad(a, atom_width) for a in k), b"") for k in keys)
            BTree.bulk_load(store, name, 3 * atom_width, 0, items)
        return cls(store)

    def describe(self, sap: SAP) -> str:
        name, n = _best_tree(self.ORDERS, sap.constants())
        if n == 0:
            return f"full scan of {name}"
        return f"{'lookup' if n == 3 else 'prefix scan'} {name} on {n} field(s)"

    def eval_sap(self, sap: SAP) -> BindingSet:
        consts = sap.constants()
        name, n = _best_tree(self.ORDERS, consts)
        order = self.ORDERS[name]
        tree = self.trees[name]
        w = self.atom_width
        variables = sorted(sap.variables())
        if _unusable(sap, w):
            tree.lookup(b"")
            return BindingSet(variables)
        prefix = b"".join(_pad(consts[r], w) for r in order[:n])
        if n == 3:
            entries = [(prefix, b"")] if tree.lookup(prefix) is not None else []
        else:
            entries = tree.prefix_scan(prefix)
        rows = []
        for key, _ in entries:
            fields = _split(key, w, 3)
            t = [b""] * 3
            for r, a in zip(order, fields):
                t[r] = a
            m = matches(t, sap)
            if m is not None:
                rows.append(m)
        return BindingSet.from_dicts(variables, rows)

    def close(self) -> None:
        self.store.close()


HEX_VALUE = struct.Struct("<IHI")


class HexIndex:
    family = "hex"
    # tree -> (key role order, role held in the payload list)
    ORDERS: Dict[str, Tuple[Role, ...]] = {"SO": (S, O), "PS": (P, S), "OS": (O, S)}
    PAYLOAD_ROLE = {"SO": P, "PS": O, "OS": P}

    def __init__(self, store: PageStore):
        self.store = store
        self.trees = {name: BTree(store, name) for name in self.ORDERS}
        self.atom_width = self.trees["SO"].key_width // 2

    @classmethod
    def build(cls, g: Iterable[Triple], store: Optional[PageStore] = None, atom_width: int = 64) -> "HexIndex":
        store = store if store is not None else PageStore.create()
        g = list(g)
        check_atoms(g, atom_width)
        so = defaultdict(set)
        ps = defaultdict(set)
        for s, p, o in g:
            so[(s, o)].add(p)
            ps[(p, s)].add(o)
        heap = HeapWriter(store)
        so_ref = {}
        for k in sorted(so):
            data = encode_atom_list(sorted(so[k]))
            page, off = heap.append(data)
            so_ref[k] = HEX_VALUE.pack(page, off, len(data))
        ps_ref = {}
        for k in sorted(ps):
            data = encode_atom_list(sorted(ps[k]))
            page, off = heap.append(data)
            ps_ref[k] = HEX_VALUE.pack(page, off, len(data))
        heap.close()

        def key(a, b):
            return _pad(a, atom_width) + _pad(b, atom_width)

        vw = HEX_VALUE.size
        BTree.bulk_load(store, "SO", 2 * atom_width, vw, ((key(s, o), so_ref[(s, o)]) for s, o in sorted(so)))
        BTree.bulk_load(store, "PS", 2 * atom_width, vw, ((key(p, s), ps_ref[(p, s)]) for p, s in sorted(ps)))
        os_keys = sorted((o, s) for s, o in so)
        BTree.bulk_load(store, "OS", 2 * atom_width, vw, ((key(o, s), so_ref[(s, o)]) for o, s in os_keys))
        return cls(store)

    def read_list(self, value: bytes) -> List[bytes]:
        page, off, length = HEX_VALUE.unpack(value)
        return decode_atom_list(PayloadReader(self.store, page, off, length).read_range(0, length))

    def describe(self, sap: SAP) -> str:
        name, n = _best_tree(self.ORDERS, sap.constants())
        if n == 0:
            return f"full scan of {name} + payloads"
        return f"{'lookup' if n == 2 else 'prefix scan'} {name} on {n} field(s) + payloads"

    def eval_sap(self, sap: SAP) -> BindingSet:
        consts = sap.constants()
        name, n = _best_tree(self.ORDERS, consts)
        order = self.ORDERS[name]
        third = self.PAYLOAD_ROLE[name]
        tree = self.trees[name]
        w = self.atom_width
        variables = sorted(sap.variables())
        if _unusable(sap, w):
            tree.lookup(b"")
            return BindingSet(variables)
        prefix = b"".join(_pad(consts[r], w) for r in order[:n])
        if n == 2:
            v = tree.lookup(prefix)
            entries = [(prefix, v)] if v is not None else []
        else:
            entries = tree.prefix_scan(prefix)
        rows = []
        for key, value in entries:
            a, b = _split(key, w, 2)
            t = [b""] * 3
            t[order[0]] = a
            t[order[1]] = b
            if third in consts:
                # membership test on the loaded list, which is sorted
                atoms = self.read_list(value)
                cands = [consts[third]] if consts[third] in atoms else []
            else:
                cands = self.read_list(value)
            for x in cands:
                t[third] = x
                m = matches(t, sap)
                if m is not None:
                    rows.append(m)
        return BindingSet.from_dicts(variables, rows)

    def close(self) -> None:
        self.store.close()

