"""Family registry: build or reopen any of the three index kinds."""
from __future__ import annotations

from typing import Iterable, Optional, Union

from .baselines import HexIndex, MapIndex
from .model import Triple
from .pager import PageStore
from .triplet import TripleTIndex

FAMILIES = {"triplet": TripleTIndex, "map": MapIndex, "hex": HexIndex}

Index = Union[TripleTIndex, MapIndex, HexIndex]


def build_index(
    family: str,
    g: Iterable[Triple],
    *,
    path: Optional[str] = None,
    atom_width: int = 64,
    block_size: int = 8192,
) -> Index:
    """Build one index family into its own page file (in memory when ``path`` is None)."""
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown index family {family!r}; choose from {sorted(FAMILIES)}") from None
    store = PageStore.create(path, block_size)
    index = cls.build(g, store, atom_width)
    store.flush()
    return index


def open_index(path: str, cache_blocks: int = 0) -> Index:
    store = PageStore.open(path, cache_blocks=cache_blocks)
    names = set(store.directory)
    for cls in (TripleTIndex, MapIndex, HexIndex):
        wanted = {"triplet"} if cls is TripleTIndex else set(cls.ORDERS)
        if wanted <= names:
            return cls(store)
    store.close()
    raise ValueError(f"{path}: no known index family among trees {sorted(names)}")
