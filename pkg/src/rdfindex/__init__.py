"""Disk-resident RDF triple indexes (TripleT, MAP, HexTree) with block-read metering."""
from .baselines import HexIndex, MapIndex
from .indexes import FAMILIES, build_index, open_index
from .model import BGP, SAP, BindingSet, Graph, Role, Triple, Variable, graph, role_sets
from .pager import IoStats, PageStore, PagerError
from .query import eval_bgp, eval_k1, oracle_eval, plan_bgp
from .sparql import parse_bgp, render_bgp
from .synthetic import GenSpec, gen_synthetic
from .triplet import TripleTIndex

__version__ = "0.1.0"

__all__ = [
    "BGP", "SAP", "BindingSet", "FAMILIES", "GenSpec", "Graph", "HexIndex", "IoStats", "MapIndex",
    "PageStore", "PagerError", "Role", "Triple", "TripleTIndex", "Variable", "build_index", "eval_bgp",
    "eval_k1", "gen_synthetic", "graph", "open_index", "oracle_eval", "parse_bgp", "plan_bgp",
    "render_bgp", "role_sets",
]
