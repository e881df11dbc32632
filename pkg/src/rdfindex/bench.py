"""Experiment harness: index sizes, k=0 lookups and the four k=1 join scenarios.

Every number comes from page-store counters: block counts from
``stats().allocated`` and query costs from read-counter deltas.
"""
from __future__ import annotations

import csv
import logging
import random
import statistics
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, TextIO, Tuple

from .indexes import build_index
from .model import BGP, SAP, Graph, Triple, Variable
from .query import eval_bgp, eval_k1, k1_shape_error
from .synthetic import GenSpec, gen_synthetic

log = logging.getLogger(__name__)

CSV_COLUMNS = ("dataset", "n", "family", "experiment", "scenario", "mean_reads_or_blocks", "trials")
DEFAULT_SIZES = (10_000, 32_500, 55_000, 77_500, 100_000)
DEFAULT_FAMILIES = ("triplet", "hex", "map")
MAX_PAIR_ATTEMPTS = 2000


@dataclass
class ExperimentConfig:
    dataset: str = "synthetic1"
    sizes: Sequence[int] = DEFAULT_SIZES
    trials: int = 10
    seed: int = 0
    families: Sequence[str] = DEFAULT_FAMILIES
    atom_width: int = 64
    block_size: int = 8192
    # set for file datasets: the already-loaded source graph
    source: Optional[Graph] = field(default=None, repr=False)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if list(self.sizes) != sorted(self.sizes):
            raise ValueError("sizes must be ascending")


@dataclass(frozen=True)
class ResultRow:
    dataset: str
    n: int
    family: str
    experiment: str
    scenario: str
    mean: float
    trials: int

    def cells(self) -> List[str]:
        m = self.mean
        value = str(int(m)) if float(m).is_integer() else f"{m:.4f}"
        return [self.dataset, str(self.n), self.family, self.experiment, self.scenario, value, str(self.trials)]


def write_csv(rows: Sequence[ResultRow], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.cells())


def datasets(cfg: ExperimentConfig) -> Iterator[Tuple[str, int, Graph]]:
    """Yield ``(label, n, graph)`` checkpoints for the configured source."""
    if cfg.dataset in ("synthetic", "synthetic1", "synthetic2"):
        variants = (1, 2) if cfg.dataset == "synthetic" else (int(cfg.dataset[-1]),)
        for n in cfg.sizes:
            for v in variants:
                yield f"synthetic-v{v}", n, gen_synthetic(GenSpec(n, v, cfg.seed))
        return
    if cfg.source is None:
        raise ValueError(f"dataset {cfg.dataset!r} needs a loaded source graph")
    # nested prefixes of one seeded permutation, so larger checkpoints extend smaller ones
    order = sorted(cfg.source)
    random.Random(f"{cfg.seed}:order").shuffle(order)
    sizes = [n for n in cfg.sizes if n <= len(order)]
    if not sizes and order:
        sizes = [len(order)]
    for n in sizes:
        yield cfg.dataset, n, frozenset(order[:n])


def _with_avg(rows: List[ResultRow]) -> List[ResultRow]:
    """Append ``synthetic-avg`` rows when both synthetic variants are present."""
    groups: Dict[tuple, List[ResultRow]] = defaultdict(list)
    for r in rows:
        if r.dataset in ("synthetic-v1", "synthetic-v2"):
            groups[(r.n, r.family, r.experiment, r.scenario)].append(r)
    extra = [
        ResultRow("synthetic-avg", n, fam, exp, sc, statistics.fmean(x.mean for x in rs), rs[0].trials)
        for (n, fam, exp, sc), rs in groups.items()
        if len(rs) == 2
    ]
    return rows + extra


def _build_all(cfg: ExperimentConfig, g: Graph):
    return {f: build_index(f, g, atom_width=cfg.atom_width, block_size=cfg.block_size) for f in cfg.families}


def run_size_experiment(cfg: ExperimentConfig) -> List[ResultRow]:
    rows = []
    for label, n, g in datasets(cfg):
        for fam, index in _build_all(cfg, g).items():
            rows.append(ResultRow(label, n, fam, "size", "", index.store.stats().allocated, 1))
            log.info("size %s n=%d %s: %d blocks", label, n, fam, index.store.stats().allocated)
    return _with_avg(rows)


def _rng(cfg: ExperimentConfig, *parts) -> random.Random:
    return random.Random(":".join(str(p) for p in (cfg.seed,) + parts))


def k0_picks(g: Graph, trials: int, rng: random.Random) -> List[Triple]:
    ts = sorted(g)
    return [rng.choice(ts) for _ in range(trials)]


def run_k0(cfg: ExperimentConfig) -> List[ResultRow]:
    rows = []
    for label, n, g in datasets(cfg):
        picks = k0_picks(g, cfg.trials, _rng(cfg, "k0", label, n))
        for fam, index in _build_all(cfg, g).items():
            costs = []
            for t in picks:
                index.store.reset_read_counter()
                res = eval_bgp(index, BGP((SAP(*t),)))
                costs.append(res.cost.reads)
            rows.append(ResultRow(label, n, fam, "k0", "", statistics.fmean(costs), len(costs)))
    return _with_avg(rows)


class PairGenerator:
    """Draws SAP pairs of each k=1 scenario from the triples of a graph."""

    def __init__(self, g: Graph, rng: random.Random):
        self.triples = sorted(g)
        self.rng = rng
        self.by_atom: Dict[bytes, List[int]] = defaultdict(list)
        for i, t in enumerate(self.triples):
            for a in set(t):
                self.by_atom[a].append(i)

    def _neighbour(self, t1: Triple, atom: Optional[bytes] = None) -> Optional[Triple]:
        a = atom if atom is not None else self.rng.choice(sorted(set(t1)))
        cands = self.by_atom[a]
        if len(cands) < 2:
            return None
        t2 = self.triples[self.rng.choice(cands)]
        return None if t2 == t1 else t2

    def _replace(self, t: Triple, atom: bytes, var: Variable) -> SAP:
        return SAP(*(var if x == atom else x for x in t))

    def attempt(self, scenario: int) -> Optional[Tuple[SAP, SAP]]:
        if not self.triples:
            return None
        t1 = self.rng.choice(self.triples)
        t2 = self._neighbour(t1)
        if t2 is None:
            return None
        shared = sorted(set(t1) & set(t2))
        v = Variable("v")
        if scenario == 1:
            pair = (SAP(*t1), SAP(*t2))
        elif scenario == 2:
            free = sorted(set(t2) - set(t1))
            if not free:
                return None
            # an atom occurring twice would give the SAP two variable positions; still one variable
            pair = (SAP(*t1), self._replace(t2, self.rng.choice(free), v))
        elif scenario == 3:
            if len(shared) != 1 or t1.count(shared[0]) != 1 or t2.count(shared[0]) != 1:
                return None
            pair = (self._replace(t1, shared[0], v), self._replace(t2, shared[0], v))
        elif scenario == 4:
            if len(shared) != 2 or any(t.count(a) != 1 for t in (t1, t2) for a in shared):
                return None
            keep, drop = self.rng.sample(shared, 2)
            pair = (self._replace(t1, drop, v), self._replace(t2, drop, v))
        else:
            raise ValueError(f"unknown scenario {scenario}")
        return pair if k1_shape_error(scenario, *pair) is None else None

    def pairs(self, scenario: int, count: int) -> Optional[List[Tuple[SAP, SAP]]]:
        out = []
        for _ in range(MAX_PAIR_ATTEMPTS * count):
            p = self.attempt(scenario)
            if p is not None:
                out.append(p)
                if len(out) == count:
                    return out
        return None


def run_k1(cfg: ExperimentConfig, skipped: Optional[List[str]] = None) -> List[ResultRow]:
    rows = []
    for label, n, g in datasets(cfg):
        indexes = _build_all(cfg, g)
        for scenario in (1, 2, 3, 4):
            pairs = PairGenerator(g, _rng(cfg, "k1", label, n, scenario)).pairs(scenario, cfg.trials)
            if pairs is None:
                msg = f"{label} n={n}: scenario {scenario} unsatisfiable, row skipped"
                log.warning(msg)
                if skipped is not None:
                    skipped.append(msg)
                continue
            for fam, index in indexes.items():
                costs = []
                for pair in pairs:
                    index.store.reset_read_counter()
                    costs.append(eval_k1(index, scenario, pair).cost.reads)
                rows.append(ResultRow(label, n, fam, "k1", str(scenario), statistics.fmean(costs), len(costs)))
    return _with_avg(rows)
