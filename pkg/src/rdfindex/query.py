"""BGP evaluation over any index family, plus the brute-force oracle.

Plans are left-deep in the BGP's SAP order. On TripleT, SAPs that share a
constant atom are answered together from one payload fetch (a self-join);
everything else is a per-SAP lookup followed by an in-memory merge-join.
Intermediate results are held in memory and cost no block reads.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .joins import merge_join
from .model import BGP, SAP, BindingSet, Triple, matches
from .pager import IoStats
from .triplet import ROLE_PRIORITY, TripleTIndex


@dataclass
class Step:
    op: str  # "lookup", "scan", "self_join" or "merge_join"
    saps: Tuple[int, ...]
    detail: str = ""
    children: List["Step"] = field(default_factory=list)
    atom: Optional[bytes] = None
    reads: int = 0
    rows: int = 0

    @property
    def descents(self) -> int:
        """Tree descents this step performs itself (children excluded)."""
        if self.op in ("lookup", "self_join"):
            return 1
        return 0

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def to_dict(self) -> dict:
        d = {"op": self.op, "saps": list(self.saps), "detail": self.detail, "reads": self.reads, "rows": self.rows}
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        return d


@dataclass
class QueryPlan:
    bgp: BGP
    root: Step

    @property
    def scans(self) -> List[Step]:
        return [s for s in self.root.walk() if s.op == "scan"]

    def render(self) -> str:
        lines = []

        def rec(step: Step, depth: int) -> None:
            label = f"{step.op}[{','.join(str(i) for i in step.saps)}]"
            extra = f" {step.detail}" if step.detail else ""
            lines.append(f"{'  ' * depth}{label}{extra} reads={step.reads} rows={step.rows}")
            for c in step.children:
                rec(c, depth + 1)

        rec(self.root, 0)
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(self.root.to_dict(), indent=2)


@dataclass
class QueryResult:
    bindings: BindingSet
    cost: IoStats
    plan: QueryPlan


def _access_step(index, i: int, sap: SAP) -> Step:
    if not sap.constants():
        return Step("scan", (i,), index.describe(sap))
    return Step("lookup", (i,), index.describe(sap))


def plan_bgp(index, bgp: BGP) -> QueryPlan:
    saps = bgp.saps
    leaves: List[Step] = []
    if isinstance(index, TripleTIndex):
        consumed = set()
        for i, sap in enumerate(saps):
            if i in consumed:
                continue
            group, atom = [i], None
            shared = [
                a for a in dict.fromkeys(sap.constants().values())
                if any(j not in consumed and j != i and a in saps[j].constants().values() for j in range(i + 1, len(saps)))
            ]
            if shared:
                best = TripleTIndex.choose_role(sap)
                if sap[best] in shared:
                    atom = sap[best]
                else:
                    atom = sap[min((TripleTIndex.choose_role(sap, a) for a in shared), key=ROLE_PRIORITY.get)]
                group += [j for j in range(i + 1, len(saps)) if j not in consumed and atom in saps[j].constants().values()]
            consumed.update(group)
            if len(group) > 1:
                leaves.append(
                    Step("self_join", tuple(group), f"lookup triplet key={atom.decode('utf-8', 'replace')}", atom=atom)
                )
            else:
                leaves.append(_access_step(index, i, sap))
    else:
        leaves = [_access_step(index, i, sap) for i, sap in enumerate(saps)]

    root = leaves[0]
    for leaf in leaves[1:]:
        root = Step("merge_join", root.saps + leaf.saps, "", [root, leaf])
    return QueryPlan(bgp, root)


def _run(index, step: Step, saps: Sequence[SAP]) -> BindingSet:
    store = index.store
    if step.op == "merge_join":
        left = _run(index, step.children[0], saps)
        right = _run(index, step.children[1], saps)
        out = merge_join(left, right)
    else:
        before = store.stats().reads
        if step.op == "self_join":
            parts = index.join_on_atom(step.atom, [saps[i] for i in step.saps])
            out = parts[0]
            for p in parts[1:]:
                out = merge_join(out, p)
        else:
            out = index.eval_sap(saps[step.saps[0]])
        step.reads = store.stats().reads - before
    step.rows = len(out)
    return out


def eval_bgp(index, bgp: BGP, select: Optional[Sequence[str]] = None) -> QueryResult:
    variables = bgp.variables()
    if select is None:
        select = variables
    missing = [v for v in select if v not in variables]
    if missing:
        raise ValueError(f"SELECT names variables not in the pattern: {missing}")
    plan = plan_bgp(index, bgp)
    before = index.store.stats()
    full = _run(index, plan.root, bgp.saps)
    after = index.store.stats()
    # merge-join steps report the reads of their inputs
    for step in reversed(list(plan.root.walk())):
        if step.op == "merge_join":
            step.reads = sum(c.reads for c in step.children)
    return QueryResult(full.project(list(select)), after - before, plan)


def oracle_eval(g: Iterable[Triple], bgp: BGP, select: Optional[Sequence[str]] = None) -> BindingSet:
    """Exhaustive evaluation: match every triple against every SAP, then hash-join."""
    g = list(g)
    variables = bgp.variables()
    select = list(variables if select is None else select)
    rows: List[Dict[str, bytes]] = [{}]
    for sap in bgp.saps:
        found = [m for m in (matches(t, sap) for t in g) if m is not None]
        shared = [v for v in sap.variables() if rows and v in rows[0]]
        table: Dict[tuple, List[Dict[str, bytes]]] = {}
        for m in found:
            table.setdefault(tuple(m[v] for v in shared), []).append(m)
        rows = [{**r, **m} for r in rows for m in table.get(tuple(r[v] for v in shared), ())]
    full = BindingSet.from_dicts(variables, rows)
    return full.project(select)


def k1_shape_error(scenario: int, a: SAP, b: SAP) -> Optional[str]:
    """Why ``(a, b)`` is not a pair of the given k=1 scenario, or None if it is."""
    va, vb = len(a.variables()), len(b.variables())
    shared_atoms = set(a.constants().values()) & set(b.constants().values())
    shared_vars = set(a.variables()) & set(b.variables())
    if scenario == 1:
        if va or vb:
            return "scenario 1 needs two variable-free SAPs"
        if not shared_atoms:
            return "scenario 1 needs a shared atom"
    elif scenario == 2:
        if sorted((va, vb)) != [0, 1]:
            return "scenario 2 needs one variable-free SAP and one with a single variable"
        if not shared_atoms:
            return "scenario 2 needs a shared atom"
    elif scenario in (3, 4):
        if va != 1 or vb != 1:
            return f"scenario {scenario} needs one variable in each SAP"
        if len(shared_vars) != 1:
            return f"scenario {scenario} needs the variable to be shared"
        if scenario == 3 and shared_atoms:
            return "scenario 3 forbids shared atoms"
        if scenario == 4 and len(shared_atoms) != 1:
            return "scenario 4 needs exactly one shared atom"
    else:
        return f"unknown scenario {scenario}"
    return None


def eval_k1(index, scenario: int, pair: Tuple[SAP, SAP]) -> QueryResult:
    err = k1_shape_error(scenario, *pair)
    if err:
        raise ValueError(err)
    return eval_bgp(index, BGP(tuple(pair)))
