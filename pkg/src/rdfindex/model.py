"""Domain vocabulary: atoms, triples, patterns, join types and binding sets.

Atoms are plain ``bytes`` compared bytewise everywhere. A triple pattern
(``SAP``) holds either constant atoms or :class:`Variable` terms.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, NamedTuple, Optional, Sequence, Tuple, Union

DEFAULT_MAX_ATOM_LEN = 64


def make_atom(value: Union[bytes, str], max_len: int = DEFAULT_MAX_ATOM_LEN) -> bytes:
    """Validate and return an atom.

    Longer input is a caller error; truncation belongs to the ingest cleaner.
    """
    if isinstance(value, str):
        value = value.encode("utf-8")
    if not isinstance(value, bytes):
        raise TypeError(f"atom must be bytes or str, got {type(value).__name__}")
    if not value:
        raise ValueError("atom must be non-empty")
    if len(value) > max_len:
        raise ValueError(f"atom of {len(value)} bytes exceeds max_atom_len={max_len}")
    return value


class Role(enum.IntEnum):
    S = 0
    P = 1
    O = 2

    @property
    def letter(self) -> str:
        return self.name


class Triple(NamedTuple):
    s: bytes
    p: bytes
    o: bytes

    @classmethod
    def of(cls, s, p, o, max_len: int = DEFAULT_MAX_ATOM_LEN) -> "Triple":
        return cls(make_atom(s, max_len), make_atom(p, max_len), make_atom(o, max_len))


Graph = FrozenSet[Triple]


def graph(triples: Iterable[Sequence]) -> Graph:
    """Build a set-semantics graph from triples or 3-sequences of str/bytes."""
    out = set()
    for t in triples:
        if isinstance(t, Triple) and all(isinstance(x, bytes) for x in t):
            out.add(t)
        else:
            out.add(Triple.of(*t, max_len=1 << 30))
    return frozenset(out)


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be non-empty")

    def __str__(self) -> str:
        return "?" + self.name


Term = Union[bytes, Variable]


def is_var(term: Term) -> bool:
    return isinstance(term, Variable)


class SAP(NamedTuple):
    """Simple access pattern: a triple of terms."""

    s: Term
    p: Term
    o: Term

    @classmethod
    def parse(cls, s, p, o) -> "SAP":
        """Convenience constructor: strings starting with ``?`` become variables."""

        def conv(x):
            if isinstance(x, Variable):
                return x
            if isinstance(x, str):
                return Variable(x[1:]) if x.startswith("?") else x.encode("utf-8")
            return make_atom(x, 1 << 30)

        return cls(conv(s), conv(p), conv(o))

    def variables(self) -> Tuple[str, ...]:
        seen = []
        for t in self:
            if isinstance(t, Variable) and t.name not in seen:
                seen.append(t.name)
        return tuple(seen)

    def constants(self) -> Dict[Role, bytes]:
        return {Role(i): t for i, t in enumerate(self) if not isinstance(t, Variable)}

    def __str__(self) -> str:
        return " ".join(str(t) if isinstance(t, Variable) else t.decode("utf-8", "replace") for t in self)


@dataclass(frozen=True)
class BGP:
    saps: Tuple[SAP, ...]

    def __post_init__(self):
        object.__setattr__(self, "saps", tuple(self.saps))
        if not self.saps:
            raise ValueError("a BGP needs at least one SAP")

    def variables(self) -> Tuple[str, ...]:
        seen = []
        for sap in self.saps:
            for v in sap.variables():
                if v not in seen:
                    seen.append(v)
        return tuple(seen)

    def __iter__(self) -> Iterator[SAP]:
        return iter(self.saps)

    def __len__(self) -> int:
        return len(self.saps)


class JoinType(enum.Enum):
    SS = "SS"
    SP = "SP"
    SO = "SO"
    PP = "PP"
    PO = "PO"
    OO = "OO"

    @classmethod
    def from_roles(cls, r1: Role, r2: Role) -> "JoinType":
        a, b = sorted((r1, r2))
        return cls(a.letter + b.letter)


@dataclass(frozen=True)
class JoinEdge:
    """One shared position between two SAPs.

    ``role_a`` is the position in the first SAP, ``role_b`` in the second.
    ``kind`` is ``"variable"`` or ``"atom"``.
    """

    type: JoinType
    kind: str
    term: Term
    role_a: Role
    role_b: Role


def join_types(a: SAP, b: SAP) -> FrozenSet[JoinEdge]:
    edges = set()
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if x == y and type(x) is type(y):
                kind = "variable" if isinstance(x, Variable) else "atom"
                edges.add(JoinEdge(JoinType.from_roles(Role(i), Role(j)), kind, x, Role(i), Role(j)))
    return frozenset(edges)


def matches(t: Sequence[bytes], sap: SAP) -> Optional[Dict[str, bytes]]:
    """Return the variable binding under which ``t`` satisfies ``sap``, or None."""
    row: Dict[str, bytes] = {}
    for value, term in zip(t, sap):
        if isinstance(term, Variable):
            bound = row.get(term.name)
            if bound is None:
                row[term.name] = value
            elif bound != value:
                return None
        elif term != value:
            return None
    return row


class BindingSet:
    """A set of binding rows over a fixed, sorted variable domain."""

    __slots__ = ("variables", "rows")

    def __init__(self, variables: Iterable[str], rows: Iterable[Tuple[bytes, ...]] = ()):
        self.variables: Tuple[str, ...] = tuple(variables)
        self.rows: FrozenSet[Tuple[bytes, ...]] = frozenset(rows)

    @classmethod
    def from_dicts(cls, variables: Iterable[str], dicts: Iterable[Dict[str, bytes]]) -> "BindingSet":
        variables = tuple(sorted(set(variables)))
        return cls(variables, (tuple(d[v] for v in variables) for d in dicts))

    @classmethod
    def unit(cls) -> "BindingSet":
        """The single empty row: the identity of natural join."""
        return cls((), [()])

    def project(self, select: Sequence[str]) -> "BindingSet":
        missing = [v for v in select if v not in self.variables]
        if missing:
            raise ValueError(f"cannot project on unbound variables {missing}")
        idx = [self.variables.index(v) for v in select]
        return BindingSet(tuple(select), (tuple(r[i] for i in idx) for r in self.rows))

    def as_dicts(self):
        return [dict(zip(self.variables, r)) for r in sorted(self.rows)]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.as_dicts())

    def _canonical(self):
        order = sorted(range(len(self.variables)), key=lambda i: self.variables[i])
        return (
            tuple(self.variables[i] for i in order),
            frozenset(tuple(r[i] for i in order) for r in self.rows),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, BindingSet):
            return NotImplemented
        return self._canonical() == other._canonical()

    def __hash__(self):
        return hash(self._canonical())

    def __repr__(self) -> str:
        return f"BindingSet({self.variables!r}, {len(self.rows)} rows)"


@dataclass(frozen=True)
class GraphStats:
    triples: int
    subjects: int
    predicates: int
    objects: int
    atoms: int
    subject_object: int
    subject_predicate: int
    predicate_object: int
    mean_atom_len: float


def role_sets(g: Iterable[Triple]) -> GraphStats:
    """Cardinalities of the role sets of ``g``; mean length is taken over distinct atoms."""
    subjects, predicates, objects = set(), set(), set()
    n = 0
    for s, p, o in g:
        n += 1
        subjects.add(s)
        predicates.add(p)
        objects.add(o)
    atoms = subjects | predicates | objects
    mean = sum(map(len, atoms)) / len(atoms) if atoms else 0.0
    return GraphStats(
        triples=n,
        subjects=len(subjects),
        predicates=len(predicates),
        objects=len(objects),
        atoms=len(atoms),
        subject_object=len(subjects & objects),
        subject_predicate=len(subjects & predicates),
        predicate_object=len(predicates & objects),
        mean_atom_len=mean,
    )
