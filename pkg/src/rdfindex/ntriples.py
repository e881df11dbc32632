"""Streaming N-Triples reader plus the cleaning and sampling ingest steps."""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, List, Optional, Tuple, Union

from .model import DEFAULT_MAX_ATOM_LEN, Graph, Triple

_UCHAR = r"\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8}"
_IRI = re.compile(r'<((?:[^<>"{}|^`\\\x00-\x20]|' + _UCHAR + r")*)>")
_BNODE = re.compile(r'_:([^\s<>"]*[^\s<>".])')
_LITERAL = re.compile(
    r'"((?:[^"\\\n\r]|\\[tbnrf"\'\\]|' + _UCHAR + r')*)"'
    r"(@[A-Za-z]+(?:-[A-Za-z0-9]+)*|\^\^<(?:[^<>\"{}|^`\\\x00-\x20]|" + _UCHAR + r")*>)?"
)
_WS = re.compile(r"[ \t]*")
_ESCAPE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))")
_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def unescape(text: str) -> str:
    def sub(m):
        if m.group(1) or m.group(2):
            return chr(int(m.group(1) or m.group(2), 16))
        return _ECHAR[m.group(3)]

    return _ESCAPE.sub(sub, text)


class NTriplesParser:
    """Line-oriented N-Triples reader; malformed lines are counted in ``skipped``.

    IRIs become their unescaped body, blank nodes keep their ``_:label`` text,
    literals keep their unescaped lexical form followed by any ``@lang`` or
    ``^^<datatype>`` suffix.
    """

    def __init__(self):
        self.parsed = 0
        self.skipped = 0

    def _term(self, line: str, pos: int, allow: str) -> Tuple[Optional[str], int]:
        m = _IRI.match(line, pos)
        if m:
            return unescape(m.group(1)), m.end()
        if "b" in allow:
            m = _BNODE.match(line, pos)
            if m:
                return m.group(0), m.end()
        if "l" in allow:
            m = _LITERAL.match(line, pos)
            if m:
                return unescape(m.group(1)) + (m.group(2) or ""), m.end()
        return None, pos

    def parse_line(self, line: str) -> Optional[Triple]:
        pos = _WS.match(line).end()
        terms = []
        for allow in ("b", "", "bl"):
            term, pos = self._term(line, pos, allow)
            if term is None:
                return None
            terms.append(term)
            pos = _WS.match(line, pos).end()
        if not line.startswith(".", pos):
            return None
        rest = line[pos + 1 :].strip()
        if rest and not rest.startswith("#"):
            return None
        return Triple(*(t.encode("utf-8") for t in terms))

    def parse(self, stream: Iterable[Union[bytes, str]]) -> Iterator[Triple]:
        for raw in stream:
            if isinstance(raw, bytes):
                try:
                    line = raw.decode("utf-8")
                except UnicodeDecodeError:
                    self.skipped += 1
                    continue
            else:
                line = raw
            line = line.rstrip("\r\n")
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            t = self.parse_line(line)
            if t is None:
                self.skipped += 1
            else:
                self.parsed += 1
                yield t


def parse_ntriples(stream: Iterable[Union[bytes, str]]) -> Tuple[List[Triple], int]:
    """Parse a whole stream; return the triples and the count of skipped lines."""
    parser = NTriplesParser()
    triples = list(parser.parse(stream))
    return triples, parser.skipped


@dataclass(frozen=True)
class IngestConfig:
    max_atom_len: int = DEFAULT_MAX_ATOM_LEN
    sample_size: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.max_atom_len < 1:
            raise ValueError("max_atom_len must be >= 1")


@dataclass(frozen=True)
class CleanReport:
    input_triples: int
    output_triples: int
    truncated_atoms: int
    duplicates: int
    dropped_empty: int


def truncate_utf8(atom: bytes, limit: int) -> bytes:
    """Longest prefix of at most ``limit`` bytes that does not split a code point."""
    if len(atom) <= limit:
        return atom
    i = limit
    while i > 0 and (atom[i] & 0xC0) == 0x80:
        i -= 1
    return atom[:i]


def clean(triples: Iterable[Triple], cfg: IngestConfig = IngestConfig()) -> Tuple[Graph, CleanReport]:
    out = set()
    n_in = truncated = dropped = 0
    for t in triples:
        n_in += 1
        atoms = []
        for a in t:
            a = a.replace(b"\x00", b"\x01")
            cut = truncate_utf8(a, cfg.max_atom_len)
            if len(cut) != len(a):
                truncated += 1
            atoms.append(cut)
        if not all(atoms):
            dropped += 1
            continue
        out.add(Triple(*atoms))
    report = CleanReport(n_in, len(out), truncated, n_in - dropped - len(out), dropped)
    return frozenset(out), report


def sample(triples: Iterable[Triple], k: int, seed: int = 0) -> Graph:
    """Uniform reservoir sample of ``min(k, available)`` triples."""
    if k <= 0:
        return frozenset()
    rng = random.Random(seed)
    reservoir: List[Triple] = []
    for i, t in enumerate(triples):
        if i < k:
            reservoir.append(t)
        else:
            j = rng.randrange(i + 1)
            if j < k:
                reservoir[j] = t
    return frozenset(reservoir)


def ingest(stream: Union[BinaryIO, Iterable[bytes]], cfg: IngestConfig = IngestConfig()):
    """Parse, optionally sample, then clean. Returns ``(graph, clean_report, skipped_lines)``."""
    parser = NTriplesParser()
    triples: Iterable[Triple] = parser.parse(stream)
    if cfg.sample_size is not None:
        triples = sample(triples, cfg.sample_size, cfg.seed)
    g, report = clean(triples, cfg)
    return g, report, parser.skipped
