"""Reader and writer for the SELECT/WHERE basic-graph-pattern text fragment.

::

    SELECT ?date ?type
    WHERE { McShea performed ?doc .
            ?doc created_on ?date . }

Terms are ``?var``, ``<anything without > or whitespace>``, ``"quoted"`` with
backslash escapes (``\\xHH`` for raw bytes), or bare words. A bare word may not
end in ``.``; a trailing dot is read as the pattern separator.
"""
from __future__ import annotations

import re
from typing import List, Optional, Sequence, Tuple

from .model import BGP, SAP, Variable

_VAR = re.compile(r"\?[A-Za-z0-9_]+")
_BARE_OK = re.compile(r'[^\s{}"<>?.*][^\s{}"<>]*')
_IRI_OK = re.compile(r"[^\s<>]+")


class BGPSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


class _Tok:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind, value, line, col):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col


def _unquote(body: str, line: int, col: int) -> bytes:
    out = bytearray()
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out += ch.encode("utf-8")
            i += 1
            continue
        nxt = body[i + 1 : i + 2]
        simple = {"n": b"\n", "t": b"\t", "r": b"\r", '"': b'"', "\\": b"\\"}
        if nxt in simple:
            out += simple[nxt]
            i += 2
        elif nxt == "x" and re.fullmatch(r"[0-9A-Fa-f]{2}", body[i + 2 : i + 4]):
            out.append(int(body[i + 2 : i + 4], 16))
            i += 4
        elif nxt == "u" and re.fullmatch(r"[0-9A-Fa-f]{4}", body[i + 2 : i + 6]):
            out += chr(int(body[i + 2 : i + 6], 16)).encode("utf-8")
            i += 6
        else:
            raise BGPSyntaxError(f"bad escape \\{nxt}", line, col + i)
    return bytes(out)


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    line, col0 = 1, 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col0 = i + 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            continue
        col = i - col0 + 1
        if ch in "{}.*":
            toks.append(_Tok(ch, ch, line, col))
            i += 1
        elif ch == "?":
            m = _VAR.match(text, i)
            if not m:
                raise BGPSyntaxError("bad variable name", line, col)
            toks.append(_Tok("var", m.group(0)[1:], line, col))
            i = m.end()
        elif ch == "<":
            j = text.find(">", i)
            if j < 0 or re.search(r"\s", text[i + 1 : j]):
                raise BGPSyntaxError("unterminated <...> term", line, col)
            toks.append(_Tok("const", text[i + 1 : j].encode("utf-8"), line, col))
            i = j + 1
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    break
                j += 2 if text[j] == "\\" else 1
            if j >= n or text[j] != '"':
                raise BGPSyntaxError("unterminated string", line, col)
            toks.append(_Tok("const", _unquote(text[i + 1 : j], line, col + 1), line, col))
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '{}"<>':
                j += 1
            word = text[i:j]
            trailing = len(word) - len(word.rstrip("."))
            if trailing:
                word = word[:-trailing]
            if word:
                toks.append(_Tok("word", word, line, col))
            for k in range(trailing):
                toks.append(_Tok(".", ".", line, col + len(word) + k))
            i = j
    toks.append(_Tok("eof", None, line, i - col0 + 1))
    return toks


def parse_bgp(text: str) -> Tuple[BGP, List[str]]:
    """Parse the fragment; return the pattern and the projected variable names."""
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos]

    def take():
        nonlocal pos
        t = toks[pos]
        pos += 1
        return t

    t = take()
    if t.kind != "word" or t.value.upper() != "SELECT":
        raise BGPSyntaxError(f"expected SELECT, found {t.value!r}", t.line, t.col)
    select: Optional[List[str]] = []
    if peek().kind == "*":
        take()
        select = None
    else:
        while peek().kind == "var":
            select.append(take().value)
        if not select:
            t = peek()
            raise BGPSyntaxError("SELECT needs variables or *", t.line, t.col)
    t = take()
    if t.kind == "word":
        if t.value.upper() != "WHERE":
            raise BGPSyntaxError(f"unknown keyword {t.value!r}", t.line, t.col)
        t = take()
    if t.kind != "{":
        raise BGPSyntaxError(f"expected '{{', found {t.value!r}", t.line, t.col)

    saps: List[SAP] = []
    while True:
        t = peek()
        if t.kind == "}":
            take()
            break
        terms = []
        for _ in range(3):
            t = take()
            if t.kind == "var":
                terms.append(Variable(t.value))
            elif t.kind == "const":
                terms.append(t.value)
            elif t.kind == "word":
                terms.append(t.value.encode("utf-8"))
            else:
                raise BGPSyntaxError(f"expected a term, found {t.value!r}", t.line, t.col)
        saps.append(SAP(*terms))
        t = peek()
        if t.kind == ".":
            take()
        elif t.kind != "}":
            raise BGPSyntaxError(f"expected '.' or '}}', found {t.value!r}", t.line, t.col)
    t = take()
    if t.kind != "eof":
        raise BGPSyntaxError(f"unexpected {t.value!r} after pattern", t.line, t.col)
    if not saps:
        raise BGPSyntaxError("empty WHERE block", t.line, t.col)
    bgp = BGP(tuple(saps))
    if select is None:
        select = list(bgp.variables())
    unknown = [v for v in select if v not in bgp.variables()]
    if unknown:
        raise BGPSyntaxError(f"selected variables not in pattern: {unknown}", 1, 1)
    return bgp, select


def render_term(term) -> str:
    if isinstance(term, Variable):
        return str(term)
    try:
        text = term.decode("utf-8")
    except UnicodeDecodeError:
        text = None
    if text is not None and _BARE_OK.fullmatch(text) and not text.endswith("."):
        return text
    if text is not None and _IRI_OK.fullmatch(text):
        return f"<{text}>"
    out = []
    for ch in (text if text is not None else term.decode("latin-1")):
        if text is None and ord(ch) > 0x7F:
            out.append(f"\\x{ord(ch):02x}")
        elif ch in '"\\':
            out.append("\\" + ch)
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\x{ord(ch):02x}")
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def render_bgp(bgp: BGP, select: Sequence[str]) -> str:
    head = "SELECT " + (" ".join("?" + v for v in select) if select else "*")
    body = " .\n  ".join(" ".join(render_term(t) for t in sap) for sap in bgp.saps)
    return f"{head}\nWHERE {{ {body} }}"
