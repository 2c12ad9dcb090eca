"""Line-oriented N-Triples parsing, batching, and serialization.

One statement per line, terminated by ``.``; ``#`` starts a comment; files
are UTF-8. Unicode escapes (``\\uXXXX``, ``\\UXXXXXXXX``) are decoded in
IRIs and literals, and the usual string escapes are decoded in literals.
IRIs are otherwise kept verbatim: no case folding, percent decoding, or
resolution, so distinct spellings stay distinct identifiers. Blank node
labels are restricted to ``[A-Za-z0-9_-]+``.

Parsing is pure per line, so a malformed line can never corrupt the parse
of any other line, and parsed batches are immutable values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

from kbevolve.errors import ParseError

_IRI_FORBIDDEN = set(" \t<>")
_BLANK_LABEL_RE = re.compile(r"[A-Za-z0-9_-]+")
_LANG_TAG_RE = re.compile(r"[A-Za-z]+(?:-[A-Za-z0-9]+)*\Z")
_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_LITERAL_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


class TermKind(Enum):
    IRI = "iri"
    LITERAL = "literal"
    BLANK_NODE = "blank"


@dataclass(frozen=True)
class Term:
    """One RDF term: IRI, literal, or blank node.

    Blank node values include the ``_:`` prefix. Language tag and datatype
    are literal-only and mutually exclusive.
    """

    kind: TermKind
    value: str
    language_tag: str | None = None
    datatype_iri: str | None = None

    def __post_init__(self):
        if self.kind is not TermKind.LITERAL:
            if self.language_tag is not None or self.datatype_iri is not None:
                raise ValueError("only literals carry a language tag or datatype")
        elif self.language_tag is not None and self.datatype_iri is not None:
            raise ValueError("language tag and datatype are mutually exclusive")
        if self.kind is TermKind.IRI and (not self.value or _IRI_FORBIDDEN & set(self.value)):
            raise ValueError(f"invalid IRI: {self.value!r}")
        if self.kind is TermKind.BLANK_NODE and (
            not self.value.startswith("_:") or len(self.value) == 2
        ):
            raise ValueError(f"invalid blank node: {self.value!r}")


def iri(value: str) -> Term:
    return Term(TermKind.IRI, value)


def literal(value: str, language_tag: str | None = None, datatype_iri: str | None = None) -> Term:
    return Term(TermKind.LITERAL, value, language_tag, datatype_iri)


def blank(label: str) -> Term:
    return Term(TermKind.BLANK_NODE, f"_:{label}")


@dataclass(frozen=True)
class Triple:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        if self.predicate.kind is not TermKind.IRI:
            raise ValueError("predicate must be an IRI")
        if self.subject.kind is TermKind.LITERAL:
            raise ValueError("subject must not be a literal")


@dataclass
class ParseReport:
    """Per-batch line accounting.

    Comments and blank lines count as skipped; malformed lines are listed
    in ``errors`` as (line number, category), so
    ``lines_read == triples_emitted + lines_skipped + len(errors)``.
    """

    lines_read: int = 0
    triples_emitted: int = 0
    lines_skipped: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _err(text: str, pos: int, category: str, detail: str = "") -> ParseError:
    return ParseError(category, _byte_offset(text, pos), detail)


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i] in " \t":
        i += 1
    return i


def _decode_uchar(text: str, i: int) -> tuple[str, int]:
    """Decode one \\uXXXX or \\UXXXXXXXX at text[i] (a backslash)."""
    marker = text[i + 1 : i + 2]
    width = 4 if marker == "u" else 8 if marker == "U" else 0
    if not width:
        raise _err(text, i, "bad escape")
    digits = text[i + 2 : i + 2 + width]
    if len(digits) != width:
        raise _err(text, i, "bad escape")
    try:
        code = int(digits, 16)
    except ValueError:
        raise _err(text, i, "bad escape") from None
    if 0xD800 <= code <= 0xDFFF or code > 0x10FFFF:
        raise _err(text, i, "bad escape", "invalid code point")
    return chr(code), i + 2 + width


def _read_iri(text: str, i: int) -> tuple[str, int]:
    end = text.find(">", i + 1)
    if end < 0:
        raise _err(text, i, "unterminated iri")
    raw = text[i + 1 : end]
    if "\\" in raw:
        out: list[str] = []
        k = i + 1
        while k < end:
            if text[k] == "\\":
                decoded, k = _decode_uchar(text, k)
                out.append(decoded)
            else:
                out.append(text[k])
                k += 1
        raw = "".join(out)
    if not raw or any(c in _IRI_FORBIDDEN for c in raw):
        raise _err(text, i, "bad iri")
    return raw, end + 1


def _read_literal(text: str, i: int) -> tuple[Term, int]:
    out: list[str] = []
    k = i + 1
    while k < len(text) and text[k] != '"':
        if text[k] == "\\":
            esc = text[k + 1 : k + 2]
            if esc in _ECHAR:
                out.append(_ECHAR[esc])
                k += 2
            else:
                decoded, k = _decode_uchar(text, k)
                out.append(decoded)
        else:
            out.append(text[k])
            k += 1
    if k == len(text):
        raise _err(text, i, "unterminated literal")
    value = "".join(out)
    k += 1
    language = datatype = None
    if text[k : k + 2] == "^^":
        if text[k + 2 : k + 3] != "<":
            raise _err(text, k, "bad datatype")
        datatype, k = _read_iri(text, k + 2)
    elif text[k : k + 1] == "@":
        m = re.compile(r"[A-Za-z0-9-]*").match(text, k + 1)
        tag = m.group() if m else ""
        if not _LANG_TAG_RE.match(tag):
            raise _err(text, k, "bad language tag")
        language = tag
        k += 1 + len(tag)
    return Term(TermKind.LITERAL, value, language, datatype), k


def _read_term(text: str, i: int, role: str) -> tuple[Term, int]:
    if i == len(text) or text[i] == ".":
        raise _err(text, i, f"missing {role}")
    ch = text[i]
    if ch == '"' and role == "subject":
        raise _err(text, i, "literal in subject position")
    if role == "predicate" and ch != "<":
        raise _err(text, i, "bad predicate")
    if ch == "<":
        value, j = _read_iri(text, i)
        return Term(TermKind.IRI, value), j
    if ch == "_" and text[i + 1 : i + 2] == ":":
        m = _BLANK_LABEL_RE.match(text, i + 2)
        if m is None:
            raise _err(text, i, "bad blank node")
        return Term(TermKind.BLANK_NODE, text[i : m.end()]), m.end()
    if ch == '"':
        return _read_literal(text, i)
    raise _err(text, i, f"bad {role}")


def parse_ntriple_line(line: str) -> Triple | None:
    """Parse one physical line.

    Returns a Triple for a well-formed statement, None for blank and
    comment lines, and raises ParseError (with byte offset and category)
    for anything else.
    """
    text = line.rstrip("\r\n")
    i = _skip_ws(text, 0)
    if i == len(text) or text[i] == "#":
        return None
    subject, i = _read_term(text, i, "subject")
    i = _skip_ws(text, i)
    predicate, i = _read_term(text, i, "predicate")
    i = _skip_ws(text, i)
    obj, i = _read_term(text, i, "object")
    i = _skip_ws(text, i)
    if i == len(text) or text[i] != ".":
        raise _err(text, i, "missing dot")
    i = _skip_ws(text, i + 1)
    if i < len(text) and text[i] != "#":
        raise _err(text, i, "trailing garbage")
    return Triple(subject, predicate, obj)


def read_batch(
    stream: Iterable[str] | Iterator[str],
    batch_size: int,
    first_line_number: int = 1,
) -> tuple[list[Triple], ParseReport]:
    """Consume up to batch_size lines and parse them.

    The batch unit is lines, not triples: malformed, blank, and comment
    lines all consume budget. Repeated calls on the same stream resume
    where the previous call stopped. An I/O failure while reading aborts
    the whole batch; the partial result is discarded and the error
    propagates.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    report = ParseReport()
    triples: list[Triple] = []
    it = iter(stream)
    for offset in range(batch_size):
        try:
            line = next(it)
        except StopIteration:
            break
        report.lines_read += 1
        try:
            parsed = parse_ntriple_line(line)
        except ParseError as exc:
            report.errors.append((first_line_number + offset, exc.category))
            continue
        if parsed is None:
            report.lines_skipped += 1
        else:
            triples.append(parsed)
    report.triples_emitted = len(triples)
    return triples, report


def _escape_literal(value: str) -> str:
    out = []
    for c in value:
        if c in _LITERAL_ESCAPES:
            out.append(_LITERAL_ESCAPES[c])
        elif ord(c) < 0x20:
            out.append(f"\\u{ord(c):04X}")
        else:
            out.append(c)
    return "".join(out)


def term_to_ntriples(term: Term) -> str:
    if term.kind is TermKind.IRI:
        return f"<{term.value}>"
    if term.kind is TermKind.BLANK_NODE:
        return term.value
    body = f'"{_escape_literal(term.value)}"'
    if term.language_tag is not None:
        return f"{body}@{term.language_tag}"
    if term.datatype_iri is not None:
        return f"{body}^^<{term.datatype_iri}>"
    return body


def triple_to_line(t: Triple) -> str:
    return (
        f"{term_to_ntriples(t.subject)} {term_to_ntriples(t.predicate)} "
        f"{term_to_ntriples(t.object)} ."
    )
