"""RDF quad model, TriG parsing/serialization, canonical N-Quads.

The toolkit exchanges nanopublications as TriG (named-graph blocks) and
hashes/signs them over a canonical N-Quads form. Only quad-based syntax is
supported: triples must live inside a named graph, and graph labels are
always IRIs. Blank nodes may appear in datasets but are rejected by
canonicalization; the nanopub assembly layer skolemizes them first.

Literals are kept lexically verbatim: no datatype value normalization is
performed, so `"5"^^xsd:integer` and `"05"^^xsd:integer` are distinct terms.
A plain literal (no datatype) and an explicit `^^xsd:string` literal are
likewise distinct. Hashing must be stable against serializer choices only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import CanonicalizationError, TrigParseError

PLACEHOLDER_TOKEN = "@@NP@@"

_IRI_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:[^\s<>\"{}|^`\\]*$")
_BLANK_LABEL_RE = re.compile(r"^[A-Za-z0-9]+$")
_LANG_RE = re.compile(r"^[A-Za-z]+(-[A-Za-z0-9]+)*$")


@dataclass(frozen=True)
class Term:
    """An IRI, blank node, or literal.

    `kind` is one of ``iri``, ``blank``, ``literal``. For literals at most
    one of `datatype`/`language` is set.
    """

    kind: str
    value: str
    datatype: Optional[str] = None
    language: Optional[str] = None

    def __post_init__(self):
        if self.kind == "iri":
            if not _IRI_RE.match(self.value):
                raise ValueError(f"not an absolute IRI: {self.value!r}")
            if self.datatype or self.language:
                raise ValueError("IRI term cannot carry datatype/language")
        elif self.kind == "blank":
            if not _BLANK_LABEL_RE.match(self.value):
                raise ValueError(f"invalid blank node label: {self.value!r}")
            if self.datatype or self.language:
                raise ValueError("blank node cannot carry datatype/language")
        elif self.kind == "literal":
            if self.datatype is not None and self.language is not None:
                raise ValueError("literal has both datatype and language")
            if self.datatype is not None and not _IRI_RE.match(self.datatype):
                raise ValueError(f"datatype is not an absolute IRI: {self.datatype!r}")
            if self.language is not None and not _LANG_RE.match(self.language):
                raise ValueError(f"invalid language tag: {self.language!r}")
        else:
            raise ValueError(f"unknown term kind: {self.kind!r}")

    @property
    def is_iri(self) -> bool:
        return self.kind == "iri"

    @property
    def is_blank(self) -> bool:
        return self.kind == "blank"

    @property
    def is_literal(self) -> bool:
        return self.kind == "literal"


def iri(value: str) -> Term:
    return Term("iri", value)


def blank(label: str) -> Term:
    return Term("blank", label)


def literal(value: str, datatype: str | None = None, language: str | None = None) -> Term:
    return Term("literal", value, datatype, language)


@dataclass(frozen=True)
class Quad:
    """One RDF statement in a named graph."""

    subject: Term
    predicate: Term
    object: Term
    graph: Term

    def __post_init__(self):
        if self.subject.kind not in ("iri", "blank"):
            raise ValueError("subject must be an IRI or blank node")
        if self.predicate.kind != "iri":
            raise ValueError("predicate must be an IRI")
        if self.graph.kind != "iri":
            raise ValueError("graph must be an IRI")


class Dataset:
    """Immutable, duplicate-free, insertion-ordered collection of quads.

    Equality is quad-set equality plus prefix-map equality; insertion order
    never affects comparison or any derived canonical form.
    """

    __slots__ = ("_quads", "_prefixes")

    def __init__(self, quads: Iterable[Quad] = (), prefixes: Mapping[str, str] | None = None):
        seen: set[Quad] = set()
        ordered: list[Quad] = []
        for q in quads:
            if q not in seen:
                seen.add(q)
                ordered.append(q)
        object.__setattr__(self, "_quads", tuple(ordered))
        object.__setattr__(self, "_prefixes", MappingProxyType(dict(prefixes or {})))

    @property
    def quads(self) -> tuple[Quad, ...]:
        return self._quads

    @property
    def prefixes(self) -> Mapping[str, str]:
        return self._prefixes

    def __len__(self) -> int:
        return len(self._quads)

    def __iter__(self) -> Iterator[Quad]:
        return iter(self._quads)

    def __contains__(self, q: Quad) -> bool:
        return q in set(self._quads)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return set(self._quads) == set(other._quads) and dict(self._prefixes) == dict(other._prefixes)

    def __repr__(self) -> str:
        return f"Dataset({len(self._quads)} quads, {len(self._prefixes)} prefixes)"

    def graph_names(self) -> tuple[Term, ...]:
        """Distinct graph IRIs, lexicographically ordered."""
        return tuple(sorted({q.graph for q in self._quads}, key=lambda t: t.value))

    def graph(self, name: Term) -> tuple[Quad, ...]:
        return tuple(q for q in self._quads if q.graph == name)

    def with_quads(self, extra: Iterable[Quad]) -> "Dataset":
        return Dataset(list(self._quads) + list(extra), self._prefixes)

    def with_prefixes(self, extra: Mapping[str, str]) -> "Dataset":
        merged = dict(self._prefixes)
        merged.update(extra)
        return Dataset(self._quads, merged)

    @staticmethod
    def union(datasets: Iterable["Dataset"]) -> "Dataset":
        """Merge datasets; on prefix clashes the first declaration wins."""
        quads: list[Quad] = []
        prefixes: dict[str, str] = {}
        for d in datasets:
            quads.extend(d.quads)
            for p, ns in d.prefixes.items():
                prefixes.setdefault(p, ns)
        return Dataset(quads, prefixes)


Pattern = tuple[Optional[Term], Optional[Term], Optional[Term], Optional[Term]]


def match(d: Dataset, pattern: Pattern) -> tuple[Quad, ...]:
    """All quads whose bound pattern slots are equal; `None` is a wildcard."""
    s, p, o, g = pattern
    return tuple(
        q
        for q in d.quads
        if (s is None or q.subject == s)
        and (p is None or q.predicate == p)
        and (o is None or q.object == o)
        and (g is None or q.graph == g)
    )


# ---------------------------------------------------------------------------
# Term rendering (shared by the serializer and canonical form)
# ---------------------------------------------------------------------------

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _escape_literal(text: str) -> str:
    return "".join(_ESCAPES.get(c, c) for c in text)


def _nquads_term(t: Term, placeholder_target: str | None = None) -> str:
    if t.kind == "iri":
        value = t.value
        if placeholder_target:
            value = value.replace(placeholder_target, PLACEHOLDER_TOKEN)
        return f"<{value}>"
    if t.kind == "blank":
        return f"_:{t.value}"
    out = f'"{_escape_literal(t.value)}"'
    if t.language:
        return out + f"@{t.language}"
    if t.datatype:
        dt = t.datatype
        if placeholder_target:
            dt = dt.replace(placeholder_target, PLACEHOLDER_TOKEN)
        return out + f"^^<{dt}>"
    return out


def term_sort_key(t: Term) -> bytes:
    """Total bytewise ordering over terms, used everywhere output is sorted."""
    return _nquads_term(t).encode("utf-8")


def canonical_nquads(d: Dataset, placeholder_target: str) -> str:
    """Sorted N-Quads with `placeholder_target` rewritten to ``@@NP@@``.

    The substitution applies inside IRI values only (including IRIs derived
    from the target by fragment/suffix), which is what makes content hashes
    independent of the placeholder URI chosen at assembly time. Blank nodes
    are rejected: upstream assembly must have skolemized them.
    """
    lines = []
    for q in d.quads:
        for t in (q.subject, q.predicate, q.object, q.graph):
            if t.kind == "blank":
                raise CanonicalizationError(
                    f"blank node _:{t.value} cannot be canonicalized; skolemize first"
                )
        lines.append(
            " ".join(
                _nquads_term(t, placeholder_target)
                for t in (q.subject, q.predicate, q.object, q.graph)
            )
            + " ."
        )
    lines.sort(key=lambda line: line.encode("utf-8"))
    return "\n".join(lines) + "\n" if lines else ""


# ---------------------------------------------------------------------------
# TriG serializer
# ---------------------------------------------------------------------------

_SAFE_LOCAL_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_\-]*$")
_RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


def _abbreviate(value: str, by_namespace: Sequence[tuple[str, str]]) -> str | None:
    # by_namespace is sorted longest-namespace-first, ties by prefix name
    for ns, prefix in by_namespace:
        if value.startswith(ns):
            local = value[len(ns):]
            if local == "" or _SAFE_LOCAL_RE.match(local):
                return f"{prefix}:{local}"
    return None


class _TrigWriter:
    def __init__(self, d: Dataset):
        self.dataset = d
        pairs = sorted(
            ((ns, prefix) for prefix, ns in d.prefixes.items()),
            key=lambda item: (-len(item[0]), item[1]),
        )
        self.by_namespace = tuple(pairs)

    def term(self, t: Term) -> str:
        if t.kind == "iri":
            short = _abbreviate(t.value, self.by_namespace)
            return short if short is not None else f"<{t.value}>"
        if t.kind == "blank":
            return f"_:{t.value}"
        out = f'"{_escape_literal(t.value)}"'
        if t.language:
            return out + f"@{t.language}"
        if t.datatype:
            short = _abbreviate(t.datatype, self.by_namespace)
            return out + ("^^" + short if short is not None else f"^^<{t.datatype}>")
        return out

    def predicate(self, t: Term) -> str:
        return "a" if t.value == _RDF_TYPE else self.term(t)

    def write(self) -> str:
        lines: list[str] = []
        for prefix in sorted(self.dataset.prefixes):
            lines.append(f"@prefix {prefix}: <{self.dataset.prefixes[prefix]}> .")
        first_block = True
        for g in self.graph_order():
            if lines or not first_block:
                lines.append("")
            first_block = False
            lines.append(f"{self.term(g)} {{")
            lines.extend(self.graph_body(g))
            lines.append("}")
        return "\n".join(lines) + "\n" if lines else ""

    def graph_order(self) -> list[Term]:
        return sorted({q.graph for q in self.dataset.quads}, key=lambda t: t.value)

    def graph_body(self, g: Term) -> list[str]:
        triples = sorted(
            ((q.subject, q.predicate, q.object) for q in self.dataset.quads if q.graph == g),
            key=lambda spo: (term_sort_key(spo[0]), term_sort_key(spo[1]), term_sort_key(spo[2])),
        )
        lines: list[str] = []
        i = 0
        while i < len(triples):
            s = triples[i][0]
            group = []
            while i < len(triples) and triples[i][0] == s:
                group.append(triples[i])
                i += 1
            lines.extend(self.subject_group(s, group))
        return lines

    def subject_group(self, s: Term, triples: list[tuple[Term, Term, Term]]) -> list[str]:
        parts: list[str] = []
        j = 0
        while j < len(triples):
            p = triples[j][1]
            objs = []
            while j < len(triples) and triples[j][1] == p:
                objs.append(self.term(triples[j][2]))
                j += 1
            parts.append(f"{self.predicate(p)} {' , '.join(objs)}")
        head = f"    {self.term(s)} {parts[0]}"
        lines = [head]
        for part in parts[1:]:
            lines[-1] += " ;"
            lines.append(f"        {part}")
        lines[-1] += " ."
        return lines


def serialize_trig(d: Dataset) -> str:
    """Deterministic TriG: sorted prefixes, graphs, subjects, predicates, objects."""
    return _TrigWriter(d).write()


# ---------------------------------------------------------------------------
# TriG tokenizer + parser
# ---------------------------------------------------------------------------

_PNAME_PREFIX_RE = re.compile(r"^[A-Za-z]([A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?$")
_PNAME_LOCAL_RE = re.compile(r"^[A-Za-z0-9_]([A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?$")
_NUMBER_RE = re.compile(r"[+-]?(?:(?:\d+\.\d*|\.\d+|\d+)[eE][+-]?\d+|\d*\.\d+|\d+)")
_WORD_RE = re.compile(r"[A-Za-z0-9_.\-]*")

_XSD = "http://www.w3.org/2001/XMLSchema#"


@dataclass(frozen=True)
class _Token:
    type: str  # iri pname blank string lang number punct kw eof
    value: object
    line: int
    col: int


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str):
        raise TrigParseError(message, self.line, self.col)

    def _advance(self, n: int = 1):
        for _ in range(n):
            if self.pos < len(self.text):
                if self.text[self.pos] == "\n":
                    self.line += 1
                    self.col = 1
                else:
                    self.col += 1
                self.pos += 1

    def _skip_ws(self):
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n":
                self._advance()
            elif c == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            else:
                return

    def tokens(self) -> list[_Token]:
        out = []
        while True:
            tok = self.next_token()
            out.append(tok)
            if tok.type == "eof":
                return out

    def next_token(self) -> _Token:
        self._skip_ws()
        line, col = self.line, self.col
        if self.pos >= len(self.text):
            return _Token("eof", None, line, col)
        c = self.text[self.pos]
        if c == "<":
            return _Token("iri", self._read_iriref(), line, col)
        if c in "\"'":
            return _Token("string", self._read_string(c), line, col)
        if c == "@":
            return self._read_at(line, col)
        if c == "_" and self.text[self.pos + 1 : self.pos + 2] == ":":
            self._advance(2)
            label = self._read_word()
            if not _BLANK_LABEL_RE.match(label):
                self.error(f"invalid blank node label _:{label}")
            return _Token("blank", label, line, col)
        if c == "^" and self.text[self.pos + 1 : self.pos + 2] == "^":
            self._advance(2)
            return _Token("punct", "^^", line, col)
        if c in "{};,()[]":
            self._advance()
            return _Token("punct", c, line, col)
        if c.isdigit() or (c in "+-" and self.text[self.pos + 1 : self.pos + 2].isdigit()):
            return _Token("number", self._read_number(), line, col)
        if c == "." and self.text[self.pos + 1 : self.pos + 2].isdigit():
            return _Token("number", self._read_number(), line, col)
        if c == ".":
            self._advance()
            return _Token("punct", ".", line, col)
        if c.isalpha() or c == ":":
            return self._read_name(line, col)
        self.error(f"unexpected character {c!r}")

    def _read_iriref(self) -> str:
        self._advance()  # <
        buf = []
        while True:
            if self.pos >= len(self.text):
                self.error("unterminated IRI")
            c = self.text[self.pos]
            if c == ">":
                self._advance()
                return self._unescape_uchar("".join(buf), iri_mode=True)
            if c in " \n\r\t":
                self.error("whitespace inside IRI")
            buf.append(c)
            self._advance()

    def _read_string(self, quote: str) -> str:
        if self.text[self.pos : self.pos + 3] == quote * 3:
            return self._read_long_string(quote)
        self._advance()  # opening quote
        buf = []
        while True:
            if self.pos >= len(self.text):
                self.error("unterminated string")
            c = self.text[self.pos]
            if c == quote:
                self._advance()
                return "".join(buf)
            if c in "\n\r":
                self.error("newline in single-line string")
            if c == "\\":
                buf.append(self._read_escape())
                continue
            buf.append(c)
            self._advance()

    def _read_long_string(self, quote: str) -> str:
        self._advance(3)
        buf = []
        while True:
            if self.pos >= len(self.text):
                self.error("unterminated long string")
            if self.text[self.pos : self.pos + 3] == quote * 3:
                self._advance(3)
                return "".join(buf)
            if self.text[self.pos] == "\\":
                buf.append(self._read_escape())
                continue
            buf.append(self.text[self.pos])
            self._advance()

    _ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}

    def _read_escape(self) -> str:
        self._advance()  # backslash
        if self.pos >= len(self.text):
            self.error("dangling escape")
        c = self.text[self.pos]
        if c in self._ECHAR:
            self._advance()
            return self._ECHAR[c]
        if c in "uU":
            width = 4 if c == "u" else 8
            hexdigits = self.text[self.pos + 1 : self.pos + 1 + width]
            if len(hexdigits) != width or any(h not in "0123456789abcdefABCDEF" for h in hexdigits):
                self.error(f"invalid \\{c} escape")
            self._advance(1 + width)
            return chr(int(hexdigits, 16))
        self.error(f"unknown escape \\{c}")

    def _unescape_uchar(self, raw: str, iri_mode: bool) -> str:
        if "\\" not in raw:
            return raw
        out = []
        i = 0
        while i < len(raw):
            if raw[i] == "\\" and i + 1 < len(raw) and raw[i + 1] in "uU":
                width = 4 if raw[i + 1] == "u" else 8
                hexdigits = raw[i + 2 : i + 2 + width]
                if len(hexdigits) != width:
                    self.error("invalid unicode escape in IRI")
                out.append(chr(int(hexdigits, 16)))
                i += 2 + width
            elif iri_mode and raw[i] == "\\":
                self.error("invalid escape in IRI")
            else:
                out.append(raw[i])
                i += 1
        return "".join(out)

    def _read_word(self) -> str:
        m = _WORD_RE.match(self.text, self.pos)
        word = m.group(0) if m else ""
        # a trailing '.' is the statement terminator, not part of the name
        while word.endswith("."):
            word = word[:-1]
        self._advance(len(word))
        return word

    def _read_number(self) -> tuple[str, str]:
        m = _NUMBER_RE.match(self.text, self.pos)
        if not m:
            self.error("malformed number")
        lexical = m.group(0)
        self._advance(len(lexical))
        if "e" in lexical or "E" in lexical:
            kind = "double"
        elif "." in lexical:
            kind = "decimal"
        else:
            kind = "integer"
        return lexical, kind

    def _read_at(self, line: int, col: int) -> _Token:
        self._advance()  # @
        word = self._read_word()
        if word == "prefix":
            return _Token("kw", "@prefix", line, col)
        if word == "base":
            return _Token("kw", "@base", line, col)
        if _LANG_RE.match(word):
            return _Token("lang", word, line, col)
        self.error(f"unexpected @{word}")

    def _read_name(self, line: int, col: int) -> _Token:
        word = self._read_word()
        if self.pos < len(self.text) and self.text[self.pos] == ":":
            self._advance()
            local = self._read_word()
            if word and not _PNAME_PREFIX_RE.match(word):
                self.error(f"invalid prefix name {word!r}")
            if local and not _PNAME_LOCAL_RE.match(local):
                self.error(f"invalid local name {local!r}")
            return _Token("pname", (word, local), line, col)
        lowered = word.lower()
        if lowered in ("prefix", "base", "graph"):
            return _Token("kw", lowered, line, col)
        if word == "a":
            return _Token("kw", "a", line, col)
        if word in ("true", "false"):
            return _Token("kw", word, line, col)
        self.error(f"unexpected token {word!r}")


class _TrigParser:
    def __init__(self, text: str):
        self.tokens = _Tokenizer(text).tokens()
        self.index = 0
        self.prefixes: dict[str, str] = {}
        self.quads: list[Quad] = []

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def take(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise TrigParseError(message, tok.line, tok.col)

    def expect_punct(self, value: str):
        tok = self.take()
        if tok.type != "punct" or tok.value != value:
            self.error(f"expected {value!r}", tok)

    def parse(self) -> Dataset:
        while True:
            tok = self.peek()
            if tok.type == "eof":
                break
            if tok.type == "kw" and tok.value in ("@prefix", "prefix"):
                self.parse_prefix()
            elif tok.type == "kw" and tok.value in ("@base", "base"):
                self.error("@base is not supported; use absolute IRIs")
            elif tok.type == "kw" and tok.value == "graph":
                self.take()
                self.parse_graph_block(self.parse_iri_term())
            elif tok.type in ("iri", "pname"):
                label = self.parse_iri_term()
                if self.peek().type == "punct" and self.peek().value == "{":
                    self.parse_graph_block(label)
                else:
                    self.error("triples outside a named graph are not supported")
            else:
                self.error("expected a prefix directive or a named graph block")
        return Dataset(self.quads, self.prefixes)

    def parse_prefix(self):
        directive = self.take()
        tok = self.take()
        if tok.type != "pname" or tok.value[1] != "":
            self.error("expected prefix name ending in ':'", tok)
        prefix = tok.value[0]
        iri_tok = self.take()
        if iri_tok.type != "iri":
            self.error("expected namespace IRI", iri_tok)
        self.validate_iri(iri_tok)
        self.prefixes[prefix] = iri_tok.value
        if directive.value == "@prefix":
            self.expect_punct(".")
        elif self.peek().type == "punct" and self.peek().value == ".":
            self.take()

    def validate_iri(self, tok: _Token) -> Term:
        try:
            return iri(str(tok.value))
        except ValueError as exc:
            self.error(f"malformed IRI: {exc}", tok)

    def expand_pname(self, tok: _Token) -> Term:
        prefix, local = tok.value
        if prefix not in self.prefixes:
            self.error(f"undefined prefix {prefix!r}:", tok)
        try:
            return iri(self.prefixes[prefix] + local)
        except ValueError as exc:
            self.error(f"malformed IRI after prefix expansion: {exc}", tok)

    def parse_iri_term(self) -> Term:
        tok = self.take()
        if tok.type == "iri":
            return self.validate_iri(tok)
        if tok.type == "pname":
            return self.expand_pname(tok)
        self.error("expected an IRI", tok)

    def parse_graph_block(self, label: Term):
        self.expect_punct("{")
        while True:
            tok = self.peek()
            if tok.type == "punct" and tok.value == "}":
                self.take()
                return
            if tok.type == "eof":
                self.error("unterminated graph block")
            self.parse_triples(label)
            tok = self.peek()
            if tok.type == "punct" and tok.value == ".":
                self.take()
            elif not (tok.type == "punct" and tok.value == "}"):
                self.error("expected '.' or '}'")

    def parse_triples(self, graph: Term):
        subject = self.parse_subject()
        while True:
            predicate = self.parse_verb()
            while True:
                obj = self.parse_object()
                self.add_quad(subject, predicate, obj, graph)
                if self.peek().type == "punct" and self.peek().value == ",":
                    self.take()
                    continue
                break
            if self.peek().type == "punct" and self.peek().value == ";":
                self.take()
                nxt = self.peek()
                # trailing ';' before '.' or '}' is legal
                if nxt.type == "punct" and nxt.value in (".", "}"):
                    return
                continue
            return

    def parse_subject(self) -> Term:
        tok = self.peek()
        if tok.type == "blank":
            self.take()
            return blank(str(tok.value))
        if tok.type == "punct" and tok.value == "[":
            self.error("anonymous blank nodes are not supported; use _: labels")
        return self.parse_iri_term()

    def parse_verb(self) -> Term:
        tok = self.peek()
        if tok.type == "kw" and tok.value == "a":
            self.take()
            return iri(_RDF_TYPE)
        return self.parse_iri_term()

    def parse_object(self) -> Term:
        tok = self.peek()
        if tok.type == "blank":
            self.take()
            return blank(str(tok.value))
        if tok.type == "string":
            return self.parse_literal()
        if tok.type == "number":
            self.take()
            lexical, kind = tok.value
            return literal(lexical, datatype=_XSD + kind)
        if tok.type == "kw" and tok.value in ("true", "false"):
            self.take()
            return literal(str(tok.value), datatype=_XSD + "boolean")
        if tok.type == "punct" and tok.value in ("(", "["):
            self.error("collections and anonymous nodes are not supported")
        return self.parse_iri_term()

    def parse_literal(self) -> Term:
        tok = self.take()
        text = str(tok.value)
        nxt = self.peek()
        if nxt.type == "lang":
            self.take()
            return literal(text, language=str(nxt.value))
        if nxt.type == "punct" and nxt.value == "^^":
            self.take()
            datatype = self.parse_iri_term()
            return literal(text, datatype=datatype.value)
        return literal(text)

    def add_quad(self, s: Term, p: Term, o: Term, g: Term):
        try:
            self.quads.append(Quad(s, p, o, g))
        except ValueError as exc:
            self.error(str(exc))


def parse_trig(text: str) -> Dataset:
    """Parse a TriG document into a Dataset.

    Supported: prefix directives (both styles), named graph blocks with an
    optional GRAPH keyword, `a`, `;`/`,` lists, quoted/long/typed/tagged
    literals, numeric and boolean shorthand, labelled blank nodes. Triples
    outside a named graph and `@base` are rejected.
    """
    return _TrigParser(text).parse()
