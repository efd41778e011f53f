"""Parser and evaluator for a small SELECT query subset.

The grammar covers exactly what the analytics surface needs: PREFIX
declarations, SELECT with plain variables and at most one COUNT aggregate
(optionally DISTINCT, with an AS alias), a WHERE block of triple patterns,
GROUP BY on one variable, ORDER BY ASC/DESC, and LIMIT. Anything else
(FILTER, OPTIONAL, UNION, GRAPH, subqueries) raises an explicit
unsupported-construct error.

Evaluation runs over the union of all graphs of all stored nanopubs: the
graph dimension is dropped and duplicate triples collapse. Patterns join
left to right on shared variables; grouped rows order deterministically
with a lexicographic tie-break on the group key.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Union

from .errors import QueryParseError
from .rdf import Dataset, Term, iri, literal, term_sort_key

_RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

STEP_REUSE_QUERY = """\
PREFIX p-plan: <http://purl.org/net/p-plan#>
PREFIX prov: <http://www.w3.org/ns/prov#>
PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>
PREFIX npx: <http://purl.org/nanopub/x/>
PREFIX np: <http://www.nanopub.org/nschema#>

SELECT ?step_label (COUNT(?plan) AS ?cnt) WHERE {
    ?step p-plan:isStepOfPlan ?plan .
    ?nanopub npx:introduces ?step .
    ?nanopub np:hasAssertion ?assertion .
    ?assertion prov:wasDerivedFrom ?step_org .
    ?step_org rdfs:label ?step_label .
} GROUP BY ?step_label ORDER BY DESC(?cnt)
"""

STEP_EXECUTIONS_QUERY = """\
PREFIX p-plan: <http://purl.org/net/p-plan#>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>

SELECT ?step_label (COUNT(?step_prov) AS ?cnt) WHERE {
    ?step_prov p-plan:correspondsToStep ?step .
    ?step rdfs:label ?step_label .
} GROUP BY ?step_label ORDER BY DESC(?cnt)
"""

PLAN_SIZES_QUERY = """\
PREFIX p-plan: <http://purl.org/net/p-plan#>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>

SELECT ?plan_label (COUNT(DISTINCT ?step) AS ?cnt)  WHERE {
    ?step p-plan:isStepOfPlan ?plan .
    ?plan rdfs:label ?plan_label .
} GROUP BY ?plan_label ORDER BY DESC(?cnt)
"""


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class CountAggregate:
    var: str
    alias: str
    distinct: bool = False


PatternTerm = Union[Term, Var]
Pattern = tuple[PatternTerm, PatternTerm, PatternTerm]


@dataclass(frozen=True)
class Query:
    prefixes: Mapping[str, str]
    projection: tuple[Union[Var, CountAggregate], ...]
    patterns: tuple[Pattern, ...]
    group_by: str | None = None
    order_by: tuple[str, bool] | None = None  # (name, ascending)
    limit: int | None = None


@dataclass(frozen=True)
class ResultTable:
    vars: tuple[str, ...]
    rows: tuple[tuple, ...]


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_UNSUPPORTED = {
    "filter", "optional", "union", "graph", "bind", "values", "minus",
    "construct", "ask", "describe", "having", "offset", "service", "sum",
    "avg", "min", "max", "sample", "group_concat", "exists", "not",
}

_TOKEN_SPEC = [
    ("ws", re.compile(r"[ \t\r\n]+")),
    ("comment", re.compile(r"#[^\n]*")),
    ("iri", re.compile(r"<([^<>\"{}|^`\\\s]*)>")),
    ("var", re.compile(r"\?([A-Za-z_][A-Za-z0-9_]*)")),
    ("string", re.compile(r'"((?:[^"\\\n]|\\.)*)"')),
    ("number", re.compile(r"[+-]?\d+(?:\.\d+)?")),
    ("punct", re.compile(r"\(|\)|\{|\}|\.|;|,")),
    ("word", re.compile(r"[A-Za-z][A-Za-z0-9_\-]*")),
    ("pname_colon", re.compile(r":")),
]


@dataclass(frozen=True)
class _Token:
    type: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        for name, pattern in _TOKEN_SPEC:
            m = pattern.match(text, pos)
            if not m:
                continue
            if name not in ("ws", "comment"):
                value = m.group(1) if name in ("iri", "var", "string") else m.group(0)
                tokens.append(_Token(name, value, pos))
            pos = m.end()
            break
        else:
            raise QueryParseError(f"unexpected character {text[pos]!r}", pos)
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _QueryParser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0
        self.prefixes: dict[str, str] = {}

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def take(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise QueryParseError(message, tok.pos)

    def keyword(self, tok: _Token) -> str | None:
        return tok.value.lower() if tok.type == "word" else None

    def expect_keyword(self, *words: str) -> str:
        tok = self.take()
        kw = self.keyword(tok)
        if kw not in words:
            self.error(f"expected {' or '.join(w.upper() for w in words)}", tok)
        return kw

    def expect_punct(self, value: str):
        tok = self.take()
        if tok.type != "punct" or tok.value != value:
            self.error(f"expected {value!r}", tok)

    def check_supported(self, tok: _Token):
        kw = self.keyword(tok)
        if kw in _UNSUPPORTED:
            self.error(f"unsupported construct: {tok.value.upper()}", tok)

    def parse(self) -> Query:
        while self.keyword(self.peek()) == "prefix":
            self.take()
            self.parse_prefix_decl()
        self.expect_keyword("select")
        projection = self.parse_projection()
        self.expect_keyword("where")
        patterns = self.parse_where()
        group_by = None
        order_by = None
        limit = None
        while self.peek().type != "eof":
            tok = self.take()
            kw = self.keyword(tok)
            self.check_supported(tok)
            if kw == "group":
                self.expect_keyword("by")
                group_by = self.parse_var_name()
            elif kw == "order":
                self.expect_keyword("by")
                order_by = self.parse_order_expr()
            elif kw == "limit":
                num = self.take()
                if num.type != "number" or not num.value.isdigit():
                    self.error("expected a nonnegative integer", num)
                limit = int(num.value)
            else:
                self.error(f"unexpected token {tok.value!r}", tok)
        q = Query(
            prefixes=dict(self.prefixes),
            projection=tuple(projection),
            patterns=tuple(patterns),
            group_by=group_by,
            order_by=order_by,
            limit=limit,
        )
        self.validate(q)
        return q

    def parse_prefix_decl(self):
        tok = self.take()
        if tok.type != "word" and tok.type != "pname_colon":
            self.error("expected a prefix name", tok)
        if tok.type == "word":
            prefix = tok.value
            colon = self.take()
            if colon.type != "pname_colon":
                self.error("expected ':'", colon)
        else:
            prefix = ""
        iri_tok = self.take()
        if iri_tok.type != "iri":
            self.error("expected a namespace IRI", iri_tok)
        self.prefixes[prefix] = iri_tok.value

    def parse_projection(self) -> list[Union[Var, CountAggregate]]:
        items: list[Union[Var, CountAggregate]] = []
        while True:
            tok = self.peek()
            if tok.type == "var":
                self.take()
                items.append(Var(tok.value))
            elif tok.type == "punct" and tok.value == "(":
                items.append(self.parse_aggregate())
            else:
                break
        if not items:
            self.error("projection must name at least one variable")
        return items

    def parse_aggregate(self) -> CountAggregate:
        self.expect_punct("(")
        tok = self.take()
        self.check_supported(tok)
        if self.keyword(tok) != "count":
            self.error("only COUNT aggregates are supported", tok)
        self.expect_punct("(")
        distinct = False
        if self.keyword(self.peek()) == "distinct":
            self.take()
            distinct = True
        var = self.parse_var_name()
        self.expect_punct(")")
        self.expect_keyword("as")
        alias = self.parse_var_name()
        self.expect_punct(")")
        return CountAggregate(var=var, alias=alias, distinct=distinct)

    def parse_var_name(self) -> str:
        tok = self.take()
        if tok.type != "var":
            self.error("expected a ?variable", tok)
        return tok.value

    def parse_where(self) -> list[Pattern]:
        self.expect_punct("{")
        patterns: list[Pattern] = []
        while True:
            tok = self.peek()
            if tok.type == "punct" and tok.value == "}":
                self.take()
                break
            if tok.type == "eof":
                self.error("unterminated WHERE block")
            self.check_supported(tok)
            if self.keyword(tok) == "select":
                self.error("unsupported construct: subquery", tok)
            s = self.parse_term(position="subject")
            p = self.parse_term(position="predicate")
            o = self.parse_term(position="object")
            patterns.append((s, p, o))
            if self.peek().type == "punct" and self.peek().value == ".":
                self.take()
        if not patterns:
            self.error("WHERE block must contain at least one triple pattern")
        return patterns

    def parse_term(self, position: str) -> PatternTerm:
        tok = self.take()
        self.check_supported(tok)
        if tok.type == "var":
            return Var(tok.value)
        if tok.type == "iri":
            try:
                return iri(tok.value)
            except ValueError as exc:
                self.error(f"malformed IRI: {exc}", tok)
        if tok.type == "string":
            text = tok.value.encode().decode("unicode_escape")
            return literal(text)
        if tok.type == "number":
            dt = "integer" if re.fullmatch(r"[+-]?\d+", tok.value) else "decimal"
            return literal(tok.value, datatype=f"http://www.w3.org/2001/XMLSchema#{dt}")
        if tok.type == "word" and tok.value == "a" and position == "predicate":
            return iri(_RDF_TYPE)
        if tok.type in ("word", "pname_colon"):
            if tok.type == "word":
                prefix = tok.value
                colon = self.take()
                if colon.type != "pname_colon":
                    self.error(f"unexpected token {tok.value!r}", tok)
            else:
                prefix, colon = "", tok
            local = ""
            nxt = self.peek()
            if nxt.type == "word" and nxt.pos == colon.pos + 1:
                local = self.take().value
            if prefix not in self.prefixes:
                self.error(f"undefined prefix {prefix!r}", tok)
            try:
                return iri(self.prefixes[prefix] + local)
            except ValueError as exc:
                self.error(f"malformed IRI: {exc}", tok)
        self.error(f"expected a term, got {tok.value!r}", tok)

    def parse_order_expr(self) -> tuple[str, bool]:
        tok = self.peek()
        kw = self.keyword(tok)
        if kw in ("asc", "desc"):
            self.take()
            self.expect_punct("(")
            name = self.parse_var_name()
            self.expect_punct(")")
            return (name, kw == "asc")
        return (self.parse_var_name(), True)

    def validate(self, q: Query):
        aggregates = [i for i in q.projection if isinstance(i, CountAggregate)]
        plain = [i for i in q.projection if isinstance(i, Var)]
        if len(aggregates) > 1:
            self.error("at most one COUNT aggregate is supported")
        if aggregates and q.group_by is None:
            self.error("COUNT requires GROUP BY")
        if q.group_by is not None:
            for v in plain:
                if v.name != q.group_by:
                    self.error(f"projected variable ?{v.name} must be the GROUP BY variable")
        pattern_vars = {t.name for pat in q.patterns for t in pat if isinstance(t, Var)}
        for v in plain:
            if v.name not in pattern_vars:
                self.error(f"projected variable ?{v.name} does not occur in WHERE")
        for agg in aggregates:
            if agg.var not in pattern_vars:
                self.error(f"aggregated variable ?{agg.var} does not occur in WHERE")
        if q.order_by is not None:
            names = {i.alias if isinstance(i, CountAggregate) else i.name for i in q.projection}
            if q.order_by[0] not in names:
                self.error(f"ORDER BY ?{q.order_by[0]} is not projected")


def parse_query(text: str) -> Query:
    return _QueryParser(text).parse()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _plain(term: Term) -> str:
    if term.is_blank:
        return f"_:{term.value}"
    return term.value


def _union_triples(source) -> list[tuple[Term, Term, Term]]:
    dataset: Dataset = source.union_dataset() if hasattr(source, "union_dataset") else source
    seen = set()
    triples = []
    for q in dataset.quads:
        spo = (q.subject, q.predicate, q.object)
        if spo not in seen:
            seen.add(spo)
            triples.append(spo)
    triples.sort(key=lambda spo: tuple(term_sort_key(t) for t in spo))
    return triples


def evaluate(q: Query, store) -> ResultTable:
    """Evaluate against a RegistryStore (or a bare Dataset) union graph."""
    triples = _union_triples(store)

    bindings: list[dict[str, Term]] = [{}]
    for s_pat, p_pat, o_pat in q.patterns:
        next_bindings: list[dict[str, Term]] = []
        for binding in bindings:
            for s, p, o in triples:
                attempt = dict(binding)
                if not _bind(attempt, s_pat, s):
                    continue
                if not _bind(attempt, p_pat, p):
                    continue
                if not _bind(attempt, o_pat, o):
                    continue
                next_bindings.append(attempt)
        bindings = next_bindings
        if not bindings:
            break

    columns = tuple(
        item.alias if isinstance(item, CountAggregate) else item.name for item in q.projection
    )

    if q.group_by is None:
        rows = [
            tuple(_plain(b[item.name]) for item in q.projection)  # all plain Vars here
            for b in bindings
        ]
        rows.sort()
    else:
        groups: dict[str, list[dict[str, Term]]] = {}
        for b in bindings:
            if q.group_by not in b:
                continue
            groups.setdefault(_plain(b[q.group_by]), []).append(b)
        rows = []
        for key in sorted(groups):
            members = groups[key]
            row = []
            for item in q.projection:
                if isinstance(item, Var):
                    row.append(key)
                else:
                    values = [m[item.var] for m in members if item.var in m]
                    row.append(len(set(values)) if item.distinct else len(values))
            rows.append(tuple(row))

    if q.order_by is not None:
        name, ascending = q.order_by
        col = columns.index(name)
        group_col = columns.index(q.group_by) if q.group_by in columns else None

        def sort_key(row):
            tie = row[group_col] if group_col is not None else tuple(str(v) for v in row)
            return (row[col], tie)

        if ascending:
            rows.sort(key=sort_key)
        else:
            # descending on the ordered column, ascending lexicographic tie-break
            primary = sorted({row[col] for row in rows}, reverse=True)
            rank = {v: i for i, v in enumerate(primary)}
            rows.sort(key=lambda row: (rank[row[col]], row[group_col] if group_col is not None else tuple(str(v) for v in row)))

    if q.limit is not None:
        rows = rows[: q.limit]
    return ResultTable(vars=columns, rows=tuple(rows))


def _bind(binding: dict[str, Term], pattern: PatternTerm, value: Term) -> bool:
    if isinstance(pattern, Var):
        bound = binding.get(pattern.name)
        if bound is None:
            binding[pattern.name] = value
            return True
        return bound == value
    return pattern == value
