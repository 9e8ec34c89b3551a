"""Text format for causal graphs.

Grammar::

    graph    = "dag" [ident] "{" {stmt} "}"
    stmt     = nodedecl | edgedecl
    nodedecl = "node" ident [attrs] ";"
    edgedecl = ident ("->" | "<->") ident [attrs] ";"
    attrs    = "[" attr {"," attr} "]"
    attr     = "latent" | "exposure" | "outcome" | "adjusted"
    ident    = bare identifier | quoted string

Bare identifiers are ASCII ``[A-Za-z_][A-Za-z0-9_]*``; quoted strings
accept any character with ``\\"`` and ``\\\\`` escapes.  ``//`` and
``#`` start comments running to end of line.  ``dag`` and ``node`` are
keywords at statement heads, so nodes with those names must be quoted.
Edge mentions declare nodes implicitly; a later ``node`` statement may
add roles to an implicitly created node, but two explicit declarations
of the same name are an error.

Parsing is total: every input either yields a graph or raises
:class:`ParseError` with a source span; no other exception escapes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import CycleError, EgpError
from .graph import BIDIRECTED, DIRECTED, CausalGraph, NodeRole, build_graph

KEYWORDS = ("dag", "node")
_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

LEX = "lex"
SYNTAX = "syntax"
SEMANTIC = "semantic"


@dataclass(frozen=True)
class SourceSpan:
    """1-based position of a token or problem region in the source."""

    line: int
    column: int
    length: int

    def to_dict(self) -> dict:
        return {"line": self.line, "column": self.column, "length": self.length}


class ParseError(EgpError):
    """Any failure while reading the text format.

    Attributes
    ----------
    kind : str
        One of ``lex``, ``syntax``, ``semantic``.
    span : SourceSpan
        Where in the input the problem sits.
    """

    code = "parse"

    def __init__(self, kind: str, message: str, span: SourceSpan):
        self.kind = kind
        self.span = span
        super().__init__(message)

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "kind": self.kind,
            "message": str(self),
            "span": self.span.to_dict(),
        }


@dataclass(frozen=True)
class ParseWarning:
    """Non-fatal oddity, e.g. a duplicate edge declaration."""

    message: str
    span: SourceSpan

    def display(self) -> str:
        return f"line {self.span.line}: {self.message}"


@dataclass
class ParseResult:
    graph: CausalGraph
    warnings: list[ParseWarning] = field(default_factory=list)


# -- lexer --------------------------------------------------------------

_T_IDENT = "ident"
_T_STRING = "string"
_T_PUNCT = "punct"
_T_EOF = "eof"


@dataclass(frozen=True)
class _Token:
    type: str
    value: str
    span: SourceSpan


def _lex(text: str) -> list[_Token]:
    toks: list[_Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def span(length: int, l=None, c=None) -> SourceSpan:
        return SourceSpan(l if l is not None else line, c if c is not None else col, length)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#" or text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        if ch in "{}[];,":
            toks.append(_Token(_T_PUNCT, ch, span(1)))
            i += 1
            col += 1
            continue
        if text.startswith("->", i):
            toks.append(_Token(_T_PUNCT, "->", span(2)))
            i += 2
            col += 2
            continue
        if text.startswith("<->", i):
            toks.append(_Token(_T_PUNCT, "<->", span(3)))
            i += 3
            col += 3
            continue
        if ch == '"':
            l0, c0 = line, col
            j = i + 1
            out: list[str] = []
            while True:
                if j >= n or text[j] == "\n":
                    raise ParseError(LEX, "unterminated string", span(j - i, l0, c0))
                c = text[j]
                if c == '"':
                    j += 1
                    break
                if c == "\\":
                    if j + 1 >= n or text[j + 1] not in ('"', "\\"):
                        raise ParseError(
                            LEX, "unknown escape in string", SourceSpan(l0, c0 + (j - i), 2)
                        )
                    out.append(text[j + 1])
                    j += 2
                    continue
                out.append(c)
                j += 1
            toks.append(_Token(_T_STRING, "".join(out), span(j - i, l0, c0)))
            col += j - i
            i = j
            continue
        m = _BARE.match(text, i)
        if m:
            word = m.group(0)
            toks.append(_Token(_T_IDENT, word, span(len(word))))
            i = m.end()
            col += len(word)
            continue
        raise ParseError(LEX, f"unexpected character {ch!r}", span(1))

    toks.append(_Token(_T_EOF, "", SourceSpan(line, col, 0)))
    return toks


# -- parser -------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.pos = 0
        self.graph_name = ""
        self.warnings: list[ParseWarning] = []
        # declaration order, first mention wins
        self.order: list[str] = []
        self.roles: dict[str, NodeRole] = {}
        self.explicit: dict[str, SourceSpan] = {}
        self.edges: dict[tuple[str, str, str], SourceSpan] = {}

    def peek(self, ahead: int = 0) -> _Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def take(self) -> _Token:
        t = self.toks[self.pos]
        if t.type != _T_EOF:
            self.pos += 1
        return t

    def fail(self, tok: _Token, expected: str):
        got = "end of input" if tok.type == _T_EOF else repr(tok.value)
        raise ParseError(SYNTAX, f"expected {expected}, found {got}", tok.span)

    def expect_punct(self, value: str, what: str | None = None) -> _Token:
        t = self.take()
        if t.type != _T_PUNCT or t.value != value:
            self.fail(t, what or f"'{value}'")
        return t

    def name_token(self, what: str) -> _Token:
        t = self.take()
        if t.type not in (_T_IDENT, _T_STRING):
            self.fail(t, what)
        if t.type == _T_STRING and t.value == "":
            raise ParseError(SEMANTIC, "empty node name", t.span)
        return t

    # ---- grammar ----

    def graph(self) -> ParseResult:
        t = self.take()
        if not (t.type == _T_IDENT and t.value == "dag"):
            self.fail(t, "keyword 'dag'")
        t = self.peek()
        if t.type == _T_STRING or (t.type == _T_IDENT and t.value not in KEYWORDS):
            self.graph_name = self.take().value
        elif t.type == _T_IDENT and t.value in KEYWORDS:
            raise ParseError(SYNTAX, f"graph name {t.value!r} must be quoted", t.span)
        self.expect_punct("{", "'{' after graph name")
        while True:
            t = self.peek()
            if t.type == _T_PUNCT and t.value == "}":
                self.take()
                break
            if t.type == _T_EOF:
                self.fail(t, "a statement or '}'")
            self.stmt()
        t = self.take()
        if t.type != _T_EOF:
            self.fail(t, "end of input after '}'")
        return self.finish()

    def stmt(self) -> None:
        t = self.peek()
        if t.type == _T_IDENT and t.value == "node":
            self.take()
            self.nodedecl()
            return
        if t.type == _T_IDENT and t.value == "dag":
            raise ParseError(
                SYNTAX, "keyword 'dag' cannot start a statement; quote the name", t.span
            )
        self.edgedecl()

    def nodedecl(self) -> None:
        t = self.name_token("a node name after 'node'")
        name = t.value
        attrs, attr_span = self.maybe_attrs()
        self.expect_punct(";", "';' after node declaration")
        if name in self.explicit:
            raise ParseError(SEMANTIC, f"node {name!r} declared twice", t.span)
        self.declare(name)
        self.explicit[name] = t.span
        if attrs:
            role = NodeRole(**{a: True for a in attrs})
            if role.latent and role.adjusted:
                raise ParseError(
                    SEMANTIC,
                    f"node {name!r} cannot be both latent and adjusted",
                    attr_span,
                )
            self.roles[name] = role

    def edgedecl(self) -> None:
        t0 = self.name_token("a statement")
        t = self.take()
        if t.type != _T_PUNCT or t.value not in ("->", "<->"):
            self.fail(t, "'->' or '<->'")
        kind = DIRECTED if t.value == "->" else BIDIRECTED
        t1 = self.name_token(f"a node name after '{t.value}'")
        attrs, attr_span = self.maybe_attrs()
        if attrs:
            raise ParseError(
                SEMANTIC, "attributes are not allowed on edges", attr_span
            )
        self.expect_punct(";", "';' after edge declaration")
        src, dst = t0.value, t1.value
        if src == dst:
            raise ParseError(SEMANTIC, f"self loop on {src!r}", t0.span)
        self.declare(src)
        self.declare(dst)
        if kind == BIDIRECTED:
            src, dst = sorted((src, dst))
        key = (src, dst, kind)
        if key in self.edges:
            arrow = "->" if kind == DIRECTED else "<->"
            self.warnings.append(
                ParseWarning(f"duplicate edge {src} {arrow} {dst} ignored", t0.span)
            )
            return
        self.edges[key] = t0.span

    def maybe_attrs(self) -> tuple[list[str], SourceSpan | None]:
        t = self.peek()
        if not (t.type == _T_PUNCT and t.value == "["):
            return [], None
        open_span = self.take().span
        attrs: list[str] = []
        while True:
            t = self.take()
            if t.type != _T_IDENT:
                self.fail(t, "an attribute name")
            if t.value not in ("latent", "exposure", "outcome", "adjusted"):
                raise ParseError(SEMANTIC, f"unknown attribute {t.value!r}", t.span)
            attrs.append(t.value)
            t = self.take()
            if t.type == _T_PUNCT and t.value == "]":
                break
            if not (t.type == _T_PUNCT and t.value == ","):
                self.fail(t, "',' or ']'")
        return attrs, open_span

    def declare(self, name: str) -> None:
        if name not in self.roles:
            self.roles[name] = NodeRole()
            self.order.append(name)

    def finish(self) -> ParseResult:
        name = self.graph_name
        try:
            g = build_graph(
                name,
                [(v, self.roles[v]) for v in self.order],
                [(s, t, k) for (s, t, k) in self.edges],
            )
        except CycleError as exc:
            first = (exc.cycle[0], exc.cycle[1], DIRECTED)
            span = self.edges.get(first) or SourceSpan(1, 1, 1)
            raise ParseError(SEMANTIC, str(exc), span) from exc
        return ParseResult(g, self.warnings)


def parse_source(text: str) -> ParseResult:
    """Parse, returning the graph plus any warnings."""
    if not isinstance(text, str):
        raise ParseError(LEX, "input must be text", SourceSpan(1, 1, 0))
    return _Parser(text).graph()


def parse(text: str) -> CausalGraph:
    """Parse, discarding warnings."""
    return parse_source(text).graph


# -- serializer ----------------------------------------------------------


def _render_name(name: str) -> str:
    if _BARE.fullmatch(name) and name not in KEYWORDS:
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize(g: CausalGraph) -> str:
    """Canonical text form: nodes sorted, then edges sorted, LF endings.

    Every node is declared explicitly, so ``parse(serialize(g))`` is
    structurally equal to ``g`` and serialization is a fixed point.
    """
    lines = []
    head = "dag"
    if g.name:
        head += " " + _render_name(g.name)
    lines.append(head + " {")
    for v in sorted(g.node_names):
        attrs = g.role(v).attrs()
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  node {_render_name(v)}{suffix};")
    for e in sorted(
        g.edges, key=lambda e: (e.src, e.dst, e.kind)
    ):
        arrow = "->" if e.kind == DIRECTED else "<->"
        lines.append(f"  {_render_name(e.src)} {arrow} {_render_name(e.dst)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
