"""Parser and canonical serializer for ``.tm`` model files.

Grammar (whitespace and ``#`` comments are insignificant)::

    file     := ["model" IDENT [STRING]] item*
    item     := thimac | chain [";"]
    thimac   := "thimac" IDENT [STRING] "{" item* "}"
    chain    := element (("->" | "~>") element [guard])*
    element  := decl | path
    decl     := KIND IDENT ["in" | "out"] ["=" literal] ["times" INT] ["as" IDENT]
    guard    := "[" ("eq" | "ne") path "]" | "[" "count" INT "]"
    path     := IDENT ("." IDENT)*

KIND is one of create, process, release, receive, transfer, store, plus the
synonyms arrive and accept which both become receive. A node's local name
defaults to ``<kind>_<thing>`` (``transfer_<dir>`` for transfers), with
``_2``, ``_3``... appended for repeats inside one thimac.
"""

from __future__ import annotations

import typing as t
from dataclasses import dataclass, field

from ..core import (
    ActionKind,
    ActionNode,
    Arc,
    ArcKind,
    Guard,
    GuardKind,
    ModelError,
    Scalar,
    StaticModel,
    Thimac,
    arc_sort_key,
)
from .diagnostics import ParseDiagnostic, ParseError
from .lexer import Token, TokenType, quote
from .stream import TokenStream, _Abort

KIND_WORDS = {
    "create": ActionKind.CREATE,
    "process": ActionKind.PROCESS,
    "release": ActionKind.RELEASE,
    "receive": ActionKind.RECEIVE,
    "arrive": ActionKind.RECEIVE,
    "accept": ActionKind.RECEIVE,
    "store": ActionKind.STORE,
    "transfer": None,  # direction decides
}
SYNONYMS = {"arrive", "accept"}


def default_base(kind: ActionKind, thing: str) -> str:
    if kind.is_transfer:
        return f"transfer_{kind.direction}"
    return f"{kind.value}_{thing}"


class NameAllocator:
    """Hands out default local names in declaration order."""

    def __init__(self) -> None:
        self._counts: dict[str, int] = {}

    def peek(self, base: str) -> str:
        n = self._counts.get(base, 0) + 1
        return base if n == 1 else f"{base}_{n}"

    def take(self, base: str) -> str:
        name = self.peek(base)
        self._counts[base] = self._counts.get(base, 0) + 1
        return name


@dataclass
class _ThimacBuilder:
    id: str
    name: str
    token: Token | None
    parent: _ThimacBuilder | None = None
    children: list[_ThimacBuilder] = field(default_factory=list)
    nodes: list[str] = field(default_factory=list)
    names: NameAllocator = field(default_factory=NameAllocator)

    def freeze(self) -> Thimac:
        return Thimac(
            self.id,
            self.name,
            tuple(c.freeze() for c in self.children),
            tuple(self.nodes),
        )

    def scopes(self) -> t.Iterator[str]:
        node: _ThimacBuilder | None = self
        while node is not None:
            yield node.id
            node = node.parent


@dataclass
class _PendingArc:
    kind: ArcKind
    source: tuple[str, Token, _ThimacBuilder]
    target: tuple[str, Token, _ThimacBuilder]
    guard: tuple[GuardKind, str | None, int | None, Token, _ThimacBuilder] | None


def _join(scope: str, name: str) -> str:
    return f"{scope}.{name}" if scope else name


class _ModelParser:
    def __init__(self, source: str, file: str) -> None:
        self.ts = TokenStream(source, file)
        self.nodes: dict[str, ActionNode] = {}
        self.node_tokens: dict[str, Token] = {}
        self.thimac_ids: set[str] = set()
        self.arcs: list[_PendingArc] = []
        self.name = "model"
        self.root = _ThimacBuilder("", "model", None)

    def parse(self) -> StaticModel | None:
        ts = self.ts
        if not ts.ok:
            return None
        try:
            if ts.check(TokenType.IDENT, "model") and ts.peek().type is TokenType.IDENT:
                ts.advance()
                self.name = ts.advance().text
                display = ts.accept(TokenType.STRING)
                self.root.name = display.value if display else self.name
            while not ts.at_end():
                self.item(self.root)
        except _Abort:
            return None
        arcs = self.resolve_arcs()
        if ts.has_errors():
            return None
        ordered: dict[str, ActionNode] = {}
        for builder in self._walk(self.root):
            for nid in builder.nodes:
                ordered[nid] = self.nodes[nid]
        try:
            return StaticModel(self.name, self.root.freeze(), ordered, tuple(arcs))
        except ModelError as exc:  # pragma: no cover - parser enforces the same rules
            ts.report("INVALID_DECLARATION", str(exc), ts.tokens[0])
            return None

    def _walk(self, builder: _ThimacBuilder) -> t.Iterator[_ThimacBuilder]:
        yield builder
        for child in builder.children:
            yield from self._walk(child)

    def item(self, scope: _ThimacBuilder) -> None:
        ts = self.ts
        if ts.check(TokenType.IDENT, "thimac") and ts.peek().type is TokenType.IDENT:
            self.thimac(scope)
            return
        if ts.check(TokenType.SEMI):
            ts.advance()
            return
        self.chain(scope)
        ts.accept(TokenType.SEMI)

    def thimac(self, scope: _ThimacBuilder) -> None:
        ts = self.ts
        ts.advance()
        name_tok = ts.advance()
        display = ts.accept(TokenType.STRING)
        tid = _join(scope.id, name_tok.text)
        if display is not None and not display.value:
            ts.report("INVALID_DECLARATION", "thimac display name must be non-empty", display)
        if tid in self.thimac_ids or tid in self.nodes:
            ts.report("DUPLICATE_ID", f"duplicate thimac id {tid!r}", name_tok)
        self.thimac_ids.add(tid)
        builder = _ThimacBuilder(tid, (display.value if display else "") or name_tok.text, name_tok, scope)
        scope.children.append(builder)
        ts.expect(TokenType.LBRACE)
        while not ts.check(TokenType.RBRACE):
            if ts.at_end():
                ts.fail(f"unclosed block for thimac {tid!r}", name_tok)
            self.item(builder)
        ts.advance()

    def chain(self, scope: _ThimacBuilder) -> None:
        ts = self.ts
        prev = self.element(scope, first=True)
        while ts.check(TokenType.ARROW) or ts.check(TokenType.SQUIGGLE):
            arrow = ts.advance()
            kind = ArcKind.FLOW if arrow.type is TokenType.ARROW else ArcKind.TRIGGER
            nxt = self.element(scope, first=False)
            guard = self.guard(scope) if ts.check(TokenType.LBRACKET) else None
            self.arcs.append(_PendingArc(kind, prev, nxt, guard))
            prev = nxt

    def element(self, scope: _ThimacBuilder, first: bool) -> tuple[str, Token, _ThimacBuilder]:
        ts = self.ts
        tok = ts.current
        if tok.type is TokenType.IDENT and ts.peek().type is TokenType.IDENT:
            if tok.text in KIND_WORDS:
                nid = self.declaration(scope)
                return (nid, tok, scope)
            if first:
                ts.fail(f"unknown action kind {tok.text!r}", tok, code="UNKNOWN_ACTION_KIND")
        path, ptok = ts.path()
        if first and not (ts.check(TokenType.ARROW) or ts.check(TokenType.SQUIGGLE)):
            ts.fail(f"a bare reference {path!r} is not a statement; expected '->' or '~>'", ptok)
        return (path, ptok, scope)

    def declaration(self, scope: _ThimacBuilder) -> str:
        ts = self.ts
        kw = ts.advance()
        thing = ts.expect(TokenType.IDENT, what="a thing type").text
        kind = KIND_WORDS[kw.text]
        if kind is None:
            direction = ts.current
            if ts.accept(TokenType.IDENT, "in"):
                kind = ActionKind.TRANSFER_IN
            elif ts.accept(TokenType.IDENT, "out"):
                kind = ActionKind.TRANSFER_OUT
            else:
                ts.fail("transfer needs a direction 'in' or 'out'", direction)
        if kw.text in SYNONYMS:
            ts.report(
                "SYNONYM_NORMALIZED",
                f"{kw.text!r} is stored as 'receive'",
                kw,
                warning=True,
            )
        literal: Scalar = None
        lit_tok = ts.current
        if ts.accept(TokenType.EQUALS):
            lit_tok = ts.current
            literal = ts.literal()
        times = 1
        if ts.accept(TokenType.IDENT, "times"):
            times_tok = ts.expect(TokenType.INT, what="a repetition count")
            times = times_tok.value
            if kind is not ActionKind.CREATE or times < 1:
                ts.report("INVALID_DECLARATION", "'times N' needs a create node and N >= 1", times_tok)
                times = 1
        if literal is not None and kind not in (ActionKind.CREATE, ActionKind.PROCESS, ActionKind.STORE):
            ts.report("INVALID_DECLARATION", f"{kind.value} nodes cannot carry a literal", lit_tok)
            literal = None
        base = default_base(kind, thing)
        if ts.accept(TokenType.IDENT, "as"):
            name_tok = ts.expect(TokenType.IDENT, what="a node name")
            local = name_tok.text
        else:
            name_tok = kw
            local = scope.names.take(base)
        nid = _join(scope.id, local)
        if nid in self.nodes or nid in self.thimac_ids:
            ts.report("DUPLICATE_ID", f"duplicate node id {nid!r}", name_tok)
            return nid
        self.nodes[nid] = ActionNode(nid, scope.id, kind, thing, literal, times)
        self.node_tokens[nid] = name_tok
        scope.nodes.append(nid)
        return nid

    def guard(self, scope: _ThimacBuilder) -> tuple[GuardKind, str | None, int | None, Token, _ThimacBuilder]:
        ts = self.ts
        ts.expect(TokenType.LBRACKET)
        word = ts.expect(TokenType.IDENT, what="a guard predicate (eq, ne, count)")
        if word.text == "count":
            n_tok = ts.expect(TokenType.INT, what="a count")
            if n_tok.value < 1:
                ts.fail("count guard needs N >= 1", n_tok)
            ts.expect(TokenType.RBRACKET)
            return (GuardKind.COUNT, None, n_tok.value, word, scope)
        if word.text not in ("eq", "ne"):
            ts.fail(f"unknown guard predicate {word.text!r}", word)
        operand, _ = ts.path()
        ts.expect(TokenType.RBRACKET)
        return (GuardKind(word.text), operand, None, word, scope)

    def _resolve(self, path: str, scope: _ThimacBuilder) -> str | None:
        for sid in scope.scopes():
            cand = _join(sid, path)
            if cand in self.nodes:
                return cand
        return None

    def resolve_arcs(self) -> list[Arc]:
        arcs: list[Arc] = []
        for i, pending in enumerate(self.arcs, start=1):
            ends: list[str] = []
            for path, tok, scope in (pending.source, pending.target):
                nid = self._resolve(path, scope)
                if nid is None:
                    self.ts.report("UNRESOLVED_ARC_ENDPOINT", f"arc endpoint {path!r} names no node", tok)
                    nid = path
                ends.append(nid)
            guard = None
            if pending.guard is not None:
                gkind, operand, n, _, gscope = pending.guard
                if operand is not None:
                    # unresolved operands are kept verbatim; validation reports them
                    operand = self._resolve(operand, gscope) or operand
                guard = Guard(gkind, operand, n)
            arcs.append(Arc(f"a{i}", pending.kind, ends[0], ends[1], guard))
        return arcs


def parse_model_diagnostics(source: str, file: str = "<input>") -> tuple[StaticModel | None, list[ParseDiagnostic]]:
    """Parse ``source``; return the model (None on errors) and every diagnostic."""
    parser = _ModelParser(source, file)
    model = parser.parse()
    return model, parser.ts.diagnostics


def parse_model(source: str, file: str = "<input>") -> StaticModel:
    model, diagnostics = parse_model_diagnostics(source, file)
    if model is None:
        raise ParseError(diagnostics)
    return model


def format_literal(value: Scalar) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    if value is None:
        return "none"
    if isinstance(value, int):
        return str(value)
    return quote(value)


def _is_word(text: str) -> bool:
    return text.isidentifier() and text.isascii()


def serialize_model(model: StaticModel) -> str:
    """Canonical text: thimacs in declaration order, then arcs in id order."""
    out: list[str] = []
    header = f"model {model.name}"
    if model.root.name != model.name:
        header += f" {quote(model.root.name)}"
    out.append(header)

    def emit(th: Thimac, depth: int) -> None:
        pad = "  " * depth
        names = NameAllocator()
        for nid in th.action_node_ids:
            out.append(pad + _declaration(model.nodes[nid], names))
        for child in th.children:
            local = child.id.rsplit(".", 1)[-1]
            line = f"{pad}thimac {local}"
            if child.name != local:
                line += f" {quote(child.name)}"
            out.append(line + " {")
            emit(child, depth + 1)
            out.append(pad + "}")

    emit(model.root, 0)
    for arc in sorted(model.arcs, key=lambda a: arc_sort_key(a.id)):
        arrow = "->" if arc.kind is ArcKind.FLOW else "~>"
        line = f"{arc.source} {arrow} {arc.target}"
        if arc.guard is not None:
            line += f" [{arc.guard}]"
        out.append(line)
    return "\n".join(out) + "\n"


def _declaration(node: ActionNode, names: NameAllocator) -> str:
    kind = node.kind
    parts = [kind.keyword, node.thing_type]
    if kind.is_transfer:
        parts.append(kind.direction or "")
    if node.literal is not None:
        parts += ["=", format_literal(node.literal)]
    if node.times != 1:
        parts += ["times", str(node.times)]
    base = default_base(kind, node.thing_type)
    if names.peek(base) == node.local_name:
        names.take(base)
    else:
        parts += ["as", node.local_name]
    return " ".join(parts)
