"""``.tme`` event catalogs.

::

    event E1 "label" { nodes: keypad.create_digit, keypad.release_digit; time: "note" }

Regions are given as node sets; their arcs are induced from the model.
"""

from __future__ import annotations

from ..core import (
    DisconnectedRegionError,
    DynamicModel,
    EmptyRegionError,
    Event,
    StaticModel,
    UnknownNodeError,
    induced_region,
)
from .diagnostics import ParseDiagnostic, ParseError
from .lexer import Token, TokenType, quote
from .stream import TokenStream, _Abort


def parse_events_diagnostics(
    source: str, model: StaticModel, file: str = "<input>"
) -> tuple[DynamicModel | None, list[ParseDiagnostic]]:
    ts = TokenStream(source, file)
    if not ts.ok:
        return None, ts.diagnostics
    events: list[Event] = []
    seen: set[str] = set()
    try:
        if ts.check(TokenType.IDENT, "model") and ts.peek().type is TokenType.IDENT:
            ts.advance()
            ref = ts.advance()
            if ref.text != model.name:
                ts.report("MODEL_MISMATCH", f"events target model {ref.text!r}, not {model.name!r}", ref)
        while not ts.at_end():
            if ts.accept(TokenType.SEMI):
                continue
            ts.expect(TokenType.IDENT, "event")
            id_tok = ts.expect(TokenType.IDENT, what="an event id")
            label_tok = ts.expect(TokenType.STRING, what="an event label")
            nodes, node_toks, note = _event_body(ts)
            if id_tok.text in seen:
                ts.report("DUPLICATE_EVENT_ID", f"duplicate event id {id_tok.text!r}", id_tok)
                continue
            seen.add(id_tok.text)
            if not label_tok.value:
                ts.report("SYNTAX_ERROR", "event label must be non-empty", label_tok)
                continue
            region = _region(ts, model, nodes, node_toks, id_tok)
            if region is not None:
                events.append(Event(id_tok.text, label_tok.value, region, note))
    except _Abort:
        return None, ts.diagnostics
    if ts.has_errors():
        return None, ts.diagnostics
    return DynamicModel(model.name, tuple(events)), ts.diagnostics


def _event_body(ts: TokenStream) -> tuple[list[str], list[Token], str | None]:
    ts.expect(TokenType.LBRACE)
    nodes: list[str] = []
    toks: list[Token] = []
    note: str | None = None
    while not ts.accept(TokenType.RBRACE):
        if ts.accept(TokenType.SEMI):
            continue
        key = ts.expect(TokenType.IDENT, what="'nodes' or 'time'")
        ts.expect(TokenType.COLON)
        if key.text == "nodes":
            # an empty list is legal syntax; the region check reports it
            while ts.check(TokenType.IDENT):
                path, tok = ts.path()
                nodes.append(path)
                toks.append(tok)
                if not ts.accept(TokenType.COMMA):
                    break
        elif key.text == "time":
            note = ts.expect(TokenType.STRING, what="a time note").value
        else:
            ts.fail(f"unknown event field {key.text!r}", key)
    return nodes, toks, note


def _region(ts, model, nodes, node_toks, id_tok):
    if not nodes:
        ts.report("EMPTY_REGION", f"event {id_tok.text} has no nodes", id_tok)
        return None
    bad = [(p, tok) for p, tok in zip(nodes, node_toks) if p not in model.nodes]
    for path, tok in bad:
        ts.report("UNKNOWN_NODE_IN_REGION", f"event {id_tok.text}: unknown node {path!r}", tok)
    if bad:
        return None
    try:
        return induced_region(model, nodes)
    except DisconnectedRegionError as exc:
        ts.report("DISCONNECTED_REGION", f"event {id_tok.text}: {exc}", id_tok)
    except (EmptyRegionError, UnknownNodeError) as exc:  # pragma: no cover - checked above
        ts.report("UNKNOWN_NODE_IN_REGION", str(exc), id_tok)
    return None


def parse_events(source: str, model: StaticModel, file: str = "<input>") -> DynamicModel:
    dyn, diagnostics = parse_events_diagnostics(source, model, file)
    if dyn is None:
        raise ParseError(diagnostics)
    return dyn


def serialize_events(dyn: DynamicModel, model: StaticModel) -> str:
    """Canonical catalog text; region nodes listed in model declaration order."""
    order = model.node_order
    lines = [f"model {dyn.model_ref}"]
    for ev in dyn.events:
        nodes = sorted(ev.region.node_ids, key=lambda n: order[n])
        body = "nodes: " + ", ".join(nodes)
        if ev.time_note is not None:
            body += f"; time: {quote(ev.time_note)}"
        lines.append(f"event {ev.id} {quote(ev.label)} {{ {body} }}")
    return "\n".join(lines) + "\n"
