"""Dynamic and behavioral layers derived from one static model.

Behavior edges come from two places: *derived* edges, where some static arc
leaves one event's region and enters another's, and *declared* edges, which
record chronology the static model cannot show (the homeowner pressing the
next key) and must say why.

``.tmb`` files hold a behavioral model::

    model "safehome.tm"
    events "safehome.tme"
    initial E1
    edge E1 -> E2 derived
    edge E2 -> E3 declared why:"the homeowner keys the next digit"
"""

from __future__ import annotations

import typing as t

from .core import (
    BehavioralModel,
    BehaviorEdge,
    DynamicModel,
    EdgeKind,
    EventId,
    StaticModel,
    TMError,
    static_connectivity,
)
from .dsl.diagnostics import ParseError
from .dsl.lexer import TokenType, quote
from .dsl.stream import TokenStream, _Abort


class UnknownEventError(TMError):
    pass


class DeclaredWithoutWhyError(TMError):
    pass


def derive_behavior_edges(model: StaticModel, dyn: DynamicModel) -> list[BehaviorEdge]:
    """One DERIVED edge per ordered event pair joined by a static arc, catalog order."""
    edges = []
    for a in dyn.events:
        for b in dyn.events:
            if a.id == b.id:
                continue
            if static_connectivity(model, a.region, b.region):
                edges.append(BehaviorEdge(a.id, b.id, EdgeKind.DERIVED))
    return edges


EdgeLike = t.Union[BehaviorEdge, t.Tuple[EventId, EventId], t.Tuple[EventId, EventId, str]]


def _as_edge(item: EdgeLike, kind: EdgeKind) -> BehaviorEdge:
    if isinstance(item, BehaviorEdge):
        return BehaviorEdge(item.source, item.target, kind, item.why)
    if len(item) == 3:
        return BehaviorEdge(item[0], item[1], kind, item[2])  # type: ignore[misc]
    return BehaviorEdge(item[0], item[1], kind)


def compose_behavioral_model(
    dyn: DynamicModel,
    derived: t.Iterable[EdgeLike] = (),
    declared: t.Iterable[EdgeLike] = (),
    initial: t.Iterable[EventId] = (),
) -> BehavioralModel:
    """Union of derived and declared edges, deduplicated, in canonical order.

    A pair present in both inputs keeps only its derived edge. Declared
    edges need a non-blank ``why``.
    """
    known = dyn.by_id
    merged: dict[tuple[EventId, EventId], BehaviorEdge] = {}
    for item in declared:
        edge = _as_edge(item, EdgeKind.DECLARED)
        if not (edge.why or "").strip():
            raise DeclaredWithoutWhyError(f"declared edge {edge.source}->{edge.target} has no why")
        key = (edge.source, edge.target)
        prev = merged.get(key)
        # keep the lexically first note so input order never matters
        if prev is None or (edge.why or "") < (prev.why or ""):
            merged[key] = edge
    for item in derived:
        edge = _as_edge(item, EdgeKind.DERIVED)
        merged[(edge.source, edge.target)] = BehaviorEdge(edge.source, edge.target, EdgeKind.DERIVED)
    for a, b in merged:
        for end in (a, b):
            if end not in known:
                raise UnknownEventError(f"behavior edge names unknown event {end!r}")
    initial = frozenset(initial)
    for ev in initial:
        if ev not in known:
            raise UnknownEventError(f"initial event {ev!r} is not in the catalog")
    order = dyn.order
    edges = sorted(merged.values(), key=lambda e: (order[e.source], order[e.target]))
    return BehavioralModel(dyn, tuple(edges), initial)


def view_integration_pairs(n: int) -> int:
    """Pairwise integrations needed to fully integrate ``n`` separate views."""
    if n < 0:
        raise ValueError("number of views must be >= 0")
    return n * (n - 1) // 2


def serialize_behavior(
    beh: BehavioralModel, model_path: str | None = None, events_path: str | None = None
) -> str:
    lines = []
    if model_path is not None:
        lines.append(f"model {quote(model_path)}")
    if events_path is not None:
        lines.append(f"events {quote(events_path)}")
    order = beh.events.order
    for ev in sorted(beh.initial, key=order.__getitem__):
        lines.append(f"initial {ev}")
    for edge in beh.edges:
        line = f"edge {edge.source} -> {edge.target} {edge.kind.value}"
        if edge.why is not None:
            line += f" why:{quote(edge.why)}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def read_behavior_header(source: str) -> dict[str, str]:
    """The ``model``/``events`` paths named at the top of a ``.tmb`` file."""
    ts = TokenStream(source, "<tmb>")
    header: dict[str, str] = {}
    if not ts.ok:
        return header
    while ts.current.type is TokenType.IDENT and ts.current.text in ("model", "events"):
        key = ts.advance().text
        tok = ts.accept(TokenType.STRING)
        if tok is None:
            break
        header[key] = tok.value
    return header


def parse_behavior(source: str, dyn: DynamicModel, file: str = "<input>") -> BehavioralModel:
    """Parse ``.tmb`` text against ``dyn``; edges keep their file kinds and notes.

    Unlike :func:`compose_behavioral_model` this accepts declared edges
    without a note so that validation can report them.
    """
    ts = TokenStream(source, file)
    edges: list[BehaviorEdge] = []
    initial: set[str] = set()
    try:
        if not ts.ok:
            raise _Abort()
        while not ts.at_end():
            word = ts.expect(TokenType.IDENT, what="'edge', 'initial', 'model' or 'events'")
            if word.text in ("model", "events"):
                ts.expect(TokenType.STRING)
            elif word.text == "initial":
                tok = ts.expect(TokenType.IDENT, what="an event id")
                if tok.text not in dyn.by_id:
                    ts.report("UNKNOWN_EVENT", f"unknown event {tok.text!r}", tok)
                initial.add(tok.text)
            elif word.text == "edge":
                a = ts.expect(TokenType.IDENT, what="an event id")
                ts.expect(TokenType.ARROW)
                b = ts.expect(TokenType.IDENT, what="an event id")
                kind_tok = ts.expect(TokenType.IDENT, what="'derived' or 'declared'")
                if kind_tok.text not in ("derived", "declared"):
                    ts.fail(f"unknown edge kind {kind_tok.text!r}", kind_tok)
                why = None
                if ts.accept(TokenType.IDENT, "why"):
                    ts.expect(TokenType.COLON)
                    why = ts.expect(TokenType.STRING, what="a quoted note").value
                for tok in (a, b):
                    if tok.text not in dyn.by_id:
                        ts.report("UNKNOWN_EVENT", f"unknown event {tok.text!r}", tok)
                edges.append(BehaviorEdge(a.text, b.text, EdgeKind(kind_tok.text), why))
            else:
                ts.fail(f"unexpected {word.text!r}", word)
    except _Abort:
        raise ParseError(ts.diagnostics) from None
    ts.raise_if_errors()
    order = dyn.order
    edges.sort(key=lambda e: (order[e.source], order[e.target], e.kind.value))
    return BehavioralModel(dyn, tuple(edges), frozenset(initial))
