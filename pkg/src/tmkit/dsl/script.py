"""``.tms`` stimulus scripts.

One stimulus per line::

    at 1 inject keypad.key 1
    inject keypad.key 2        # no 'at': one tick after the previous stimulus
    at 40 inject stay.create_select

A missing payload defaults to ``true``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..core import NodeId, Scalar
from .diagnostics import ParseDiagnostic, ParseError
from .lexer import TokenType
from .model import format_literal
from .stream import TokenStream, _Abort


@dataclass(frozen=True)
class Stimulus:
    tick: int
    target: NodeId
    payload: Scalar = True


@dataclass(frozen=True)
class Script:
    stimuli: tuple[Stimulus, ...] = ()

    def __post_init__(self) -> None:
        for prev, cur in zip(self.stimuli, self.stimuli[1:]):
            if cur.tick < prev.tick:
                raise ValueError(f"script ticks must be non-decreasing ({prev.tick} then {cur.tick})")

    def __len__(self) -> int:
        return len(self.stimuli)

    def __iter__(self):
        return iter(self.stimuli)


def parse_script_diagnostics(source: str, file: str = "<input>") -> tuple[Script | None, list[ParseDiagnostic]]:
    ts = TokenStream(source, file)
    if not ts.ok:
        return None, ts.diagnostics
    stimuli: list[Stimulus] = []
    last = 0
    try:
        while not ts.at_end():
            if ts.accept(TokenType.SEMI):
                continue
            tick_tok = None
            if ts.accept(TokenType.IDENT, "at"):
                tick_tok = ts.expect(TokenType.INT, what="a tick")
                tick = tick_tok.value
                if tick < 1:
                    ts.fail("ticks start at 1", tick_tok)
            else:
                tick = last + 1
            ts.expect(TokenType.IDENT, "inject")
            target, target_tok = ts.path()
            payload: Scalar = True
            nxt = ts.current
            if nxt.type in (TokenType.INT, TokenType.STRING) or (
                nxt.type is TokenType.IDENT and nxt.text in ("true", "false", "none")
            ):
                payload = ts.literal()
            if tick < last:
                ts.report(
                    "NON_MONOTONIC_TICK",
                    f"tick {tick} comes after tick {last}",
                    tick_tok or target_tok,
                )
            last = max(last, tick)
            stimuli.append(Stimulus(tick, target, payload))
    except _Abort:
        return None, ts.diagnostics
    if ts.has_errors():
        return None, ts.diagnostics
    return Script(tuple(stimuli)), ts.diagnostics


def parse_script(source: str, file: str = "<input>") -> Script:
    script, diagnostics = parse_script_diagnostics(source, file)
    if script is None:
        raise ParseError(diagnostics)
    return script


def serialize_script(script: Script) -> str:
    return "".join(
        f"at {s.tick} inject {s.target} {format_literal(s.payload)}\n" for s in script.stimuli
    )
