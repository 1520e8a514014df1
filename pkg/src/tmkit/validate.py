"""Semantic checks the parser cannot make.

Rules:

``FLOW_ORDER`` (error)
    flow arc whose (source kind, target kind) pair is not a legal successor.
``TRIGGER_INTRA`` (warning)
    trigger arc that stays inside one machine.
``TRIGGER_TARGET`` (warning)
    trigger arc into anything but a Create or Process node.
``GUARD_UNRESOLVED`` (error)
    ``eq``/``ne`` operand that is not a Store node, or ``count`` on an arc
    whose source is not a Receive node.
``BEHAVIOR_UNGROUNDED`` (error)
    derived behavior edge with no static arc between the two regions.
``BEHAVIOR_DECLARED`` (warning)
    declared behavior edge with no static arc and no ``why`` note.
``EVENT_ISOLATED`` (warning)
    event with no behavior edges that is not marked initial.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass

from .core import (
    ACTION_KINDS,
    ActionKind,
    ArcKind,
    BehavioralModel,
    DynamicModel,
    EdgeKind,
    GuardKind,
    StaticModel,
    arc_sort_key,
    static_connectivity,
)

K = ActionKind

# (source, target) -> legal; transfer out -> transfer in additionally needs two machines
_LEGAL: frozenset[tuple[ActionKind, ActionKind]] = frozenset(
    {
        (K.TRANSFER_IN, K.RECEIVE),
        (K.RECEIVE, K.PROCESS),
        (K.RECEIVE, K.RELEASE),
        (K.RECEIVE, K.STORE),
        (K.PROCESS, K.RELEASE),
        (K.PROCESS, K.STORE),
        (K.CREATE, K.PROCESS),
        (K.CREATE, K.RELEASE),
        (K.CREATE, K.STORE),
        (K.STORE, K.PROCESS),
        (K.STORE, K.RELEASE),
        (K.RELEASE, K.TRANSFER_OUT),
        (K.TRANSFER_OUT, K.TRANSFER_IN),
    }
)

SUCCESSOR_TABLE: dict[tuple[ActionKind, ActionKind], bool] = {
    (a, b): (a, b) in _LEGAL for a in ACTION_KINDS for b in ACTION_KINDS
}


def is_legal_flow(source: ActionKind, target: ActionKind) -> bool:
    return SUCCESSOR_TABLE[(source, target)]


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    rule: str
    severity: Severity
    location: str
    message: str

    def record(self) -> str:
        return f"{self.severity.value} {self.rule} {self.location} {self.message}"


_COLORS = {Severity.ERROR: "\033[31m", Severity.WARNING: "\033[33m"}


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def passes(self) -> bool:
        return not self.findings

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.ERROR]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.WARNING]

    def rules(self) -> list[str]:
        return [f.rule for f in self.findings]

    def __add__(self, other: ValidationReport) -> ValidationReport:
        return ValidationReport(self.findings + other.findings)

    def to_records(self) -> str:
        return "".join(f.record() + "\n" for f in self.findings)

    def to_text(self, color: bool | None = None) -> str:
        if color is None:
            color = os.environ.get("TM_COLOR", "0") == "1"
        lines = []
        for f in self.findings:
            sev = f.severity.value.upper()
            if color:
                sev = f"{_COLORS[f.severity]}{sev}\033[0m"
            lines.append(f"{sev:7} {f.rule:<20} {f.location}: {f.message}")
        lines.append(f"{len(self.errors)} error(s), {len(self.warnings)} warning(s)")
        return "\n".join(lines) + "\n"


def _sorted_arcs(model: StaticModel):
    return sorted(model.arcs, key=lambda a: arc_sort_key(a.id))


def validate_flow_grammar(model: StaticModel) -> ValidationReport:
    findings = []
    for arc in _sorted_arcs(model):
        if arc.kind is not ArcKind.FLOW:
            continue
        src = model.nodes[arc.source]
        dst = model.nodes[arc.target]
        legal = is_legal_flow(src.kind, dst.kind)
        if legal and src.kind is K.TRANSFER_OUT and src.owner == dst.owner:
            legal = False
        if not legal:
            findings.append(
                Finding(
                    "FLOW_ORDER",
                    Severity.ERROR,
                    arc.id,
                    f"{src.kind.label} -> {dst.kind.label} is not a legal flow "
                    f"({arc.source} -> {arc.target})",
                )
            )
    return ValidationReport(tuple(findings))


def validate_triggers(model: StaticModel) -> ValidationReport:
    findings = []
    for arc in _sorted_arcs(model):
        src = model.nodes[arc.source]
        dst = model.nodes[arc.target]
        if arc.kind is ArcKind.TRIGGER:
            if src.owner == dst.owner:
                findings.append(
                    Finding(
                        "TRIGGER_INTRA",
                        Severity.WARNING,
                        arc.id,
                        f"trigger {arc.source} ~> {arc.target} stays inside machine {src.owner or model.name!r}",
                    )
                )
            if dst.kind not in (K.CREATE, K.PROCESS):
                findings.append(
                    Finding(
                        "TRIGGER_TARGET",
                        Severity.WARNING,
                        arc.id,
                        f"trigger target {arc.target} is a {dst.kind.label} node, not create or process",
                    )
                )
        guard = arc.guard
        if guard is None:
            continue
        if guard.predicate is GuardKind.COUNT:
            if src.kind is not K.RECEIVE:
                findings.append(
                    Finding(
                        "GUARD_UNRESOLVED",
                        Severity.ERROR,
                        arc.id,
                        f"[{guard}] needs a receive node as source; {arc.source} is {src.kind.label}",
                    )
                )
        else:
            operand = model.nodes.get(guard.operand or "")
            if operand is None or operand.kind is not K.STORE:
                what = "does not exist" if operand is None else f"is a {operand.kind.label} node"
                findings.append(
                    Finding(
                        "GUARD_UNRESOLVED",
                        Severity.ERROR,
                        arc.id,
                        f"[{guard}] operand {guard.operand} {what}; a store node is required",
                    )
                )
    return ValidationReport(tuple(findings))


def validate_model(model: StaticModel) -> ValidationReport:
    return validate_flow_grammar(model) + validate_triggers(model)


def validate_behavior(
    model: StaticModel, dyn: DynamicModel, beh: BehavioralModel
) -> ValidationReport:
    findings = []
    touched: set[str] = set()
    for edge in beh.edges:
        touched.update((edge.source, edge.target))
        a = dyn.event(edge.source)
        b = dyn.event(edge.target)
        arcs = static_connectivity(model, a.region, b.region)
        loc = f"{edge.source}->{edge.target}"
        if edge.kind is EdgeKind.DERIVED and not arcs:
            findings.append(
                Finding(
                    "BEHAVIOR_UNGROUNDED",
                    Severity.ERROR,
                    loc,
                    "derived edge has no static arc between the two regions",
                )
            )
        elif edge.kind is EdgeKind.DECLARED and not arcs and not (edge.why or "").strip():
            findings.append(
                Finding(
                    "BEHAVIOR_DECLARED",
                    Severity.WARNING,
                    loc,
                    "declared chronology has no static arc; add a why: note",
                )
            )
    for ev in dyn.events:
        if ev.id not in touched and ev.id not in beh.initial:
            findings.append(
                Finding("EVENT_ISOLATED", Severity.WARNING, ev.id, "event has no behavior edges")
            )
    return ValidationReport(tuple(findings))


def legal_pairs() -> list[tuple[ActionKind, ActionKind]]:
    return [pair for pair, ok in SUCCESSOR_TABLE.items() if ok]


__all__ = [
    "Finding",
    "SUCCESSOR_TABLE",
    "Severity",
    "ValidationReport",
    "is_legal_flow",
    "legal_pairs",
    "validate_behavior",
    "validate_flow_grammar",
    "validate_model",
    "validate_triggers",
]
