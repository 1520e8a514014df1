"""Deterministic token-flow execution of a static model.

Each tick:

1. stimuli due this tick place a new thing at their target node;
2. every node, in model order, acts on the things waiting for it and on
   trigger activations that fell due; each action is one trace step and
   the thing then follows the first outgoing flow arc whose guard holds
   (or rests at the node when none does);
3. trigger arcs of the nodes that acted are evaluated and schedule their
   targets ``step_cost`` ticks later.

A thing acts at most once per tick. Receive nodes count arrivals for
``[count N]`` guards and wrap to zero once the largest N is reached. A
triggered Create births ``times`` things; its payload is its literal if
it has one, otherwise the combined batch of a count trigger (digits are
concatenated into a number, booleans are and-ed) or the triggering
thing's payload.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field, replace

from .core import (
    ActionKind,
    Arc,
    ArcKind,
    BehavioralModel,
    DynamicModel,
    EventInstance,
    GuardKind,
    ModelError,
    NodeId,
    Scalar,
    StaticModel,
    Thing,
    TMError,
    Trace,
    TraceStep,
)
from .dsl.script import Script
from .validate import Finding, Severity, ValidationReport

INJECTABLE = (ActionKind.CREATE, ActionKind.TRANSFER_IN)


class GuardEvaluationError(TMError):
    pass


class ScriptError(TMError):
    pass


@dataclass(frozen=True)
class SimConfig:
    max_ticks: int = 1000
    step_cost: int = 1
    stop_on_quiescence: bool = True

    def __post_init__(self) -> None:
        if self.max_ticks < 1:
            raise ValueError("max_ticks must be >= 1")
        if self.step_cost < 1:
            raise ValueError("step_cost must be >= 1")


@dataclass(frozen=True)
class _Firing:
    node: NodeId
    payload: Scalar
    count: int | None
    batch: tuple[Scalar, ...] | None


@dataclass(order=True)
class _Activation:
    due: int
    seq: int
    node: NodeId = field(compare=False)
    payload: Scalar = field(compare=False)
    batch: tuple[Scalar, ...] | None = field(compare=False)


def combine_batch(batch: tuple[Scalar, ...]) -> Scalar:
    if batch and all(isinstance(v, bool) for v in batch):
        return all(batch)
    if batch and all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in batch):
        return int("".join(str(v) for v in batch))
    return "".join("" if v is None else str(v) for v in batch)


def _same(a: Scalar, b: Scalar) -> bool:
    return type(a) is type(b) and a == b


class Simulator:
    """Mutable run state; the model and script are never modified."""

    def __init__(self, model: StaticModel, script: Script, config: SimConfig | None = None) -> None:
        self.model = model
        self.config = config or SimConfig()
        for stim in script.stimuli:
            node = model.nodes.get(stim.target)
            if node is None:
                raise ScriptError(f"script targets unknown node {stim.target!r}")
            if node.kind not in INJECTABLE:
                raise ScriptError(
                    f"script target {stim.target} is a {node.kind.label} node; "
                    "only create and transfer in nodes take stimuli"
                )
        self.stimuli = deque(script.stimuli)
        self.tick = 0
        self.things: dict[str, Thing] = {}
        self.waiting: dict[NodeId, deque[tuple[int, str]]] = {n: deque() for n in model.nodes}
        self.newborn: set[str] = set()
        self.activations: list[_Activation] = []
        self._seq = 0
        self.counters = {n: 0 for n, node in model.nodes.items() if node.kind is ActionKind.RECEIVE}
        self.batches: dict[NodeId, list[Scalar]] = {n: [] for n in self.counters}
        self.count_marks = {n: self._count_marks(n) for n in self.counters}
        self.wrap_at = {n: max(marks, default=None) for n, marks in self.count_marks.items()}
        self.stores: dict[NodeId, Scalar] = {
            n: node.literal
            for n, node in model.nodes.items()
            if node.kind is ActionKind.STORE and node.literal is not None
        }
        self.steps: list[TraceStep] = []
        self.truncated = False

    def _count_marks(self, node_id: NodeId) -> frozenset[int]:
        return frozenset(
            a.guard.n  # type: ignore[misc]
            for a in self.model.outgoing(node_id)
            if a.guard is not None and a.guard.predicate is GuardKind.COUNT
        )

    # -- state queries -------------------------------------------------
    def idle(self) -> bool:
        return not self.stimuli and not self.activations and not any(self.waiting.values())

    def resting_at(self, node_id: NodeId) -> list[str]:
        moving = {tid for q in self.waiting.values() for _, tid in q}
        return [
            tid for tid, th in self.things.items() if th.location == node_id and tid not in moving
        ]

    # -- running -------------------------------------------------------
    def run(self) -> Trace:
        cfg = self.config
        while True:
            if cfg.stop_on_quiescence and self.idle():
                break
            if self.tick >= cfg.max_ticks:
                self.truncated = not self.idle()
                break
            self.step()
        return self.trace()

    def trace(self) -> Trace:
        return Trace(tuple(self.steps), (), self.tick, self.truncated)

    def step(self) -> list[TraceStep]:
        """Advance one tick; return the steps fired in it."""
        self.tick += 1
        tick = self.tick
        first = len(self.steps)
        while self.stimuli and self.stimuli[0].tick <= tick:
            stim = self.stimuli.popleft()
            node = self.model.nodes[stim.target]
            tid = self._birth(node.thing_type, stim.payload, stim.target)
            if node.kind is ActionKind.CREATE:
                self.newborn.add(tid)
            self.waiting[stim.target].append((tick, tid))

        due = sorted(a for a in self.activations if a.due <= tick)
        self.activations = [a for a in self.activations if a.due > tick]
        due_by_node: dict[NodeId, list[_Activation]] = {}
        for act in due:
            due_by_node.setdefault(act.node, []).append(act)

        fired: list[_Firing] = []
        for node_id in self.model.nodes:
            queue = self.waiting[node_id]
            ready = [item for item in queue if item[0] <= tick]
            if ready:
                self.waiting[node_id] = deque(item for item in queue if item[0] > tick)
            for _, tid in ready:
                fired.append(self._act(node_id, tid))
            for act in due_by_node.get(node_id, ()):
                fired.extend(self._activate(act))

        for firing in fired:
            for arc in self.model.outgoing(firing.node, ArcKind.TRIGGER):
                if self._holds(arc, firing):
                    batch = firing.batch if arc.guard and arc.guard.predicate is GuardKind.COUNT else None
                    self._seq += 1
                    self.activations.append(
                        _Activation(tick + self.config.step_cost, self._seq, arc.target, firing.payload, batch)
                    )
        return self.steps[first:]

    # -- actions -------------------------------------------------------
    def _birth(self, type_label: str, payload: Scalar, location: NodeId) -> str:
        tid = f"t{len(self.things) + 1}"
        self.things[tid] = Thing(tid, type_label, payload, location, self.tick)
        return tid

    def _act(self, node_id: NodeId, tid: str) -> _Firing:
        node = self.model.nodes[node_id]
        thing = self.things[tid]
        count = batch = None
        if tid in self.newborn:
            self.newborn.discard(tid)
            self._record(node, (), (tid,))
        else:
            if node.kind is ActionKind.PROCESS and node.literal is not None:
                thing = replace(thing, payload=node.literal)
            elif node.kind is ActionKind.RECEIVE:
                count, batch = self._accumulate(node_id, thing.payload)
            elif node.kind is ActionKind.STORE:
                self.stores[node_id] = thing.payload
            self.things[tid] = thing
            self._record(node, (tid,), (tid,))
        firing = _Firing(node_id, thing.payload, count, batch)
        self._route(tid, firing)
        return firing

    def _accumulate(self, node_id: NodeId, payload: Scalar) -> tuple[int, tuple[Scalar, ...]]:
        self.counters[node_id] += 1
        self.batches[node_id].append(payload)
        count, batch = self.counters[node_id], tuple(self.batches[node_id])
        # a count trigger consumes the receipts gathered since the previous one
        if count in self.count_marks[node_id]:
            self.batches[node_id] = []
        wrap = self.wrap_at[node_id]
        if wrap is not None and count >= wrap:
            self.counters[node_id] = 0
        return count, batch

    def _activate(self, act: _Activation) -> list[_Firing]:
        node = self.model.nodes[act.node]
        if node.kind is ActionKind.CREATE:
            if node.literal is not None:
                payload = node.literal
            elif act.batch is not None:
                payload = combine_batch(act.batch)
            else:
                payload = act.payload
            firings = []
            for _ in range(node.times):
                tid = self._birth(node.thing_type, payload, act.node)
                self._record(node, (), (tid,))
                firing = _Firing(act.node, payload, None, None)
                self._route(tid, firing)
                firings.append(firing)
            return firings
        if node.kind is ActionKind.PROCESS:
            resident = self.resting_at(act.node)
            if resident:
                out = []
                for tid in resident:
                    thing = self.things[tid]
                    if node.literal is not None:
                        thing = self.things[tid] = replace(thing, payload=node.literal)
                    self._record(node, (tid,), (tid,))
                    firing = _Firing(act.node, thing.payload, None, None)
                    self._route(tid, firing)
                    out.append(firing)
                return out
            payload = node.literal if node.literal is not None else act.payload
            self._record(node, (), ())
            return [_Firing(act.node, payload, None, None)]
        # triggering a non-creating node is a bare signal (validation warns)
        self._record(node, (), ())
        return [_Firing(act.node, act.payload, None, None)]

    def _record(self, node, things_in: tuple[str, ...], things_out: tuple[str, ...]) -> None:
        self.steps.append(TraceStep(self.tick, node.id, node.kind, things_in, things_out))

    def _route(self, tid: str, firing: _Firing) -> None:
        for arc in self.model.outgoing(firing.node, ArcKind.FLOW):
            if self._holds(arc, firing):
                self.things[tid] = replace(self.things[tid], location=arc.target)
                self.waiting[arc.target].append((self.tick + self.config.step_cost, tid))
                return
        self.things[tid] = replace(self.things[tid], location=firing.node)

    def _holds(self, arc: Arc, firing: _Firing) -> bool:
        guard = arc.guard
        if guard is None:
            return True
        if guard.predicate is GuardKind.COUNT:
            if self.model.nodes[arc.source].kind is not ActionKind.RECEIVE:
                raise GuardEvaluationError(f"arc {arc.id}: count guard on a non-receive source")
            return firing.count == guard.n
        operand = self.model.nodes.get(guard.operand or "")
        if operand is None or operand.kind is not ActionKind.STORE:
            raise GuardEvaluationError(f"arc {arc.id}: operand {guard.operand!r} is not a store node")
        if guard.operand not in self.stores:
            raise GuardEvaluationError(f"arc {arc.id}: store {guard.operand} holds no value yet")
        equal = _same(firing.payload, self.stores[guard.operand])  # type: ignore[index]
        return equal if guard.predicate is GuardKind.EQ else not equal


def run(model: StaticModel, script: Script, config: SimConfig | None = None) -> Trace:
    return Simulator(model, script, config).run()


def detect_events(trace: Trace, dyn: DynamicModel) -> Trace:
    """Populate ``event_instances``.

    An event completes once every node of its region has fired since its
    previous instance completed; firings need not be contiguous.
    """
    seen: dict[str, dict[NodeId, int]] = {ev.id: {} for ev in dyn.events}
    watchers: dict[NodeId, list] = {}
    for ev in dyn.events:
        for nid in ev.region.node_ids:
            watchers.setdefault(nid, []).append(ev)
    found: list[tuple[int, int, int, EventInstance]] = []
    for seq, step in enumerate(trace.steps):
        for ev in watchers.get(step.node, ()):
            marks = seen[ev.id]
            marks.setdefault(step.node, step.tick)
            if len(marks) == len(ev.region.node_ids):
                inst = EventInstance(ev.id, min(marks.values()), step.tick)
                found.append((step.tick, dyn.order[ev.id], seq, inst))
                seen[ev.id] = {}
    found.sort(key=lambda item: item[:3])
    return replace(trace, event_instances=tuple(item[3] for item in found))


class ConformanceReport(ValidationReport):
    @property
    def conformant(self) -> bool:
        return not self.findings


def trace_conformance(trace: Trace, beh: BehavioralModel) -> ConformanceReport:
    """Check observed event chronology against the behavioral graph.

    Instances that end on the same tick are concurrent. Each instance is
    checked against the instances of the previous end tick: it conforms
    when one of them has an edge to it, or a path to it whose intermediate
    events also have instances in that two-tick window.
    """
    succ = beh.successors()
    groups: list[tuple[int, list[EventInstance]]] = []
    for inst in trace.event_instances:
        if groups and groups[-1][0] == inst.end:
            groups[-1][1].append(inst)
        else:
            groups.append((inst.end, [inst]))
    findings = []
    for (_, prev), (tick, cur) in zip(groups, groups[1:]):
        window = {i.event for i in prev} | {i.event for i in cur}
        for inst in cur:
            if not any(_reaches(succ, p.event, inst.event, window) for p in prev):
                last = prev[-1].event
                findings.append(
                    Finding(
                        "NONCONFORMANT",
                        Severity.ERROR,
                        f"{last}->{inst.event}",
                        f"no edge or path into {inst.event} (tick {tick}) from "
                        + ", ".join(p.event for p in prev),
                    )
                )
    return ConformanceReport(tuple(findings))


def _reaches(succ: dict[str, list[str]], a: str, b: str, window: set[str]) -> bool:
    stack = [a]
    seen = {a}
    while stack:
        for nxt in succ.get(stack.pop(), ()):
            if nxt == b:
                return True
            if nxt in window and nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


def serialize_trace(trace: Trace) -> str:
    lines = [f"# trace ticks={trace.ticks} truncated={'true' if trace.truncated else 'false'}"]
    for s in trace.steps:
        lines.append(
            f"{s.tick} {s.node} {s.kind.value} in=[{','.join(s.things_in)}] out=[{','.join(s.things_out)}]"
        )
    if trace.event_instances:
        lines.append("# events")
        lines.extend(f"{i.event} {i.start} {i.end}" for i in trace.event_instances)
    return "\n".join(lines) + "\n"


_STEP = re.compile(r"^(\d+) (\S+) (\w+) in=\[([^\]]*)\] out=\[([^\]]*)\]$")
_HEADER = re.compile(r"^# trace ticks=(\d+) truncated=(true|false)$")


def _ids(text: str) -> tuple[str, ...]:
    return tuple(x for x in text.split(",") if x)


def parse_trace(text: str) -> Trace:
    """Inverse of :func:`serialize_trace`."""
    ticks, truncated = 0, False
    steps: list[TraceStep] = []
    instances: list[EventInstance] = []
    in_events = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        header = _HEADER.match(line)
        if header:
            ticks, truncated = int(header.group(1)), header.group(2) == "true"
            continue
        if line == "# events":
            in_events = True
            continue
        if in_events:
            ev, start, end = line.split()
            instances.append(EventInstance(ev, int(start), int(end)))
            continue
        m = _STEP.match(line)
        if not m:
            raise ModelError(f"malformed trace line: {line!r}")
        steps.append(
            TraceStep(int(m.group(1)), m.group(2), ActionKind(m.group(3)), _ids(m.group(4)), _ids(m.group(5)))
        )
    return Trace(tuple(steps), tuple(instances), ticks, truncated)


__all__ = [
    "ConformanceReport",
    "GuardEvaluationError",
    "INJECTABLE",
    "ScriptError",
    "SimConfig",
    "Simulator",
    "combine_batch",
    "detect_events",
    "parse_trace",
    "run",
    "serialize_trace",
    "trace_conformance",
]
