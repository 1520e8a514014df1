"""Domain types for thinging-machine (TM) models.

A static model is a tree of thimacs. Each thimac owns action nodes (its
machine side); nodes are joined by flow arcs (a thing moves) and trigger
arcs (an action elsewhere is set off without moving anything). Regions are induced,
weakly connected subdiagrams; events pair a region with a time note.
"""

from __future__ import annotations

import enum
import typing as t
from dataclasses import dataclass, field
from functools import cached_property

Scalar = t.Union[int, str, bool, None]
NodeId = str
ArcId = str
EventId = str


class TMError(Exception):
    """Base class for model-level errors."""


class ModelError(TMError):
    pass


class UnknownNodeError(TMError):
    pass


class EmptyRegionError(TMError):
    pass


class DisconnectedRegionError(TMError):
    pass


class RegionModelMismatchError(TMError):
    pass


class ActionKind(enum.Enum):
    CREATE = "create"
    PROCESS = "process"
    RELEASE = "release"
    RECEIVE = "receive"
    TRANSFER_IN = "transfer_in"
    TRANSFER_OUT = "transfer_out"
    STORE = "store"

    @property
    def is_transfer(self) -> bool:
        return self in (ActionKind.TRANSFER_IN, ActionKind.TRANSFER_OUT)

    @property
    def keyword(self) -> str:
        return "transfer" if self.is_transfer else self.value

    @property
    def direction(self) -> str | None:
        if self is ActionKind.TRANSFER_IN:
            return "in"
        if self is ActionKind.TRANSFER_OUT:
            return "out"
        return None

    @property
    def label(self) -> str:
        return self.value.replace("_", " ")


# ordering used for enumeration and stable output
ACTION_KINDS: tuple[ActionKind, ...] = tuple(ActionKind)


class ArcKind(enum.Enum):
    FLOW = "flow"
    TRIGGER = "trigger"


class GuardKind(enum.Enum):
    EQ = "eq"
    NE = "ne"
    COUNT = "count"


@dataclass(frozen=True)
class Guard:
    """Arc condition.

    ``eq``/``ne`` compare the payload of the thing at the arc's source node
    with the value held by the Store node named by ``operand``.
    ``count`` holds when the source Receive node's accumulator equals ``n``.
    """

    predicate: GuardKind
    operand: NodeId | None = None
    n: int | None = None

    def __post_init__(self) -> None:
        if self.predicate is GuardKind.COUNT:
            if self.n is None or self.n < 1:
                raise ModelError(f"count guard needs n >= 1, got {self.n!r}")
            if self.operand is not None:
                raise ModelError("count guard takes no operand")
        else:
            if not self.operand:
                raise ModelError(f"{self.predicate.value} guard needs an operand")
            if self.n is not None:
                raise ModelError(f"{self.predicate.value} guard takes no count")

    def __str__(self) -> str:
        if self.predicate is GuardKind.COUNT:
            return f"count {self.n}"
        return f"{self.predicate.value} {self.operand}"


@dataclass(frozen=True)
class ActionNode:
    id: NodeId
    owner: str
    kind: ActionKind
    thing_type: str
    # initial/default payload: Create births with it, Process sets it, Store holds it
    literal: Scalar = None
    # number of things a Create births per firing
    times: int = 1

    def __post_init__(self) -> None:
        if self.times < 1:
            raise ModelError(f"{self.id}: times must be >= 1")
        if self.times != 1 and self.kind is not ActionKind.CREATE:
            raise ModelError(f"{self.id}: only create nodes take 'times'")
        if self.literal is not None and self.kind not in (
            ActionKind.CREATE,
            ActionKind.PROCESS,
            ActionKind.STORE,
        ):
            raise ModelError(f"{self.id}: {self.kind.value} nodes take no literal")

    @property
    def local_name(self) -> str:
        return self.id.rsplit(".", 1)[-1]


@dataclass(frozen=True)
class Arc:
    id: ArcId
    kind: ArcKind
    source: NodeId
    target: NodeId
    guard: Guard | None = None


@dataclass(frozen=True)
class Thimac:
    id: str
    name: str
    children: tuple[Thimac, ...] = ()
    action_node_ids: tuple[NodeId, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ModelError(f"thimac {self.id!r} has an empty name")

    def walk(self) -> t.Iterator[Thimac]:
        yield self
        for child in self.children:
            yield from child.walk()


def arc_sort_key(arc_id: ArcId) -> tuple[int, str]:
    digits = "".join(ch for ch in arc_id if ch.isdigit())
    return (int(digits) if digits else 0, arc_id)


@dataclass(frozen=True, eq=False)
class StaticModel:
    """The single unified model: thimac tree, action nodes, arcs.

    ``nodes`` is ordered: a thimac's own nodes come first, then its
    children's, depth first. That order is the firing order in simulation.
    """

    name: str
    root: Thimac
    nodes: t.Mapping[NodeId, ActionNode]
    arcs: tuple[Arc, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        owner_of: dict[NodeId, str] = {}
        for th in self.root.walk():
            if th.id in seen:
                raise ModelError(f"thimac {th.id!r} appears twice in the hierarchy")
            seen.add(th.id)
            for nid in th.action_node_ids:
                if nid in owner_of:
                    raise ModelError(f"node {nid!r} owned by two thimacs")
                owner_of[nid] = th.id
        if set(owner_of) != set(self.nodes):
            missing = sorted(set(self.nodes) ^ set(owner_of))
            raise ModelError(f"nodes and thimac ownership disagree: {missing}")
        for nid, node in self.nodes.items():
            if node.id != nid:
                raise ModelError(f"node key {nid!r} does not match id {node.id!r}")
            if owner_of[nid] != node.owner:
                raise ModelError(f"node {nid!r} owner mismatch")
        arc_ids: set[str] = set()
        for arc in self.arcs:
            if arc.id in arc_ids:
                raise ModelError(f"duplicate arc id {arc.id!r}")
            arc_ids.add(arc.id)
            for end in (arc.source, arc.target):
                if end not in self.nodes:
                    raise UnknownNodeError(f"arc {arc.id} endpoint {end!r} is not a node")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StaticModel):
            return NotImplemented
        return (
            self.name == other.name
            and self.root == other.root
            and list(self.nodes.items()) == list(other.nodes.items())
            and self.arcs == other.arcs
        )

    __hash__ = None  # type: ignore[assignment]

    @cached_property
    def thimacs(self) -> dict[str, Thimac]:
        """Every thimac by id, excluding the synthetic root."""
        return {th.id: th for th in self.root.walk() if th is not self.root}

    @cached_property
    def arcs_by_id(self) -> dict[ArcId, Arc]:
        return {arc.id: arc for arc in self.arcs}

    @cached_property
    def _outgoing(self) -> dict[NodeId, tuple[Arc, ...]]:
        out: dict[NodeId, list[Arc]] = {nid: [] for nid in self.nodes}
        for arc in sorted(self.arcs, key=lambda a: arc_sort_key(a.id)):
            out[arc.source].append(arc)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def node_order(self) -> dict[NodeId, int]:
        return {nid: i for i, nid in enumerate(self.nodes)}

    def top_level(self) -> tuple[Thimac, ...]:
        return self.root.children

    def outgoing(self, node_id: NodeId, kind: ArcKind | None = None) -> tuple[Arc, ...]:
        arcs = self._outgoing[node_id]
        if kind is None:
            return arcs
        return tuple(a for a in arcs if a.kind is kind)

    def node(self, node_id: NodeId) -> ActionNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"unknown node {node_id!r}") from None

    def same_machine(self, a: NodeId, b: NodeId) -> bool:
        return self.nodes[a].owner == self.nodes[b].owner


@dataclass(frozen=True)
class Region:
    node_ids: frozenset[NodeId]
    arc_ids: frozenset[ArcId] = frozenset()


@dataclass(frozen=True)
class Event:
    id: EventId
    label: str
    region: Region
    time_note: str | None = None

    def __post_init__(self) -> None:
        if not self.label:
            raise ModelError(f"event {self.id} has an empty label")


@dataclass(frozen=True)
class DynamicModel:
    model_ref: str
    events: tuple[Event, ...] = ()

    def __post_init__(self) -> None:
        ids = [e.id for e in self.events]
        if len(set(ids)) != len(ids):
            raise ModelError("event ids are not pairwise distinct")

    @cached_property
    def by_id(self) -> dict[EventId, Event]:
        return {e.id: e for e in self.events}

    @cached_property
    def order(self) -> dict[EventId, int]:
        return {e.id: i for i, e in enumerate(self.events)}

    def event(self, event_id: EventId) -> Event:
        return self.by_id[event_id]


class EdgeKind(enum.Enum):
    DERIVED = "derived"
    DECLARED = "declared"


@dataclass(frozen=True)
class BehaviorEdge:
    source: EventId
    target: EventId
    kind: EdgeKind = EdgeKind.DERIVED
    why: str | None = None


@dataclass(frozen=True)
class BehavioralModel:
    events: DynamicModel
    edges: tuple[BehaviorEdge, ...] = ()
    initial: frozenset[EventId] = frozenset()

    def __post_init__(self) -> None:
        known = self.events.by_id
        for edge in self.edges:
            for end in (edge.source, edge.target):
                if end not in known:
                    raise ModelError(f"behavior edge names unknown event {end!r}")

    def edge_set(self) -> set[tuple[EventId, EventId]]:
        return {(e.source, e.target) for e in self.edges}

    def successors(self) -> dict[EventId, list[EventId]]:
        succ: dict[EventId, list[EventId]] = {e.id: [] for e in self.events.events}
        for edge in self.edges:
            succ[edge.source].append(edge.target)
        return succ


@dataclass(frozen=True)
class Thing:
    id: str
    type_label: str
    payload: Scalar
    location: NodeId
    born_at: int


@dataclass(frozen=True)
class TraceStep:
    tick: int
    node: NodeId
    kind: ActionKind
    things_in: tuple[str, ...] = ()
    things_out: tuple[str, ...] = ()


@dataclass(frozen=True)
class EventInstance:
    event: EventId
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ModelError(f"instance of {self.event} ends before it starts")


@dataclass(frozen=True)
class Trace:
    steps: tuple[TraceStep, ...] = ()
    event_instances: tuple[EventInstance, ...] = ()
    ticks: int = 0
    truncated: bool = False

    def __post_init__(self) -> None:
        for prev, cur in zip(self.steps, self.steps[1:]):
            if cur.tick < prev.tick:
                raise ModelError("trace steps are not ordered by tick")

    def steps_at(self, node_id: NodeId) -> list[TraceStep]:
        return [s for s in self.steps if s.node == node_id]

    def instance_ids(self) -> list[EventId]:
        return [inst.event for inst in self.event_instances]


def _weakly_connected(nodes: frozenset[NodeId], arcs: t.Iterable[Arc]) -> bool:
    adj: dict[NodeId, set[NodeId]] = {n: set() for n in nodes}
    for arc in arcs:
        adj[arc.source].add(arc.target)
        adj[arc.target].add(arc.source)
    start = next(iter(sorted(nodes)))
    seen = {start}
    stack = [start]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(nodes)


def induced_region(model: StaticModel, node_ids: t.Iterable[NodeId]) -> Region:
    """Region over ``node_ids`` with every arc internal to the set."""
    nodes = frozenset(node_ids)
    if not nodes:
        raise EmptyRegionError("a region needs at least one node")
    unknown = sorted(n for n in nodes if n not in model.nodes)
    if unknown:
        raise UnknownNodeError(f"unknown node(s) in region: {', '.join(unknown)}")
    internal = [a for a in model.arcs if a.source in nodes and a.target in nodes]
    if not _weakly_connected(nodes, internal):
        raise DisconnectedRegionError(
            "region is not weakly connected: " + ", ".join(sorted(nodes))
        )
    return Region(nodes, frozenset(a.id for a in internal))


def check_region(model: StaticModel, region: Region) -> None:
    """Raise RegionModelMismatchError unless ``region`` is an induced region of ``model``."""
    try:
        expected = induced_region(model, region.node_ids)
    except TMError as exc:
        raise RegionModelMismatchError(str(exc)) from exc
    if expected != region:
        raise RegionModelMismatchError("region arcs differ from the induced subdiagram")


def static_connectivity(model: StaticModel, source: Region, target: Region) -> set[ArcId]:
    """Arcs (flow or trigger) leaving ``source`` nodes and entering ``target`` nodes.

    Arcs internal to a region that both regions share are excluded, so a
    region is never connected to itself through its own arcs.
    """
    check_region(model, source)
    check_region(model, target)
    return {
        arc.id
        for arc in model.arcs
        if arc.source in source.node_ids
        and arc.target in target.node_ids
        and arc.id not in (source.arc_ids & target.arc_ids)
    }
