"""Thinging-machine models: one static diagram, events over it, and the
chronology between those events."""

from importlib.resources import files

from .core import (
    ActionKind,
    ActionNode,
    Arc,
    ArcKind,
    BehavioralModel,
    BehaviorEdge,
    DynamicModel,
    EdgeKind,
    Event,
    EventInstance,
    Guard,
    GuardKind,
    Region,
    StaticModel,
    Thimac,
    TMError,
    Trace,
    TraceStep,
    induced_region,
    static_connectivity,
)
from .dsl import parse_events, parse_model, parse_script, serialize_events, serialize_model
from .dynamics import compose_behavioral_model, derive_behavior_edges, view_integration_pairs
from .render import render_behavior, render_static
from .sim import SimConfig, detect_events, run, trace_conformance
from .validate import validate_behavior, validate_model

CORPUS = files(__name__) / "corpus"

__all__ = [
    "CORPUS",
    "ActionKind",
    "ActionNode",
    "Arc",
    "ArcKind",
    "BehaviorEdge",
    "BehavioralModel",
    "DynamicModel",
    "EdgeKind",
    "Event",
    "EventInstance",
    "Guard",
    "GuardKind",
    "Region",
    "SimConfig",
    "StaticModel",
    "TMError",
    "Thimac",
    "Trace",
    "TraceStep",
    "compose_behavioral_model",
    "derive_behavior_edges",
    "detect_events",
    "induced_region",
    "parse_events",
    "parse_model",
    "parse_script",
    "render_behavior",
    "render_static",
    "run",
    "serialize_events",
    "serialize_model",
    "static_connectivity",
    "trace_conformance",
    "validate_behavior",
    "validate_model",
    "view_integration_pairs",
]
