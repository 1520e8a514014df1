"""Textual formats: ``.tm`` models, ``.tme`` event catalogs, ``.tms`` scripts."""

from .diagnostics import CODES, ParseDiagnostic, ParseError, Severity, SourceSpan
from .events import parse_events, parse_events_diagnostics, serialize_events
from .model import format_literal, parse_model, parse_model_diagnostics, serialize_model
from .script import Script, Stimulus, parse_script, parse_script_diagnostics, serialize_script

__all__ = [
    "CODES",
    "ParseDiagnostic",
    "ParseError",
    "Script",
    "Severity",
    "SourceSpan",
    "Stimulus",
    "format_literal",
    "parse_events",
    "parse_events_diagnostics",
    "parse_model",
    "parse_model_diagnostics",
    "parse_script",
    "parse_script_diagnostics",
    "serialize_events",
    "serialize_model",
    "serialize_script",
]
