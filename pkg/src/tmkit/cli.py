"""``tmkit`` command line.

Exit codes: 0 ok, 1 validation error (or a model/script the tools reject),
2 usage or I/O error, 3 simulation stopped at ``--max-ticks``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .core import DynamicModel, StaticModel, TMError
from .dsl import ParseError, parse_events, parse_model, parse_model_diagnostics, parse_script
from .dsl.diagnostics import Severity as DiagSeverity
from .dynamics import (
    compose_behavioral_model,
    derive_behavior_edges,
    parse_behavior,
    read_behavior_header,
    serialize_behavior,
    view_integration_pairs,
)
from .render import render_behavior, render_static
from .sim import SimConfig, detect_events, run, serialize_trace, trace_conformance
from .validate import validate_behavior, validate_model

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_TRUNCATED = 3


class UsageError(Exception):
    """Bad arguments that argparse itself cannot catch."""


def _read(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_model(path: str | Path) -> StaticModel:
    return parse_model(_read(path), str(path))


def _load_events(path: str | Path, model: StaticModel) -> DynamicModel:
    return parse_events(_read(path), model, str(path))


def _behavior_inputs(tmb_path: Path) -> tuple[StaticModel, DynamicModel]:
    """Load the model and events a ``.tmb`` names, relative to the file."""
    header = read_behavior_header(_read(tmb_path))
    if "model" not in header or "events" not in header:
        raise UsageError(f"{tmb_path}: behavior file must name its model and events")
    model = _load_model(tmb_path.parent / header["model"])
    return model, _load_events(tmb_path.parent / header["events"], model)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _relative(path: str, out: str | None) -> str:
    if out is None:
        return Path(path).as_posix()
    return Path(os.path.relpath(path, Path(out).resolve().parent)).as_posix()


def _require_suffix(path: str, suffix: str, view: str) -> None:
    if Path(path).suffix != suffix:
        raise UsageError(f"the {view} view needs a {suffix} file, got {path}")


# -- subcommands ------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    model, diags = parse_model_diagnostics(_read(args.model), args.model)
    for d in diags:
        print(d)
    if model is None:
        return EXIT_INVALID
    report = validate_model(model)
    if args.events or args.behavior:
        dyn = _load_events(args.events, model) if args.events else None
        if args.behavior:
            tmb = Path(args.behavior)
            if dyn is None:
                model, dyn = _behavior_inputs(tmb)
            beh = parse_behavior(_read(tmb), dyn, str(tmb))
            report = report + validate_behavior(model, dyn, beh)
        elif dyn is not None:
            print(f"{len(dyn.events)} event(s)")
    sys.stdout.write(report.to_text())
    return EXIT_OK if not report.errors else EXIT_INVALID


def cmd_simulate(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    script = parse_script(_read(args.script), args.script)
    config = SimConfig(max_ticks=args.max_ticks, step_cost=args.step_cost)
    trace = run(model, script, config)

    dyn = beh = None
    if args.behavior:
        tmb = Path(args.behavior)
        if args.events:
            dyn = _load_events(args.events, model)
        else:
            _, dyn = _behavior_inputs(tmb)
        beh = parse_behavior(_read(tmb), dyn, str(tmb))
    elif args.events:
        dyn = _load_events(args.events, model)
    if dyn is not None:
        trace = detect_events(trace, dyn)
    _emit(serialize_trace(trace), args.out)

    # the trace owns stdout unless it went to a file
    status = sys.stdout if args.out else sys.stderr
    code = EXIT_OK
    if beh is not None:
        report = trace_conformance(trace, beh)
        verdict = "conformant" if report.conformant else "NONCONFORMANT"
        print(f"{verdict}: {len(trace.event_instances)} event instance(s)", file=status)
        if not report.conformant:
            status.write(report.to_text())
            code = EXIT_INVALID
    elif dyn is not None:
        print(f"{len(trace.event_instances)} event instance(s)", file=status)
    if trace.truncated:
        print(f"truncated at tick {trace.ticks}", file=status)
        code = EXIT_TRUNCATED
    return code


def cmd_render(args: argparse.Namespace) -> int:
    if args.view == "static":
        _require_suffix(args.path, ".tm", "static")
        text = render_static(_load_model(args.path))
    else:
        _require_suffix(args.path, ".tmb", "behavior")
        tmb = Path(args.path)
        _, dyn = _behavior_inputs(tmb)
        text = render_behavior(parse_behavior(_read(tmb), dyn, str(tmb)))
    _emit(text, args.out)
    return EXIT_OK


def cmd_events(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    dyn = _load_events(args.events, model)
    order = model.node_order
    for ev in dyn.events:
        nodes = ", ".join(sorted(ev.region.node_ids, key=order.__getitem__))
        print(f"{ev.id}\t{ev.label}\t{nodes}")
    return EXIT_OK


def cmd_behavior(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    dyn = _load_events(args.events, model)
    declared = initial = ()
    if args.declared:
        given = parse_behavior(_read(args.declared), dyn, args.declared)
        declared, initial = given.edges, given.initial
    beh = compose_behavioral_model(dyn, derive_behavior_edges(model, dyn), declared, initial)
    _emit(serialize_behavior(beh, _relative(args.model, args.out), _relative(args.events, args.out)), args.out)
    report = validate_behavior(model, dyn, beh)
    if report.findings:
        sys.stderr.write(report.to_text())
    return EXIT_OK if not report.errors else EXIT_INVALID


def cmd_stats(args: argparse.Namespace) -> int:
    if args.views < 0:
        raise UsageError("--views must be >= 0")
    print(view_integration_pairs(args.views))
    return EXIT_OK


# -- wiring -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tmkit", description="Thinging-machine model tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate a model and optional events/behavior")
    p.add_argument("model")
    p.add_argument("--events")
    p.add_argument("--behavior")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", help="run a stimulus script and write a trace")
    p.add_argument("model")
    p.add_argument("script")
    p.add_argument("--events")
    p.add_argument("--behavior")
    p.add_argument("--max-ticks", type=int, default=SimConfig.max_ticks)
    p.add_argument("--step-cost", type=int, default=SimConfig.step_cost)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("render", help="emit Graphviz DOT for a model or behavior file")
    p.add_argument("path")
    p.add_argument("--view", choices=("static", "behavior"), default="static")
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("events", help="list the events of a dynamic model")
    p.add_argument("model")
    p.add_argument("events")
    p.set_defaults(func=cmd_events)

    p = sub.add_parser("behavior", help="derive and compose the behavioral model")
    p.add_argument("model")
    p.add_argument("events")
    p.add_argument("--declared", help=".tmb file with declared edges and initial events")
    p.add_argument("--out")
    p.set_defaults(func=cmd_behavior)

    p = sub.add_parser("stats", help="pairwise integrations needed for n separate views")
    p.add_argument("--views", type=int, required=True)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tmkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"tmkit: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        for d in exc.diagnostics:
            if d.severity is DiagSeverity.ERROR:
                print(d, file=sys.stderr)
        return EXIT_INVALID
    except (TMError, ValueError) as exc:
        print(f"tmkit: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
