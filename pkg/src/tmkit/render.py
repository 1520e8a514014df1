"""Graphviz DOT text for static and behavioral models.

Output is plain DOT (no HTML labels): one ``subgraph cluster_*`` per
thimac, solid black edges for flows, dashed gray edges for triggers,
bold outlines for create nodes and cylinders for store nodes. The legend
is the graph label, so it adds no nodes or edges.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ActionKind, ArcKind, BehavioralModel, EdgeKind, StaticModel, Thimac, arc_sort_key
from .dsl.model import format_literal

STATIC_LEGEND = (
    "legend: solid black = flow; dashed gray = trigger; "
    "bold outline = create; cylinder = store; box = other actions"
)
BEHAVIOR_LEGEND = "legend: solid = derived from static arcs; dashed = declared chronology"


@dataclass(frozen=True)
class RenderOptions:
    rankdir: str = "LR"
    show_literals: bool = True
    fontname: str = "Helvetica"


def dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _cluster_name(thimac_id: str) -> str:
    return "cluster_" + thimac_id.replace(".", "__")


def _node_attrs(node, options: RenderOptions) -> str:
    label = f"{node.kind.label}\n{node.thing_type}"
    if options.show_literals and node.literal is not None:
        label += f" = {format_literal(node.literal)}"
    if node.times != 1:
        label += f" x{node.times}"
    attrs = [f"label={dot_quote(label)}"]
    if node.kind is ActionKind.STORE:
        attrs.append("shape=cylinder")
    else:
        attrs.append("shape=box")
    if node.kind is ActionKind.CREATE:
        attrs.append("style=bold")
    return ", ".join(attrs)


def render_static(model: StaticModel, options: RenderOptions | None = None) -> str:
    options = options or RenderOptions()
    out = [
        f"digraph {dot_quote(model.name)} {{",
        f"  graph [rankdir={options.rankdir}, compound=true, fontname={dot_quote(options.fontname)}, "
        f"labelloc=b, label={dot_quote(STATIC_LEGEND)}];",
        f"  node [fontname={dot_quote(options.fontname)}, fontsize=10];",
        f"  edge [fontname={dot_quote(options.fontname)}, fontsize=9];",
    ]

    def emit(th: Thimac, depth: int) -> None:
        pad = "  " * depth
        for nid in th.action_node_ids:
            out.append(f"{pad}{dot_quote(nid)} [{_node_attrs(model.nodes[nid], options)}];")
        for child in th.children:
            out.append(f"{pad}subgraph {_cluster_name(child.id)} {{")
            out.append(f"{pad}  label={dot_quote(child.name)};")
            emit(child, depth + 1)
            out.append(f"{pad}}}")

    emit(model.root, 1)
    for arc in sorted(model.arcs, key=lambda a: arc_sort_key(a.id)):
        if arc.kind is ArcKind.FLOW:
            attrs = ["color=black", "style=solid"]
        else:
            attrs = ["color=gray40", "style=dashed"]
        if arc.guard is not None:
            attrs.append(f"label={dot_quote(str(arc.guard))}")
        out.append(f"  {dot_quote(arc.source)} -> {dot_quote(arc.target)} [{', '.join(attrs)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def render_behavior(beh: BehavioralModel, options: RenderOptions | None = None) -> str:
    options = options or RenderOptions()
    dyn = beh.events
    out = [
        f"digraph {dot_quote(dyn.model_ref + '_behavior')} {{",
        f"  graph [rankdir=TB, fontname={dot_quote(options.fontname)}, "
        f"labelloc=b, label={dot_quote(BEHAVIOR_LEGEND)}];",
        f"  node [shape=box, style=rounded, fontname={dot_quote(options.fontname)}, fontsize=10];",
    ]
    for ev in dyn.events:
        attrs = f"label={dot_quote(ev.id + chr(10) + ev.label)}"
        if ev.id in beh.initial:
            attrs += ", peripheries=2"
        out.append(f"  {dot_quote(ev.id)} [{attrs}];")
    for edge in beh.edges:
        style = "solid" if edge.kind is EdgeKind.DERIVED else "dashed"
        out.append(f"  {dot_quote(edge.source)} -> {dot_quote(edge.target)} [style={style}];")
    out.append("}")
    return "\n".join(out) + "\n"
