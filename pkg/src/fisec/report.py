"""Report emitters. Every output is byte-deterministic for a given analysis."""

from __future__ import annotations

import json

from .catalog import CausalCategory
from .diagnostics import Diagnostic
from .engine import Analysis
from .ids import EXTERNAL, compress_id_list, natural_key
from .model import SystemModel
from .trace import EdgeLabel, NodeKind, TraceGraph, collect_lints

# Loss-scenario grid columns, in table order.
_CATEGORY_COLUMNS: list[tuple[CausalCategory, str]] = [
    (CausalCategory.ALGORITHM, "Algorithm"),
    (CausalCategory.INPUT, "Input"),
    (CausalCategory.CALLING_BEHAVIOR, "Calling Behavior"),
    (CausalCategory.COMPUTING_RESOURCE, "Computing Resource"),
    (CausalCategory.ON_LINK, "On Link"),
]


def _lint_sort_key(d: Diagnostic):
    pos = d.position
    return (d.code, natural_key(d.subject_id or ""), d.severity.value, d.message,
            (pos.file, pos.line, pos.column) if pos else ("", 0, 0))


def _lints_payload(analysis: Analysis, graph: TraceGraph) -> list[dict]:
    findings = list(analysis.diagnostics) + collect_lints(analysis, graph)
    rows = []
    for d in sorted(findings, key=_lint_sort_key):
        rows.append({
            "severity": d.severity.value,
            "code": d.code,
            "message": d.message,
            "subject": d.subject_id,
            "position": ({"file": d.position.file, "line": d.position.line,
                          "column": d.position.column} if d.position else None),
        })
    return rows


def emit_json(analysis: Analysis, graph: TraceGraph) -> bytes:
    """UTF-8 JSON document; fixed key order, arrays sorted by id, LF newlines."""
    model = analysis.model
    ctx = model.context
    doc = {
        "context": {
            "title": ctx.title,
            "operation": ctx.operation.value,
            "location": ctx.location.value,
            "connection": ctx.connection.value,
        },
        "model": {
            "components": [
                {"id": c.id, "name": c.name, "kind": c.kind.value,
                 "custom_label": c.custom_label}
                for c in sorted(model.components, key=lambda c: natural_key(c.id))
            ],
            "functions": [
                {"id": f.id, "name": f.name, "component": f.component,
                 "class": f.responsibility.value}
                for f in sorted(model.functions, key=lambda f: natural_key(f.id))
            ],
            "flows": [
                {"id": fl.id, "source": fl.source, "sink": fl.sink,
                 "via": fl.via, "payload": fl.payload}
                for fl in sorted(model.flows, key=lambda fl: natural_key(fl.id))
            ],
        },
        "ifb_instances": [
            {"id": i.id, "function": i.function.id, "template": i.template.id,
             "description": i.description,
             "hazards": sorted(i.hazards, key=natural_key)}
            for i in sorted(analysis.ifb_instances, key=lambda i: natural_key(i.id))
        ],
        "ls_instances": [
            {"id": ls.id, "parent": ls.parent.id, "template": ls.template.id,
             "category": ls.category.value, "description": ls.description}
            for ls in sorted(analysis.ls_instances, key=lambda ls: natural_key(ls.id))
        ],
        "constraints": [
            {"id": sc.id, "kind": sc.kind.value, "text": sc.text,
             "linked_ls": sorted(sc.linked_ls, key=natural_key)}
            for sc in sorted(analysis.constraints, key=lambda sc: natural_key(sc.id))
        ],
        "lints": _lints_payload(analysis, graph),
        "trace_edges": [
            {"from": e.src.id, "to": e.dst.id, "label": e.label.value}
            for e in sorted(graph.edges,
                            key=lambda e: (natural_key(e.src.id), e.label.value,
                                           natural_key(e.dst.id)))
        ],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _cell(text: str) -> str:
    return text.replace("|", "\\|").replace("\n", " ")


def emit_markdown(analysis: Analysis, graph: TraceGraph) -> str:
    """Human-readable report mirroring the guideline's table layout."""
    model = analysis.model
    ctx = model.context
    lines: list[str] = ["# Security Analysis Report", ""]

    lines.append("## Use Case")
    lines.append("")
    if ctx.title:
        lines.append(f"- Title: {ctx.title}")
    lines.append(f"- Operation: {ctx.operation.value}")
    lines.append(f"- Location: {ctx.location.value}")
    lines.append(f"- Connection: {ctx.connection.value}")
    lines.append("")

    instances = sorted(analysis.ifb_instances, key=lambda i: natural_key(i.id))

    lines.append("## Functions")
    lines.append("")
    lines.append("| Function | Component | Class | NPCH | PCH | TI |")
    lines.append("| --- | --- | --- | --- | --- | --- |")
    for fn in sorted(model.functions, key=lambda f: natural_key(f.id)):
        mine = [i for i in instances if i.function.id == fn.id]
        cells = []
        for major in ("NPCH", "PCH", "TI"):
            tpl_ids = list(dict.fromkeys(
                i.template.id for i in mine if i.template.instructor.major.value == major))
            cells.append(", ".join(tpl_ids) if tpl_ids else "/")
        label = f"{fn.id}: {fn.name}" if fn.name else fn.id
        lines.append(f"| {_cell(label)} | {fn.component} | {fn.responsibility.value} "
                     f"| {cells[0]} | {cells[1]} | {cells[2]} |")
    lines.append("")

    lines.append("## Insecure Function Behaviors")
    lines.append("")
    lines.append("| ID | Description | Hazards |")
    lines.append("| --- | --- | --- |")
    for inst in instances:
        hazards = ", ".join(sorted(inst.hazards, key=natural_key)) or "/"
        lines.append(f"| {inst.id} | {_cell(inst.description)} | {hazards} |")
    lines.append("")

    lines.append("## Loss Scenarios")
    lines.append("")
    header = " | ".join(title for _, title in _CATEGORY_COLUMNS)
    lines.append(f"| IFB | {header} |")
    lines.append("| --- |" + " --- |" * len(_CATEGORY_COLUMNS))
    scenarios = sorted(analysis.ls_instances, key=lambda ls: natural_key(ls.id))
    for inst in instances:
        cells = []
        for category, _ in _CATEGORY_COLUMNS:
            ids = [ls.id for ls in scenarios
                   if ls.parent.id == inst.id and ls.category is category]
            cells.append(", ".join(ids) if ids else "/")
        lines.append(f"| {inst.id} | " + " | ".join(cells) + " |")
    lines.append("")

    lines.append("## Security Constraints")
    lines.append("")
    lines.append("| ID | Kind | Constraint | Linked LS |")
    lines.append("| --- | --- | --- | --- |")
    for sc in sorted(analysis.constraints, key=lambda sc: natural_key(sc.id)):
        linked = compress_id_list(list(sc.linked_ls))
        lines.append(f"| {sc.id} | {sc.kind.value} | {_cell(sc.text)} | {_cell(linked)} |")
    lines.append("")

    return "\n".join(lines)


def _dq(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot_trace(graph: TraceGraph) -> str:
    lines = ["digraph trace {", '  rankdir="BT";', '  node [shape="box"];']
    handles = {node: f"{node.kind.value}:{node.id}" for node in graph.nodes}
    for kind in (NodeKind.LOSS, NodeKind.HAZARD, NodeKind.IFB, NodeKind.LS, NodeKind.SC):
        layer = graph.nodes_of_kind(kind)
        if layer:
            members = " ".join(f"{_dq(handles[n])};" for n in layer)
            lines.append(f'  {{ rank="same"; {members} }}')
    for node in graph.nodes:
        attrs = [f"label={_dq(node.id)}"]
        if node.kind in (NodeKind.FUNCTION, NodeKind.COMPONENT):
            attrs.append('shape="ellipse"')
        lines.append(f"  {_dq(handles[node])} [{', '.join(attrs)}];")
    for edge in graph.edges:
        lines.append(f"  {_dq(handles[edge.src])} -> {_dq(handles[edge.dst])} "
                     f"[label={_dq(edge.label.value)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_fis(model: SystemModel) -> str:
    lines = ["digraph fis {", '  rankdir="LR";']
    for comp in model.components:
        title = f"{comp.id}: {comp.name}" if comp.name else comp.id
        lines.append(f"  subgraph {_dq('cluster_' + comp.id)} {{")
        lines.append(f"    label={_dq(title)};")
        for fn in model.functions:
            if fn.component == comp.id:
                label = f"{fn.id}: {fn.name}" if fn.name else fn.id
                lines.append(f"    {_dq(fn.id)} [label={_dq(label)}];")
        lines.append("  }")
    if any(EXTERNAL in (fl.source, fl.sink) for fl in model.flows):
        lines.append(f'  {_dq(EXTERNAL)} [shape="ellipse"];')
    for flow in model.flows:
        attrs = ""
        if flow.payload and flow.via:
            attrs = f" [label={_dq(f'{flow.payload} (via {flow.via})')}]"
        elif flow.payload:
            attrs = f" [label={_dq(flow.payload)}]"
        elif flow.via:
            attrs = f" [label={_dq(f'via {flow.via}')}]"
        lines.append(f"  {_dq(flow.source)} -> {_dq(flow.sink)}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_dot(subject: TraceGraph | SystemModel, flavor: str) -> str:
    """DOT text: 'trace' renders a TraceGraph, 'fis' renders a SystemModel."""
    if flavor == "trace":
        if not isinstance(subject, TraceGraph):
            raise TypeError("trace flavor renders a TraceGraph")
        return _dot_trace(subject)
    if flavor == "fis":
        if not isinstance(subject, SystemModel):
            raise TypeError("fis flavor renders a SystemModel")
        return _dot_fis(subject)
    raise ValueError(f"unknown DOT flavor: {flavor!r}")
