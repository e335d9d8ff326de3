"""Traceability graph over an analysis, plus completeness/reachability lints.

The graph links sc -> ls -> ifb -> hazard -> loss (the causal chain) and
annotates where behavior lives: ifb -> function -> component.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .diagnostics import Diagnostic, error, warning
from .engine import Analysis
from .model import SystemModel, downstream_reachable, entry_points


class NodeKind(str, Enum):
    LOSS = "loss"
    HAZARD = "hazard"
    IFB = "ifb"
    LS = "ls"
    SC = "sc"
    FUNCTION = "function"
    COMPONENT = "component"


class EdgeLabel(str, Enum):
    HAZARD_OF = "hazard_of"
    LEADS_TO = "leads_to"
    CAUSED_BY = "caused_by"
    CONSTRAINS = "constrains"
    LOCATED_IN = "located_in"
    PERFORMED_BY = "performed_by"


# label -> (source kind, destination kind)
LEGAL_EDGES: dict[EdgeLabel, tuple[NodeKind, NodeKind]] = {
    EdgeLabel.HAZARD_OF: (NodeKind.HAZARD, NodeKind.LOSS),
    EdgeLabel.LEADS_TO: (NodeKind.IFB, NodeKind.HAZARD),
    EdgeLabel.CAUSED_BY: (NodeKind.LS, NodeKind.IFB),
    EdgeLabel.CONSTRAINS: (NodeKind.SC, NodeKind.LS),
    EdgeLabel.PERFORMED_BY: (NodeKind.IFB, NodeKind.FUNCTION),
    EdgeLabel.LOCATED_IN: (NodeKind.FUNCTION, NodeKind.COMPONENT),
}

# Following these answers "why does this constraint exist".
CAUSAL_LABELS = frozenset({EdgeLabel.CONSTRAINS, EdgeLabel.CAUSED_BY,
                           EdgeLabel.LEADS_TO, EdgeLabel.HAZARD_OF})


@dataclass(frozen=True)
class TraceNode:
    id: str
    kind: NodeKind


@dataclass(frozen=True)
class TraceEdge:
    src: TraceNode
    dst: TraceNode
    label: EdgeLabel


class NodeNotFoundError(KeyError):
    """Raised by graph queries when the requested node does not exist."""


class TraceGraph:
    """Immutable directed graph; node and edge order is deterministic."""

    def __init__(self, nodes: tuple[TraceNode, ...], edges: tuple[TraceEdge, ...]):
        known = set(nodes)
        for edge in edges:
            expected = LEGAL_EDGES[edge.label]
            if (edge.src.kind, edge.dst.kind) != expected:
                raise ValueError(f"illegal edge {edge.src.kind.value} -{edge.label.value}-> "
                                 f"{edge.dst.kind.value}")
            if edge.src not in known or edge.dst not in known:
                raise ValueError(f"edge {edge.src.id} -> {edge.dst.id} references unknown node")
        self.nodes = nodes
        self.edges = edges
        self._out: dict[TraceNode, list[TraceEdge]] = {}
        self._in: dict[TraceNode, list[TraceEdge]] = {}
        for edge in edges:
            self._out.setdefault(edge.src, []).append(edge)
            self._in.setdefault(edge.dst, []).append(edge)

    def find(self, node_id: str, kind: NodeKind | None = None) -> TraceNode:
        for node in self.nodes:
            if node.id == node_id and (kind is None or node.kind is kind):
                return node
        raise NodeNotFoundError(node_id)

    def nodes_of_kind(self, kind: NodeKind) -> tuple[TraceNode, ...]:
        return tuple(n for n in self.nodes if n.kind is kind)

    def out_edges(self, node: TraceNode) -> tuple[TraceEdge, ...]:
        return tuple(self._out.get(node, ()))

    def in_edges(self, node: TraceNode) -> tuple[TraceEdge, ...]:
        return tuple(self._in.get(node, ()))


def build_trace_graph(analysis: Analysis) -> TraceGraph:
    """One node per loss/hazard/instance/constraint/function/component."""
    nodes: list[TraceNode] = []
    index: dict[tuple[str, NodeKind], TraceNode] = {}

    def add(node_id: str, kind: NodeKind) -> TraceNode:
        key = (node_id, kind)
        if key not in index:
            node = TraceNode(node_id, kind)
            index[key] = node
            nodes.append(node)
        return index[key]

    # Catalog losses and hazards are always present, so unused ones show up.
    for loss in analysis.catalog.losses:
        add(loss.id, NodeKind.LOSS)
    for hazard in analysis.catalog.hazards:
        add(hazard.id, NodeKind.HAZARD)
    for inst in analysis.ifb_instances:
        add(inst.id, NodeKind.IFB)
    for ls in analysis.ls_instances:
        add(ls.id, NodeKind.LS)
    for sc in analysis.constraints:
        add(sc.id, NodeKind.SC)
    for fn in analysis.model.functions:
        add(fn.id, NodeKind.FUNCTION)
    for comp in analysis.model.components:
        add(comp.id, NodeKind.COMPONENT)

    edges: list[TraceEdge] = []

    def link(src_key: tuple[str, NodeKind], dst_key: tuple[str, NodeKind],
             label: EdgeLabel) -> None:
        src = index.get(src_key)
        dst = index.get(dst_key)
        if src is not None and dst is not None:
            edges.append(TraceEdge(src, dst, label))

    for hazard in analysis.catalog.hazards:
        for loss_id in hazard.linked_losses:
            link((hazard.id, NodeKind.HAZARD), (loss_id, NodeKind.LOSS), EdgeLabel.HAZARD_OF)
    for inst in analysis.ifb_instances:
        for hazard_id in inst.hazards:
            link((inst.id, NodeKind.IFB), (hazard_id, NodeKind.HAZARD), EdgeLabel.LEADS_TO)
        link((inst.id, NodeKind.IFB), (inst.function.id, NodeKind.FUNCTION),
             EdgeLabel.PERFORMED_BY)
    for ls in analysis.ls_instances:
        link((ls.id, NodeKind.LS), (ls.parent.id, NodeKind.IFB), EdgeLabel.CAUSED_BY)
    for sc in analysis.constraints:
        for ls_id in sc.linked_ls:
            link((sc.id, NodeKind.SC), (ls_id, NodeKind.LS), EdgeLabel.CONSTRAINS)
    for fn in analysis.model.functions:
        link((fn.id, NodeKind.FUNCTION), (fn.component, NodeKind.COMPONENT),
             EdgeLabel.LOCATED_IN)

    return TraceGraph(tuple(nodes), tuple(edges))


def _closure(graph: TraceGraph, start: TraceNode, upward: bool) -> TraceGraph:
    reached = {start}
    frontier = [start]
    kept: list[TraceEdge] = []
    while frontier:
        node = frontier.pop()
        steps = graph.out_edges(node) if upward else graph.in_edges(node)
        for edge in steps:
            if edge.label not in CAUSAL_LABELS:
                continue
            kept.append(edge)
            nxt = edge.dst if upward else edge.src
            if nxt not in reached:
                reached.add(nxt)
                frontier.append(nxt)
    kept_set = set(kept)
    sub_nodes = tuple(n for n in graph.nodes if n in reached)
    sub_edges = tuple(e for e in graph.edges if e in kept_set)
    return TraceGraph(sub_nodes, sub_edges)


def ancestors(graph: TraceGraph, node_id: str, kind: NodeKind | None = None) -> TraceGraph:
    """Subgraph reachable along the causal chain toward losses."""
    return _closure(graph, graph.find(node_id, kind), upward=True)


def descendants(graph: TraceGraph, node_id: str, kind: NodeKind | None = None) -> TraceGraph:
    """Subgraph reachable against the causal chain, away from losses."""
    return _closure(graph, graph.find(node_id, kind), upward=False)


def completeness_lints(graph: TraceGraph) -> list[Diagnostic]:
    """Broken-chain findings: structural gaps are errors, coverage gaps warnings."""
    out_labels: dict[TraceNode, set[EdgeLabel]] = {}
    in_labels: dict[TraceNode, set[EdgeLabel]] = {}
    for edge in graph.edges:
        out_labels.setdefault(edge.src, set()).add(edge.label)
        in_labels.setdefault(edge.dst, set()).add(edge.label)

    diags: list[Diagnostic] = []
    for node in graph.nodes:
        outs = out_labels.get(node, set())
        ins = in_labels.get(node, set())
        if node.kind is NodeKind.HAZARD and EdgeLabel.HAZARD_OF not in outs:
            diags.append(error("ORPHAN_HAZARD", f"hazard '{node.id}' links no loss",
                               subject_id=node.id))
        elif node.kind is NodeKind.IFB and EdgeLabel.LEADS_TO not in outs:
            diags.append(error("UNLINKED_IFB", f"ifb instance '{node.id}' links no hazard",
                               subject_id=node.id))
        elif node.kind is NodeKind.LS and EdgeLabel.CONSTRAINS not in ins:
            diags.append(warning("UNCONSTRAINED_LS",
                                 f"loss scenario '{node.id}' has no constraint",
                                 subject_id=node.id))
        elif node.kind is NodeKind.LOSS and EdgeLabel.HAZARD_OF not in ins:
            diags.append(warning("UNUSED_LOSS", f"loss '{node.id}' is linked by no hazard",
                                 subject_id=node.id))
        elif node.kind is NodeKind.FUNCTION and EdgeLabel.PERFORMED_BY not in ins:
            diags.append(warning("DEAD_FUNCTION", f"function '{node.id}' has no ifb instances",
                                 subject_id=node.id))
    return diags


def reachability_lint(model: SystemModel, analysis: Analysis) -> list[Diagnostic]:
    """Functions no external data path reaches are analyzed but flagged."""
    reachable = downstream_reachable(model, entry_points(model))
    return [warning("UNREACHABLE_FUNCTION",
                    f"function '{fn.id}' is not reachable from EXTERNAL",
                    subject_id=fn.id)
            for fn in model.functions if fn not in reachable]


def collect_lints(analysis: Analysis, graph: TraceGraph) -> list[Diagnostic]:
    """All lint findings for a finished analysis, in a fixed order."""
    return completeness_lints(graph) + reachability_lint(analysis.model, analysis)
