from __future__ import annotations

import pytest

from fisec.catalog import builtin_guideline
from fisec.engine import run_analysis
from fisec.trace import (
    EdgeLabel,
    NodeKind,
    NodeNotFoundError,
    TraceEdge,
    TraceGraph,
    TraceNode,
    ancestors,
    build_trace_graph,
    collect_lints,
    completeness_lints,
    descendants,
    reachability_lint,
)

from conftest import load_model

import expansion_oracle as oracle


@pytest.fixture(scope="module")
def example_graph(example_analysis):
    return build_trace_graph(example_analysis)


@pytest.fixture(scope="module")
def refined_graph(refined_analysis):
    return build_trace_graph(refined_analysis)


def test_graph_carries_every_analysis_object(example_graph):
    count = {kind: len(example_graph.nodes_of_kind(kind)) for kind in NodeKind}
    assert count[NodeKind.LOSS] == 4
    assert count[NodeKind.HAZARD] == 4
    assert count[NodeKind.IFB] == oracle.GOLDEN_IFB_COUNT
    assert count[NodeKind.LS] == oracle.GOLDEN_LS_COUNT
    assert count[NodeKind.SC] == oracle.GOLDEN_SC_COUNT
    assert count[NodeKind.FUNCTION] == 6
    assert count[NodeKind.COMPONENT] == 3


def test_illegal_edges_are_rejected_at_construction():
    sc = TraceNode("SC-1", NodeKind.SC)
    loss = TraceNode("L-1", NodeKind.LOSS)
    with pytest.raises(ValueError):
        TraceGraph((sc, loss), (TraceEdge(sc, loss, EdgeLabel.CONSTRAINS),))
    orphan = TraceEdge(sc, TraceNode("X", NodeKind.LS), EdgeLabel.CONSTRAINS)
    with pytest.raises(ValueError):
        TraceGraph((sc,), (orphan,))


def test_find_honours_the_kind_filter(example_graph):
    assert example_graph.find("L-1").kind is NodeKind.LOSS
    assert example_graph.find("F-1", NodeKind.FUNCTION).id == "F-1"
    with pytest.raises(NodeNotFoundError):
        example_graph.find("F-1", NodeKind.LOSS)
    with pytest.raises(NodeNotFoundError):
        example_graph.find("nope")


def test_every_sc_reaches_a_loss(example_graph):
    for sc in example_graph.nodes_of_kind(NodeKind.SC):
        up = ancestors(example_graph, sc.id)
        assert up.nodes_of_kind(NodeKind.LOSS), sc.id


def test_ancestor_closure_of_the_refined_scenario(refined_analysis, refined_graph):
    sc = next(c for c in refined_analysis.constraints
              if c.linked_ls == ("F-1_IFB-2.1_LS-2.3",))
    up = ancestors(refined_graph, sc.id)
    ids = {n.id for n in up.nodes}
    assert {"H-2", "L-1", "L-2", "L-3", "L-4"} <= ids
    # narrowed hazards: H-4 is gone from this refined branch
    assert "H-4" not in ids


def test_descendants_of_a_loss_cover_constraints(example_graph):
    down = descendants(example_graph, "L-1", NodeKind.LOSS)
    assert down.nodes_of_kind(NodeKind.SC)
    assert down.nodes_of_kind(NodeKind.IFB)


def test_closure_subgraphs_are_self_contained(example_graph):
    up = ancestors(example_graph, "SC-1")
    known = set(up.nodes)
    assert all(e.src in known and e.dst in known for e in up.edges)
    # function/component edges are context, not causality
    assert not up.nodes_of_kind(NodeKind.FUNCTION)


def test_example_run_produces_no_lints(example_analysis, example_graph):
    assert collect_lints(example_analysis, example_graph) == []


def test_isolated_function_triggers_reachability_lint(catalog):
    model = load_model("isolated_function.fis")
    analysis = run_analysis(model, catalog)
    lints = reachability_lint(model, analysis)
    assert [(d.code, d.subject_id) for d in lints] == [("UNREACHABLE_FUNCTION", "F-7")]
    assert lints[0].severity == "warning"


def _graph(nodes, edges):
    return TraceGraph(tuple(nodes), tuple(edges))


def test_completeness_lints_fire_per_defect():
    loss = TraceNode("L-1", NodeKind.LOSS)
    hazard = TraceNode("H-1", NodeKind.HAZARD)
    ifb = TraceNode("F-1_IFB-1", NodeKind.IFB)
    ls = TraceNode("F-1_IFB-1_LS-1", NodeKind.LS)

    # hazard with no loss link; ifb with no hazard link; ls with no constraint
    graph = _graph([loss, hazard, ifb, ls],
                   [TraceEdge(ls, ifb, EdgeLabel.CAUSED_BY)])
    codes = sorted(d.code for d in completeness_lints(graph))
    assert codes == ["ORPHAN_HAZARD", "UNCONSTRAINED_LS", "UNLINKED_IFB", "UNUSED_LOSS"]

    severities = {d.code: d.severity for d in completeness_lints(graph)}
    assert severities["ORPHAN_HAZARD"] == "error"
    assert severities["UNLINKED_IFB"] == "error"
    assert severities["UNCONSTRAINED_LS"] == "warning"
    assert severities["UNUSED_LOSS"] == "warning"


def test_builtin_catalog_losses_are_all_used(example_graph):
    lints = completeness_lints(example_graph)
    assert not [d for d in lints if d.code == "UNUSED_LOSS"]


def test_refined_graph_stays_lint_free(refined_analysis, refined_graph):
    assert collect_lints(refined_analysis, refined_graph) == []


def test_unlinked_template_surfaces_on_every_instance(example_model):
    # strip IFB-1's hazard links: both data_check functions inherit the gap
    from fisec.dsl import parse_catalog
    from fisec.catalog import builtin_guideline_text

    text = builtin_guideline_text().replace(
        "ifb IFB-1 class=data_check instructor=not_called hazards=[H-2,H-4]",
        "ifb IFB-1 class=data_check instructor=not_called hazards=[]")
    result = parse_catalog(text)
    assert result.ok and [d.code for d in result.diagnostics] == ["UNLINKED_IFB"]

    analysis = run_analysis(example_model, result.value)
    graph = build_trace_graph(analysis)
    hits = [d for d in completeness_lints(graph) if d.code == "UNLINKED_IFB"]
    assert sorted(d.subject_id for d in hits) == ["F-1_IFB-1", "F-4_IFB-1"]
    assert all(d.severity == "error" for d in hits)


def test_dead_function_lint_for_unexpandable_class(catalog):
    # a catalog with no service_process templates leaves such functions bare
    from fisec.catalog import Catalog

    kept = tuple(t for t in catalog.ifb_templates
                 if t.responsibility.value != "service_process")
    kept_ids = {t.id for t in kept}
    trimmed = Catalog(
        losses=catalog.losses,
        hazards=catalog.hazards,
        ifb_templates=kept,
        ls_templates=tuple(l for l in catalog.ls_templates if l.parent_ifb in kept_ids),
    )
    model = load_model("cyclic_flow.fis")  # two service_process functions
    analysis = run_analysis(model, trimmed)
    graph = build_trace_graph(analysis)
    codes = [d.code for d in completeness_lints(graph)]
    assert codes.count("DEAD_FUNCTION") == 2
