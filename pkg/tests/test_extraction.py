"""Structural decomposition, annotation and decomposition validation."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowforge.errors import AnnotatorUnavailable, AnnotatorViolation
from flowforge.extraction import (
    Decomposition,
    Segment,
    SourceWorkflowRef,
    StubAnnotator,
    annotate,
    build_segment_graph,
    decompose_structural,
    make_segment,
    segment_content_id,
    segment_from_dict,
    segment_to_dict,
    stitch,
    validate_decomposition,
)
from flowforge.ir import EdgeSpec, NodeRole, ParamSpec, ParamType, WorkflowGraph, graphs_isomorphic_modulo_layout

from conftest import graph, node, random_dag


def seg_nodes(d: Decomposition) -> list[set[str]]:
    return [s.graph.node_ids() for s in d.segments]


# -- cut rule -----------------------------------------------------------------

def test_chain_stays_one_segment():
    g = graph([node(i) for i in "ABC"], [("A", "B"), ("B", "C")])
    d = decompose_structural(g)
    assert seg_nodes(d) == [{"A", "B", "C"}]
    assert d.boundary_edges == ()


def test_fan_out_cuts_both_edges():
    # A has out-degree 2 in the condensation, so both edges are cut by hand
    g = graph([node(i) for i in "ABC"], [("A", "B"), ("A", "C")])
    d = decompose_structural(g)
    assert seg_nodes(d) == [{"A"}, {"B"}, {"C"}]
    assert len(d.boundary_edges) == 2


def test_diamond_cuts_all_four_edges():
    # fan-out at A and fan-in at D: every edge satisfies the cut rule
    g = graph([node(i) for i in "ABCD"],
              [("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")])
    d = decompose_structural(g)
    assert seg_nodes(d) == [{"A"}, {"B"}, {"C"}, {"D"}]
    assert len(d.boundary_edges) == 4


def test_trigger_out_edges_always_cut():
    g = graph(
        [node("T", "n8n-nodes-base.manualTrigger"), node("A"), node("B")],
        [("T", "A"), ("A", "B")],
    )
    d = decompose_structural(g)
    assert seg_nodes(d) == [{"T"}, {"A", "B"}]
    assert [e.key() for e in d.boundary_edges] == [("T", 0, "A", 0)]


def test_trigger_segments_not_reusable():
    g = graph(
        [node("T", "n8n-nodes-base.manualTrigger"), node("A")],
        [("T", "A")],
    )
    d = decompose_structural(g)
    flags = {frozenset(s.graph.node_ids()): s.reusable for s in d.segments}
    assert flags == {frozenset({"T"}): False, frozenset({"A"}): True}


def test_cycle_stays_inside_one_segment():
    # B<->C collapse to one supernode; no inter-supernode branching, no cuts
    g = graph([node(i) for i in "ABCD"],
              [("A", "B"), ("B", "C"), ("C", "B"), ("C", "D")])
    d = decompose_structural(g)
    assert seg_nodes(d) == [{"A", "B", "C", "D"}]


def test_parallel_port_edges_do_not_count_as_fanout():
    # two parallel edges A->B collapse to one condensation edge
    g = graph([node("A"), node("B")],
              [EdgeSpec("A", "B", 0, 0), EdgeSpec("A", "B", 1, 0)])
    d = decompose_structural(g)
    assert seg_nodes(d) == [{"A", "B"}]


def test_segment_order_by_layer_then_id():
    g = graph([node(i) for i in "ABC"], [("A", "B"), ("A", "C")])
    d = decompose_structural(g)
    ordered = [min(s.graph.node_ids()) for s in d.segments]
    assert ordered == ["A", "B", "C"]


def test_determinism():
    rng = random.Random(99)
    g = random_dag(rng, 8, 20)
    d1 = decompose_structural(g)
    d2 = decompose_structural(g)
    assert [s.segment_id for s in d1.segments] == [s.segment_id for s in d2.segments]
    assert d1.boundary_edges == d2.boundary_edges


# -- partition + reconstruction properties --------------------------------------

def test_partition_property(rng):
    for _ in range(40):
        g = random_dag(rng)
        d = decompose_structural(g)
        all_ids = [nid for s in d.segments for nid in s.graph.node_ids()]
        assert len(all_ids) == len(set(all_ids)), "segments overlap"
        assert set(all_ids) == {n.node_id for n in g.nodes}, "nodes dropped"
        for s in d.segments:
            assert s.graph.nodes, "empty segment"


def test_every_edge_accounted_exactly_once(rng):
    for _ in range(40):
        g = random_dag(rng)
        d = decompose_structural(g)
        internal = [e.key() for s in d.segments for e in s.graph.internal_edges]
        boundary = [e.key() for e in d.boundary_edges]
        combined = sorted(internal + boundary)
        assert combined == sorted(e.key() for e in g.edges)


def test_stitch_reconstructs(rng):
    for _ in range(60):
        g = random_dag(rng)
        d = decompose_structural(g)
        assert graphs_isomorphic_modulo_layout(g, stitch(d))


def test_segments_weakly_connected(rng):
    for _ in range(40):
        g = random_dag(rng)
        for s in decompose_structural(g).segments:
            ids = sorted(s.graph.node_ids())
            parent = {i: i for i in ids}

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for e in s.graph.internal_edges:
                parent[find(e.source)] = find(e.target)
            assert len({find(i) for i in ids}) == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9))
def test_stitch_reconstructs_property(seed):
    g = random_dag(random.Random(seed), 3, 18)
    d = decompose_structural(g)
    assert graphs_isomorphic_modulo_layout(g, stitch(d))


# -- content addressing ---------------------------------------------------------

def test_segment_id_ignores_node_names():
    a = make_segment([node("x1", "t.a", name="First")], [], SourceWorkflowRef("w", "", ""))
    b = make_segment([node("x2", "t.a", name="Second")], [], SourceWorkflowRef("w", "", ""))
    assert a.segment_id == b.segment_id


def test_segment_id_ignores_member_order():
    n1, n2 = node("a", "t.a"), node("b", "t.b")
    e = EdgeSpec("a", "b")
    g1 = build_segment_graph([n1, n2], [e])
    g2 = build_segment_graph([n2, n1], [e])
    assert g1.segment_id == g2.segment_id


def test_segment_id_sees_topology():
    n1, n2 = node("a", "t.a"), node("b", "t.b")
    with_edge = build_segment_graph([n1, n2], [EdgeSpec("a", "b")])
    without_edge = build_segment_graph([n1, n2], [])
    assert with_edge.segment_id != without_edge.segment_id


def test_segment_id_sees_ports():
    n1, n2 = node("a", "t.a"), node("b", "t.b")
    p0 = build_segment_graph([n1, n2], [EdgeSpec("a", "b", 0, 0)])
    p1 = build_segment_graph([n1, n2], [EdgeSpec("a", "b", 1, 0)])
    assert p0.segment_id != p1.segment_id


# -- boundary params ------------------------------------------------------------

def test_boundary_params_from_sources_and_sinks():
    a = node("a", "t.a", outputs=[ParamSpec("data", ParamType.JSON)])
    b = node("b", "t.b",
             inputs=[ParamSpec("data", ParamType.JSON, required=True)],
             outputs=[ParamSpec("result", ParamType.JSON)])
    seg = build_segment_graph([a, b], [EdgeSpec("a", "b")])
    # a is the only source and has no required inputs; b is the only sink
    assert [p.name for p in seg.boundary_inputs] == []
    assert [p.name for p in seg.boundary_outputs] == ["result"]


def test_boundary_inputs_from_unfed_required():
    b = node("b", "t.b", inputs=[ParamSpec("data", ParamType.JSON, required=True),
                                 ParamSpec("opt", ParamType.STRING, required=False)])
    seg = build_segment_graph([b], [])
    assert [p.name for p in seg.boundary_inputs] == ["data"]


# -- annotation -----------------------------------------------------------------

def test_stub_annotation_description():
    g = graph(
        [node("a", "n8n-nodes-base.readPDF", name="Parse PDF"),
         node("b", "n8n-nodes-base.code", name="Extract Fields")],
        [("a", "b")],
    )
    d = annotate(decompose_structural(g))
    assert d.segments[0].description.segment_description == "Performs: Parse PDF, Extract Fields"
    assert d.segments[0].description.segment_name == "readPDF, code"


def test_annotate_fills_every_description():
    g = graph([node(i) for i in "ABC"], [("A", "B"), ("A", "C")])
    d = annotate(decompose_structural(g))
    assert all(s.description.segment_description for s in d.segments)


def test_annotator_topology_tampering_rejected():
    class Tamperer:
        def annotate(self, segment):
            extra = node("ghost", "t.ghost")
            return make_segment(
                list(segment.graph.nodes) + [extra],
                list(segment.graph.internal_edges),
                segment.description.source_workflow,
                name="x", description="y",
            )

    g = graph([node("A"), node("B")], [("A", "B")])
    with pytest.raises(AnnotatorViolation):
        annotate(decompose_structural(g), Tamperer())


def test_failing_annotator_maps_to_unavailable():
    class Exploder:
        def annotate(self, segment):
            raise RuntimeError("model is down")

    g = graph([node("A")], [])
    with pytest.raises(AnnotatorUnavailable):
        annotate(decompose_structural(g), Exploder())


def test_annotation_preserves_provenance():
    g = graph([node("A")], [], name="Origin", description="does things")
    d = annotate(decompose_structural(g))
    src = d.segments[0].description.source_workflow
    assert (src.workflow_id, src.name, src.description) == (g.workflow_id, "Origin", "does things")


# -- validation -----------------------------------------------------------------

def test_validate_clean_decomposition(rng):
    g = random_dag(rng, 5, 12)
    d = decompose_structural(g)
    report = validate_decomposition(g, d)
    assert report.node_coverage == 1.0
    assert report.edge_validity == 1.0
    assert report.reconstructible
    assert report.misallocated == ()


def test_validate_detects_dropped_node():
    g = graph([node(i) for i in "ABCDE"],
              [("A", "B"), ("A", "C"), ("C", "D"), ("C", "E")])
    d = decompose_structural(g)
    pruned = Decomposition(
        workflow_id=d.workflow_id,
        segments=d.segments[:-1],
        boundary_edges=d.boundary_edges,
        node_to_segment=d.node_to_segment,
    )
    report = validate_decomposition(g, pruned)
    assert report.node_coverage == pytest.approx(0.8)
    assert not report.reconstructible


def test_validate_detects_dropped_edge():
    g = graph([node(i) for i in "ABC"], [("A", "B"), ("A", "C")])
    d = decompose_structural(g)
    hollowed = Decomposition(
        workflow_id=d.workflow_id,
        segments=d.segments,
        boundary_edges=d.boundary_edges[:-1],
        node_to_segment=d.node_to_segment,
    )
    report = validate_decomposition(g, hollowed)
    assert report.edge_validity < 1.0


def test_validate_detects_misallocation():
    g = graph([node("A"), node("B")], [("A", "B")])
    d = decompose_structural(g)
    scrambled = Decomposition(
        workflow_id=d.workflow_id,
        segments=d.segments,
        boundary_edges=d.boundary_edges,
        node_to_segment={"A": "wrong-segment", "B": d.node_to_segment["B"]},
    )
    report = validate_decomposition(g, scrambled)
    assert "A" in report.misallocated


# -- segment file format ----------------------------------------------------------

def test_segment_file_round_trip():
    g = graph(
        [node("a", "n8n-nodes-base.readPDF", name="Parse"),
         node("b", "n8n-nodes-base.code", name="Clean")],
        [("a", "b")],
        name="Doc flow", description="parses documents",
    )
    d = annotate(decompose_structural(g))
    original = d.segments[0]
    doc = segment_to_dict(original)
    assert set(doc) == {"segment_id", "name", "description", "source_workflow", "graph", "synthetic"}
    assert set(doc["graph"]) == {"nodes", "edges", "boundary_inputs", "boundary_outputs"}
    restored = segment_from_dict(doc)
    assert restored.segment_id == original.segment_id
    assert restored.description == original.description
    assert restored.graph == original.graph
    assert restored.synthetic is False
