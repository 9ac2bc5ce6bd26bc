"""Graph model operations: validation, condensation, isomorphism, layering."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowforge.ir import (
    EdgeSpec,
    NodeRole,
    NodeSpec,
    ParamSpec,
    ParamType,
    WorkflowGraph,
    canonical_graph_hash,
    condensed_dag,
    graphs_isomorphic_modulo_layout,
    longest_path_layers,
    topological_supernodes,
    types_compatible,
    validate_graph,
)

from conftest import graph, node, random_dag


# -- validation ---------------------------------------------------------------

def test_well_formed_graph_has_empty_report():
    g = graph([node("A"), node("B")], [("A", "B")])
    assert validate_graph(g) == []


def test_dangling_edge_reported():
    g = WorkflowGraph("w", nodes=(node("A"),), edges=(EdgeSpec("A", "B"),))
    kinds = [v.kind for v in validate_graph(g)]
    assert kinds == ["DanglingEdge"]
    assert "B" in validate_graph(g)[0].detail


def test_duplicate_node_id_reported():
    g = WorkflowGraph("w", nodes=(node("A"), node("A")), edges=())
    kinds = [v.kind for v in validate_graph(g)]
    assert kinds == ["DuplicateNodeId"]


def test_duplicate_edge_reported():
    g = WorkflowGraph("w", nodes=(node("A"), node("B")),
                      edges=(EdgeSpec("A", "B"), EdgeSpec("A", "B")))
    assert [v.kind for v in validate_graph(g)] == ["DuplicateEdge"]


def test_parallel_edges_on_distinct_ports_are_legal():
    g = WorkflowGraph("w", nodes=(node("A"), node("B")),
                      edges=(EdgeSpec("A", "B", 0, 0), EdgeSpec("A", "B", 1, 0)))
    assert validate_graph(g) == []


# -- condensation -------------------------------------------------------------

def test_acyclic_graph_condenses_to_singletons():
    g = graph([node(i) for i in "ABCD"], [("A", "B"), ("B", "C"), ("C", "D")])
    dag = condensed_dag(g)
    assert len(dag.members) == 4
    assert all(len(m) == 1 for m in dag.members)


def test_two_cycle_condenses():
    # A->B->A plus B->C: hand-derived SCCs are {A,B} and {C} with one edge
    g = graph([node("A"), node("B"), node("C")],
              [("A", "B"), ("B", "A"), ("B", "C")])
    dag = condensed_dag(g)
    members = sorted(tuple(sorted(m)) for m in dag.members)
    assert members == [("A", "B"), ("C",)]
    assert len(dag.edges) == 1


def test_empty_graph_condenses_to_empty():
    g = WorkflowGraph("w")
    dag = condensed_dag(g)
    assert dag.members == ()
    assert dag.edges == frozenset()


def test_condensation_is_acyclic_on_random_graphs():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(2, 15)
        ids = [f"n{i}" for i in range(n)]
        nodes = [node(i) for i in ids]
        edges = set()
        for _ in range(rng.randint(0, n * 2)):
            a, b = rng.choice(ids), rng.choice(ids)
            if a != b:
                edges.add((a, b))
        g = graph(nodes, sorted(edges))
        dag = condensed_dag(g)
        topological_supernodes(dag)  # raises if cyclic
        assert set(dag.supernode_of) == set(ids)


# -- isomorphism --------------------------------------------------------------

def _renamed_ids(g: WorkflowGraph, prefix: str) -> WorkflowGraph:
    mapping = {n.node_id: prefix + n.node_id for n in g.nodes}
    return WorkflowGraph(
        workflow_id="renamed",
        name="other",
        nodes=tuple(n.with_id(mapping[n.node_id]) for n in g.nodes),
        edges=tuple(EdgeSpec(mapping[e.source], mapping[e.target],
                             e.source_port, e.target_port) for e in g.edges),
    )


def test_iso_reflexive():
    g = graph([node("A"), node("B"), node("C")], [("A", "B"), ("A", "C")])
    assert graphs_isomorphic_modulo_layout(g, g)


def test_iso_detects_reversed_edge():
    a = graph([node("A", "t.x"), node("B", "t.y")], [("A", "B")])
    b = graph([node("A", "t.x"), node("B", "t.y")], [("B", "A")])
    assert not graphs_isomorphic_modulo_layout(a, b)


def test_iso_ignores_node_ids_and_names():
    g = graph([node("A", "t.x"), node("B", "t.y")], [("A", "B")])
    assert graphs_isomorphic_modulo_layout(g, _renamed_ids(g, "z_"))


def test_iso_respects_role():
    a = graph([node("A", "t.x", role=NodeRole.FUNCTION)], [])
    b = graph([node("A", "t.x", role=NodeRole.CONNECTOR)], [])
    assert not graphs_isomorphic_modulo_layout(a, b)


def test_iso_respects_ports():
    a = WorkflowGraph("a", nodes=(node("A"), node("B")), edges=(EdgeSpec("A", "B", 0, 0),))
    b = WorkflowGraph("b", nodes=(node("A"), node("B")), edges=(EdgeSpec("A", "B", 1, 0),))
    assert not graphs_isomorphic_modulo_layout(a, b)


def test_iso_respects_param_multisets():
    a = graph([node("A", inputs=[ParamSpec("x", ParamType.JSON, True)])], [])
    b = graph([node("A", inputs=[ParamSpec("x", ParamType.STRING, True)])], [])
    assert not graphs_isomorphic_modulo_layout(a, b)


def test_iso_on_automorphic_diamond():
    # same-typed branches force the matcher to actually search
    nodes = [node("A", "t.a"), node("B", "t.mid"), node("C", "t.mid"), node("D", "t.d")]
    a = graph(nodes, [("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")])
    assert graphs_isomorphic_modulo_layout(a, _renamed_ids(a, "q_"))


def test_iso_symmetric_on_random_pairs(rng):
    for _ in range(25):
        g = random_dag(rng, 3, 12)
        h = _renamed_ids(g, "r_")
        assert graphs_isomorphic_modulo_layout(g, h)
        assert graphs_isomorphic_modulo_layout(h, g)


def test_iso_rejects_edge_count_mismatch(rng):
    for _ in range(10):
        g = random_dag(rng, 4, 10)
        if not g.edges:
            continue
        h = WorkflowGraph(g.workflow_id, g.name, g.description, g.nodes, g.edges[:-1])
        assert not graphs_isomorphic_modulo_layout(g, h)


# -- layering -----------------------------------------------------------------

def test_chain_layers():
    g = graph([node(i) for i in "ABC"], [("A", "B"), ("B", "C")])
    assert longest_path_layers(g) == {"A": 0, "B": 1, "C": 2}


def test_diamond_layers_longest_path():
    # hand-derived: D sits at the end of the longest path A->B->D
    g = graph([node(i) for i in "ABCD"],
              [("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")])
    assert longest_path_layers(g) == {"A": 0, "B": 1, "C": 1, "D": 2}


def test_single_node_layer_zero():
    g = graph([node("A")], [])
    assert longest_path_layers(g) == {"A": 0}


def test_skip_edge_takes_longest_path():
    # A->B->C plus direct A->C: C must land on layer 2, not 1
    g = graph([node(i) for i in "ABC"], [("A", "B"), ("B", "C"), ("A", "C")])
    assert longest_path_layers(g)["C"] == 2


def test_cycle_members_share_layer():
    g = graph([node(i) for i in "ABC"], [("A", "B"), ("B", "A"), ("B", "C")])
    layers = longest_path_layers(g)
    assert layers["A"] == layers["B"] == 0
    assert layers["C"] == 1


def test_layers_monotone_across_supernodes(rng):
    for _ in range(30):
        g = random_dag(rng, 3, 20)
        layers = longest_path_layers(g)
        dag = condensed_dag(g)
        for e in g.edges:
            if dag.supernode_of[e.source] != dag.supernode_of[e.target]:
                assert layers[e.source] < layers[e.target]


# -- model invariants ---------------------------------------------------------

def test_param_name_must_be_non_empty():
    with pytest.raises(ValueError):
        ParamSpec("")


def test_duplicate_param_names_rejected():
    with pytest.raises(ValueError):
        NodeSpec("A", "A", "t.x", inputs=(ParamSpec("x"), ParamSpec("x")))


def test_type_lattice():
    assert types_compatible(ParamType.ANY, ParamType.JSON)
    assert types_compatible(ParamType.JSON, ParamType.ANY)
    assert types_compatible(ParamType.JSON, ParamType.JSON)
    assert not types_compatible(ParamType.JSON, ParamType.STRING)


def test_canonical_hash_ignores_node_order():
    a = graph([node("A"), node("B")], [("A", "B")])
    b = WorkflowGraph("", a.name, a.description, tuple(reversed(a.nodes)), a.edges)
    assert canonical_graph_hash(a) == canonical_graph_hash(b)


@settings(max_examples=60)
@given(st.data())
def test_iso_reflexive_property(data):
    rng = random.Random(data.draw(st.integers(0, 10**9)))
    g = random_dag(rng, 3, 10)
    assert graphs_isomorphic_modulo_layout(g, g)
