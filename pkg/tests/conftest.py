"""Shared fixtures and graph builders for the test suite."""

from __future__ import annotations

import random

import pytest

from flowforge.ir import (
    EdgeSpec,
    NodeRole,
    NodeSpec,
    ParamSpec,
    ParamType,
    WorkflowGraph,
    canonical_graph_hash,
)

NTYPE_POOL = [
    "n8n-nodes-base.httpRequest",
    "n8n-nodes-base.code",
    "n8n-nodes-base.set",
    "n8n-nodes-base.if",
    "n8n-nodes-base.merge",
    "n8n-nodes-base.emailSend",
    "n8n-nodes-base.readPDF",
    "n8n-nodes-base.googleSheets",
    "n8n-nodes-base.slack",
]


def node(node_id: str, ntype: str = "n8n-nodes-base.code",
         role: NodeRole | None = None, name: str = "",
         inputs=None, outputs=None) -> NodeSpec:
    """Node builder mirroring the parser: role and I/O derive from ntype
    unless overridden, so hand-built graphs round-trip through emit/parse."""
    from flowforge.n8n import infer_node_io, node_role

    table_in, table_out = infer_node_io(ntype)
    return NodeSpec(
        node_id=node_id,
        name=name or node_id,
        ntype=ntype,
        role=node_role(ntype) if role is None else role,
        inputs=table_in if inputs is None else tuple(inputs),
        outputs=table_out if outputs is None else tuple(outputs),
    )


def graph(nodes, edges, name="test", description="") -> WorkflowGraph:
    g = WorkflowGraph(
        workflow_id="",
        name=name,
        description=description,
        nodes=tuple(nodes),
        edges=tuple(EdgeSpec(*e) if isinstance(e, tuple) else e for e in edges),
    )
    return WorkflowGraph(canonical_graph_hash(g), g.name, g.description, g.nodes, g.edges)


def chain_graph(ids, ntypes=None) -> WorkflowGraph:
    ntypes = ntypes or [NTYPE_POOL[i % len(NTYPE_POOL)] for i in range(len(ids))]
    nodes = [node(i, t) for i, t in zip(ids, ntypes)]
    edges = [(a, b) for a, b in zip(ids, ids[1:])]
    return graph(nodes, edges)


def random_dag(rng: random.Random, n_min: int = 3, n_max: int = 30) -> WorkflowGraph:
    """Random DAG over a topological node order; edge density varies."""
    n = rng.randint(n_min, n_max)
    ids = [f"n{i:02d}" for i in range(n)]
    nodes = [node(i, rng.choice(NTYPE_POOL)) for i in ids]
    edges = []
    seen = set()
    density = rng.uniform(0.05, 0.5)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                key = (ids[i], 0, ids[j], 0)
                if key not in seen:
                    seen.add(key)
                    edges.append((ids[i], ids[j]))
    return graph(nodes, edges, name=f"random-{n}")


@pytest.fixture
def rng():
    return random.Random(20260808)
