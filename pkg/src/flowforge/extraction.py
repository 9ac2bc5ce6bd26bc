"""Workflow decomposition into standardized, reusable segments.

A segment pairs two representations of one unit of functionality: a small
graph (topology plus node I/O parameters) and a textual function
description, linked by one content-addressed segment id.  Decomposition partitions a workflow into
segments; the inverse ``stitch`` re-joins them along the recorded boundary
edges, which makes the whole step checkable: coverage, edge accounting and
reconstructability are computed metrics, not hopes.

The default decomposer is purely structural and deterministic.  Semantic
naming is delegated to a pluggable annotator; the bundled stub is
deterministic so the pipeline runs without any external model.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Protocol, Sequence

from .errors import AnnotatorUnavailable, AnnotatorViolation, InvalidGraph, InvalidSegment
from .ir import (
    EdgeSpec,
    NodeRole,
    NodeSpec,
    ParamSpec,
    WorkflowGraph,
    condensed_dag,
    edge_from_dict,
    edge_to_dict,
    graphs_isomorphic_modulo_layout,
    longest_path_layers,
    node_from_dict,
    node_to_dict,
    param_from_dict,
    param_to_dict,
    validate_graph,
)


@dataclass(frozen=True)
class SourceWorkflowRef:
    """Provenance fields copied verbatim from the origin workflow."""

    workflow_id: str
    name: str
    description: str


@dataclass(frozen=True)
class SegmentGraph:
    """Topology half of a segment.

    ``boundary_inputs`` are the required inputs of member nodes not fed by
    any internal edge; ``boundary_outputs`` are the outputs of member sink
    nodes.  Both describe what the segment needs and offers at its edges.
    """

    segment_id: str
    nodes: tuple[NodeSpec, ...]
    internal_edges: tuple[EdgeSpec, ...]
    boundary_inputs: tuple[ParamSpec, ...]
    boundary_outputs: tuple[ParamSpec, ...]

    def node_ids(self) -> set[str]:
        return {n.node_id for n in self.nodes}


@dataclass(frozen=True)
class FunctionDescription:
    """Semantic half of a segment: summary text plus provenance."""

    segment_id: str
    segment_name: str
    segment_description: str
    source_workflow: SourceWorkflowRef


@dataclass(frozen=True)
class Segment:
    graph: SegmentGraph
    description: FunctionDescription
    synthetic: bool = False  # true only for generatively produced segments

    def __post_init__(self):
        if self.graph.segment_id != self.description.segment_id:
            raise InvalidSegment("segment graph/description id mismatch")

    @property
    def segment_id(self) -> str:
        return self.graph.segment_id

    @property
    def reusable(self) -> bool:
        """Trigger-bearing segments are kept for coverage but not re-offered:
        platform adaptation re-injects start nodes on construction."""
        return not any(n.role == NodeRole.TRIGGER for n in self.graph.nodes)

    def index_text(self) -> str:
        return f"{self.description.segment_name} {self.description.segment_description}"


@dataclass(frozen=True)
class Decomposition:
    """A partition of one workflow into segments plus the cut edges."""

    workflow_id: str
    segments: tuple[Segment, ...]
    boundary_edges: tuple[EdgeSpec, ...]
    node_to_segment: Mapping[str, str]  # node_id -> segment_id


# ---------------------------------------------------------------------------
# Content addressing
# ---------------------------------------------------------------------------

def segment_content_id(
    nodes: Sequence[NodeSpec],
    internal_edges: Sequence[EdgeSpec],
    boundary_inputs: Sequence[ParamSpec],
    boundary_outputs: Sequence[ParamSpec],
) -> str:
    """First 16 hex chars of SHA-256 over the canonical segment content.

    Hash inputs: sorted node types, sorted internal edges as (ntype, port)
    pairs, and sorted boundary parameter names.  Display names, node ids and
    raw_config never participate, so re-labeling a segment keeps its id.
    """
    ntype_of = {n.node_id: n.ntype for n in nodes}
    payload = {
        "ntypes": sorted(n.ntype for n in nodes),
        "edges": sorted(
            (ntype_of[e.source], e.source_port, ntype_of[e.target], e.target_port)
            for e in internal_edges
        ),
        "boundary": sorted(
            [f"in:{p.name}" for p in boundary_inputs] + [f"out:{p.name}" for p in boundary_outputs]
        ),
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _dedupe_params(params: Iterable[ParamSpec]) -> tuple[ParamSpec, ...]:
    seen: dict[tuple, ParamSpec] = {}
    for p in params:
        seen.setdefault(p.key(), p)
    return tuple(sorted(seen.values(), key=lambda p: p.key()))


def build_segment_graph(members: Sequence[NodeSpec], internal_edges: Sequence[EdgeSpec]) -> SegmentGraph:
    """Assemble a SegmentGraph, deriving boundary params and the content id."""
    if not members:
        raise InvalidSegment("segment must contain at least one node")
    member_ids = {n.node_id for n in members}
    for e in internal_edges:
        if e.source not in member_ids or e.target not in member_ids:
            raise InvalidSegment(f"internal edge {e} leaves the segment")

    has_in = {e.target for e in internal_edges}
    has_out = {e.source for e in internal_edges}
    boundary_inputs = _dedupe_params(
        p for n in members if n.node_id not in has_in for p in n.inputs if p.required
    )
    boundary_outputs = _dedupe_params(
        p for n in members if n.node_id not in has_out for p in n.outputs
    )
    sid = segment_content_id(members, internal_edges, boundary_inputs, boundary_outputs)
    return SegmentGraph(
        segment_id=sid,
        nodes=tuple(members),
        internal_edges=tuple(internal_edges),
        boundary_inputs=boundary_inputs,
        boundary_outputs=boundary_outputs,
    )


def make_segment(
    members: Sequence[NodeSpec],
    internal_edges: Sequence[EdgeSpec],
    source: SourceWorkflowRef,
    name: str = "",
    description: str = "",
    synthetic: bool = False,
) -> Segment:
    graph = build_segment_graph(members, internal_edges)
    return Segment(
        graph=graph,
        description=FunctionDescription(graph.segment_id, name, description, source),
        synthetic=synthetic,
    )


# ---------------------------------------------------------------------------
# Structural decomposition
# ---------------------------------------------------------------------------

def decompose_structural(g: WorkflowGraph) -> Decomposition:
    """Partition a workflow by cutting branch points and trigger exits.

    Working on the condensation, every inter-supernode edge whose source
    supernode fans out (out-degree > 1) or whose target fans in
    (in-degree > 1) is cut, as is every edge leaving a trigger node.
    Segments are the weakly-connected components of what remains, ordered by
    (minimum layer of members, smallest member node id).
    """
    if validate_graph(g):
        raise InvalidGraph("; ".join(str(v) for v in validate_graph(g)))

    dag = condensed_dag(g)
    out_deg: dict[int, int] = {}
    in_deg: dict[int, int] = {}
    for a, b in dag.edges:
        out_deg[a] = out_deg.get(a, 0) + 1
        in_deg[b] = in_deg.get(b, 0) + 1

    node_by_id = g.node_map()

    def is_cut(e: EdgeSpec) -> bool:
        if node_by_id[e.source].role == NodeRole.TRIGGER:
            return True
        sa, sb = dag.supernode_of[e.source], dag.supernode_of[e.target]
        if sa == sb:
            return False
        return out_deg.get(sa, 0) > 1 or in_deg.get(sb, 0) > 1

    cut_edges = tuple(e for e in g.edges if is_cut(e))
    kept_edges = [e for e in g.edges if not is_cut(e)]

    # weakly-connected components over the kept edges
    parent: dict[str, str] = {n.node_id: n.node_id for n in g.nodes}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for e in kept_edges:
        union(e.source, e.target)

    components: dict[str, list[str]] = {}
    for n in g.nodes:
        components.setdefault(find(n.node_id), []).append(n.node_id)

    layers = longest_path_layers(g)
    ordered = sorted(
        components.values(),
        key=lambda ids: (min(layers[i] for i in ids), min(ids)),
    )

    source = SourceWorkflowRef(g.workflow_id, g.name, g.description)
    segments: list[Segment] = []
    node_to_segment: dict[str, str] = {}
    for ids in ordered:
        id_set = set(ids)
        members = [n for n in g.nodes if n.node_id in id_set]
        internal = [e for e in kept_edges if e.source in id_set]
        seg = make_segment(members, internal, source)
        segments.append(seg)
        for nid in ids:
            node_to_segment[nid] = seg.segment_id

    return Decomposition(
        workflow_id=g.workflow_id,
        segments=tuple(segments),
        boundary_edges=cut_edges,
        node_to_segment=node_to_segment,
    )


def stitch(d: Decomposition, name: str = "", description: str = "") -> WorkflowGraph:
    """Re-join a decomposition along its boundary edges."""
    nodes = tuple(n for seg in d.segments for n in seg.graph.nodes)
    edges = tuple(e for seg in d.segments for e in seg.graph.internal_edges) + tuple(d.boundary_edges)
    return WorkflowGraph(
        workflow_id=d.workflow_id,
        name=name,
        description=description,
        nodes=nodes,
        edges=edges,
    )


# ---------------------------------------------------------------------------
# Semantic annotation
# ---------------------------------------------------------------------------

class SemanticAnnotator(Protocol):
    """Fills segment_name/segment_description; must not touch the topology."""

    def annotate(self, segment: Segment) -> Segment: ...


def ordered_members(segment: SegmentGraph) -> list[NodeSpec]:
    """Member nodes in topological order (layer, then node id)."""
    as_graph = WorkflowGraph(
        workflow_id=segment.segment_id,
        nodes=segment.nodes,
        edges=segment.internal_edges,
    )
    layers = longest_path_layers(as_graph)
    return sorted(segment.nodes, key=lambda n: (layers[n.node_id], n.node_id))


def segment_topological_names(segment: SegmentGraph) -> list[str]:
    return [n.name or n.node_id for n in ordered_members(segment)]


class StubAnnotator:
    """Deterministic annotator: name from node types, description from node
    names in topological order.  Never fails."""

    def annotate(self, segment: Segment) -> Segment:
        ordered = ordered_members(segment.graph)
        # local part of the namespaced type: keeps names readable and keeps
        # vendor-prefix tokens from dominating the retrieval vector
        name = ", ".join(n.ntype.rsplit(".", 1)[-1] for n in ordered)
        description = "Performs: " + ", ".join(n.name or n.node_id for n in ordered)
        return Segment(
            graph=segment.graph,
            description=replace(segment.description, segment_name=name,
                                segment_description=description),
            synthetic=segment.synthetic,
        )


def annotate(
    d: Decomposition,
    annotator: Optional[SemanticAnnotator] = None,
    max_inflight: int = 4,
) -> Decomposition:
    """Run the annotator over every segment, preserving order.

    External annotators run concurrently up to ``max_inflight``; any change
    to a segment's id or topology is rejected with AnnotatorViolation.
    """
    annotator = annotator or StubAnnotator()

    def run(segment: Segment) -> Segment:
        try:
            annotated = annotator.annotate(segment)
        except AnnotatorViolation:
            raise
        except Exception as exc:
            raise AnnotatorUnavailable(str(exc)) from exc
        if (annotated.segment_id != segment.segment_id
                or annotated.graph.nodes != segment.graph.nodes
                or annotated.graph.internal_edges != segment.graph.internal_edges):
            raise AnnotatorViolation(
                f"annotator altered segment {segment.segment_id} topology")
        if not annotated.description.segment_description:
            raise AnnotatorViolation(
                f"annotator left segment {segment.segment_id} without a description")
        return annotated

    if len(d.segments) <= 1 or max_inflight <= 1:
        annotated = [run(s) for s in d.segments]
    else:
        with ThreadPoolExecutor(max_workers=max_inflight) as pool:
            annotated = list(pool.map(run, d.segments))

    return Decomposition(
        workflow_id=d.workflow_id,
        segments=tuple(annotated),
        boundary_edges=d.boundary_edges,
        node_to_segment=d.node_to_segment,
    )


# ---------------------------------------------------------------------------
# Decomposition validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtractionReport:
    node_coverage: float
    edge_validity: float
    reconstructible: bool
    misallocated: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "node_coverage": self.node_coverage,
            "edge_validity": self.edge_validity,
            "reconstructible": self.reconstructible,
            "misallocated": list(self.misallocated),
        }


def validate_decomposition(g: WorkflowGraph, d: Decomposition) -> ExtractionReport:
    """Measure a decomposition against its source workflow.

    node_coverage and edge_validity are fractions of nodes/edges accounted
    for; reconstructible checks stitch(d) against the original up to layout;
    misallocated lists nodes whose membership disagrees with the
    node -> segment map.
    """
    covered: set[str] = set()
    for seg in d.segments:
        covered |= seg.graph.node_ids()
    original_ids = {n.node_id for n in g.nodes}
    node_coverage = len(covered & original_ids) / len(original_ids) if original_ids else 1.0

    accounted = 0
    boundary = {e.key() for e in d.boundary_edges}
    internal_count: dict[tuple, int] = {}
    for seg in d.segments:
        for e in seg.graph.internal_edges:
            internal_count[e.key()] = internal_count.get(e.key(), 0) + 1
    for e in g.edges:
        if internal_count.get(e.key(), 0) == 1 or e.key() in boundary:
            accounted += 1
    edge_validity = accounted / len(g.edges) if g.edges else 1.0

    reconstructible = graphs_isomorphic_modulo_layout(g, stitch(d))

    misallocated: list[str] = []
    for seg in d.segments:
        for nid in sorted(seg.graph.node_ids()):
            if d.node_to_segment.get(nid) != seg.segment_id:
                misallocated.append(nid)

    return ExtractionReport(
        node_coverage=node_coverage,
        edge_validity=edge_validity,
        reconstructible=reconstructible,
        misallocated=tuple(misallocated),
    )


# ---------------------------------------------------------------------------
# Segment file format
# ---------------------------------------------------------------------------

def segment_to_dict(s: Segment) -> dict:
    return {
        "segment_id": s.segment_id,
        "name": s.description.segment_name,
        "description": s.description.segment_description,
        "source_workflow": {
            "id": s.description.source_workflow.workflow_id,
            "name": s.description.source_workflow.name,
            "description": s.description.source_workflow.description,
        },
        "graph": {
            "nodes": [node_to_dict(n) for n in s.graph.nodes],
            "edges": [edge_to_dict(e) for e in s.graph.internal_edges],
            "boundary_inputs": [param_to_dict(p) for p in s.graph.boundary_inputs],
            "boundary_outputs": [param_to_dict(p) for p in s.graph.boundary_outputs],
        },
        "synthetic": s.synthetic,
    }


def segment_from_dict(doc: Mapping) -> Segment:
    graph_doc = doc.get("graph", {})
    nodes = tuple(node_from_dict(n) for n in graph_doc.get("nodes", []))
    edges = tuple(edge_from_dict(e) for e in graph_doc.get("edges", []))
    rebuilt = build_segment_graph(nodes, edges)
    src = doc.get("source_workflow", {})
    return Segment(
        graph=rebuilt,
        description=FunctionDescription(
            segment_id=rebuilt.segment_id,
            segment_name=doc.get("name", ""),
            segment_description=doc.get("description", ""),
            source_workflow=SourceWorkflowRef(
                src.get("id", ""), src.get("name", ""), src.get("description", "")),
        ),
        synthetic=bool(doc.get("synthetic", False)),
    )
