"""Workflow construction: per-unit retrieval with generative fallback,
parameter-compatibility analysis, connector insertion, assembly, and
platform adaptation into a deployable n8n document.

Each functional unit is resolved against the repository; when nothing
scores above the similarity threshold the unit falls through to a segment
generator (the bundled one emits a tagged placeholder node, an external one
may synthesize real segments).  Adjacent segments are joined sink-to-source;
a mapping connector node is spliced in whenever the parameter binding is
not an exact name match.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional, Protocol, Sequence

from .analysis import FunctionalUnit, RequirementAnalyzer, TaskPlan, analyze_requirement
from .errors import AssemblyFailure, GeneratorUnavailable, UnsupportedPlatform
from .extraction import (
    FunctionDescription,
    Segment,
    SegmentGraph,
    SourceWorkflowRef,
    build_segment_graph,
    make_segment,
)
from .ir import (
    EdgeSpec,
    NodeRole,
    NodeSpec,
    ParamSpec,
    ParamType,
    WorkflowGraph,
    canonical_graph_hash,
    longest_path_layers,
    types_compatible,
    validate_graph,
)
from .n8n import SourceDocument, emit_n8n
from .repository import Repository, RetrievalConfig

logger = logging.getLogger(__name__)

LAYER_X_SPACING = 280
LAYER_Y_SPACING = 160

TRIGGER_NTYPE = "n8n-nodes-base.manualTrigger"
CONNECTOR_NTYPE = "connector.map"
PLACEHOLDER_NTYPE = "generated.placeholder"


@dataclass(frozen=True)
class UnitResolution:
    unit_id: int
    route: str  # "retrieved" | "generated"
    segment: Segment
    score: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "route": self.route,
            "segment_id": self.segment.segment_id,
            "segment_name": self.segment.description.segment_name,
            "score": self.score,
            "synthetic": self.segment.synthetic,
        }


@dataclass(frozen=True)
class ParamBinding:
    source: ParamSpec
    target: ParamSpec
    exact_name: bool


@dataclass(frozen=True)
class CompatReport:
    satisfied: tuple[ParamBinding, ...]
    unsatisfied: tuple[ParamSpec, ...]
    needs_connector: bool


@dataclass(frozen=True)
class ConstructionResult:
    plan: TaskPlan
    resolutions: tuple[UnitResolution, ...]
    graph: WorkflowGraph
    connectors_inserted: int
    deploy_doc: SourceDocument


class SegmentGenerator(Protocol):
    """Fallback route: synthesize a segment for an unmatched unit."""

    def generate(self, unit: FunctionalUnit) -> Segment: ...


class PlaceholderGenerator:
    """Deterministic stub generator: one tagged placeholder node per unit."""

    def generate(self, unit: FunctionalUnit) -> Segment:
        node = NodeSpec(
            node_id=f"generated-{unit.unit_id}",
            name=unit.title or f"Unit {unit.unit_id}",
            ntype=PLACEHOLDER_NTYPE,
            role=NodeRole.FUNCTION,
            inputs=(ParamSpec("main", ParamType.ANY),),
            outputs=(ParamSpec("main", ParamType.ANY),),
            raw_config={"parameters": {"requirement": unit.description}},
        )
        return make_segment(
            [node], [],
            source=SourceWorkflowRef("", "generated", ""),
            name=unit.title or f"Unit {unit.unit_id}",
            description=unit.description,
            synthetic=True,
        )


def resolve_unit(
    unit: FunctionalUnit,
    repo: Repository,
    cfg: Optional[RetrievalConfig] = None,
    generator: Optional[SegmentGenerator] = None,
) -> UnitResolution:
    """Match one unit against the repository, falling back to generation.

    The top candidate above the threshold wins (ties already broken by
    ascending segment id inside retrieve); with no candidate the generator
    must supply a valid synthetic segment.
    """
    cfg = cfg or RetrievalConfig()
    candidates = repo.retrieve(unit.description, cfg)
    if candidates:
        best = candidates[0]
        segment = repo.fetch_segment(best.segment_id)
        return UnitResolution(unit.unit_id, "retrieved", segment, best.score)

    generator = generator or PlaceholderGenerator()
    try:
        segment = generator.generate(unit)
    except Exception as exc:
        raise GeneratorUnavailable(
            f"no candidate above threshold and generator failed: {exc}") from exc
    if not segment.synthetic:
        segment = Segment(graph=segment.graph, description=segment.description, synthetic=True)
    return UnitResolution(unit.unit_id, "generated", segment, None)


# ---------------------------------------------------------------------------
# Parameter compatibility
# ---------------------------------------------------------------------------

def check_compatibility(upstream: SegmentGraph, downstream: SegmentGraph) -> CompatReport:
    """Bind each required downstream boundary input to an upstream output.

    Resolution order per input: exact case-insensitive name match with a
    compatible type, else a unique type-compatible candidate, else
    unsatisfied.  Any non-exact binding or leftover input means a connector
    node is needed between the two segments.
    """
    outputs = list(upstream.boundary_outputs)
    satisfied: list[ParamBinding] = []
    unsatisfied: list[ParamSpec] = []
    for need in downstream.boundary_inputs:
        if not need.required:
            continue
        by_name = [o for o in outputs
                   if o.name.lower() == need.name.lower() and types_compatible(o.ptype, need.ptype)]
        if by_name:
            satisfied.append(ParamBinding(by_name[0], need, exact_name=True))
            continue
        by_type = [o for o in outputs if types_compatible(o.ptype, need.ptype)]
        if len(by_type) == 1:
            satisfied.append(ParamBinding(by_type[0], need, exact_name=False))
            continue
        unsatisfied.append(need)
    needs_connector = bool(unsatisfied) or any(not b.exact_name for b in satisfied)
    return CompatReport(tuple(satisfied), tuple(unsatisfied), needs_connector)


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def _segment_sources(seg: SegmentGraph) -> list[str]:
    has_in = {e.target for e in seg.internal_edges}
    return sorted(n.node_id for n in seg.nodes if n.node_id not in has_in)


def _segment_sinks(seg: SegmentGraph) -> list[str]:
    has_out = {e.source for e in seg.internal_edges}
    return sorted(n.node_id for n in seg.nodes if n.node_id not in has_out)


def assemble(plan: TaskPlan, resolutions: Sequence[UnitResolution]) -> tuple[WorkflowGraph, int]:
    """Join resolved segments along the plan's dependency edges.

    Node ids are re-minted with a per-unit suffix so the same stored segment
    can appear twice.  For each dependency, sink nodes of the upstream
    segment are wired to source nodes of the downstream one on port 0; when
    the pair's CompatReport calls for a connector, a single mapping node is
    spliced in between and carries the binding table in its config.
    """
    by_unit: dict[int, UnitResolution] = {r.unit_id: r for r in resolutions}
    if set(by_unit) != {u.unit_id for u in plan.units}:
        raise AssemblyFailure("resolutions do not cover the plan's units exactly")

    nodes: list[NodeSpec] = []
    edges: list[EdgeSpec] = []
    remapped: dict[int, dict[str, str]] = {}

    for unit in plan.units:
        res = by_unit[unit.unit_id]
        seg = res.segment.graph
        if not seg.nodes:
            raise AssemblyFailure(f"segment for unit {unit.unit_id} has no nodes")
        mapping = {n.node_id: f"{n.node_id}__u{unit.unit_id}" for n in seg.nodes}
        remapped[unit.unit_id] = mapping
        nodes.extend(n.with_id(mapping[n.node_id]) for n in seg.nodes)
        edges.extend(
            EdgeSpec(mapping[e.source], mapping[e.target], e.source_port, e.target_port)
            for e in seg.internal_edges
        )

    connectors = 0
    for unit in plan.units:
        for dep in unit.depends_on:
            up = by_unit[dep].segment.graph
            down = by_unit[unit.unit_id].segment.graph
            up_sinks = [remapped[dep][nid] for nid in _segment_sinks(up)]
            down_sources = [remapped[unit.unit_id][nid] for nid in _segment_sources(down)]
            compat = check_compatibility(up, down)
            if compat.needs_connector:
                connectors += 1
                connector = NodeSpec(
                    node_id=f"connector__u{dep}_u{unit.unit_id}",
                    name=f"Map {dep} to {unit.unit_id}",
                    ntype=CONNECTOR_NTYPE,
                    role=NodeRole.CONNECTOR,
                    inputs=(ParamSpec("main", ParamType.ANY),),
                    outputs=(ParamSpec("main", ParamType.ANY),),
                    raw_config={"parameters": {
                        "bindings": [
                            {"from": b.source.name, "to": b.target.name, "renamed": not b.exact_name}
                            for b in compat.satisfied
                        ],
                        "unsatisfied": [p.name for p in compat.unsatisfied],
                    }},
                )
                nodes.append(connector)
                for sink in up_sinks:
                    edges.append(EdgeSpec(sink, connector.node_id))
                for source in down_sources:
                    edges.append(EdgeSpec(connector.node_id, source))
            else:
                for sink in up_sinks:
                    for source in down_sources:
                        edges.append(EdgeSpec(sink, source))

    graph = WorkflowGraph(
        workflow_id="",
        name=_plan_name(plan),
        description=plan.requirement_text,
        nodes=tuple(nodes),
        edges=tuple(edges),
    )
    graph = WorkflowGraph(
        workflow_id=canonical_graph_hash(graph),
        name=graph.name,
        description=graph.description,
        nodes=graph.nodes,
        edges=graph.edges,
    )
    violations = validate_graph(graph)
    if violations:
        raise AssemblyFailure("; ".join(str(v) for v in violations))
    return graph, connectors


def _plan_name(plan: TaskPlan) -> str:
    words = plan.requirement_text.split()
    return " ".join(words[:8]) if words else "Constructed workflow"


# ---------------------------------------------------------------------------
# Platform adaptation
# ---------------------------------------------------------------------------

def layout_positions(g: WorkflowGraph) -> dict[str, tuple[float, float]]:
    """Canvas coordinates from longest-path layering.

    x advances one fixed step per layer; nodes inside a layer stack
    vertically in node-id order.
    """
    layers = longest_path_layers(g)
    by_layer: dict[int, list[str]] = {}
    for nid, layer in layers.items():
        by_layer.setdefault(layer, []).append(nid)
    positions: dict[str, tuple[float, float]] = {}
    for layer, ids in by_layer.items():
        for idx, nid in enumerate(sorted(ids)):
            positions[nid] = (float(LAYER_X_SPACING * layer), float(LAYER_Y_SPACING * idx))
    return positions


def inject_trigger(g: WorkflowGraph) -> WorkflowGraph:
    """Add one manual trigger feeding the sourceless non-trigger nodes.

    Components that already contain a trigger are left alone (one trigger
    per weakly-connected component); graphs with nothing to feed come back
    unchanged rather than gaining a dangling trigger.
    """
    indeg = {n.node_id: 0 for n in g.nodes}
    parent = {n.node_id: n.node_id for n in g.nodes}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g.edges:
        indeg[e.target] += 1
        parent[find(e.source)] = find(e.target)

    triggered_components = {find(n.node_id) for n in g.nodes if n.role == NodeRole.TRIGGER}
    targets = sorted(
        n.node_id for n in g.nodes
        if indeg[n.node_id] == 0 and n.role != NodeRole.TRIGGER
        and find(n.node_id) not in triggered_components
    )
    if not targets:
        return g

    trigger_id = "trigger"
    existing = {n.node_id for n in g.nodes}
    while trigger_id in existing:
        trigger_id = "_" + trigger_id
    trigger = NodeSpec(
        node_id=trigger_id,
        name="Manual Trigger",
        ntype=TRIGGER_NTYPE,
        role=NodeRole.TRIGGER,
        inputs=(),
        outputs=(ParamSpec("main", ParamType.ANY),),
    )
    new_edges = tuple(EdgeSpec(trigger_id, t) for t in targets)
    return WorkflowGraph(
        workflow_id=g.workflow_id,
        name=g.name,
        description=g.description,
        nodes=(trigger,) + g.nodes,
        edges=g.edges + new_edges,
    )


def adapt_graph(g: WorkflowGraph, platform: str = "n8n") -> tuple[WorkflowGraph, dict[str, tuple[float, float]]]:
    """Trigger injection plus canvas layout; n8n gets no terminator node."""
    if platform != "n8n":
        raise UnsupportedPlatform(f"no adapter for platform {platform!r}")
    adapted = inject_trigger(g)
    return adapted, layout_positions(adapted)


def adapt_platform(g: WorkflowGraph, platform: str = "n8n") -> SourceDocument:
    """Produce a directly deployable platform document for the graph."""
    adapted, positions = adapt_graph(g, platform)
    return emit_n8n(adapted, positions)


# ---------------------------------------------------------------------------
# End-to-end construction
# ---------------------------------------------------------------------------

def construct(
    requirement: str,
    repo: Repository,
    cfg: Optional[RetrievalConfig] = None,
    analyzer: Optional[RequirementAnalyzer] = None,
    generator: Optional[SegmentGenerator] = None,
    platform: str = "n8n",
    max_inflight: int = 4,
) -> ConstructionResult:
    """Requirement in, deployable workflow out.

    Pipeline: analyze the requirement, resolve each unit (concurrently up to
    ``max_inflight``), assemble the segments, adapt to the target platform.
    """
    cfg = cfg or RetrievalConfig()
    plan = analyze_requirement(requirement, repo, cfg, analyzer)

    def resolve(unit: FunctionalUnit) -> UnitResolution:
        return resolve_unit(unit, repo, cfg, generator)

    if len(plan.units) <= 1 or max_inflight <= 1:
        resolutions = tuple(resolve(u) for u in plan.units)
    else:
        with ThreadPoolExecutor(max_workers=max_inflight) as pool:
            resolutions = tuple(pool.map(resolve, plan.units))

    assembled, connectors = assemble(plan, resolutions)
    adapted, positions = adapt_graph(assembled, platform)
    deploy_doc = emit_n8n(adapted, positions)
    return ConstructionResult(
        plan=plan,
        resolutions=resolutions,
        graph=adapted,
        connectors_inserted=connectors,
        deploy_doc=deploy_doc,
    )
