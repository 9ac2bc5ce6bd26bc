"""Platform-agnostic workflow graph model and pure graph operations.

A workflow is a directed graph of functional nodes with typed input/output
parameters.  Everything downstream (decomposition, storage, retrieval,
assembly) works on this model; platform formats are parsed into it and
emitted back out of it.

All types are immutable after construction and all operations are pure
functions, so values can be shared freely between concurrent tasks.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Optional, Sequence


class ParamType(str, Enum):
    STRING = "string"
    NUMBER = "number"
    BOOLEAN = "boolean"
    JSON = "json"
    BINARY = "binary"
    ANY = "any"


class NodeRole(str, Enum):
    TRIGGER = "trigger"
    FUNCTION = "function"
    CONNECTOR = "connector"  # only ever minted by assembly, never by parsing
    TERMINATOR = "terminator"


def types_compatible(a: ParamType, b: ParamType) -> bool:
    """``any`` is compatible with every type; all others only with themselves."""
    return a == ParamType.ANY or b == ParamType.ANY or a == b


@dataclass(frozen=True)
class ParamSpec:
    """One named, typed input or output parameter of a node."""

    name: str
    ptype: ParamType = ParamType.ANY
    required: bool = False

    def __post_init__(self):
        if not self.name:
            raise ValueError("parameter name must be non-empty")

    def key(self) -> tuple:
        return (self.name, self.ptype.value, self.required)


@dataclass(frozen=True)
class NodeSpec:
    """A functional node: namespaced type, role, typed I/O, platform config.

    ``raw_config`` keeps the platform parameters needed for a lossless
    round-trip (style and canvas keys excluded); it is treated as opaque.
    """

    node_id: str
    name: str
    ntype: str
    role: NodeRole = NodeRole.FUNCTION
    inputs: tuple[ParamSpec, ...] = ()
    outputs: tuple[ParamSpec, ...] = ()
    raw_config: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for group in (self.inputs, self.outputs):
            names = [p.name for p in group]
            if len(names) != len(set(names)):
                raise ValueError(f"duplicate parameter names on node {self.node_id!r}")

    def with_id(self, node_id: str) -> "NodeSpec":
        return NodeSpec(node_id, self.name, self.ntype, self.role,
                        self.inputs, self.outputs, dict(self.raw_config))

    def signature(self) -> tuple:
        """Identity used by isomorphism: type, role and I/O multisets.

        Display name, node id and raw_config are deliberately excluded.
        """
        return (
            self.ntype,
            self.role.value,
            tuple(sorted(p.key() for p in self.inputs)),
            tuple(sorted(p.key() for p in self.outputs)),
        )


@dataclass(frozen=True)
class EdgeSpec:
    """Directed, port-indexed execution edge."""

    source: str
    target: str
    source_port: int = 0
    target_port: int = 0

    def key(self) -> tuple[str, int, str, int]:
        return (self.source, self.source_port, self.target, self.target_port)


@dataclass(frozen=True)
class WorkflowGraph:
    workflow_id: str
    name: str = ""
    description: str = ""
    nodes: tuple[NodeSpec, ...] = ()
    edges: tuple[EdgeSpec, ...] = ()

    def node_map(self) -> dict[str, NodeSpec]:
        return {n.node_id: n for n in self.nodes}

    def out_edges(self, node_id: str) -> list[EdgeSpec]:
        return [e for e in self.edges if e.source == node_id]

    def in_edges(self, node_id: str) -> list[EdgeSpec]:
        return [e for e in self.edges if e.target == node_id]


# ---------------------------------------------------------------------------
# Serialization (shared by the on-disk stores and the HTTP API)
# ---------------------------------------------------------------------------

def param_to_dict(p: ParamSpec) -> dict:
    return {"name": p.name, "ptype": p.ptype.value, "required": p.required}


def param_from_dict(d: Mapping[str, Any]) -> ParamSpec:
    return ParamSpec(d["name"], ParamType(d.get("ptype", "any")), bool(d.get("required", False)))


def node_to_dict(n: NodeSpec) -> dict:
    return {
        "node_id": n.node_id,
        "name": n.name,
        "ntype": n.ntype,
        "role": n.role.value,
        "inputs": [param_to_dict(p) for p in n.inputs],
        "outputs": [param_to_dict(p) for p in n.outputs],
        "raw_config": dict(n.raw_config),
    }


def node_from_dict(d: Mapping[str, Any]) -> NodeSpec:
    return NodeSpec(
        node_id=d["node_id"],
        name=d.get("name", ""),
        ntype=d["ntype"],
        role=NodeRole(d.get("role", "function")),
        inputs=tuple(param_from_dict(p) for p in d.get("inputs", [])),
        outputs=tuple(param_from_dict(p) for p in d.get("outputs", [])),
        raw_config=dict(d.get("raw_config", {})),
    )


def edge_to_dict(e: EdgeSpec) -> dict:
    return {"source": e.source, "source_port": e.source_port,
            "target": e.target, "target_port": e.target_port}


def edge_from_dict(d: Mapping[str, Any]) -> EdgeSpec:
    return EdgeSpec(d["source"], d["target"],
                    int(d.get("source_port", 0)), int(d.get("target_port", 0)))


def graph_to_dict(g: WorkflowGraph) -> dict:
    return {
        "workflow_id": g.workflow_id,
        "name": g.name,
        "description": g.description,
        "nodes": [node_to_dict(n) for n in g.nodes],
        "edges": [edge_to_dict(e) for e in g.edges],
    }


def graph_from_dict(d: Mapping[str, Any]) -> WorkflowGraph:
    return WorkflowGraph(
        workflow_id=d.get("workflow_id", ""),
        name=d.get("name", ""),
        description=d.get("description", ""),
        nodes=tuple(node_from_dict(n) for n in d.get("nodes", [])),
        edges=tuple(edge_from_dict(e) for e in d.get("edges", [])),
    )


def canonical_graph_hash(g: WorkflowGraph) -> str:
    """Content hash of the canonicalized graph: 16 hex chars of SHA-256.

    Node and edge order do not matter; the workflow_id field itself is
    excluded so the hash can serve as the id.
    """
    doc = graph_to_dict(g)
    doc.pop("workflow_id")
    doc["nodes"].sort(key=lambda n: n["node_id"])
    doc["edges"].sort(key=lambda e: (e["source"], e["source_port"], e["target"], e["target_port"]))
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str  # DanglingEdge | DuplicateNodeId | DuplicateEdge
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


def validate_graph(g: WorkflowGraph) -> list[Violation]:
    """Report dangling edges, duplicate node ids and duplicate edges.

    An empty report means the graph is valid.
    """
    report: list[Violation] = []
    seen_ids: set[str] = set()
    for n in g.nodes:
        if n.node_id in seen_ids:
            report.append(Violation("DuplicateNodeId", n.node_id))
        seen_ids.add(n.node_id)
    seen_edges: set[tuple] = set()
    for e in g.edges:
        if e.source not in seen_ids:
            report.append(Violation("DanglingEdge", f"source={e.source}"))
        if e.target not in seen_ids:
            report.append(Violation("DanglingEdge", f"target={e.target}"))
        if e.key() in seen_edges:
            report.append(Violation("DuplicateEdge", str(e.key())))
        seen_edges.add(e.key())
    return report


def is_valid(g: WorkflowGraph) -> bool:
    return not validate_graph(g)


# ---------------------------------------------------------------------------
# Condensation (strongly connected components)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CondensedDag:
    """DAG of supernodes: each supernode is one strongly connected component.

    ``members`` maps supernode index to the node ids it contains;
    ``supernode_of`` is the total node -> supernode map; ``edges`` are the
    deduplicated inter-supernode pairs.
    """

    members: tuple[tuple[str, ...], ...]
    supernode_of: Mapping[str, int]
    edges: frozenset[tuple[int, int]]

    def successors(self, s: int) -> list[int]:
        return [b for (a, b) in self.edges if a == s]


def condensed_dag(g: WorkflowGraph) -> CondensedDag:
    """Condense strongly connected components into an acyclic supergraph.

    Iterative Tarjan; SCCs are emitted in a deterministic order derived from
    the node list, then re-sorted by smallest member id so the numbering does
    not depend on traversal order.
    """
    order = [n.node_id for n in g.nodes]
    adj: dict[str, list[str]] = {nid: [] for nid in order}
    for e in g.edges:
        adj[e.source].append(e.target)

    index_of: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0

    for root in order:
        if root in index_of:
            continue
        # explicit task stack: (node, iterator position)
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index_of[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            advanced = False
            children = adj[v]
            while pi < len(children):
                w = children[pi]
                pi += 1
                if w not in index_of:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index_of[w])
            if advanced:
                continue
            work.pop()
            if lowlink[v] == index_of[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(sorted(comp))
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])

    sccs.sort(key=lambda comp: comp[0])
    supernode_of = {nid: i for i, comp in enumerate(sccs) for nid in comp}
    super_edges = {
        (supernode_of[e.source], supernode_of[e.target])
        for e in g.edges
        if supernode_of[e.source] != supernode_of[e.target]
    }
    return CondensedDag(
        members=tuple(tuple(c) for c in sccs),
        supernode_of=supernode_of,
        edges=frozenset(super_edges),
    )


def topological_supernodes(dag: CondensedDag) -> list[int]:
    """Kahn topological order over supernodes, smallest index first on ties."""
    n = len(dag.members)
    indeg = [0] * n
    for _, b in dag.edges:
        indeg[b] += 1
    ready = sorted(i for i in range(n) if indeg[i] == 0)
    out: list[int] = []
    import heapq

    heap = list(ready)
    heapq.heapify(heap)
    while heap:
        s = heapq.heappop(heap)
        out.append(s)
        for t in sorted(dag.successors(s)):
            indeg[t] -= 1
            if indeg[t] == 0:
                heapq.heappush(heap, t)
    if len(out) != n:
        raise AssertionError("condensation produced a cycle")
    return out


# ---------------------------------------------------------------------------
# Layering
# ---------------------------------------------------------------------------

def longest_path_layers(g: WorkflowGraph) -> dict[str, int]:
    """Longest-path layer index per node; sources sit at layer 0.

    Cyclic graphs are handled through the condensation: all members of a
    supernode share that supernode's layer.
    """
    dag = condensed_dag(g)
    layer: dict[int, int] = {}
    preds: dict[int, list[int]] = {i: [] for i in range(len(dag.members))}
    for a, b in dag.edges:
        preds[b].append(a)
    for s in topological_supernodes(dag):
        layer[s] = max((layer[p] + 1 for p in preds[s]), default=0)
    return {n.node_id: layer[dag.supernode_of[n.node_id]] for n in g.nodes}


# ---------------------------------------------------------------------------
# Isomorphism modulo layout
# ---------------------------------------------------------------------------

def graphs_isomorphic_modulo_layout(a: WorkflowGraph, b: WorkflowGraph) -> bool:
    """True iff a node bijection preserves ntype, role, I/O multisets and all
    port-indexed edges.  Display names, node ids and raw_config are ignored.
    """
    if len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return False
    if not a.nodes:
        return True

    sig_a = _refined_signatures(a)
    sig_b = _refined_signatures(b)
    if sorted(sig_a.values()) != sorted(sig_b.values()):
        return False

    by_sig_b: dict[tuple, list[str]] = {}
    for nid, s in sig_b.items():
        by_sig_b.setdefault(s, []).append(nid)

    edges_a = {e.key() for e in a.edges}
    edges_b = {e.key() for e in b.edges}
    out_a: dict[str, list[EdgeSpec]] = {n.node_id: [] for n in a.nodes}
    in_a: dict[str, list[EdgeSpec]] = {n.node_id: [] for n in a.nodes}
    for e in a.edges:
        out_a[e.source].append(e)
        in_a[e.target].append(e)

    # most-constrained-first: smallest candidate class, then highest degree
    nodes_a = sorted(
        (n.node_id for n in a.nodes),
        key=lambda nid: (len(by_sig_b[sig_a[nid]]), -(len(out_a[nid]) + len(in_a[nid]))),
    )

    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(na: str, nb: str) -> bool:
        for e in out_a[na]:
            mt = mapping.get(e.target)
            if mt is not None and (nb, e.source_port, mt, e.target_port) not in edges_b:
                return False
        for e in in_a[na]:
            ms = mapping.get(e.source)
            if ms is not None and (ms, e.source_port, nb, e.target_port) not in edges_b:
                return False
        return True

    def backtrack(i: int) -> bool:
        if i == len(nodes_a):
            return True
        na = nodes_a[i]
        for nb in by_sig_b[sig_a[na]]:
            if nb in used or not consistent(na, nb):
                continue
            mapping[na] = nb
            used.add(nb)
            if backtrack(i + 1):
                return True
            del mapping[na]
            used.discard(nb)
        return False

    if not backtrack(0):
        return False
    # bijection + equal edge counts + every a-edge present in b => edge sets match
    return all(
        (mapping[e.source], e.source_port, mapping[e.target], e.target_port) in edges_b
        for e in a.edges
    )


def _refined_signatures(g: WorkflowGraph, rounds: int = 2) -> dict[str, tuple]:
    """Node signatures refined by neighbor-signature multisets (WL style)."""
    sig = {n.node_id: n.signature() for n in g.nodes}
    for _ in range(rounds):
        nxt = {}
        for n in g.nodes:
            outs = sorted((e.source_port, e.target_port, sig[e.target]) for e in g.edges if e.source == n.node_id)
            ins = sorted((e.source_port, e.target_port, sig[e.source]) for e in g.edges if e.target == n.node_id)
            nxt[n.node_id] = (sig[n.node_id], tuple(outs), tuple(ins))
        sig = nxt
    return sig


def reachable_from(g: WorkflowGraph, start_ids: Iterable[str]) -> set[str]:
    """All node ids reachable from ``start_ids`` by directed BFS."""
    adj: dict[str, list[str]] = {n.node_id: [] for n in g.nodes}
    for e in g.edges:
        adj[e.source].append(e.target)
    seen = set()
    frontier = [s for s in start_ids if s in adj]
    seen.update(frontier)
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen
