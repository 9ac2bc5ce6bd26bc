"""n8n workflow document parsing and emission.

The wire contract is the n8n export object model::

    {"name": str,
     "nodes": [{"id": str, "name": str, "type": str, "typeVersion": num,
                "position": [x, y], "parameters": obj}],
     "connections": {"<sourceNodeName>": {"main": [[{"node": "<targetNodeName>",
                                                     "type": "main", "index": int}]]}},
     "active": bool?, "settings": obj?}

Two indexing rules matter and are easy to get backwards: the outer array
index under ``"main"`` is the *source output port*, and the ``"index"``
field is the *target input port*.  Connections are keyed by node *name*,
not id.

Parsing strips layout/cosmetic redundancy (recorded in a StripReport) and
normalizes into a :class:`~flowforge.ir.WorkflowGraph`; emission is the
inverse used by platform adaptation.  YAML files carrying the same object
model are accepted as a transcoding front-end.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Protocol

import yaml

from .errors import DanglingConnection, MalformedDocument, MissingPosition, UnsupportedFormat
from .ir import (
    EdgeSpec,
    NodeRole,
    NodeSpec,
    ParamSpec,
    ParamType,
    WorkflowGraph,
    canonical_graph_hash,
)

logger = logging.getLogger(__name__)

# Layout / cosmetic keys that carry no functional meaning.  They are removed
# from nodes (and the workflow top level) and recorded in the StripReport.
REDUNDANT_KEYS = frozenset({
    "position", "color", "notes", "notesInFlow", "disabled",
    "webhookId", "pinData", "meta", "tags", "settings",
})

# Node keys that map onto dedicated NodeSpec fields rather than raw_config.
_STRUCTURAL_KEYS = frozenset({"id", "name", "type"})

WORKFLOW_SCOPE = ""  # StripReport scope marker for top-level keys


@dataclass(frozen=True)
class SourceDocument:
    """A platform workflow file: name, detected format and raw bytes."""

    filename: str
    format: str  # "json" | "yaml"
    data: bytes

    @classmethod
    def from_file(cls, filename: str, data: bytes) -> "SourceDocument":
        return cls(filename, detect_format(filename), data)

    def text(self) -> str:
        try:
            return self.data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"{self.filename}: not valid UTF-8") from exc


@dataclass
class StripReport:
    """Which redundancy keys were removed, as (scope, key) pairs.

    ``scope`` is the node_id, or ``""`` for workflow-level keys.  Stripped
    position values are kept so emission can reuse the original layout.
    """

    removed_keys: list[tuple[str, str]] = field(default_factory=list)
    positions: dict[str, tuple[float, float]] = field(default_factory=dict)


def detect_format(filename: str) -> str:
    lowered = filename.lower()
    if lowered.endswith(".json"):
        return "json"
    if lowered.endswith((".yml", ".yaml")):
        return "yaml"
    raise UnsupportedFormat(f"unsupported extension: {filename!r} (expected .json/.yml/.yaml)")


def _decode(doc: SourceDocument) -> dict:
    text = doc.text()
    try:
        if doc.format == "json":
            obj = json.loads(text)
        else:
            obj = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise MalformedDocument(f"{doc.filename}: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedDocument(f"{doc.filename}: top level is not an object")
    return obj


def node_role(ntype: str) -> NodeRole:
    """Trigger iff the type embeds "trigger" (any case) or is the legacy start node."""
    if "trigger" in ntype.lower() or ntype == "n8n-nodes-base.start":
        return NodeRole.TRIGGER
    return NodeRole.FUNCTION


# ---------------------------------------------------------------------------
# I/O inference rule table
# ---------------------------------------------------------------------------

def _p(name: str, ptype: ParamType, required: bool = False) -> ParamSpec:
    return ParamSpec(name, ptype, required)


_DEFAULT_IO = ((_p("main", ParamType.ANY),), (_p("main", ParamType.ANY),))

# Keyed by exact node type, with prefix fallback (longest prefix wins).
# Covers the common n8n base nodes seen in real exports; anything unknown
# degrades to the any/any default.
NODE_IO_TABLE: dict[str, tuple[tuple[ParamSpec, ...], tuple[ParamSpec, ...]]] = {
    "n8n-nodes-base.manualTrigger": ((), (_p("main", ParamType.ANY),)),
    "n8n-nodes-base.start": ((), (_p("main", ParamType.ANY),)),
    "n8n-nodes-base.webhook": ((), (_p("body", ParamType.JSON), _p("headers", ParamType.JSON))),
    "n8n-nodes-base.scheduleTrigger": ((), (_p("timestamp", ParamType.STRING),)),
    "n8n-nodes-base.cron": ((), (_p("timestamp", ParamType.STRING),)),
    "n8n-nodes-base.emailReadImap": ((), (_p("message", ParamType.JSON), _p("attachments", ParamType.BINARY))),
    "n8n-nodes-base.telegramTrigger": ((), (_p("update", ParamType.JSON),)),
    "n8n-nodes-base.httpRequest": (
        (_p("url", ParamType.STRING), _p("body", ParamType.JSON)),
        (_p("response", ParamType.JSON), _p("statusCode", ParamType.NUMBER)),
    ),
    "n8n-nodes-base.code": ((_p("items", ParamType.JSON, required=True),), (_p("items", ParamType.JSON),)),
    "n8n-nodes-base.function": ((_p("items", ParamType.JSON, required=True),), (_p("items", ParamType.JSON),)),
    "n8n-nodes-base.functionItem": ((_p("item", ParamType.JSON, required=True),), (_p("item", ParamType.JSON),)),
    "n8n-nodes-base.set": ((_p("items", ParamType.JSON, required=True),), (_p("items", ParamType.JSON),)),
    "n8n-nodes-base.if": ((_p("items", ParamType.JSON, required=True),), (_p("true", ParamType.JSON), _p("false", ParamType.JSON))),
    "n8n-nodes-base.switch": ((_p("items", ParamType.JSON, required=True),), (_p("output", ParamType.JSON),)),
    "n8n-nodes-base.merge": ((_p("input1", ParamType.JSON), _p("input2", ParamType.JSON)), (_p("items", ParamType.JSON),)),
    "n8n-nodes-base.noOp": ((_p("items", ParamType.JSON),), (_p("items", ParamType.JSON),)),
    "n8n-nodes-base.wait": ((_p("items", ParamType.JSON),), (_p("items", ParamType.JSON),)),
    "n8n-nodes-base.emailSend": ((_p("text", ParamType.STRING, required=True),), (_p("accepted", ParamType.BOOLEAN),)),
    "n8n-nodes-base.readPDF": ((_p("binary", ParamType.BINARY, required=True),), (_p("text", ParamType.STRING),)),
    "n8n-nodes-base.extractFromFile": ((_p("binary", ParamType.BINARY, required=True),), (_p("data", ParamType.JSON),)),
    "n8n-nodes-base.readBinaryFile": ((_p("filePath", ParamType.STRING),), (_p("binary", ParamType.BINARY),)),
    "n8n-nodes-base.writeBinaryFile": ((_p("binary", ParamType.BINARY, required=True),), (_p("filePath", ParamType.STRING),)),
    "n8n-nodes-base.spreadsheetFile": ((_p("binary", ParamType.BINARY, required=True),), (_p("rows", ParamType.JSON),)),
    "n8n-nodes-base.htmlExtract": ((_p("html", ParamType.STRING, required=True),), (_p("data", ParamType.JSON),)),
    "n8n-nodes-base.markdown": ((_p("text", ParamType.STRING, required=True),), (_p("text", ParamType.STRING),)),
    "n8n-nodes-base.googleSheets": ((_p("rows", ParamType.JSON),), (_p("rows", ParamType.JSON),)),
    "n8n-nodes-base.postgres": ((_p("query", ParamType.STRING),), (_p("rows", ParamType.JSON),)),
    "n8n-nodes-base.redis": ((_p("key", ParamType.STRING),), (_p("value", ParamType.JSON),)),
    "n8n-nodes-base.slack": ((_p("text", ParamType.STRING, required=True),), (_p("message", ParamType.JSON),)),
    "n8n-nodes-base.telegram": ((_p("text", ParamType.STRING, required=True),), (_p("message", ParamType.JSON),)),
    "n8n-nodes-base.openAi": ((_p("prompt", ParamType.STRING, required=True),), (_p("completion", ParamType.STRING),)),
    "n8n-nodes-base.respondToWebhook": ((_p("body", ParamType.JSON, required=True),), (_p("response", ParamType.JSON),)),
    "n8n-nodes-base.ftp": ((_p("binary", ParamType.BINARY),), (_p("binary", ParamType.BINARY),)),
    "n8n-nodes-base.moveBinaryData": ((_p("binary", ParamType.BINARY, required=True),), (_p("items", ParamType.JSON),)),
    "connector.map": ((_p("main", ParamType.ANY),), (_p("main", ParamType.ANY),)),
    "generated.placeholder": ((_p("main", ParamType.ANY),), (_p("main", ParamType.ANY),)),
}

_PREFIX_TABLE = sorted(NODE_IO_TABLE, key=len, reverse=True)


def infer_node_io(ntype: str) -> tuple[tuple[ParamSpec, ...], tuple[ParamSpec, ...]]:
    """Deterministic I/O parameter lookup by node type.

    Exact match first, then longest-prefix match; unknown types fall back to
    a single optional ``main: any`` on both sides.  Trigger nodes never take
    inputs, whatever the table says.
    """
    io = NODE_IO_TABLE.get(ntype)
    if io is None:
        for prefix in _PREFIX_TABLE:
            if ntype.startswith(prefix):
                io = NODE_IO_TABLE[prefix]
                break
    if io is None:
        io = _DEFAULT_IO
    inputs, outputs = io
    if node_role(ntype) == NodeRole.TRIGGER:
        inputs = ()
    return inputs, outputs


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def parse_n8n(doc: SourceDocument) -> tuple[WorkflowGraph, StripReport]:
    """Normalize an n8n document into a WorkflowGraph plus a StripReport.

    Raises MalformedDocument, DanglingConnection or UnsupportedFormat.
    """
    obj = _decode(doc)
    report = StripReport()

    raw_nodes = obj.get("nodes", [])
    raw_connections = obj.get("connections", {})
    if not isinstance(raw_nodes, list) or not isinstance(raw_connections, dict):
        raise MalformedDocument(f"{doc.filename}: nodes/connections have wrong shape")

    for key in sorted(REDUNDANT_KEYS & obj.keys()):
        report.removed_keys.append((WORKFLOW_SCOPE, key))

    nodes: list[NodeSpec] = []
    name_to_id: dict[str, str] = {}
    for raw in raw_nodes:
        if not isinstance(raw, dict) or "type" not in raw:
            raise MalformedDocument(f"{doc.filename}: node entry missing 'type'")
        display = str(raw.get("name", ""))
        node_id = str(raw.get("id") or display)
        if not node_id:
            raise MalformedDocument(f"{doc.filename}: node has neither id nor name")
        if display in name_to_id:
            raise MalformedDocument(f"{doc.filename}: duplicate node name {display!r}")
        name_to_id[display] = node_id
        ntype = str(raw["type"])

        raw_config: dict[str, Any] = {}
        for key, value in raw.items():
            if key in _STRUCTURAL_KEYS:
                continue
            if key in REDUNDANT_KEYS:
                report.removed_keys.append((node_id, key))
                if key == "position" and isinstance(value, (list, tuple)) and len(value) == 2:
                    report.positions[node_id] = (float(value[0]), float(value[1]))
                continue
            if key == "credentials":
                logger.warning("dropping credentials on node %r in %s", display, doc.filename)
                continue
            raw_config[key] = value

        inputs, outputs = infer_node_io(ntype)
        nodes.append(NodeSpec(
            node_id=node_id,
            name=display,
            ntype=ntype,
            role=node_role(ntype),
            inputs=inputs,
            outputs=outputs,
            raw_config=raw_config,
        ))

    edges: list[EdgeSpec] = []
    for source_name, ports in raw_connections.items():
        if source_name not in name_to_id:
            raise DanglingConnection(f"{doc.filename}: connection from unknown node {source_name!r}")
        if not isinstance(ports, dict):
            raise MalformedDocument(f"{doc.filename}: connections[{source_name!r}] is not an object")
        mains = ports.get("main", [])
        if not isinstance(mains, list):
            raise MalformedDocument(f"{doc.filename}: connections[{source_name!r}].main is not a list")
        for source_port, bundle in enumerate(mains):
            if bundle is None:
                continue
            for entry in bundle:
                if entry is None:
                    continue
                target_name = entry.get("node")
                if target_name not in name_to_id:
                    raise DanglingConnection(
                        f"{doc.filename}: connection targets unknown node {target_name!r}")
                edges.append(EdgeSpec(
                    source=name_to_id[source_name],
                    target=name_to_id[target_name],
                    source_port=source_port,
                    target_port=int(entry.get("index", 0)),
                ))

    graph = WorkflowGraph(
        workflow_id="",
        name=str(obj.get("name", "")),
        description=str(obj.get("description", "")),
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
    return graph, report


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def emit_n8n(g: WorkflowGraph, positions: Mapping[str, tuple[float, float]]) -> SourceDocument:
    """Emit a deployable n8n JSON document; inverse of :func:`parse_n8n`.

    ``positions`` must cover every node.  Display names are deduplicated if
    needed because connections key by name.
    """
    for n in g.nodes:
        if n.node_id not in positions:
            raise MissingPosition(f"no canvas position for node {n.node_id!r}")

    emit_names: dict[str, str] = {}
    taken: set[str] = set()
    for n in g.nodes:
        base = n.name or n.node_id
        candidate = base
        serial = 1
        while candidate in taken:
            serial += 1
            candidate = f"{base} {serial}"
        taken.add(candidate)
        emit_names[n.node_id] = candidate

    out_nodes = []
    for n in g.nodes:
        entry: dict[str, Any] = {
            "id": n.node_id,
            "name": emit_names[n.node_id],
            "type": n.ntype,
        }
        entry.update(n.raw_config)
        entry.setdefault("typeVersion", 1)
        entry.setdefault("parameters", {})
        x, y = positions[n.node_id]
        entry["position"] = [x, y]
        out_nodes.append(entry)

    connections: dict[str, Any] = {}
    for n in g.nodes:
        outgoing = g.out_edges(n.node_id)
        if not outgoing:
            continue
        width = max(e.source_port for e in outgoing) + 1
        mains: list[list[dict]] = [[] for _ in range(width)]
        for e in sorted(outgoing, key=lambda e: (e.source_port, e.target, e.target_port)):
            mains[e.source_port].append({
                "node": emit_names[e.target],
                "type": "main",
                "index": e.target_port,
            })
        connections[emit_names[n.node_id]] = {"main": mains}

    obj = {
        "name": g.name,
        "nodes": out_nodes,
        "connections": connections,
        "active": False,
        "settings": {},
    }
    if g.description:
        obj["description"] = g.description
    data = json.dumps(obj, indent=2, ensure_ascii=False).encode("utf-8")
    filename = (g.name or g.workflow_id or "workflow").replace("/", "_") + ".json"
    return SourceDocument(filename=filename, format="json", data=data)


# ---------------------------------------------------------------------------
# Adapter slot
# ---------------------------------------------------------------------------

class PlatformAdapter(Protocol):
    """Parse/emit pair for one workflow platform.

    Only the n8n adapter is implemented; the protocol reserves the slot for
    other DSLs (e.g. Dify) without committing to their object models.
    """

    platform: str

    def parse(self, doc: SourceDocument) -> tuple[WorkflowGraph, StripReport]: ...

    def emit(self, g: WorkflowGraph, positions: Mapping[str, tuple[float, float]]) -> SourceDocument: ...


class N8nAdapter:
    platform = "n8n"

    def parse(self, doc: SourceDocument) -> tuple[WorkflowGraph, StripReport]:
        return parse_n8n(doc)

    def emit(self, g: WorkflowGraph, positions: Mapping[str, tuple[float, float]]) -> SourceDocument:
        return emit_n8n(g, positions)
