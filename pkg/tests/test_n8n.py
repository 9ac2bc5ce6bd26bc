"""n8n document parsing, emission and round-trips."""

import json

import pytest
import yaml

from flowforge.errors import (
    DanglingConnection,
    MalformedDocument,
    MissingPosition,
    UnsupportedFormat,
)
from flowforge.ir import EdgeSpec, NodeRole, ParamType, graphs_isomorphic_modulo_layout
from flowforge.n8n import (
    REDUNDANT_KEYS,
    SourceDocument,
    detect_format,
    emit_n8n,
    infer_node_io,
    parse_n8n,
)

# Hand-built against the n8n connections schema: the outer array index under
# "main" is the source output port, "index" is the target input port, and
# connections key by node *name*.
WEBHOOK_FIXTURE = {
    "name": "Schedule relay",
    "nodes": [
        {
            "id": "uuid-1",
            "name": "Every Morning",
            "type": "n8n-nodes-base.scheduleTrigger",
            "typeVersion": 1,
            "position": [0, 0],
            "parameters": {"rule": {"hour": 7}},
            "webhookId": "abc-123",
        },
        {
            "id": "uuid-2",
            "name": "HTTP Request",
            "type": "n8n-nodes-base.httpRequest",
            "typeVersion": 4,
            "position": [280, 0],
            "parameters": {"url": "https://api.example.com/relay"},
            "notes": "forwards the payload",
        },
    ],
    "connections": {
        "Every Morning": {"main": [[{"node": "HTTP Request", "type": "main", "index": 0}]]}
    },
    "active": False,
    "settings": {"executionOrder": "v1"},
}


def doc(obj, filename="wf.json") -> SourceDocument:
    return SourceDocument.from_file(filename, json.dumps(obj).encode())


def test_parse_schedule_fixture():
    g, report = parse_n8n(doc(WEBHOOK_FIXTURE))
    assert len(g.nodes) == 2
    assert len(g.edges) == 1
    roles = {n.name: n.role for n in g.nodes}
    assert roles == {"Every Morning": NodeRole.TRIGGER, "HTTP Request": NodeRole.FUNCTION}
    assert g.edges[0] == EdgeSpec("uuid-1", "uuid-2", 0, 0)
    assert g.name == "Schedule relay"
    assert g.description == ""
    # stripped: node positions + webhookId + notes, workflow-level settings
    removed = set(report.removed_keys)
    assert ("uuid-1", "position") in removed
    assert ("uuid-1", "webhookId") in removed
    assert ("uuid-2", "notes") in removed
    assert ("", "settings") in removed


def test_parse_keeps_parameters_in_raw_config():
    g, report = parse_n8n(doc(WEBHOOK_FIXTURE))
    by_name = {n.name: n for n in g.nodes}
    assert by_name["HTTP Request"].raw_config["parameters"]["url"] == "https://api.example.com/relay"
    assert by_name["HTTP Request"].raw_config["typeVersion"] == 4
    stripped_keys = {k for _, k in report.removed_keys}
    assert stripped_keys <= REDUNDANT_KEYS
    assert not stripped_keys & {"parameters", "type", "name", "id"}


def test_parse_empty_document():
    g, _ = parse_n8n(doc({"name": "empty", "nodes": [], "connections": {}}))
    assert g.nodes == ()
    assert g.edges == ()


def test_parse_dangling_connection():
    bad = dict(WEBHOOK_FIXTURE)
    bad["connections"] = {"Webhook": {"main": [[{"node": "Ghost", "type": "main", "index": 0}]]}}
    with pytest.raises(DanglingConnection):
        parse_n8n(doc(bad))


def test_parse_rejects_unknown_extension():
    with pytest.raises(UnsupportedFormat):
        SourceDocument.from_file("wf.xml", b"<x/>")


def test_parse_rejects_garbage_bytes():
    with pytest.raises(MalformedDocument):
        parse_n8n(SourceDocument("wf.json", "json", b"{nope"))


def test_parse_rejects_duplicate_names():
    bad = {
        "name": "dup",
        "nodes": [
            {"id": "a", "name": "Same", "type": "n8n-nodes-base.code"},
            {"id": "b", "name": "Same", "type": "n8n-nodes-base.code"},
        ],
        "connections": {},
    }
    with pytest.raises(MalformedDocument):
        parse_n8n(doc(bad))


def test_parse_yaml_front_end():
    payload = yaml.safe_dump(WEBHOOK_FIXTURE).encode()
    g_yaml, _ = parse_n8n(SourceDocument.from_file("wf.yaml", payload))
    g_json, _ = parse_n8n(doc(WEBHOOK_FIXTURE))
    assert g_yaml.workflow_id == g_json.workflow_id


def test_parse_deterministic_workflow_id():
    d = doc(WEBHOOK_FIXTURE)
    g1, _ = parse_n8n(d)
    g2, _ = parse_n8n(d)
    assert g1.workflow_id == g2.workflow_id
    assert g1 == g2


def test_format_detection():
    assert detect_format("a.json") == "json"
    assert detect_format("a.yml") == "yaml"
    assert detect_format("a.YAML") == "yaml"


def test_trigger_role_rule():
    from flowforge.n8n import node_role

    assert node_role("n8n-nodes-base.manualTrigger") == NodeRole.TRIGGER
    assert node_role("n8n-nodes-base.scheduleTrigger") == NodeRole.TRIGGER
    assert node_role("vendor.MyTriggerHook") == NodeRole.TRIGGER  # case-insensitive substring
    assert node_role("n8n-nodes-base.start") == NodeRole.TRIGGER  # legacy start node
    assert node_role("n8n-nodes-base.webhook") == NodeRole.FUNCTION  # no substring, no whitelist
    assert node_role("n8n-nodes-base.code") == NodeRole.FUNCTION


# -- emission -----------------------------------------------------------------

def test_round_trip_webhook_fixture():
    g, report = parse_n8n(doc(WEBHOOK_FIXTURE))
    emitted = emit_n8n(g, report.positions)
    g2, _ = parse_n8n(emitted)
    assert graphs_isomorphic_modulo_layout(g, g2)


def test_emit_empty_graph():
    from flowforge.ir import WorkflowGraph

    emitted = emit_n8n(WorkflowGraph("w", name="empty"), {})
    obj = json.loads(emitted.data)
    assert obj["nodes"] == []
    assert obj["connections"] == {}


def test_emit_parallel_ports_build_two_outer_arrays():
    # ports (0,0) and (1,0): by the port-to-array mapping the source's "main"
    # must hold two outer arrays, one per source port
    from conftest import graph, node

    g = graph([node("A"), node("B")],
              [EdgeSpec("A", "B", 0, 0), EdgeSpec("A", "B", 1, 0)])
    emitted = emit_n8n(g, {"A": (0, 0), "B": (280, 0)})
    obj = json.loads(emitted.data)
    mains = obj["connections"]["A"]["main"]
    assert len(mains) == 2
    assert mains[0][0]["node"] == "B" and mains[0][0]["index"] == 0
    assert mains[1][0]["node"] == "B" and mains[1][0]["index"] == 0


def test_emit_requires_positions():
    from conftest import graph, node

    g = graph([node("A")], [])
    with pytest.raises(MissingPosition):
        emit_n8n(g, {})


def test_emit_deduplicates_display_names():
    from conftest import graph, node

    g = graph([node("a1", name="Task"), node("a2", name="Task")], [("a1", "a2")])
    emitted = emit_n8n(g, {"a1": (0, 0), "a2": (280, 0)})
    g2, _ = parse_n8n(emitted)
    assert graphs_isomorphic_modulo_layout(g, g2)


def test_double_round_trip_is_stable():
    g, report = parse_n8n(doc(WEBHOOK_FIXTURE))
    once = emit_n8n(g, report.positions)
    g1, r1 = parse_n8n(once)
    twice = emit_n8n(g1, r1.positions)
    g2, _ = parse_n8n(twice)
    assert graphs_isomorphic_modulo_layout(g1, g2)


# -- I/O inference ------------------------------------------------------------

def test_infer_http_request_outputs_response_json():
    _, outputs = infer_node_io("n8n-nodes-base.httpRequest")
    assert any(p.name == "response" and p.ptype == ParamType.JSON for p in outputs)


def test_infer_unknown_type_defaults_to_any():
    inputs, outputs = infer_node_io("vendor.custom")
    assert [(p.name, p.ptype) for p in inputs] == [("main", ParamType.ANY)]
    assert [(p.name, p.ptype) for p in outputs] == [("main", ParamType.ANY)]


def test_trigger_nodes_have_no_inputs():
    inputs, _ = infer_node_io("n8n-nodes-base.webhook")
    assert inputs == ()
    inputs, _ = infer_node_io("vendor.customTrigger")
    assert inputs == ()


def test_credentials_dropped_with_warning(caplog):
    enriched = json.loads(json.dumps(WEBHOOK_FIXTURE))
    enriched["nodes"][1]["credentials"] = {"httpBasicAuth": {"id": "1", "name": "creds"}}
    with caplog.at_level("WARNING"):
        g, _ = parse_n8n(doc(enriched))
    by_name = {n.name: n for n in g.nodes}
    assert "credentials" not in by_name["HTTP Request"].raw_config
    assert any("credentials" in r.message for r in caplog.records)
