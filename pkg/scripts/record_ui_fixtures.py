"""Record real API responses as fixtures for the console's contract tests.

Spins the service in-process against a scratch repository, drives the same
endpoints the console uses, and snapshots every response the tests replay.
Run from the repository root after changing the API or the corpus:

    python scripts/record_ui_fixtures.py
    node scripts/canonicalize_deploy_doc.mjs   # rewrites deploy_doc.txt
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from flowforge.config import ServiceConfig
from flowforge.evaluation import bundled_corpus_dir
from flowforge.service import create_app

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "frontend" / "tests" / "fixtures"

# A triggerless fan-out: one producer feeding two consumers. Decomposition
# cuts both branch edges, yielding exactly three segments.
FAN_OUT_WORKFLOW = {
    "name": "Notification fanout",
    "description": "build release notes and notify chat and email",
    "nodes": [
        {"id": "n1", "name": "Build Release Notes", "type": "n8n-nodes-base.code",
         "typeVersion": 1, "position": [0, 0], "parameters": {"jsCode": "return notes(items)"}},
        {"id": "n2", "name": "Notify Chat Channel", "type": "n8n-nodes-base.slack",
         "typeVersion": 1, "position": [280, 0], "parameters": {"channel": "#releases"}},
        {"id": "n3", "name": "Notify Mailing List", "type": "n8n-nodes-base.emailSend",
         "typeVersion": 1, "position": [280, 160], "parameters": {"toEmail": "dev@example.com"}},
    ],
    "connections": {
        "Build Release Notes": {"main": [[
            {"node": "Notify Chat Channel", "type": "main", "index": 0},
            {"node": "Notify Mailing List", "type": "main", "index": 0},
        ]]}
    },
    "active": False,
    "settings": {},
}

CONSTRUCT_REQUIREMENT = (
    "probe service health check status threshold and alert on failure. "
    "dump critical tables compress backup payload and upload backup archive. "
    "fetch data feed deduplicate feed items and append feed rows."
)


def write(name: str, payload) -> None:
    path = FIXTURE_DIR / name
    if isinstance(payload, (bytes, bytearray)):
        path.write_bytes(payload)
    else:
        path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", "utf-8")
    print(f"wrote {path.relative_to(FIXTURE_DIR.parents[2])}")


def main() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        client = TestClient(create_app(ServiceConfig(data_dir=Path(tmp) / "data")))

        # corpus seeds the repository so construct resolves by retrieval
        for path in sorted(bundled_corpus_dir().glob("*.json")):
            r = client.post(f"/workflows?filename={path.name}", content=path.read_bytes())
            assert r.status_code == 201, r.text
            client.post(f"/workflows/{r.json()['workflow_id']}/decompose")

        # 1. upload -> preview
        fan_out_bytes = json.dumps(FAN_OUT_WORKFLOW, indent=2).encode()
        write("fan_out_workflow_file.json", FAN_OUT_WORKFLOW)
        upload = client.post("/workflows?filename=fan_out_notifier.json", content=fan_out_bytes)
        assert upload.status_code == 201, upload.text
        workflow_id = upload.json()["workflow_id"]
        write("upload_response.json", upload.json())
        write("workflow_graph.json", client.get(f"/workflows/{workflow_id}").json())
        write("workflows_list.json", client.get("/workflows").json())
        write("health.json", client.get("/health").json())

        # 2. decompose: the fan-out yields exactly three segments
        decompose = client.post(f"/workflows/{workflow_id}/decompose")
        assert decompose.status_code == 200
        assert len(decompose.json()["decomposition"]["segments"]) == 3
        write("decompose_response.json", decompose.json())

        # 3. edit -> validate -> save: a graph edit re-mints the id
        segment = decompose.json()["decomposition"]["segments"][1]
        edited_graph = json.loads(json.dumps(segment["graph"]))
        edited_graph["nodes"][0]["ntype"] = "n8n-nodes-base.mattermost"
        validate = client.put(f"/segments/{segment['segment_id']}", json={
            "description": "notify the chat channel about the release",
            "graph": edited_graph,
            "validate_only": True,
        })
        assert validate.status_code == 200 and validate.json()["valid"], validate.text
        write("validate_response.json", validate.json())
        save = client.put(f"/segments/{segment['segment_id']}", json={
            "description": "notify the chat channel about the release",
            "graph": edited_graph,
        })
        assert save.status_code == 200, save.text
        assert save.json()["reminted"] and save.json()["segment_id"] != segment["segment_id"]
        write("save_response.json", save.json())
        write("edited_segment_graph.json", edited_graph)
        write("segment_before_edit.json", segment)
        write("segment_after_save.json",
              client.get(f"/segments/{save.json()['segment_id']}").json())

        # 4. construct: three-step requirement -> three plan rows
        construct = client.post("/construct", json={"requirement": CONSTRUCT_REQUIREMENT})
        assert construct.status_code == 200, construct.text
        body = construct.json()
        assert len(body["plan"]["units"]) == 3
        assert all(r["route"] == "retrieved" for r in body["resolutions"])
        write("construct_response.json", body)

        # error shape the console surfaces verbatim
        write("error_empty_requirement.json",
              client.post("/construct", json={"requirement": "  "}).json())
        write("error_not_found.json", client.get("/workflows/ffffffffffffffff").json())


if __name__ == "__main__":
    main()
