"""Generate the bundled workflow corpus.

Twelve n8n-format workflows, two per domain (chat, document ops, video
creation, API integration, data processing, automation).  Each is a trigger
followed by a linear run of supernodes (one has an internal review loop),
which keeps every workflow reconstructible from its own description with
the deterministic stubs.  Two workflows in different domains deliberately
share their functional chain so ingesting both exercises content-addressed
deduplication.

Run from the repository root:

    python scripts/make_corpus.py          # writes src/flowforge/corpus/*.json
    python scripts/make_corpus.py --check  # prints the retrieval score matrix
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

CORPUS_DIR = Path(__file__).resolve().parents[1] / "src" / "flowforge" / "corpus"

# (filename, workflow name, description, nodes, edges)
# nodes: (node_id, display name, ntype, parameters)
# edges: (source name, target name, source_port, target_port)
WORKFLOWS = [
    (
        "chat_support_autoreply",
        "Chat support autoreply",
        "classify ticket intent draft support reply and send chat reply",
        [
            ("n1", "Receive Chat Message", "n8n-nodes-base.telegramTrigger", {"updates": ["message"]}),
            ("n2", "Classify Ticket Intent", "n8n-nodes-base.code", {"jsCode": "return classify(items)"}),
            ("n3", "Draft Support Reply", "n8n-nodes-base.openAi", {"prompt": "Draft a courteous reply"}),
            ("n4", "Send Chat Reply", "n8n-nodes-base.telegram", {"chatId": "={{$json.chatId}}"}),
        ],
        [("Receive Chat Message", "Classify Ticket Intent", 0, 0),
         ("Classify Ticket Intent", "Draft Support Reply", 0, 0),
         ("Draft Support Reply", "Send Chat Reply", 0, 0)],
    ),
    (
        "chat_daily_digest",
        "Chat daily digest",
        "fetch chat transcripts summarize conversations and post digest to channel",
        [
            ("n1", "Every Evening", "n8n-nodes-base.scheduleTrigger", {"rule": {"hour": 18}}),
            ("n2", "Fetch Chat Transcripts", "n8n-nodes-base.httpRequest", {"url": "https://chat.internal/api/transcripts"}),
            ("n3", "Summarize Conversations", "n8n-nodes-base.code", {"jsCode": "return summarize(items)"}),
            ("n4", "Post Digest To Channel", "n8n-nodes-base.slack", {"channel": "#support-digest"}),
        ],
        [("Every Evening", "Fetch Chat Transcripts", 0, 0),
         ("Fetch Chat Transcripts", "Summarize Conversations", 0, 0),
         ("Summarize Conversations", "Post Digest To Channel", 0, 0)],
    ),
    (
        "invoice_pdf_summary",
        "Invoice PDF summary",
        "parse invoice document extract invoice totals and send invoice summary",
        [
            ("n1", "New Invoice Email", "n8n-nodes-base.gmailTrigger", {"filters": {"q": "has:attachment invoice"}}),
            ("n2", "Parse Invoice Document", "n8n-nodes-base.readPDF", {"binaryPropertyName": "attachment_0"}),
            ("n3", "Extract Invoice Totals", "n8n-nodes-base.code", {"jsCode": "return totals(items)"}),
            ("n4", "Send Invoice Summary", "n8n-nodes-base.emailSend", {"toEmail": "finance@example.com"}),
        ],
        [("New Invoice Email", "Parse Invoice Document", 0, 0),
         ("Parse Invoice Document", "Extract Invoice Totals", 0, 0),
         ("Extract Invoice Totals", "Send Invoice Summary", 0, 0)],
    ),
    (
        "contract_archive",
        "Contract archive register",
        "extract contract fields normalize contract record and append contract register",
        [
            ("n1", "Watch Contract Folder", "n8n-nodes-base.localFileTrigger", {"path": "/contracts/inbox"}),
            ("n2", "Extract Contract Fields", "n8n-nodes-base.extractFromFile", {"operation": "pdf"}),
            ("n3", "Normalize Contract Record", "n8n-nodes-base.set", {"fields": {"status": "archived"}}),
            ("n4", "Append Contract Register", "n8n-nodes-base.googleSheets", {"sheetName": "Contracts"}),
        ],
        [("Watch Contract Folder", "Extract Contract Fields", 0, 0),
         ("Extract Contract Fields", "Normalize Contract Record", 0, 0),
         ("Normalize Contract Record", "Append Contract Register", 0, 0)],
    ),
    (
        "video_render_pipeline",
        "Video render pipeline",
        "fetch video script generate scene narration and render video clip",
        [
            ("n1", "Start Video Render", "n8n-nodes-base.manualTrigger", {}),
            ("n2", "Fetch Video Script", "n8n-nodes-base.httpRequest", {"url": "https://studio.internal/api/script"}),
            ("n3", "Generate Scene Narration", "n8n-nodes-base.openAi", {"prompt": "Narrate the scene"}),
            ("n4", "Render Video Clip", "n8n-nodes-base.httpRequest", {"url": "https://render.internal/api/jobs", "method": "POST"}),
        ],
        [("Start Video Render", "Fetch Video Script", 0, 0),
         ("Fetch Video Script", "Generate Scene Narration", 0, 0),
         ("Generate Scene Narration", "Render Video Clip", 0, 0)],
    ),
    (
        "video_publish_notify",
        "Video publish notifier",
        "fetch rendered videos filter finished renders and notify video ready",
        [
            ("n1", "Nightly Video Check", "n8n-nodes-base.scheduleTrigger", {"rule": {"hour": 2}}),
            ("n2", "Fetch Rendered Videos", "n8n-nodes-base.httpRequest", {"url": "https://render.internal/api/done"}),
            ("n3", "Filter Finished Renders", "n8n-nodes-base.if", {"conditions": {"status": "finished"}}),
            ("n4", "Notify Video Ready", "n8n-nodes-base.telegram", {"chatId": "studio"}),
        ],
        [("Nightly Video Check", "Fetch Rendered Videos", 0, 0),
         ("Fetch Rendered Videos", "Filter Finished Renders", 0, 0),
         ("Filter Finished Renders", "Notify Video Ready", 0, 0)],
    ),
    (
        "api_health_monitor",
        "API health monitor",
        "probe service health check status threshold and alert on failure",
        [
            ("n1", "Every Five Minutes", "n8n-nodes-base.scheduleTrigger", {"rule": {"minute": "*/5"}}),
            ("n2", "Probe Service Health", "n8n-nodes-base.httpRequest", {"url": "https://api.example.com/healthz"}),
            ("n3", "Check Status Threshold", "n8n-nodes-base.if", {"conditions": {"statusCode": 200}}),
            ("n4", "Alert On Failure", "n8n-nodes-base.slack", {"channel": "#oncall"}),
        ],
        [("Every Five Minutes", "Probe Service Health", 0, 0),
         ("Probe Service Health", "Check Status Threshold", 0, 0),
         ("Check Status Threshold", "Alert On Failure", 0, 0)],
    ),
    (
        "crm_contact_sync",
        "CRM contact sync",
        "fetch crm contacts map contact fields and upsert contact rows",
        [
            ("n1", "When Called By Parent", "n8n-nodes-base.executeWorkflowTrigger", {}),
            ("n2", "Fetch CRM Contacts", "n8n-nodes-base.httpRequest", {"url": "https://crm.example.com/api/contacts"}),
            ("n3", "Map Contact Fields", "n8n-nodes-base.code", {"jsCode": "return mapContacts(items)"}),
            ("n4", "Upsert Contact Rows", "n8n-nodes-base.postgres", {"table": "contacts", "operation": "upsert"}),
        ],
        [("When Called By Parent", "Fetch CRM Contacts", 0, 0),
         ("Fetch CRM Contacts", "Map Contact Fields", 0, 0),
         ("Map Contact Fields", "Upsert Contact Rows", 0, 0)],
    ),
    (
        "sales_etl_loop",
        "Sales spreadsheet ETL",
        "fetch sales export read rows from spreadsheet clean sales rows validate row batch and load sales table",
        [
            ("n1", "Weekly Sales Run", "n8n-nodes-base.scheduleTrigger", {"rule": {"weekday": 1}}),
            ("n2", "Fetch Sales Export", "n8n-nodes-base.httpRequest", {"url": "https://erp.internal/api/sales.xlsx"}),
            ("n3", "Rows From Spreadsheet", "n8n-nodes-base.spreadsheetFile", {"operation": "fromFile"}),
            ("n4", "Clean Sales Rows", "n8n-nodes-base.code", {"jsCode": "return clean(items)"}),
            ("n5", "Validate Row Batch", "n8n-nodes-base.if", {"conditions": {"valid": True}}),
            ("n6", "Load Sales Table", "n8n-nodes-base.postgres", {"table": "sales", "operation": "insert"}),
        ],
        # review loop: invalid batches go back for another cleaning pass
        [("Weekly Sales Run", "Fetch Sales Export", 0, 0),
         ("Fetch Sales Export", "Rows From Spreadsheet", 0, 0),
         ("Rows From Spreadsheet", "Clean Sales Rows", 0, 0),
         ("Clean Sales Rows", "Validate Row Batch", 0, 0),
         ("Validate Row Batch", "Load Sales Table", 0, 0),
         ("Validate Row Batch", "Clean Sales Rows", 1, 0)],
    ),
    (
        "feed_dedupe_append",
        "Feed dedupe append",
        "fetch data feed deduplicate feed items and append feed rows",
        [
            ("n1", "Hourly Feed Pull", "n8n-nodes-base.scheduleTrigger", {"rule": {"minute": 0}}),
            ("n2", "Fetch Data Feed", "n8n-nodes-base.httpRequest", {"url": "https://feeds.example.com/items.json"}),
            ("n3", "Deduplicate Feed Items", "n8n-nodes-base.code", {"jsCode": "return dedupe(items)"}),
            ("n4", "Append Feed Rows", "n8n-nodes-base.googleSheets", {"sheetName": "Feed"}),
        ],
        [("Hourly Feed Pull", "Fetch Data Feed", 0, 0),
         ("Fetch Data Feed", "Deduplicate Feed Items", 0, 0),
         ("Deduplicate Feed Items", "Append Feed Rows", 0, 0)],
    ),
    (
        # deliberately shares its functional chain with api_health_monitor:
        # same node names, types and ports, so both decompose to one shared
        # content-addressed segment
        "uptime_guard",
        "Uptime guard",
        "uptime guard probe service health check status threshold and alert on failure",
        [
            ("n1", "Run Uptime Check", "n8n-nodes-base.manualTrigger", {}),
            ("n2", "Probe Service Health", "n8n-nodes-base.httpRequest", {"url": "https://api.example.com/healthz"}),
            ("n3", "Check Status Threshold", "n8n-nodes-base.if", {"conditions": {"statusCode": 200}}),
            ("n4", "Alert On Failure", "n8n-nodes-base.slack", {"channel": "#oncall"}),
        ],
        [("Run Uptime Check", "Probe Service Health", 0, 0),
         ("Probe Service Health", "Check Status Threshold", 0, 0),
         ("Check Status Threshold", "Alert On Failure", 0, 0)],
    ),
    (
        "nightly_backup",
        "Nightly database backup",
        "dump critical tables compress backup payload and upload backup archive",
        [
            ("n1", "Nightly Backup", "n8n-nodes-base.scheduleTrigger", {"rule": {"hour": 3}}),
            ("n2", "Dump Critical Tables", "n8n-nodes-base.postgres", {"operation": "executeQuery", "query": "COPY critical TO STDOUT"}),
            ("n3", "Compress Backup Payload", "n8n-nodes-base.code", {"jsCode": "return gzip(items)"}),
            ("n4", "Upload Backup Archive", "n8n-nodes-base.ftp", {"path": "/backups/"}),
        ],
        [("Nightly Backup", "Dump Critical Tables", 0, 0),
         ("Dump Critical Tables", "Compress Backup Payload", 0, 0),
         ("Compress Backup Payload", "Upload Backup Archive", 0, 0)],
    ),
]


def build_document(name, description, nodes, edges) -> dict:
    node_entries = []
    for idx, (nid, display, ntype, params) in enumerate(nodes):
        node_entries.append({
            "id": nid,
            "name": display,
            "type": ntype,
            "typeVersion": 1,
            "position": [idx * 280, 0],
            "parameters": params,
        })
    connections: dict = {}
    for source, target, sport, tport in edges:
        mains = connections.setdefault(source, {"main": []})["main"]
        while len(mains) <= sport:
            mains.append([])
        mains[sport].append({"node": target, "type": "main", "index": tport})
    return {
        "name": name,
        "description": description,
        "nodes": node_entries,
        "connections": connections,
        "active": False,
        "settings": {},
    }


def write_corpus() -> None:
    CORPUS_DIR.mkdir(parents=True, exist_ok=True)
    for filename, name, description, nodes, edges in WORKFLOWS:
        doc = build_document(name, description, nodes, edges)
        path = CORPUS_DIR / f"{filename}.json"
        path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", "utf-8")
        print(f"wrote {path.relative_to(CORPUS_DIR.parents[2])}")


def check_corpus() -> int:
    """Verify the retrieval constraints the corpus is designed around."""
    sys.path.insert(0, str(CORPUS_DIR.parents[1]))
    from flowforge.analysis import split_requirement
    from flowforge.extraction import annotate, decompose_structural
    from flowforge.n8n import SourceDocument, parse_n8n
    from flowforge.repository import cosine, embed

    failures = 0
    entries = []  # (filename, workflow, [segment index texts])
    for path in sorted(CORPUS_DIR.glob("*.json")):
        g, _ = parse_n8n(SourceDocument.from_file(path.name, path.read_bytes()))
        d = annotate(decompose_structural(g))
        reusable = [s for s in d.segments if s.reusable]
        if len(reusable) != 1:
            print(f"FAIL {path.name}: {len(reusable)} reusable segments (want 1)")
            failures += 1
        if len(split_requirement(g.description)) != 1:
            print(f"FAIL {path.name}: description splits into multiple units")
            failures += 1
        entries.append((path.name, g, reusable))

    print(f"{'workflow':32s} self   best-other")
    for fname, g, reusable in entries:
        q = embed(g.description)
        self_ids = {s.segment_id for s in reusable}
        self_score = max(cosine(q, embed(s.index_text())) for s in reusable)
        others = [
            (cosine(q, embed(s.index_text())), s.segment_id)
            for _, _, other in entries for s in other if s.segment_id not in self_ids
        ]
        best_other = max(others)[0] if others else 0.0
        status = "ok"
        if self_score <= 0.6:
            status = "BELOW-THETA"
            failures += 1
        if best_other >= self_score:
            status = "OUTRANKED"
            failures += 1
        print(f"{fname:32s} {self_score:.3f}  {best_other:.3f}  {status}")
    return failures


if __name__ == "__main__":
    if "--check" in sys.argv:
        raise SystemExit(check_corpus())
    write_corpus()
