"""HTTP service exposing the full engine behind stable endpoints.

All request/response bodies are JSON; domain failures map to structured
errors ``{"error": {"code": ..., "message": ...}}`` with the matching HTTP
status, so clients can branch on the code without parsing prose.
"""

from __future__ import annotations

import json
import logging
from typing import Any, Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import ServiceConfig
from .construction import construct
from .errors import (
    EmptyRequirement,
    FlowForgeError,
    MalformedDocument,
    NotFound,
    UnsupportedFormat,
)
from .extraction import (
    Segment,
    segment_from_dict,
    segment_to_dict,
    stitch,
)
from .ir import graph_to_dict, validate_graph
from .n8n import SourceDocument, detect_format
from .pipeline import extract_and_store, ingest_document
from .repository import Repository, RetrievalConfig

logger = logging.getLogger(__name__)


class ConstructRequest(BaseModel):
    requirement: str = ""
    k: Optional[int] = None
    theta: Optional[float] = None


class ExportRequest(BaseModel):
    workflow_id: str
    platform: str = "n8n"


class SegmentUpdate(BaseModel):
    description: Optional[str] = None
    name: Optional[str] = None
    graph: Optional[dict] = None
    validate_only: bool = False


def _decomposition_payload(decomposition, report, stored_ids) -> dict:
    return {
        "decomposition": {
            "workflow_id": decomposition.workflow_id,
            "segments": [segment_to_dict(s) for s in decomposition.segments],
            "boundary_edges": [
                {"source": e.source, "source_port": e.source_port,
                 "target": e.target, "target_port": e.target_port}
                for e in decomposition.boundary_edges
            ],
            "node_to_segment": dict(decomposition.node_to_segment),
        },
        "report": report.to_dict(),
        "stored_segment_ids": stored_ids,
    }


def _segment_summary(s: Segment) -> dict:
    return {
        "segment_id": s.segment_id,
        "name": s.description.segment_name,
        "description": s.description.segment_description,
        "synthetic": s.synthetic,
        "reusable": s.reusable,
        "node_count": len(s.graph.nodes),
        "source_workflow": {
            "id": s.description.source_workflow.workflow_id,
            "name": s.description.source_workflow.name,
        },
    }


def create_app(cfg: Optional[ServiceConfig] = None, repo: Optional[Repository] = None) -> FastAPI:
    cfg = cfg or ServiceConfig()
    repo = repo or cfg.build_repository()
    app = FastAPI(title="flowforge", version="0.1.0")
    app.state.repo = repo
    app.state.cfg = cfg

    @app.exception_handler(FlowForgeError)
    async def domain_error_handler(request: Request, exc: FlowForgeError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.get("/health")
    def health():
        stats = repo.stats()
        return {
            "status": "ok",
            "segment_count": stats.segment_count,
            "workflow_count": stats.workflow_count,
            "synthetic_count": stats.synthetic_count,
        }

    @app.post("/workflows")
    async def upload_workflow(request: Request, response: Response, filename: Optional[str] = None):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            upload = form.get("file")
            if upload is None:
                raise MalformedDocument("multipart upload must carry a 'file' field")
            name = getattr(upload, "filename", None) or "workflow.json"
            payload = await upload.read()
        else:
            name = filename or request.headers.get("x-filename") or "workflow.json"
            payload = await request.body()
        if not payload:
            raise MalformedDocument("empty upload")
        doc = SourceDocument(name, detect_format(name), payload)
        result = ingest_document(repo, doc)
        response.status_code = 201 if result.created else 200
        return {
            "workflow_id": result.workflow_id,
            "status": "created" if result.created else "already_present",
            "node_count": result.node_count,
            "edge_count": result.edge_count,
        }

    @app.get("/workflows")
    def list_workflows():
        return {
            "workflows": [
                {
                    "workflow_id": g.workflow_id,
                    "name": g.name,
                    "description": g.description,
                    "node_count": len(g.nodes),
                    "edge_count": len(g.edges),
                }
                for g in repo.list_workflows()
            ]
        }

    @app.get("/workflows/{workflow_id}")
    def get_workflow(workflow_id: str):
        return graph_to_dict(repo.get_workflow(workflow_id))

    @app.post("/workflows/{workflow_id}/decompose")
    def decompose_workflow(workflow_id: str):
        decomposition, report, stored = extract_and_store(
            repo, workflow_id, max_inflight=cfg.max_inflight_llm)
        return _decomposition_payload(decomposition, report, stored)

    @app.get("/segments")
    def list_segments():
        return {"segments": [_segment_summary(s) for s in repo.list_segments()]}

    @app.get("/segments/{segment_id}")
    def get_segment(segment_id: str):
        return segment_to_dict(repo.fetch_segment(segment_id))

    @app.post("/segments", status_code=201)
    def save_segment(body: dict):
        segment = segment_from_dict(body)
        sid = repo.store_segment(segment)
        return {"segment_id": sid}

    @app.put("/segments/{segment_id}")
    def update_segment(segment_id: str, update: SegmentUpdate):
        current = repo.fetch_segment(segment_id)
        doc = segment_to_dict(current)
        if update.name is not None:
            doc["name"] = update.name
        if update.description is not None:
            doc["description"] = update.description
        if update.graph is not None:
            doc["graph"] = update.graph
        try:
            candidate = segment_from_dict(doc)
        except FlowForgeError as exc:
            if update.validate_only:
                return {"valid": False, "segment_id": segment_id, "error": exc.message}
            raise
        if update.validate_only:
            return {"valid": True, "segment_id": candidate.segment_id,
                    "reminted": candidate.segment_id != segment_id}
        new_id = repo.store_segment(candidate)
        if new_id != segment_id:
            # content hash changed with the topology; retire the old entry
            repo.delete_segment(segment_id)
        return {"segment_id": new_id, "reminted": new_id != segment_id}

    @app.delete("/segments/{segment_id}")
    def delete_segment(segment_id: str):
        repo.delete_segment(segment_id)
        return {"deleted": segment_id}

    @app.post("/construct")
    def construct_workflow(body: ConstructRequest):
        if not body.requirement.strip():
            raise EmptyRequirement("requirement text is empty")
        rc = RetrievalConfig(
            k=body.k if body.k is not None else cfg.k,
            theta=body.theta if body.theta is not None else cfg.theta,
        )
        result = construct(body.requirement, repo, rc, max_inflight=cfg.max_inflight_llm)
        return {
            "plan": result.plan.to_dict(),
            "resolutions": [r.to_dict() for r in result.resolutions],
            "graph": graph_to_dict(result.graph),
            "connectors_inserted": result.connectors_inserted,
            "deploy_doc": {
                "filename": result.deploy_doc.filename,
                "document": json.loads(result.deploy_doc.data),
            },
        }

    @app.post("/export")
    def export_workflow(body: ExportRequest):
        from .construction import adapt_platform

        graph = repo.get_workflow(body.workflow_id)
        doc = adapt_platform(graph, body.platform)
        return json.loads(doc.data)

    return app


def run_server(cfg: ServiceConfig) -> None:
    """Blocking server start; maps bind errors onto the domain taxonomy."""
    import uvicorn

    from .errors import BindFailure

    host, port = cfg.host_port()
    app = create_app(cfg)
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    except OSError as exc:
        raise BindFailure(f"cannot bind {cfg.listen_addr}: {exc}") from exc
