"""Operational glue shared by the CLI, the HTTP service and the eval harness:
file ingestion into the repository and segment extraction with commit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .extraction import (
    Decomposition,
    ExtractionReport,
    SemanticAnnotator,
    annotate,
    decompose_structural,
    validate_decomposition,
)
from .ir import WorkflowGraph
from .n8n import SourceDocument, parse_n8n
from .repository import Repository

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IngestResult:
    workflow_id: str
    created: bool  # False when the same content was already present
    node_count: int
    edge_count: int


def ingest_document(repo: Repository, doc: SourceDocument) -> IngestResult:
    """Parse one workflow file and store the normalized graph."""
    graph, _ = parse_n8n(doc)
    workflow_id, created = repo.store_workflow(graph)
    return IngestResult(workflow_id, created, len(graph.nodes), len(graph.edges))


def ingest_path(repo: Repository, path: Path | str) -> IngestResult:
    path = Path(path)
    return ingest_document(repo, SourceDocument.from_file(path.name, path.read_bytes()))


def extract_and_store(
    repo: Repository,
    workflow_id: str,
    annotator: Optional[SemanticAnnotator] = None,
    max_inflight: int = 4,
) -> tuple[Decomposition, ExtractionReport, list[str]]:
    """Decompose a stored workflow, annotate it, and commit reusable segments.

    Trigger-only segments stay out of the library (adaptation re-injects
    start nodes); they still count for the coverage report.  Returns the
    decomposition, its validation report and the stored segment ids.
    """
    graph = repo.get_workflow(workflow_id)
    decomposition = annotate(decompose_structural(graph), annotator, max_inflight)
    report = validate_decomposition(graph, decomposition)
    stored: list[str] = []
    for segment in decomposition.segments:
        if segment.reusable:
            stored.append(repo.store_segment(segment))
    return decomposition, report, stored


def seed_corpus(
    repo: Repository,
    corpus_dir: Path | str,
    annotator: Optional[SemanticAnnotator] = None,
) -> list[tuple[WorkflowGraph, Decomposition, ExtractionReport]]:
    """Ingest and extract every workflow file in a directory (sorted order)."""
    corpus_dir = Path(corpus_dir)
    out = []
    for path in sorted(corpus_dir.glob("*.json")) + sorted(corpus_dir.glob("*.y*ml")):
        result = ingest_path(repo, path)
        decomposition, report, _ = extract_and_store(repo, result.workflow_id, annotator)
        out.append((repo.get_workflow(result.workflow_id), decomposition, report))
    return out
