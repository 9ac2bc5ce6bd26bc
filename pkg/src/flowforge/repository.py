"""Dual-knowledge workflow repository.

Two complementary stores behind one facade: a graph store holding segment
topology keyed by content-addressed segment id, and a vector index over
function descriptions for semantic retrieval.  Complete workflows live in a
separate retrieval namespace so requirement analysis can pull reference
workflows without competing with segment matching.

Everything is embedded and single-process: JSON files for graphs, one packed
float32 file plus an id manifest for vectors.  Retrieval is an exact
brute-force cosine scan, which at repository scale is both fast enough and
trivially correct.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol

import numpy as np

from .errors import NotFound, ProviderUnavailable, StorageFailure
from .extraction import Segment, SegmentGraph, segment_from_dict, segment_to_dict
from .ir import WorkflowGraph, graph_from_dict, graph_to_dict

logger = logging.getLogger(__name__)

EMBEDDING_DIM = 256

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_FNV_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class RetrievalConfig:
    """Top-k plus similarity threshold; the threshold is strict (score > theta)."""

    k: int = 10
    theta: float = 0.6

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must be in [0, 1]")


@dataclass(frozen=True)
class CandidateMatch:
    segment_id: str
    score: float


@dataclass(frozen=True)
class RepositoryStats:
    workflow_count: int
    segment_count: int
    synthetic_count: int


def _fnv1a64(token: str) -> int:
    h = _FNV_OFFSET
    for byte in token.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _FNV_MASK
    return h


def _tokenize(text: str) -> list[str]:
    words = [w for w in _split_non_alnum(text.lower()) if w]
    bigrams = [f"{a} {b}" for a, b in zip(words, words[1:])]
    return words + bigrams


def _split_non_alnum(text: str) -> list[str]:
    out: list[str] = []
    current: list[str] = []
    for ch in text:
        if ch.isalnum():
            current.append(ch)
        elif current:
            out.append("".join(current))
            current = []
    if current:
        out.append("".join(current))
    return out


class EmbeddingProvider(Protocol):
    """Maps text to a fixed-dimension vector; dimension must be EMBEDDING_DIM."""

    def embed(self, text: str) -> np.ndarray: ...


class HashingEmbedder:
    """Deterministic bag-of-tokens embedding.

    Lowercase, split on non-alphanumerics, take unigrams and adjacent
    bigrams, hash each token with 64-bit FNV-1a modulo 256 into count
    buckets, then L2-normalize.  Empty text maps to the zero vector.
    """

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(EMBEDDING_DIM, dtype=np.float64)
        for token in _tokenize(text):
            vec[_fnv1a64(token) % EMBEDDING_DIM] += 1.0
        norm = float(np.linalg.norm(vec))
        if norm > 0:
            vec /= norm
        return vec


class RemoteEmbedder:
    """HTTP embedding provider: POST {"text": ...} -> {"embedding": [...]}.

    Kept thin on purpose; any transport or shape problem surfaces as
    ProviderUnavailable so callers can fall back or fail cleanly.
    """

    def __init__(self, endpoint: str, api_key: Optional[str] = None, timeout: float = 30.0):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout

    def embed(self, text: str) -> np.ndarray:
        import httpx

        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        try:
            resp = httpx.post(self.endpoint, json={"text": text},
                              headers=headers, timeout=self.timeout)
            resp.raise_for_status()
            values = resp.json()["embedding"]
        except Exception as exc:
            raise ProviderUnavailable(f"embedding endpoint failed: {exc}") from exc
        vec = np.asarray(values, dtype=np.float64)
        if vec.shape != (EMBEDDING_DIM,) or not np.all(np.isfinite(vec)):
            raise ProviderUnavailable(
                f"embedding endpoint returned a bad vector (shape {vec.shape})")
        return normalize(vec)


def normalize(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    return vec / norm if norm > 0 else vec


def embed(text: str, provider: Optional[EmbeddingProvider] = None) -> np.ndarray:
    provider = provider or HashingEmbedder()
    return normalize(np.asarray(provider.embed(text), dtype=np.float64))


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


# ---------------------------------------------------------------------------
# Repository
# ---------------------------------------------------------------------------

_SEGMENT_NS = "segment"
_WORKFLOW_NS = "workflow"


def _quantize(vec: np.ndarray) -> np.ndarray:
    # the on-disk format is float32; keep memory identical to disk so
    # rankings survive a close/reopen bit-for-bit
    return vec.astype(np.float32).astype(np.float64)


class Repository:
    """Embedded dual store under one data directory.

    Layout: ``workflows/<id>.json`` (normalized graphs), ``segments/<id>.json``
    (segment files), ``index/vectors.bin`` + ``index/ids.txt`` (packed
    little-endian float32 vectors with a newline-delimited id manifest).

    Writes are serialized by a lock and become visible atomically; readers
    see either the previous or the new state, never a torn one.
    """

    def __init__(self, data_dir: Path | str, embedder: Optional[EmbeddingProvider] = None):
        self.data_dir = Path(data_dir)
        self.embedder = embedder or HashingEmbedder()
        self._lock = threading.RLock()
        self._segments: dict[str, Segment] = {}
        self._workflows: dict[str, WorkflowGraph] = {}
        self._vectors: dict[tuple[str, str], np.ndarray] = {}  # (namespace, id) -> unit vector
        try:
            for sub in ("workflows", "segments", "index"):
                (self.data_dir / sub).mkdir(parents=True, exist_ok=True)
            self._load()
        except OSError as exc:
            raise StorageFailure(f"cannot open repository at {self.data_dir}: {exc}") from exc

    # -- loading ------------------------------------------------------------

    def _load(self) -> None:
        for path in sorted((self.data_dir / "workflows").glob("*.json")):
            doc = json.loads(path.read_text("utf-8"))
            g = graph_from_dict(doc)
            self._workflows[g.workflow_id] = g
        for path in sorted((self.data_dir / "segments").glob("*.json")):
            doc = json.loads(path.read_text("utf-8"))
            seg = segment_from_dict(doc)
            self._segments[seg.segment_id] = seg

        ids_path = self.data_dir / "index" / "ids.txt"
        vec_path = self.data_dir / "index" / "vectors.bin"
        if ids_path.exists() and vec_path.exists():
            ids = [line for line in ids_path.read_text("utf-8").splitlines() if line]
            flat = np.fromfile(vec_path, dtype="<f4")
            if len(ids) * EMBEDDING_DIM != flat.size:
                raise StorageFailure(
                    f"vector index corrupt: {len(ids)} ids vs {flat.size} floats")
            matrix = flat.reshape(len(ids), EMBEDDING_DIM).astype(np.float64)
            for row, entry in zip(matrix, ids):
                namespace, _, entity_id = entry.partition(":")
                self._vectors[(namespace, entity_id)] = row

    def _flush_index(self) -> None:
        ids_path = self.data_dir / "index" / "ids.txt"
        vec_path = self.data_dir / "index" / "vectors.bin"
        entries = sorted(self._vectors.items())
        manifest = "".join(f"{ns}:{eid}\n" for (ns, eid), _ in entries)
        if entries:
            matrix = np.stack([v for _, v in entries]).astype("<f4")
        else:
            matrix = np.zeros((0, EMBEDDING_DIM), dtype="<f4")
        tmp_ids = ids_path.with_suffix(".txt.tmp")
        tmp_vec = vec_path.with_suffix(".bin.tmp")
        tmp_ids.write_text(manifest, "utf-8")
        matrix.tofile(tmp_vec)
        tmp_ids.replace(ids_path)
        tmp_vec.replace(vec_path)

    def _write_json(self, path: Path, doc: dict) -> None:
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2, ensure_ascii=False), "utf-8")
        tmp.replace(path)

    # -- workflows ----------------------------------------------------------

    def store_workflow(self, g: WorkflowGraph) -> tuple[str, bool]:
        """Store a normalized workflow and index its description.

        Returns (workflow_id, created); re-storing the same content is
        idempotent and reports created=False.
        """
        with self._lock:
            created = g.workflow_id not in self._workflows
            self._workflows[g.workflow_id] = g
            self._vectors[(_WORKFLOW_NS, g.workflow_id)] = _quantize(embed(g.description, self.embedder))
            self._write_json(self.data_dir / "workflows" / f"{g.workflow_id}.json", graph_to_dict(g))
            self._flush_index()
            return g.workflow_id, created

    def get_workflow(self, workflow_id: str) -> WorkflowGraph:
        with self._lock:
            try:
                return self._workflows[workflow_id]
            except KeyError:
                raise NotFound(f"workflow {workflow_id!r} not stored") from None

    def has_workflow(self, workflow_id: str) -> bool:
        with self._lock:
            return workflow_id in self._workflows

    def list_workflows(self) -> list[WorkflowGraph]:
        with self._lock:
            return [self._workflows[k] for k in sorted(self._workflows)]

    # -- segments -----------------------------------------------------------

    def store_segment(self, segment: Segment) -> str:
        """Store one segment in both halves of the repository.

        Idempotent on the content-addressed id; a second store of the same
        id replaces the description (and its vector), never duplicates.
        """
        with self._lock:
            sid = segment.segment_id
            self._segments[sid] = segment
            self._vectors[(_SEGMENT_NS, sid)] = _quantize(embed(segment.index_text(), self.embedder))
            self._write_json(self.data_dir / "segments" / f"{sid}.json", segment_to_dict(segment))
            self._flush_index()
            return sid

    def fetch_segment(self, segment_id: str) -> Segment:
        with self._lock:
            try:
                return self._segments[segment_id]
            except KeyError:
                raise NotFound(f"segment {segment_id!r} not stored") from None

    def fetch_graph(self, segment_id: str) -> SegmentGraph:
        return self.fetch_segment(segment_id).graph

    def list_segments(self) -> list[Segment]:
        with self._lock:
            return [self._segments[k] for k in sorted(self._segments)]

    def delete_segment(self, segment_id: str) -> None:
        with self._lock:
            if segment_id not in self._segments:
                raise NotFound(f"segment {segment_id!r} not stored")
            del self._segments[segment_id]
            self._vectors.pop((_SEGMENT_NS, segment_id), None)
            path = self.data_dir / "segments" / f"{segment_id}.json"
            if path.exists():
                path.unlink()
            self._flush_index()

    def segments_for_workflow(self, workflow_id: str) -> list[Segment]:
        with self._lock:
            return [s for s in self.list_segments()
                    if s.description.source_workflow.workflow_id == workflow_id]

    # -- retrieval ----------------------------------------------------------

    def retrieve(self, query: str, cfg: Optional[RetrievalConfig] = None) -> list[CandidateMatch]:
        """Exact cosine scan over segment descriptions.

        Up to k matches scoring strictly above theta, sorted by descending
        score with ascending segment_id as the tie-break.
        """
        cfg = cfg or RetrievalConfig()
        ranked = self._scan(_SEGMENT_NS, query)
        gated = [(sid, score) for sid, score in ranked if score > cfg.theta]
        return [CandidateMatch(sid, score) for sid, score in gated[: cfg.k]]

    def retrieve_workflows(self, query: str, k: int = 10) -> list[tuple[str, float]]:
        """Best-effort context retrieval over complete workflows: same
        scoring and ordering as segments, but no threshold."""
        return self._scan(_WORKFLOW_NS, query)[:k]

    def _scan(self, namespace: str, query: str) -> list[tuple[str, float]]:
        qvec = embed(query, self.embedder)
        with self._lock:
            scored = [
                (eid, cosine(qvec, vec))
                for (ns, eid), vec in self._vectors.items()
                if ns == namespace
            ]
        scored.sort(key=lambda item: (-item[1], item[0]))
        return scored

    # -- stats --------------------------------------------------------------

    def stats(self) -> RepositoryStats:
        with self._lock:
            return RepositoryStats(
                workflow_count=len(self._workflows),
                segment_count=len(self._segments),
                synthetic_count=sum(1 for s in self._segments.values() if s.synthetic),
            )
