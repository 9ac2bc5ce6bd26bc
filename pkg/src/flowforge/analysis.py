"""Natural-language requirement analysis.

Turns a requirement into an ordered list of functional units; each unit's
description doubles as the semantic query for segment retrieval.  The
bundled analyzer is a deterministic splitter (bullets, step markers,
sentences, in that order of preference) that loses no content: joining the
unit descriptions gives back every non-whitespace character of the input.

Reference workflows retrieved from the repository are offered to the
analyzer as lightweight context triples; the deterministic stub ignores
them, an LLM-backed analyzer may not.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

from .errors import AnalyzerViolation, EmptyRequirement, ProviderUnavailable
from .repository import Repository, RetrievalConfig


@dataclass(frozen=True)
class FunctionalUnit:
    """One logically coherent sub-requirement."""

    unit_id: int
    title: str
    description: str
    depends_on: tuple[int, ...] = ()


@dataclass(frozen=True)
class TaskPlan:
    requirement_text: str
    units: tuple[FunctionalUnit, ...]
    context_workflow_ids: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "requirement_text": self.requirement_text,
            "units": [
                {
                    "unit_id": u.unit_id,
                    "title": u.title,
                    "description": u.description,
                    "depends_on": list(u.depends_on),
                }
                for u in self.units
            ],
            "context_workflow_ids": list(self.context_workflow_ids),
        }


@dataclass(frozen=True)
class UnitDraft:
    """Analyzer output before ordinal assignment and validation."""

    title: str
    description: str
    depends_on: Optional[tuple[int, ...]] = None  # None = chain to previous


# (workflow name, workflow description, titles of its segments)
ContextTriple = tuple[str, str, tuple[str, ...]]


class RequirementAnalyzer(Protocol):
    def analyze(self, text: str, context: Sequence[ContextTriple]) -> list[UnitDraft]: ...


# ---------------------------------------------------------------------------
# Deterministic splitting
# ---------------------------------------------------------------------------

_BULLET_RE = re.compile(r"^\s*(?:[-*•]|\d+[.)])\s+")
# "Step 3:", "step 12 -", etc., and bare enumerations "1." / "2)" followed by space
_STEP_RE = re.compile(r"(?i)\bstep\s+\d+\s*[:.)\-]?|(?<![\w.])\d+[.)](?=\s)")
_TERMINATORS = ".!?"


def _bullet_pieces(text: str) -> list[str]:
    lines = text.splitlines()
    if sum(1 for ln in lines if _BULLET_RE.match(ln)) < 2:
        return []
    pieces: list[str] = []
    current: list[str] = []
    for ln in lines:
        if _BULLET_RE.match(ln) and current:
            pieces.append("\n".join(current))
            current = []
        current.append(ln)
    if current:
        pieces.append("\n".join(current))
    return [p.strip() for p in pieces if p.strip()]


def _marker_pieces(text: str) -> list[str]:
    starts = [m.start() for m in _STEP_RE.finditer(text)]
    if len(starts) < 2 and not (len(starts) == 1 and text[: starts[0]].strip()):
        return []
    bounds = ([0] if starts[0] > 0 else []) + starts + [len(text)]
    pieces = [text[a:b].strip() for a, b in zip(bounds, bounds[1:])]
    return [p for p in pieces if p]


def _sentence_pieces(text: str) -> list[str]:
    pieces: list[str] = []
    current: list[str] = []
    in_terminator = False
    for ch in text:
        if ch in _TERMINATORS:
            in_terminator = True
            current.append(ch)
            continue
        if in_terminator:
            pieces.append("".join(current))
            current = []
            in_terminator = False
        current.append(ch)
    if current:
        pieces.append("".join(current))
    return [p.strip() for p in pieces if p.strip()]


def split_requirement(text: str) -> list[str]:
    """Lossless piecewise split: bullets, then step markers, then sentences.

    Every non-whitespace character of the input appears in exactly one
    returned piece, in order.
    """
    for splitter in (_bullet_pieces, _marker_pieces):
        pieces = splitter(text)
        if len(pieces) >= 2:
            return pieces
    return _sentence_pieces(text)


def _title_of(description: str) -> str:
    return " ".join(description.split()[:6])


class StubAnalyzer:
    """Deterministic requirement splitter; ignores repository context."""

    def analyze(self, text: str, context: Sequence[ContextTriple]) -> list[UnitDraft]:
        return [UnitDraft(title=_title_of(p), description=p) for p in split_requirement(text)]


class RemoteAnalyzer:
    """HTTP analyzer: POST {"requirement", "context"} -> {"units": [...]}."""

    def __init__(self, endpoint: str, api_key: Optional[str] = None, timeout: float = 60.0):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout

    def analyze(self, text: str, context: Sequence[ContextTriple]) -> list[UnitDraft]:
        import httpx

        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        payload = {
            "requirement": text,
            "context": [
                {"name": name, "description": desc, "segments": list(titles)}
                for name, desc, titles in context
            ],
        }
        try:
            resp = httpx.post(self.endpoint, json=payload, headers=headers, timeout=self.timeout)
            resp.raise_for_status()
            units = resp.json()["units"]
        except Exception as exc:
            raise ProviderUnavailable(f"analyzer endpoint failed: {exc}") from exc
        return [
            UnitDraft(
                title=str(u.get("title", "")),
                description=str(u.get("description", "")),
                depends_on=tuple(u["depends_on"]) if u.get("depends_on") is not None else None,
            )
            for u in units
        ]


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _context_triples(repo: Repository, workflow_ids: Sequence[str]) -> list[ContextTriple]:
    triples: list[ContextTriple] = []
    for wid in workflow_ids:
        g = repo.get_workflow(wid)
        titles = tuple(s.description.segment_name for s in repo.segments_for_workflow(wid))
        triples.append((g.name, g.description, titles))
    return triples


def analyze_requirement(
    text: str,
    repo: Optional[Repository] = None,
    cfg: Optional[RetrievalConfig] = None,
    analyzer: Optional[RequirementAnalyzer] = None,
) -> TaskPlan:
    """Produce a TaskPlan from free-form requirement text.

    The top-k reference workflows (no threshold) are recorded on the plan
    and offered to the analyzer as (name, description, segment titles)
    triples.  Unit dependencies default to a chain; whatever the analyzer
    returns is validated for non-empty descriptions and back-references
    only.
    """
    if not text or not text.strip():
        raise EmptyRequirement("requirement text is empty")
    cfg = cfg or RetrievalConfig()

    context_ids: tuple[str, ...] = ()
    context: list[ContextTriple] = []
    if repo is not None:
        context_ids = tuple(wid for wid, _ in repo.retrieve_workflows(text, k=cfg.k))
        context = _context_triples(repo, context_ids)

    analyzer = analyzer or StubAnalyzer()
    drafts = analyzer.analyze(text, context)
    if not drafts:
        raise AnalyzerViolation("analyzer returned no units for a non-empty requirement")

    units: list[FunctionalUnit] = []
    for ordinal, draft in enumerate(drafts, start=1):
        description = draft.description.strip()
        if not description:
            raise AnalyzerViolation(f"unit {ordinal} has an empty description")
        if draft.depends_on is None:
            depends = (ordinal - 1,) if ordinal > 1 else ()
        else:
            depends = tuple(draft.depends_on)
            if any(dep < 1 or dep >= ordinal for dep in depends):
                raise AnalyzerViolation(
                    f"unit {ordinal} depends on {list(depends)}: forward or unknown reference")
        units.append(FunctionalUnit(
            unit_id=ordinal,
            title=draft.title.strip() or _title_of(description),
            description=description,
            depends_on=depends,
        ))

    return TaskPlan(requirement_text=text, units=tuple(units), context_workflow_ids=context_ids)
