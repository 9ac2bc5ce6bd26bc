"""flowforge: deconstruct platform workflows into reusable segments and
build new deployable workflows from natural-language requirements.

The engine parses n8n-format workflow files into a platform-agnostic graph,
partitions them into content-addressed segments stored in a dual
graph/vector repository, and assembles new workflows by retrieval-augmented
matching of requirement units against that repository, with a generative
fallback below the similarity threshold.
"""

from .analysis import FunctionalUnit, TaskPlan, analyze_requirement
from .construction import (
    CompatReport,
    ConstructionResult,
    UnitResolution,
    adapt_platform,
    assemble,
    check_compatibility,
    construct,
    resolve_unit,
)
from .errors import FlowForgeError
from .extraction import (
    Decomposition,
    ExtractionReport,
    FunctionDescription,
    Segment,
    SegmentGraph,
    annotate,
    decompose_structural,
    stitch,
    validate_decomposition,
)
from .ir import (
    EdgeSpec,
    NodeRole,
    NodeSpec,
    ParamSpec,
    ParamType,
    WorkflowGraph,
    condensed_dag,
    graphs_isomorphic_modulo_layout,
    longest_path_layers,
    validate_graph,
)
from .n8n import SourceDocument, StripReport, emit_n8n, infer_node_io, parse_n8n
from .repository import (
    CandidateMatch,
    EmbeddingProvider,
    HashingEmbedder,
    Repository,
    RepositoryStats,
    RetrievalConfig,
    embed,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateMatch",
    "CompatReport",
    "ConstructionResult",
    "Decomposition",
    "EdgeSpec",
    "EmbeddingProvider",
    "ExtractionReport",
    "FlowForgeError",
    "FunctionDescription",
    "FunctionalUnit",
    "HashingEmbedder",
    "NodeRole",
    "NodeSpec",
    "ParamSpec",
    "ParamType",
    "Repository",
    "RepositoryStats",
    "RetrievalConfig",
    "Segment",
    "SegmentGraph",
    "SourceDocument",
    "StripReport",
    "TaskPlan",
    "UnitResolution",
    "WorkflowGraph",
    "adapt_platform",
    "analyze_requirement",
    "annotate",
    "assemble",
    "check_compatibility",
    "condensed_dag",
    "construct",
    "decompose_structural",
    "embed",
    "emit_n8n",
    "graphs_isomorphic_modulo_layout",
    "infer_node_io",
    "longest_path_layers",
    "parse_n8n",
    "resolve_unit",
    "stitch",
    "validate_decomposition",
    "validate_graph",
]
