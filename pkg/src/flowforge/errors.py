"""Exception hierarchy shared across the engine.

Every error carries a stable machine-readable ``code`` so the HTTP layer and
the CLI can map failures without string matching.
"""

from __future__ import annotations


class FlowForgeError(Exception):
    """Base class for all domain errors."""

    code = "InternalError"
    http_status = 500

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class MalformedDocument(FlowForgeError):
    code = "MalformedDocument"
    http_status = 400


class UnsupportedFormat(FlowForgeError):
    code = "UnsupportedFormat"
    http_status = 400


class DanglingConnection(FlowForgeError):
    code = "DanglingConnection"
    http_status = 400


class MissingPosition(FlowForgeError):
    code = "MissingPosition"
    http_status = 400


class InvalidGraph(FlowForgeError):
    code = "InvalidGraph"
    http_status = 400


class InvalidSegment(FlowForgeError):
    code = "InvalidSegment"
    http_status = 400


class AnnotatorUnavailable(FlowForgeError):
    code = "AnnotatorUnavailable"
    http_status = 502


class AnnotatorViolation(FlowForgeError):
    code = "AnnotatorViolation"
    http_status = 502


class EmptyRequirement(FlowForgeError):
    code = "EmptyRequirement"
    http_status = 400


class AnalyzerViolation(FlowForgeError):
    code = "AnalyzerViolation"
    http_status = 502


class GeneratorUnavailable(FlowForgeError):
    code = "GeneratorUnavailable"
    http_status = 502


class AssemblyFailure(FlowForgeError):
    code = "AssemblyFailure"
    http_status = 400


class UnsupportedPlatform(FlowForgeError):
    code = "UnsupportedPlatform"
    http_status = 400


class NotFound(FlowForgeError):
    code = "NotFound"
    http_status = 404


class StorageFailure(FlowForgeError):
    code = "StorageFailure"
    http_status = 500


class ProviderUnavailable(FlowForgeError):
    code = "ProviderUnavailable"
    http_status = 502


class CorpusError(FlowForgeError):
    code = "CorpusError"
    http_status = 400


class BindFailure(FlowForgeError):
    code = "BindFailure"
    http_status = 500
