"""Exception taxonomy shared across the package.

Every error carries a stable machine ``code`` so the HTTP service and the
CLI can map failures without string matching on messages.
"""
from __future__ import annotations

from typing import Any


class SimloopError(Exception):
    """Base class; ``code`` is stable, ``details`` is a small JSON-able map."""

    code = "internal"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self) -> str:  # keep details visible in logs and tracebacks
        if self.details:
            extras = ", ".join(f"{k}={v!r}" for k, v in self.details.items())
            return f"{self.message} ({extras})"
        return self.message


class ValidationError(SimloopError):
    """User or input errors: map to HTTP 4xx and CLI exit code 1."""

    code = "validation"


class ProviderFailure(SimloopError):
    """Summarizer/embedder backend errors: HTTP 5xx-ish, CLI exit code 2."""

    code = "provider"


# ingestion

class MissingIdColumn(ValidationError):
    code = "missing_id_column"


class DuplicateId(ValidationError):
    code = "duplicate_id"


class MalformedRow(ValidationError):
    code = "malformed_row"


class EmptyFile(ValidationError):
    code = "empty_file"


class MalformedManifest(ValidationError):
    code = "malformed_manifest"


class MissingField(ValidationError):
    code = "missing_field"


class InvalidSpec(ValidationError):
    code = "invalid_spec"


# prompting

class EmptyInterest(ValidationError):
    code = "empty_interest"


class InvalidTagCount(ValidationError):
    code = "invalid_tag_count"


# providers

class ProviderUnreachable(ProviderFailure):
    code = "provider_unreachable"


class ProviderError(ProviderFailure):
    code = "provider_error"


class ProviderTimeout(ProviderFailure):
    code = "timeout"


class TagCountMismatch(ProviderFailure):
    code = "tag_count_mismatch"


class FixtureMiss(ProviderFailure):
    code = "fixture_miss"


class NotEnoughTokens(ProviderFailure):
    code = "not_enough_tokens"


class ZeroVector(ValidationError):
    code = "zero_vector"


class DimMismatch(ValidationError):
    code = "dim_mismatch"


# similarity core

class DuplicatePoint(ValidationError):
    code = "duplicate_point"


class NotNormalized(ValidationError):
    code = "not_normalized"


class EmptyInput(ValidationError):
    code = "empty_input"


class EmptyIndex(ValidationError):
    code = "empty_index"


class UnknownId(ValidationError):
    code = "unknown_id"


class InsufficientLabels(ValidationError):
    code = "insufficient_labels"


# session state machine

class PrecedingRoundUnreviewed(ValidationError):
    code = "preceding_round_unreviewed"


class AlreadyAccepted(ValidationError):
    code = "already_accepted"


class NotGenerated(ValidationError):
    code = "not_generated"


class SelfPair(ValidationError):
    code = "self_pair"


class SessionClosed(ValidationError):
    code = "session_closed"


# persistence

class IoError(SimloopError):
    code = "io_error"


class MissingFile(ValidationError):
    code = "missing_file"


class CorruptLine(ValidationError):
    code = "corrupt_line"


class IntegrityViolation(ValidationError):
    code = "integrity_violation"
