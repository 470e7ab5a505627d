"""Error hierarchy with stable machine codes.

Every error raised by the platform maps to exactly one code; the codes are
part of the gateway contract and are what the CLI and HTTP surface report.
"""

from __future__ import annotations

from typing import Any


class MediaClawError(Exception):
    """Base class; carries a stable code plus structured details."""

    code = "INTERNAL"

    def __init__(self, message: str = "", **details: Any):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details: dict[str, Any] = details

    def to_api_error(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": self.details}


# media model / store

class InvalidManifest(MediaClawError):
    code = "INVALID_MANIFEST"


class NotFound(MediaClawError):
    code = "NOT_FOUND"


class OutOfRange(MediaClawError):
    code = "OUT_OF_RANGE"


class WrongKind(MediaClawError):
    code = "WRONG_KIND"


# capability registry

class DuplicateProvider(MediaClawError):
    code = "DUPLICATE_PROVIDER"


class MissingHandler(MediaClawError):
    code = "MISSING_HANDLER"


class SchemaViolation(MediaClawError):
    code = "SCHEMA_VIOLATION"

    def __init__(self, param: str, message: str = "", **details: Any):
        super().__init__(message or f"invalid parameter: {param}", param=param, **details)
        self.param = param


class UnknownTool(MediaClawError):
    code = "UNKNOWN_TOOL"


class HintRejectedForLocalTool(MediaClawError):
    code = "HINT_REJECTED_FOR_LOCAL_TOOL"


class HandlerFailure(MediaClawError):
    code = "HANDLER_FAILURE"

    def __init__(self, provider: str, cause: str, **details: Any):
        super().__init__(f"handler failed on provider {provider!r}: {cause}",
                         provider=provider, cause=cause, **details)
        self.provider = provider


# routing

class RoutingErrorBase(MediaClawError):
    """Common parent so callers can catch any routing resolution failure."""


class UnknownProvider(RoutingErrorBase):
    code = "UNKNOWN_PROVIDER"


class UnsupportedCapability(RoutingErrorBase):
    code = "UNSUPPORTED_CAPABILITY"


class UnknownModel(RoutingErrorBase):
    code = "UNKNOWN_MODEL"


class NoRoute(RoutingErrorBase):
    code = "NO_ROUTE"


class ValidationFailed(MediaClawError):
    code = "VALIDATION_FAILED"

    def __init__(self, violations: list[dict[str, str]], **details: Any):
        super().__init__(f"config validation failed with {len(violations)} violation(s)",
                         violations=violations, **details)
        self.violations = violations


class StaleVersion(MediaClawError):
    code = "STALE_VERSION"


# providers

class BadParams(MediaClawError):
    code = "BAD_PARAMS"


class TransportError(MediaClawError):
    code = "TRANSPORT_ERROR"


class RemoteError(MediaClawError):
    code = "REMOTE_ERROR"

    def __init__(self, status: int, body_excerpt: str = "", **details: Any):
        super().__init__(f"remote provider returned {status}: {body_excerpt[:200]}",
                         status=status, body_excerpt=body_excerpt[:200], **details)
        self.status = status


class InvalidRemoteManifest(MediaClawError):
    code = "INVALID_REMOTE_MANIFEST"


class ParseError(MediaClawError):
    code = "PARSE_ERROR"

    def __init__(self, line: int, reason: str, **details: Any):
        super().__init__(f"line {line}: {reason}", line=line, reason=reason, **details)
        self.line = line


class OverlappingEvents(MediaClawError):
    code = "OVERLAPPING_EVENTS"


# skill engine

class UnknownSkill(MediaClawError):
    code = "UNKNOWN_SKILL"


class ParamViolation(MediaClawError):
    code = "PARAM_VIOLATION"


class UnknownRun(MediaClawError):
    code = "UNKNOWN_RUN"


# skills

class MissingProductName(MediaClawError):
    code = "MISSING_PRODUCT_NAME"


class BadShotCount(MediaClawError):
    code = "BAD_SHOT_COUNT"


class EmptyScript(MediaClawError):
    code = "EMPTY_SCRIPT"


class EmptyInput(MediaClawError):
    code = "EMPTY_INPUT"


class MixedDimensions(MediaClawError):
    code = "MIXED_DIMENSIONS"


class NoAudio(MediaClawError):
    code = "NO_AUDIO"


class EmptyAfterEdit(MediaClawError):
    code = "EMPTY_AFTER_EDIT"


class RangeOutOfBounds(MediaClawError):
    code = "RANGE_OUT_OF_BOUNDS"


#: Exhaustive code table, used by the gateway contract test.
ERROR_CODES: dict[str, type[MediaClawError]] = {
    cls.code: cls
    for cls in [
        InvalidManifest, NotFound, OutOfRange, WrongKind,
        DuplicateProvider, MissingHandler, SchemaViolation, UnknownTool,
        HintRejectedForLocalTool, HandlerFailure,
        UnknownProvider, UnsupportedCapability, UnknownModel, NoRoute,
        ValidationFailed, StaleVersion,
        BadParams, TransportError, RemoteError, InvalidRemoteManifest,
        ParseError, OverlappingEvents,
        UnknownSkill, ParamViolation, UnknownRun,
        MissingProductName, BadShotCount, EmptyScript, EmptyInput,
        MixedDimensions, NoAudio, EmptyAfterEdit, RangeOutOfBounds,
    ]
}
