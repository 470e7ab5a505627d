"""The unified tool surface: capability ids, descriptors, and param schemas.

Descriptor order is the capability-table order (the nine core tools, then
text generation); tool names are part of the contract and never change.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import SchemaViolation
from .media import KIND_AUDIO, KIND_IMAGE, KIND_TEXT, KIND_VIDEO, SynthMedia

TEXT_TO_IMAGE = "text_to_image"
IMAGE_QA = "image_qa"
TEXT_TO_VIDEO = "text_to_video"
IMAGE_TO_VIDEO = "image_to_video"
MULTI_IMAGE_TO_VIDEO = "multi_image_to_video"
TEXT_TO_SPEECH = "text_to_speech"
DIGITAL_AVATAR = "digital_avatar"
BURN_SUBTITLES = "burn_subtitles"
REPLACE_BACKGROUND = "replace_background"
TEXT_GENERATION = "text_generation"

ROUTED = "routed"
LOCAL = "local"


@dataclass(frozen=True)
class ResolvedArtifact:
    """An artifact reference after resolution; what handlers receive for artifact params."""

    artifact_id: str
    payload: SynthMedia


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: str  # string | int | float | artifact | artifact_list | string_list | enum | rule_list
    required: bool = False
    default: Any = None
    choices: tuple[str, ...] = ()
    min_value: int | None = None

    def to_obj(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"name": self.name, "required": self.required, "type": self.type}
        if self.default is not None:
            obj["default"] = self.default
        if self.choices:
            obj["choices"] = list(self.choices)
        return obj


@dataclass(frozen=True)
class ToolDescriptor:
    capability: str
    tool_name: str
    routing_class: str  # routed | local
    param_schema: tuple[ParamSpec, ...]
    output_kind: str

    def to_obj(self) -> dict[str, Any]:
        return {
            "capability": self.capability,
            "output_kind": self.output_kind,
            "params": [p.to_obj() for p in self.param_schema],
            "routing_class": self.routing_class,
            "tool_name": self.tool_name,
        }


DESCRIPTORS: tuple[ToolDescriptor, ...] = (
    ToolDescriptor(TEXT_TO_IMAGE, "mediaclaw_text_to_image", ROUTED, (
        ParamSpec("prompt", "string", required=True),
    ), KIND_IMAGE),
    ToolDescriptor(IMAGE_QA, "mediaclaw_image_qa", ROUTED, (
        ParamSpec("image", "artifact", required=True),
        ParamSpec("question", "string", required=True),
    ), KIND_TEXT),
    ToolDescriptor(TEXT_TO_VIDEO, "mediaclaw_text_to_video", ROUTED, (
        ParamSpec("prompt", "string", required=True),
        ParamSpec("duration_ms", "int", default=5000, min_value=1),
    ), KIND_VIDEO),
    ToolDescriptor(IMAGE_TO_VIDEO, "mediaclaw_image_to_video", ROUTED, (
        ParamSpec("image", "artifact", required=True),
        ParamSpec("prompt", "string", required=True),
        ParamSpec("duration_ms", "int", default=5000, min_value=1),
    ), KIND_VIDEO),
    ToolDescriptor(MULTI_IMAGE_TO_VIDEO, "mediaclaw_images_to_video", ROUTED, (
        ParamSpec("mode", "enum", required=True, choices=("reference", "first_last")),
        ParamSpec("images", "artifact_list", required=True),
        ParamSpec("prompt", "string", required=True),
        ParamSpec("duration_ms", "int", default=5000, min_value=1),
    ), KIND_VIDEO),
    ToolDescriptor(TEXT_TO_SPEECH, "mediaclaw_text_to_speech", ROUTED, (
        ParamSpec("text", "string", required=True),
    ), KIND_AUDIO),
    ToolDescriptor(DIGITAL_AVATAR, "mediaclaw_digital_avatar", ROUTED, (
        ParamSpec("text", "string", required=True),
        ParamSpec("avatar_id", "string", required=True),
        ParamSpec("action_id", "string", required=True),
    ), KIND_VIDEO),
    ToolDescriptor(BURN_SUBTITLES, "mediaclaw_burn_subtitles", LOCAL, (
        ParamSpec("video", "artifact", required=True),
        ParamSpec("subtitles_ass", "string", required=True),
    ), KIND_VIDEO),
    ToolDescriptor(REPLACE_BACKGROUND, "mediaclaw_replace_background", LOCAL, (
        ParamSpec("video", "artifact", required=True),
        ParamSpec("background", "artifact", required=True),
    ), KIND_VIDEO),
    ToolDescriptor(TEXT_GENERATION, "mediaclaw_text_generation", ROUTED, (
        ParamSpec("prompt", "string", required=True),
        ParamSpec("mode", "enum", required=True,
                  choices=("freeform", "storyboard", "brief", "action_plan")),
    ), KIND_TEXT),
)

BY_CAPABILITY: dict[str, ToolDescriptor] = {d.capability: d for d in DESCRIPTORS}
BY_TOOL_NAME: dict[str, ToolDescriptor] = {d.tool_name: d for d in DESCRIPTORS}
ROUTED_CAPABILITIES: tuple[str, ...] = tuple(d.capability for d in DESCRIPTORS
                                             if d.routing_class == ROUTED)
LOCAL_CAPABILITIES: tuple[str, ...] = tuple(d.capability for d in DESCRIPTORS
                                            if d.routing_class == LOCAL)


def _check_scalar(spec: ParamSpec, value: Any) -> Any:
    if spec.type == "string":
        if not isinstance(value, str):
            raise SchemaViolation(spec.name, f"{spec.name} must be a string")
        return value
    if spec.type == "int":
        if not isinstance(value, int) or isinstance(value, bool):
            raise SchemaViolation(spec.name, f"{spec.name} must be an integer")
        if spec.min_value is not None and value < spec.min_value:
            raise SchemaViolation(spec.name, f"{spec.name} must be >= {spec.min_value}")
        return value
    if spec.type == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaViolation(spec.name, f"{spec.name} must be a number")
        return float(value)
    if spec.type == "enum":
        if value not in spec.choices:
            raise SchemaViolation(spec.name,
                                  f"{spec.name} must be one of {', '.join(spec.choices)}")
        return value
    if spec.type == "string_list":
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise SchemaViolation(spec.name, f"{spec.name} must be a list of strings")
        return list(value)
    if spec.type == "rule_list":
        if not isinstance(value, list):
            raise SchemaViolation(spec.name, f"{spec.name} must be a list of rules")
        for rule in value:
            if (not isinstance(rule, dict)
                    or not isinstance(rule.get("keywords"), list)
                    or not all(isinstance(k, str) for k in rule["keywords"])
                    or not isinstance(rule.get("action_id"), str)):
                raise SchemaViolation(spec.name,
                                      "each rule needs keywords (list of strings) and action_id")
        return value
    raise SchemaViolation(spec.name, f"unhandled param type {spec.type}")


def validate_params(schema: tuple[ParamSpec, ...], params: dict[str, Any],
                    resolve_artifact) -> dict[str, Any]:
    """Validate and normalize params against a schema.

    `resolve_artifact(id) -> ResolvedArtifact` supplies artifact resolution;
    unknown keys are rejected, defaults applied, artifact refs replaced by
    their resolved form. Raises SchemaViolation before any handler runs.
    """
    known = {s.name for s in schema}
    for key in params:
        if key not in known:
            raise SchemaViolation(key, f"unknown parameter {key!r}")
    out: dict[str, Any] = {}
    for spec in schema:
        if spec.name not in params:
            if spec.required:
                raise SchemaViolation(spec.name, f"missing required parameter {spec.name!r}")
            if spec.default is not None:
                out[spec.name] = spec.default
            continue
        value = params[spec.name]
        if spec.type == "artifact":
            if not isinstance(value, str):
                raise SchemaViolation(spec.name, f"{spec.name} must be an artifact id")
            out[spec.name] = resolve_artifact(spec.name, value)
        elif spec.type == "artifact_list":
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise SchemaViolation(spec.name, f"{spec.name} must be a list of artifact ids")
            out[spec.name] = [resolve_artifact(spec.name, v) for v in value]
        else:
            out[spec.name] = _check_scalar(spec, value)
    # images_to_video minimum image count depends on mode
    if "mode" in out and "images" in out:
        minimum = 2 if out["mode"] == "first_last" else 1
        if len(out["images"]) < minimum:
            raise SchemaViolation("images",
                                  f"mode {out['mode']!r} requires at least {minimum} image(s)")
    return out
