"""Video Use skill: transcript-driven editing over source videos — the model
"reads" the audio instead of watching frames. Cleans fillers, long silences
and repeated takes, then color-corrects, subtitles, and normalizes loudness.
"""

from __future__ import annotations

import json
from typing import Any

from .. import capabilities as caps
from ..capabilities import ParamSpec
from ..engine import RetryPolicy, SkillDefinition, StepContext, StepSpec
from ..errors import EmptyInput
from ..media import canonical_json, make_text_media
from ..providers.ass import AssEvent, emit_ass
from .video_ops import (
    DEFAULT_FILLER_WORDS,
    DEFAULT_SILENCE_THRESHOLD_MS,
    DEFAULT_TARGET_BRIGHTNESS,
    DEFAULT_TARGET_LUFS,
    apply_edit,
    auto_color,
    edl_from_obj,
    normalize_loudness,
    plan_edit,
    transcribe,
)

PARAMS: tuple[ParamSpec, ...] = (
    ParamSpec("sources", "artifact_list", required=True),
    ParamSpec("goal", "string", default=""),
    ParamSpec("silence_threshold_ms", "int", default=DEFAULT_SILENCE_THRESHOLD_MS),
    ParamSpec("filler_words", "string_list", default=list(DEFAULT_FILLER_WORDS)),
    ParamSpec("target_lufs", "float", default=DEFAULT_TARGET_LUFS),
    ParamSpec("target_brightness", "int", default=DEFAULT_TARGET_BRIGHTNESS),
)


def _transcripts_for(ctx: StepContext) -> list:
    return [transcribe(ctx.get_payload(sid), sid) for sid in ctx.params["sources"]]


def _transcribe_step(ctx: StepContext) -> None:
    for transcript in _transcripts_for(ctx):
        ctx.put(make_text_media(canonical_json(transcript.to_obj())),
                inputs=[transcript.source_id])


def _plan_step(ctx: StepContext) -> None:
    edl = plan_edit(
        _transcripts_for(ctx),
        goal=ctx.params["goal"],
        silence_threshold_ms=ctx.params["silence_threshold_ms"],
        filler_words=tuple(ctx.params["filler_words"]),
    )
    ctx.put(make_text_media(canonical_json(edl.to_obj()), meta={"format": "edl"}),
            inputs=list(ctx.params["sources"]))


def _apply_step(ctx: StepContext) -> None:
    edl_id = ctx.outputs("plan_edit")[0]
    edl = edl_from_obj(json.loads(ctx.get_payload(edl_id).text))
    sources = {sid: ctx.get_payload(sid) for sid in ctx.params["sources"]}
    ctx.put(apply_edit(sources, edl), inputs=list(ctx.params["sources"]) + [edl_id])


def _color_step(ctx: StepContext) -> None:
    edited_id = ctx.outputs("apply_edit")[0]
    ctx.put(auto_color(ctx.get_payload(edited_id), ctx.params["target_brightness"]),
            inputs=[edited_id])


def _subtitle_step(ctx: StepContext) -> None:
    colored_id = ctx.outputs("auto_color")[0]
    colored = ctx.get_payload(colored_id)
    events = [AssEvent(start_ms=s.t0_ms, end_ms=s.t1_ms, text=s.text)
              for s in colored.audio if s.kind == "speech"]
    ass_text = emit_ass(events)
    ctx.put(make_text_media(ass_text, meta={"format": "ass"}))
    ctx.invoke(caps.BURN_SUBTITLES, {"video": colored_id, "subtitles_ass": ass_text})


def _normalize_step(ctx: StepContext) -> None:
    burned_id = ctx.outputs("burn_subtitles")[-1]
    final_id = ctx.put(normalize_loudness(ctx.get_payload(burned_id),
                                          ctx.params["target_lufs"]),
                       inputs=[burned_id])
    ctx.set_final_outputs([final_id, ctx.outputs("plan_edit")[0]])


def plan(params: dict[str, Any]) -> list[StepSpec]:
    if not params["sources"]:
        raise EmptyInput("video_use needs at least one source video")
    return [
        StepSpec("transcribe", _transcribe_step),
        StepSpec("plan_edit", _plan_step),
        StepSpec("apply_edit", _apply_step, inputs=("plan_edit",)),
        StepSpec("auto_color", _color_step, inputs=("apply_edit",)),
        StepSpec("burn_subtitles", _subtitle_step, inputs=("auto_color",),
                 retry=RetryPolicy(max_attempts=3)),
        StepSpec("normalize_loudness", _normalize_step,
                 inputs=("burn_subtitles", "plan_edit")),
    ]


SKILL = SkillDefinition(
    name="video_use",
    params=PARAMS,
    plan=plan,
    description="Transcript-driven editing: drop fillers, long silences, and repeated "
                "takes, then color-correct, subtitle, and loudness-normalize.",
)
