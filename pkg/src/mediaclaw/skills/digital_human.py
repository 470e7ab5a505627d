"""Digital-human broadcasting skill: split the script into sentences, match an
action per sentence, fan out avatar segment generation in parallel, then
splice, attach per-sentence speech, and burn aligned subtitles.
"""

from __future__ import annotations

from typing import Any

from .. import capabilities as caps
from ..capabilities import ParamSpec
from ..engine import RetryPolicy, SkillDefinition, StepContext, StepSpec
from ..errors import EmptyScript
from ..media import AudioSegment, canonical_json, make_text_media
from ..providers.ass import AssEvent, emit_ass
from .actions import BUILTIN_RULE_SETS, ActionRuleSet, match_action, split_sentences
from .video_ops import concat_videos

PARAMS: tuple[ParamSpec, ...] = (
    ParamSpec("script", "string", required=True),
    ParamSpec("avatar_id", "string", required=True),
    ParamSpec("scenario", "enum", default="news_broadcasting",
              choices=tuple(BUILTIN_RULE_SETS)),
    ParamSpec("custom_rules", "rule_list"),
    ParamSpec("default_action_id", "string"),
)


def rule_set_from_params(params: dict[str, Any]) -> ActionRuleSet:
    custom = params.get("custom_rules")
    if custom:
        return ActionRuleSet(
            scenario="custom",
            rules=[(list(rule["keywords"]), rule["action_id"]) for rule in custom],
            default_action_id=params.get("default_action_id") or "neutral_stand",
        )
    return BUILTIN_RULE_SETS[params["scenario"]]


def broadcast_plan(script: str, rules: ActionRuleSet) -> list[tuple[str, str]]:
    sentences = split_sentences(script)
    if not sentences:
        raise EmptyScript("the script contains no sentences")
    return [(sentence, match_action(sentence, rules)) for sentence in sentences]


def _plan_step(ctx: StepContext) -> None:
    pairs = broadcast_plan(ctx.params["script"], rule_set_from_params(ctx.params))
    obj = {"sentences": [{"action_id": a, "text": s} for s, a in pairs]}
    ctx.put(make_text_media(canonical_json(obj)))


def _avatar_step(index: int, sentence: str, action_id: str) -> StepSpec:
    def body(ctx: StepContext) -> None:
        ctx.invoke(caps.DIGITAL_AVATAR, {
            "text": sentence,
            "avatar_id": ctx.params["avatar_id"],
            "action_id": action_id,
        })

    return StepSpec(f"avatar_{index}", body, group="avatars",
                    retry=RetryPolicy(max_attempts=3))


def _speech_step(sentences: list[str]) -> StepSpec:
    def body(ctx: StepContext) -> None:
        for sentence in sentences:
            ctx.invoke(caps.TEXT_TO_SPEECH, {"text": sentence})

    return StepSpec("synthesize_speech", body, retry=RetryPolicy(max_attempts=3))


def _assemble_step(sentences: list[str]) -> StepSpec:
    count = len(sentences)

    def body(ctx: StepContext) -> None:
        avatar_ids = [ctx.outputs(f"avatar_{k}")[-1] for k in range(1, count + 1)]
        speech_ids = ctx.outputs("synthesize_speech")
        segments = [ctx.get_payload(i) for i in avatar_ids]
        # run-generated ids stay out of the payload so reruns are payload-identical
        spliced = concat_videos(segments)

        # each sentence owns the half-open span of its avatar segment in the
        # concatenated timeline; speech audio shifts to the span start
        starts = [int(s) for s in spliced.meta["concat_boundaries_ms"].split(",")]
        events: list[AssEvent] = []
        merged_audio: list[AudioSegment] = []
        for k, sentence in enumerate(sentences):
            span_start = starts[k]
            span_end = span_start + segments[k].duration_ms
            events.append(AssEvent(start_ms=span_start, end_ms=span_end, text=sentence))
            for seg in ctx.get_payload(speech_ids[k]).audio:
                merged_audio.append(AudioSegment(
                    seg.t0_ms + span_start, seg.t1_ms + span_start,
                    seg.text, seg.kind, seg.loudness_lufs))
        spliced.audio = merged_audio

        ass_text = emit_ass(events)
        ctx.put(make_text_media(ass_text, meta={"format": "ass"}))
        timed_id = ctx.put(spliced, inputs=avatar_ids + speech_ids)
        burned = ctx.invoke(caps.BURN_SUBTITLES, {
            "video": timed_id,
            "subtitles_ass": ass_text,
        })
        ctx.set_final_outputs([burned.artifact_id])

    inputs = tuple(f"avatar_{k}" for k in range(1, count + 1)) + ("synthesize_speech",)
    return StepSpec("assemble", body, inputs=inputs)


def plan(params: dict[str, Any]) -> list[StepSpec]:
    pairs = broadcast_plan(params["script"], rule_set_from_params(params))
    sentences = [s for s, _ in pairs]
    steps = [StepSpec("plan_broadcast", _plan_step)]
    steps.extend(_avatar_step(i + 1, s, a) for i, (s, a) in enumerate(pairs))
    steps.append(_speech_step(sentences))
    steps.append(_assemble_step(sentences))
    return steps


SKILL = SkillDefinition(
    name="digital_human",
    params=PARAMS,
    plan=plan,
    description="Sentence-split broadcast generation with parallel avatar segments, "
                "spliced audio, and aligned burned subtitles.",
)
