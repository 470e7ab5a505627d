"""Long-video skill: storyboard the requirement, generate segment by segment
using the previous segment's last frame as the next first-frame input, then
stitch everything together.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .. import capabilities as caps
from ..capabilities import ParamSpec
from ..engine import RetryPolicy, SkillDefinition, StepContext, StepSpec
from ..errors import BadShotCount
from ..media import frame_at, make_image
from ..providers.templates import parse_storyboard_text, storyboard_prompt
from .poster import CallFn, call_from_ctx
from .video_ops import concat_videos

SHOT_DURATION_MS = 5000
DEFAULT_SHOT_COUNT = 3


@dataclass(frozen=True)
class Shot:
    index: int
    prompt: str
    duration_ms: int


@dataclass(frozen=True)
class Storyboard:
    shots: tuple[Shot, ...]


def parse_storyboard(text: str, duration_ms: int = SHOT_DURATION_MS) -> Storyboard:
    lines = parse_storyboard_text(text)
    shots = tuple(Shot(index=i + 1, prompt=line, duration_ms=duration_ms)
                  for i, line in enumerate(lines))
    return Storyboard(shots=shots)


def generate_storyboard(call: CallFn, requirement: str,
                        shot_count: int = DEFAULT_SHOT_COUNT) -> tuple[Storyboard, str]:
    """Returns the parsed storyboard and the text artifact id it came from."""
    if not isinstance(shot_count, int) or shot_count < 1:
        raise BadShotCount(f"shot_count must be >= 1, got {shot_count!r}")
    artifact_id, payload = call(caps.TEXT_GENERATION, {
        "prompt": storyboard_prompt(shot_count, requirement),
        "mode": "storyboard",
    })
    return parse_storyboard(payload.text), artifact_id


PARAMS: tuple[ParamSpec, ...] = (
    ParamSpec("requirement", "string", required=True),
    ParamSpec("shot_count", "int", default=DEFAULT_SHOT_COUNT, min_value=1),
)


def _storyboard_step(ctx: StepContext) -> None:
    generate_storyboard(call_from_ctx(ctx), ctx.params["requirement"],
                        ctx.params["shot_count"])


def _storyboard_of(ctx: StepContext) -> Storyboard:
    text = ctx.get_payload(ctx.outputs("storyboard")[0]).text
    return parse_storyboard(text)


def _make_segment_step(k: int) -> StepSpec:
    """Step for shot k (1-based). Shots after the first chain off the previous
    segment's last frame and refine their prompt against it."""

    def body(ctx: StepContext) -> None:
        shot = _storyboard_of(ctx).shots[k - 1]
        if k == 1:
            ctx.invoke(caps.TEXT_TO_VIDEO,
                       {"prompt": shot.prompt, "duration_ms": shot.duration_ms})
            return
        prev_id = ctx.outputs(f"segment_{k - 1}")[-1]
        prev = ctx.get_payload(prev_id)
        last = frame_at(prev, prev.duration_ms)
        bridge = make_image(last.fill_rgb, prev.width, prev.height,
                            meta={"source_t_ms": str(last.t_ms)})
        bridge_id = ctx.put(bridge, inputs=[prev_id])
        refine = ctx.invoke(caps.IMAGE_QA, {
            "image": bridge_id,
            "question": "refine: " + shot.prompt,
        })
        refined_prompt = ctx.get_payload(refine.artifact_id).text
        ctx.invoke(caps.IMAGE_TO_VIDEO, {
            "image": bridge_id,
            "prompt": refined_prompt,
            "duration_ms": shot.duration_ms,
        })

    inputs = ("storyboard",) if k == 1 else ("storyboard", f"segment_{k - 1}")
    return StepSpec(f"segment_{k}", body, inputs=inputs, retry=RetryPolicy(max_attempts=3))


def _concat_step(shot_count: int) -> StepSpec:
    def body(ctx: StepContext) -> None:
        segment_ids = [ctx.outputs(f"segment_{k}")[-1] for k in range(1, shot_count + 1)]
        # run-generated ids stay out of the payload (lineage lives on the
        # artifact envelope); keeps reruns payload-identical across providers
        final = concat_videos([ctx.get_payload(i) for i in segment_ids])
        ctx.put(final, inputs=segment_ids)

    inputs = tuple(f"segment_{k}" for k in range(1, shot_count + 1))
    return StepSpec("concatenate", body, inputs=inputs)


def plan(params: dict[str, Any]) -> list[StepSpec]:
    shot_count = params["shot_count"]
    steps = [StepSpec("storyboard", _storyboard_step, retry=RetryPolicy(max_attempts=3))]
    steps.extend(_make_segment_step(k) for k in range(1, shot_count + 1))
    steps.append(_concat_step(shot_count))
    return steps


SKILL = SkillDefinition(
    name="long_video",
    params=PARAMS,
    plan=plan,
    description="Storyboard-driven segmented video generation with last-frame "
                "continuation between segments.",
)
