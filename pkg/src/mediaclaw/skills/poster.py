"""Product poster skill: brief structuring, generation, multi-dimension
evaluation, and a bounded optimization loop that always retains the best
historical result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .. import capabilities as caps
from ..engine import RetryPolicy, SkillDefinition, StepContext, StepSpec
from ..errors import MissingProductName, WrongKind
from ..media import KIND_IMAGE, SynthMedia, canonical_json, make_text_media
from ..capabilities import ParamSpec
from ..providers.templates import brief_prompt, parse_brief_text

# Fixed evaluation dimensions, in tie-break order.
DIMENSIONS = (
    "selling_point_expression",
    "subject_prominence",
    "visual_appeal",
    "brand_consistency",
    "information_hierarchy",
)

DEFAULT_THRESHOLD = 85
DEFAULT_MAX_ITERATIONS = 3

# call(capability, params) -> (artifact_id, payload); adapts ctx or registry
CallFn = Callable[..., tuple[str, SynthMedia]]


def call_from_ctx(ctx: StepContext) -> CallFn:
    def call(capability: str, params: dict[str, Any]) -> tuple[str, SynthMedia]:
        result = ctx.invoke(capability, params)
        return result.artifact_id, ctx.get_payload(result.artifact_id)

    return call


def call_from_registry(registry) -> CallFn:
    from ..registry import InvokeRequest

    def call(capability: str, params: dict[str, Any]) -> tuple[str, SynthMedia]:
        result = registry.invoke(InvokeRequest(capability, params))
        return result.artifact_id, registry.store.get_payload(result.artifact_id)

    return call


@dataclass(frozen=True)
class PosterBrief:
    product_name: str
    audience: str
    selling_points: tuple[str, ...]
    brand_tone: str


@dataclass(frozen=True)
class PosterEvaluation:
    scores: dict[str, int]
    overall: int


def overall_score(scores: dict[str, int]) -> int:
    # mean of the five dimensions, rounded half-up
    total = sum(scores[d] for d in DIMENSIONS)
    return (2 * total + len(DIMENSIONS)) // (2 * len(DIMENSIONS))


def structure_brief(call: CallFn, raw_input: dict[str, Any]) -> tuple[PosterBrief, str, str]:
    """Structure raw input into a brief; returns (brief, generation_prompt, artifact_id)."""
    product = str(raw_input.get("product_name", "") or "").strip()
    if not product:
        raise MissingProductName("poster briefs need a product_name")
    artifact_id, payload = call(caps.TEXT_GENERATION,
                                {"prompt": brief_prompt(raw_input), "mode": "brief"})
    fields = parse_brief_text(payload.text)
    brief = PosterBrief(
        product_name=fields["product_name"],
        audience=fields["audience"],
        selling_points=tuple(fields["selling_points"]),
        brand_tone=fields["brand_tone"],
    )
    return brief, payload.text, artifact_id


def evaluate_poster(call: CallFn, image_id: str, image: SynthMedia,
                    brief_generation_prompt: str) -> PosterEvaluation:
    """Score the poster on each dimension via one image QA call per dimension."""
    if image.kind != KIND_IMAGE:
        raise WrongKind(f"evaluate_poster takes an image, got {image.kind}")
    scores: dict[str, int] = {}
    for dimension in DIMENSIONS:
        _, answer = call(caps.IMAGE_QA, {
            "image": image_id,
            "question": f"score:{dimension}|{brief_generation_prompt}",
        })
        scores[dimension] = int(answer.text)
    return PosterEvaluation(scores=scores, overall=overall_score(scores))


def improvement_suffix(evaluation: PosterEvaluation) -> str:
    """The two lowest-scoring dimensions, ties broken by fixed dimension order."""
    ranked = sorted(DIMENSIONS, key=lambda d: (evaluation.scores[d], DIMENSIONS.index(d)))
    return " | improve:" + ",".join(ranked[:2])


PARAMS: tuple[ParamSpec, ...] = (
    ParamSpec("product_name", "string", required=True),
    ParamSpec("audience", "string"),
    ParamSpec("selling_points", "string_list"),
    ParamSpec("brand_tone", "string"),
    ParamSpec("threshold", "int", default=DEFAULT_THRESHOLD),
    ParamSpec("max_iterations", "int", default=DEFAULT_MAX_ITERATIONS, min_value=1),
)


def _structure_step(ctx: StepContext) -> None:
    structure_brief(call_from_ctx(ctx), ctx.params)


def _optimize_step(ctx: StepContext) -> None:
    call = call_from_ctx(ctx)
    brief_artifact_id = ctx.outputs("structure_brief")[0]
    generation_prompt = ctx.get_payload(brief_artifact_id).text
    threshold = ctx.params["threshold"]
    max_iterations = ctx.params["max_iterations"]

    history: list[dict[str, Any]] = []
    poster_ids: list[str] = []
    best_index: int | None = None
    best_overall = -1
    last_eval: PosterEvaluation | None = None

    for iteration in range(1, max_iterations + 1):
        prompt = generation_prompt
        if iteration >= 2 and last_eval is not None:
            prompt += improvement_suffix(last_eval)
        poster_id, poster = call(caps.TEXT_TO_IMAGE, {"prompt": prompt})
        poster_ids.append(poster_id)
        evaluation = evaluate_poster(call, poster_id, poster, generation_prompt)
        last_eval = evaluation
        # iterations are keyed by index, never by artifact id, so rerunning
        # the same brief yields an identical history
        summary = {
            "iteration": iteration,
            "overall": evaluation.overall,
            "prompt": prompt,
            "scores": dict(evaluation.scores),
        }
        ctx.put(make_text_media(canonical_json(summary)), inputs=[poster_id])
        history.append(summary)
        if evaluation.overall > best_overall:  # strict improvement; ties keep earlier
            best_overall = evaluation.overall
            best_index = iteration - 1
        if evaluation.overall >= threshold:
            break

    record = {
        "best_iteration": best_index + 1,
        "best_overall": best_overall,
        "iterations": history,
        "stopped_early": len(history) < max_iterations,
        "threshold": threshold,
    }
    history_id = ctx.put(make_text_media(canonical_json(record)), inputs=poster_ids)
    ctx.set_final_outputs([poster_ids[best_index], history_id])


def plan(params: dict[str, Any]) -> list[StepSpec]:
    if not str(params.get("product_name", "")).strip():
        raise MissingProductName("poster briefs need a product_name")
    return [
        StepSpec("structure_brief", _structure_step, retry=RetryPolicy(max_attempts=3)),
        StepSpec("optimize", _optimize_step, inputs=("structure_brief",),
                 retry=RetryPolicy(max_attempts=3)),
    ]


SKILL = SkillDefinition(
    name="poster",
    params=PARAMS,
    plan=plan,
    description="Generate a product poster with evaluation-driven optimization; "
                "keeps the best-scoring iteration.",
)
