"""Deterministic text-generation grammar shared by mock and stub backends.

The skills compose prompts with these helpers and parse the responses back,
so generation and parsing must stay in lockstep; keep both sides here.
"""

from __future__ import annotations

from ..errors import BadParams
from ..skills.actions import BUILTIN_RULE_SETS, match_action, split_sentences

BRIEF_DEFAULT_AUDIENCE = "general consumers"
BRIEF_DEFAULT_TONE = "neutral"


def storyboard_prompt(shot_count: int, requirement: str) -> str:
    return f"{shot_count}|{requirement}"


def storyboard_text(prompt: str) -> str:
    """Mock storyboard: prompt 'N|requirement' -> one 'shot i/N: requirement' line per shot."""
    head, sep, requirement = prompt.partition("|")
    if not sep or not head.isdigit() or int(head) < 1:
        raise BadParams("storyboard prompt must look like 'N|requirement' with N >= 1")
    n = int(head)
    return "\n".join(f"shot {i}/{n}: {requirement}" for i in range(1, n + 1))


def parse_storyboard_text(text: str) -> list[str]:
    return [line for line in text.split("\n") if line]


def brief_prompt(raw: dict[str, object]) -> str:
    points = raw.get("selling_points") or []
    if isinstance(points, str):
        points = [points]
    return (
        f"product={raw.get('product_name', '')}"
        f"|audience={raw.get('audience', '')}"
        f"|points={';'.join(str(p) for p in points)}"
        f"|tone={raw.get('brand_tone', '')}"
    )


def brief_text(prompt: str) -> str:
    """Mock brief structuring: fill missing fields, emit the generation prompt.

    Output shape: "poster | {product} | {audience} | {points ;-joined} | {tone}".
    Missing audience/tone get fixed defaults; missing selling points fall back
    to the product name itself so a brief always carries at least one point.
    """
    fields: dict[str, str] = {}
    for part in prompt.split("|"):
        key, sep, value = part.partition("=")
        if sep:
            fields[key] = value
    product = fields.get("product", "").strip()
    if not product:
        raise BadParams("brief prompt carries no product")
    audience = fields.get("audience", "").strip() or BRIEF_DEFAULT_AUDIENCE
    points = fields.get("points", "").strip() or product
    tone = fields.get("tone", "").strip() or BRIEF_DEFAULT_TONE
    return f"poster | {product} | {audience} | {points} | {tone}"


def parse_brief_text(text: str) -> dict[str, object]:
    parts = [p.strip() for p in text.split("|")]
    if len(parts) != 5 or parts[0] != "poster":
        raise BadParams(f"unparseable brief text: {text!r}")
    return {
        "product_name": parts[1],
        "audience": parts[2],
        "selling_points": [p for p in parts[3].split(";") if p],
        "brand_tone": parts[4],
    }


def action_plan_text(script: str) -> str:
    """Mock broadcast planning: one '{sentence}\\t{action_id}' line per sentence."""
    rules = BUILTIN_RULE_SETS["news_broadcasting"]
    lines = [f"{s}\t{match_action(s, rules)}" for s in split_sentences(script)]
    return "\n".join(lines)
