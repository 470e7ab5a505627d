"""Sentence splitting and keyword-based action matching for broadcast scripts."""

from __future__ import annotations

from dataclasses import dataclass, field

SENTENCE_TERMINATORS = frozenset(".!?;。！？；")  # . ! ? ; 。 ！ ？ ；


def split_sentences(script: str) -> list[str]:
    """Split on terminators, terminator(s) attached to their sentence.

    Runs of consecutive terminators stay with one sentence; fragments are
    whitespace-trimmed and empties dropped; trailing text without a
    terminator forms a final sentence.
    """
    sentences: list[str] = []
    current: list[str] = []
    i = 0
    while i < len(script):
        ch = script[i]
        current.append(ch)
        if ch in SENTENCE_TERMINATORS:
            while i + 1 < len(script) and script[i + 1] in SENTENCE_TERMINATORS:
                i += 1
                current.append(script[i])
            fragment = "".join(current).strip()
            if fragment:
                sentences.append(fragment)
            current = []
        i += 1
    tail = "".join(current).strip()
    if tail:
        sentences.append(tail)
    return sentences


@dataclass
class ActionRuleSet:
    """Ordered keyword rules; first rule whose any keyword matches wins."""

    scenario: str
    rules: list[tuple[list[str], str]] = field(default_factory=list)
    default_action_id: str = "neutral_stand"


def match_action(sentence: str, rules: ActionRuleSet) -> str:
    lowered = sentence.lower()
    for keywords, action_id in rules.rules:
        if any(kw.lower() in lowered for kw in keywords):
            return action_id
    return rules.default_action_id


BUILTIN_RULE_SETS: dict[str, ActionRuleSet] = {
    "news_broadcasting": ActionRuleSet(
        scenario="news_broadcasting",
        rules=[
            (["breaking", "urgent"], "emphasize_point"),
            (["welcome", "hello"], "wave_hand"),
            (["data", "percent", "%"], "present_chart"),
        ],
        default_action_id="neutral_stand",
    ),
    "course_lecture": ActionRuleSet(
        scenario="course_lecture",
        rules=[
            (["remember", "important", "note"], "emphasize_point"),
            (["example", "for instance"], "present_chart"),
            (["today", "let's", "begin"], "open_palms"),
        ],
        default_action_id="neutral_stand",
    ),
    "product_introduction": ActionRuleSet(
        scenario="product_introduction",
        rules=[
            (["introducing", "brand new", "launch"], "wave_hand"),
            (["feature", "spec", "design"], "present_chart"),
            (["discount", "offer", "buy"], "emphasize_point"),
        ],
        default_action_id="neutral_stand",
    ),
    "welcome_speech": ActionRuleSet(
        scenario="welcome_speech",
        rules=[
            (["welcome", "hello", "greetings"], "wave_hand"),
            (["thank", "grateful"], "open_palms"),
            (["honor", "pleasure"], "emphasize_point"),
        ],
        default_action_id="neutral_stand",
    ),
}
