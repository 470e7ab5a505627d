"""Skill workflow templates built on the unified capability pool.

Imports stay inside the functions: the mock provider reaches into
`skills.actions` for the shared sentence/action rules, so this package init
must not pull the engine in at import time.
"""

from __future__ import annotations


def all_skills():
    from . import digital_human, long_video, poster, video_use

    return (poster.SKILL, long_video.SKILL, digital_human.SKILL, video_use.SKILL)


def register_all(engine) -> None:
    for skill in all_skills():
        engine.register_skill(skill)
