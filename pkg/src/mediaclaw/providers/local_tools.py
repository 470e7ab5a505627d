"""Local (non-routed) processing tools: subtitle burning and chroma keying.

Both are pure: they return a new manifest and never touch the input.
"""

from __future__ import annotations

from ..errors import WrongKind
from ..media import KIND_IMAGE, KIND_VIDEO, OverlayEvent, SynthMedia, copy_media
from .ass import AssEvent, check_non_overlapping

# A frame counts as green-screen iff G > 1.5 * max(R, B) and G >= 100.
CHROMA_G_RATIO_NUM = 3
CHROMA_G_RATIO_DEN = 2
CHROMA_G_FLOOR = 100


def burn_subtitles(video: SynthMedia, events: list[AssEvent]) -> SynthMedia:
    """Stamp a bottom subtitle overlay onto every frame inside each half-open event."""
    if video.kind != KIND_VIDEO:
        raise WrongKind(f"burn_subtitles requires video, got {video.kind}")
    ordered = check_non_overlapping(events)
    out = copy_media(video)
    for frame in out.frames:
        for event in ordered:
            if event.start_ms <= frame.t_ms < event.end_ms:
                frame.overlays.append(
                    OverlayEvent(text=event.text, role="subtitle", position="bottom"))
    out.meta["subtitles_burned"] = str(len(ordered))
    return out


def is_green_screen(fill: tuple[int, int, int]) -> bool:
    r, g, b = fill
    return g * CHROMA_G_RATIO_DEN > CHROMA_G_RATIO_NUM * max(r, b) and g >= CHROMA_G_FLOOR


def replace_background(video: SynthMedia, background: SynthMedia) -> SynthMedia:
    """Chroma key on the fill model: green-screen frames take the background fill."""
    if video.kind != KIND_VIDEO:
        raise WrongKind(f"replace_background requires video, got {video.kind}")
    if background.kind != KIND_IMAGE:
        raise WrongKind(f"background must be an image, got {background.kind}")
    bg_fill = background.frames[0].fill_rgb
    out = copy_media(video)
    for frame in out.frames:
        if is_green_screen(frame.fill_rgb):
            frame.fill_rgb = bg_fill
            frame.tags["chroma_replaced"] = "true"
    return out
