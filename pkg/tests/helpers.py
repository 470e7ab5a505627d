"""Fixture builders shared across the suite."""

from __future__ import annotations

from mediaclaw.media import KIND_VIDEO, AudioSegment, SynthFrame, SynthMedia


def grid_video(duration_ms: int, fill=(120, 50, 80), fps: int = 5,
               width: int = 640, height: int = 360,
               audio: list[tuple] | None = None,
               fills: list[tuple[int, int, int]] | None = None) -> SynthMedia:
    """A valid video on the frame grid; per-frame fills optional."""
    interval = 1000 // fps
    count = duration_ms // interval
    frames = [
        SynthFrame(t_ms=k * interval, fill_rgb=fills[k] if fills else fill)
        for k in range(count)
    ]
    segments = [AudioSegment(*spec) for spec in (audio or [])]
    return SynthMedia(kind=KIND_VIDEO, width=width, height=height, fps=fps,
                      duration_ms=duration_ms, frames=frames, audio=segments)


def speech(t0: int, t1: int, text: str, loudness: float = -20.0) -> tuple:
    return (t0, t1, text, "speech", loudness)


def silence(t0: int, t1: int, loudness: float = -50.0) -> tuple:
    return (t0, t1, "", "silence", loudness)
