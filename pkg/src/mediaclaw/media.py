"""Synthetic media container and time/frame addressing.

Media payloads are deterministic manifests instead of pixel buffers: a video
is a list of solid-fill frames with overlay stamps, audio is a list of
timestamped segments, and everything serializes to canonical JSON (sorted
keys, no insignificant whitespace, integer times).
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Any

from .errors import InvalidManifest, OutOfRange, WrongKind

KIND_IMAGE = "image"
KIND_VIDEO = "video"
KIND_AUDIO = "audio"
KIND_TEXT = "text"
MEDIA_KINDS = (KIND_IMAGE, KIND_VIDEO, KIND_AUDIO, KIND_TEXT)

OVERLAY_ROLES = ("subtitle", "label", "transition")
OVERLAY_POSITIONS = ("bottom", "top", "center")

AUDIO_SPEECH = "speech"
AUDIO_SILENCE = "silence"


@dataclass
class OverlayEvent:
    """A text stamp burned onto a frame. Burned overlays are append-only."""

    text: str
    role: str  # subtitle | label | transition
    position: str  # bottom | top | center


@dataclass
class SynthFrame:
    t_ms: int
    fill_rgb: tuple[int, int, int]
    overlays: list[OverlayEvent] = field(default_factory=list)
    tags: dict[str, str] = field(default_factory=dict)


@dataclass
class AudioSegment:
    t0_ms: int
    t1_ms: int
    text: str
    kind: str  # speech | silence
    loudness_lufs: float


@dataclass
class SynthMedia:
    """One media payload of any kind; invariants enforced by validate_media."""

    kind: str
    width: int = 0
    height: int = 0
    fps: int = 0
    duration_ms: int = 0
    frames: list[SynthFrame] = field(default_factory=list)
    audio: list[AudioSegment] = field(default_factory=list)
    text: str = ""
    meta: dict[str, str] = field(default_factory=dict)


def frame_timestamp(index: int, fps: int) -> int:
    """Timestamp rule: frame k sits at floor(k * 1000 / fps)."""
    return index * 1000 // fps


def expected_frame_count(duration_ms: int, fps: int) -> int:
    return duration_ms * fps // 1000


def canonical_json(obj: Any) -> str:
    """Canonical serialization: lexicographically sorted keys, compact separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _overlay_to_obj(o: OverlayEvent) -> dict[str, Any]:
    return {"position": o.position, "role": o.role, "text": o.text}


def _frame_to_obj(f: SynthFrame) -> dict[str, Any]:
    return {
        "fill_rgb": list(f.fill_rgb),
        "overlays": [_overlay_to_obj(o) for o in f.overlays],
        "t_ms": f.t_ms,
        "tags": dict(f.tags),
    }


def _segment_to_obj(s: AudioSegment) -> dict[str, Any]:
    return {
        "kind": s.kind,
        "loudness_lufs": s.loudness_lufs,
        "t0_ms": s.t0_ms,
        "t1_ms": s.t1_ms,
        "text": s.text,
    }


def media_to_obj(m: SynthMedia) -> dict[str, Any]:
    """Full fixed-shape JSON object; every field always present."""
    return {
        "audio": [_segment_to_obj(s) for s in m.audio],
        "duration_ms": m.duration_ms,
        "fps": m.fps,
        "frames": [_frame_to_obj(f) for f in m.frames],
        "height": m.height,
        "kind": m.kind,
        "meta": dict(m.meta),
        "text": m.text,
        "width": m.width,
    }


def media_to_json(m: SynthMedia) -> str:
    return canonical_json(media_to_obj(m))


def _require(cond: bool, rule: str, detail: str = ""):
    if not cond:
        raise InvalidManifest(f"{rule}: {detail}" if detail else rule, rule=rule)


def _int_field(obj: dict, key: str, rule: str) -> int:
    v = obj.get(key)
    _require(isinstance(v, int) and not isinstance(v, bool), rule, f"{key} must be an integer")
    return v


def media_from_obj(obj: Any) -> SynthMedia:
    """Strict parse of a manifest object; raises InvalidManifest on bad shape."""
    _require(isinstance(obj, dict), "manifest_shape", "manifest must be an object")
    kind = obj.get("kind")
    _require(kind in MEDIA_KINDS, "unknown_kind", f"kind={kind!r}")

    frames: list[SynthFrame] = []
    raw_frames = obj.get("frames", [])
    _require(isinstance(raw_frames, list), "manifest_shape", "frames must be a list")
    for rf in raw_frames:
        _require(isinstance(rf, dict), "manifest_shape", "frame must be an object")
        fill = rf.get("fill_rgb")
        _require(isinstance(fill, list) and len(fill) == 3, "frame_fill_shape", str(fill))
        overlays = []
        for ro in rf.get("overlays", []):
            _require(isinstance(ro, dict), "manifest_shape", "overlay must be an object")
            overlays.append(OverlayEvent(
                text=str(ro.get("text", "")),
                role=str(ro.get("role", "")),
                position=str(ro.get("position", "")),
            ))
        tags = rf.get("tags", {})
        _require(isinstance(tags, dict), "manifest_shape", "tags must be a map")
        frames.append(SynthFrame(
            t_ms=_int_field(rf, "t_ms", "frame_time_type"),
            fill_rgb=(fill[0], fill[1], fill[2]),
            overlays=overlays,
            tags={str(k): str(v) for k, v in tags.items()},
        ))

    audio: list[AudioSegment] = []
    raw_audio = obj.get("audio", [])
    _require(isinstance(raw_audio, list), "manifest_shape", "audio must be a list")
    for rs in raw_audio:
        _require(isinstance(rs, dict), "manifest_shape", "audio segment must be an object")
        loudness = rs.get("loudness_lufs")
        _require(isinstance(loudness, (int, float)) and not isinstance(loudness, bool),
                 "segment_loudness_type", str(loudness))
        audio.append(AudioSegment(
            t0_ms=_int_field(rs, "t0_ms", "segment_time_type"),
            t1_ms=_int_field(rs, "t1_ms", "segment_time_type"),
            text=str(rs.get("text", "")),
            kind=str(rs.get("kind", "")),
            loudness_lufs=float(loudness),
        ))

    meta = obj.get("meta", {})
    _require(isinstance(meta, dict), "manifest_shape", "meta must be a map")

    media = SynthMedia(
        kind=kind,
        width=_int_field(obj, "width", "dimension_type") if "width" in obj else 0,
        height=_int_field(obj, "height", "dimension_type") if "height" in obj else 0,
        fps=_int_field(obj, "fps", "fps_type") if "fps" in obj else 0,
        duration_ms=_int_field(obj, "duration_ms", "duration_type") if "duration_ms" in obj else 0,
        frames=frames,
        audio=audio,
        text=str(obj.get("text", "")),
        meta={str(k): str(v) for k, v in meta.items()},
    )
    return media


def media_from_json(text: str) -> SynthMedia:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidManifest(f"not valid JSON: {e}", rule="json_syntax") from None
    return media_from_obj(obj)


def _validate_frames(m: SynthMedia):
    for i, f in enumerate(m.frames):
        _require(len(f.fill_rgb) == 3, "frame_fill_shape", f"frame {i}")
        for c in f.fill_rgb:
            _require(isinstance(c, int) and 0 <= c <= 255, "frame_rgb_range",
                     f"frame {i} fill {f.fill_rgb}")
        for o in f.overlays:
            _require(o.role in OVERLAY_ROLES, "overlay_role", f"frame {i} role {o.role!r}")
            _require(o.position in OVERLAY_POSITIONS, "overlay_position",
                     f"frame {i} position {o.position!r}")
            if o.role == "subtitle":
                _require(o.text != "", "subtitle_text_empty", f"frame {i}")


def _validate_audio(m: SynthMedia):
    prev_end = None
    for i, s in enumerate(m.audio):
        _require(s.t0_ms < s.t1_ms, "segment_time_order", f"segment {i}: [{s.t0_ms},{s.t1_ms})")
        _require(s.kind in (AUDIO_SPEECH, AUDIO_SILENCE), "segment_kind", f"segment {i}: {s.kind!r}")
        if s.kind == AUDIO_SILENCE:
            _require(s.text == "", "silence_text_nonempty", f"segment {i}")
        if prev_end is not None:
            _require(s.t0_ms >= prev_end, "segment_overlap",
                     f"segment {i} starts at {s.t0_ms} before previous end {prev_end}")
        prev_end = s.t1_ms


def validate_media(m: SynthMedia) -> None:
    """Check every invariant of the manifest; raise InvalidManifest naming the rule."""
    _require(m.kind in MEDIA_KINDS, "unknown_kind", repr(m.kind))
    _validate_frames(m)
    _validate_audio(m)

    if m.kind == KIND_VIDEO:
        _require(m.width > 0 and m.height > 0, "video_dimensions",
                 f"{m.width}x{m.height}")
        _require(m.fps > 0, "video_fps", str(m.fps))
        _require(m.duration_ms >= 0, "video_duration", str(m.duration_ms))
        expected = expected_frame_count(m.duration_ms, m.fps)
        _require(len(m.frames) == expected, "video_frame_count",
                 f"{len(m.frames)} frames for {m.duration_ms} ms at {m.fps} fps (expected {expected})")
        for k, f in enumerate(m.frames):
            _require(f.t_ms == frame_timestamp(k, m.fps), "frame_timestamp",
                     f"frame {k} at {f.t_ms} ms (expected {frame_timestamp(k, m.fps)})")
        if m.audio:
            _require(m.audio[-1].t1_ms <= m.duration_ms, "audio_exceeds_duration",
                     f"audio ends at {m.audio[-1].t1_ms} but video lasts {m.duration_ms}")
        _require(m.text == "", "text_on_nontext")
    elif m.kind == KIND_IMAGE:
        _require(m.width > 0 and m.height > 0, "image_dimensions", f"{m.width}x{m.height}")
        _require(m.duration_ms == 0, "image_duration", str(m.duration_ms))
        _require(len(m.frames) == 1, "image_frame_count", f"{len(m.frames)} frames")
        _require(not m.audio, "audio_on_image")
        _require(m.text == "", "text_on_nontext")
    elif m.kind == KIND_AUDIO:
        _require(not m.frames, "frames_on_audio")
        expected = m.audio[-1].t1_ms if m.audio else 0
        _require(m.duration_ms == expected, "audio_duration",
                 f"{m.duration_ms} (expected {expected})")
        _require(m.text == "", "text_on_nontext")
    else:  # text
        _require(not m.frames, "frames_on_text")
        _require(not m.audio, "audio_on_text")
        _require(m.duration_ms == 0, "text_duration", str(m.duration_ms))


def frame_at(media: SynthMedia, t_ms: int) -> SynthFrame:
    """Frame with the largest t_ms <= query; t_ms == duration returns the last frame."""
    if media.kind != KIND_VIDEO:
        raise WrongKind(f"frame_at requires video, got {media.kind}")
    if t_ms < 0 or t_ms > media.duration_ms:
        raise OutOfRange(f"t={t_ms} ms outside [0, {media.duration_ms}]")
    if not media.frames:
        raise OutOfRange("video has no frames")
    idx = bisect_right([f.t_ms for f in media.frames], t_ms) - 1
    return media.frames[max(idx, 0)]


def copy_media(m: SynthMedia) -> SynthMedia:
    """Deep copy through the canonical form so outputs never alias inputs."""
    return media_from_obj(media_to_obj(m))


def make_text_media(text: str, meta: dict[str, str] | None = None) -> SynthMedia:
    return SynthMedia(kind=KIND_TEXT, text=text, meta=dict(meta or {}))


def make_image(fill: tuple[int, int, int], width: int = 640, height: int = 360,
               label: str = "", meta: dict[str, str] | None = None) -> SynthMedia:
    overlays = [OverlayEvent(text=label, role="label", position="center")] if label else []
    frame = SynthFrame(t_ms=0, fill_rgb=fill, overlays=overlays)
    return SynthMedia(kind=KIND_IMAGE, width=width, height=height, duration_ms=0,
                      frames=[frame], meta=dict(meta or {}))
