"""Fully deterministic mock provider.

Every output is a pure function of the request: colors come from FNV-1a
hashes, speech timing from a fixed 80 ms/character rate, video frames from
exact integer interpolation. Rerunning any request yields a bit-identical
manifest.
"""

from __future__ import annotations

from typing import Any, Callable

from .. import capabilities as caps
from ..capabilities import ResolvedArtifact
from ..errors import BadParams
from ..media import (
    KIND_AUDIO,
    KIND_IMAGE,
    KIND_TEXT,
    KIND_VIDEO,
    AudioSegment,
    OverlayEvent,
    SynthFrame,
    SynthMedia,
)
from .hashing import fnv1a64, hash_color, hash_hex
from .templates import action_plan_text, brief_text, storyboard_text

MOCK_FPS = 5
FRAME_INTERVAL_MS = 1000 // MOCK_FPS  # 200 ms grid
DEFAULT_WIDTH = 640
DEFAULT_HEIGHT = 360
TTS_MS_PER_CHAR = 80
TTS_LOUDNESS_LUFS = -20.0


def _lerp_channel(c0: int, c1: int, k: int, last: int) -> int:
    # exact linear interpolation with half-up rounding: floor(num/last + 1/2)
    if last == 0:
        return c0
    num = c0 * (last - k) + c1 * k
    return (2 * num + last) // (2 * last)


def _lerp_fill(c0: tuple[int, int, int], c1: tuple[int, int, int],
               k: int, last: int) -> tuple[int, int, int]:
    return tuple(_lerp_channel(c0[i], c1[i], k, last) for i in range(3))  # type: ignore[return-value]


def _check_duration(duration_ms: Any) -> int:
    if not isinstance(duration_ms, int) or duration_ms <= 0:
        raise BadParams(f"duration_ms must be a positive integer, got {duration_ms!r}")
    if duration_ms % FRAME_INTERVAL_MS != 0:
        raise BadParams(f"duration_ms must be a multiple of {FRAME_INTERVAL_MS}, got {duration_ms}")
    return duration_ms


def _gradient_video(c0: tuple[int, int, int], c1: tuple[int, int, int], duration_ms: int,
                    width: int, height: int, meta: dict[str, str]) -> SynthMedia:
    count = duration_ms // FRAME_INTERVAL_MS
    frames = [SynthFrame(t_ms=k * FRAME_INTERVAL_MS, fill_rgb=_lerp_fill(c0, c1, k, count - 1))
              for k in range(count)]
    return SynthMedia(kind=KIND_VIDEO, width=width, height=height, fps=MOCK_FPS,
                      duration_ms=duration_ms, frames=frames, meta=meta)


def _image_param(params: dict[str, Any], name: str = "image") -> ResolvedArtifact:
    ref = params[name]
    if ref.payload.kind != KIND_IMAGE:
        raise BadParams(f"{name} must reference an image artifact, got {ref.payload.kind}")
    return ref


def generate_text_to_image(params: dict[str, Any]) -> SynthMedia:
    prompt = params["prompt"]
    fill = hash_color(prompt)
    frame = SynthFrame(t_ms=0, fill_rgb=fill,
                       overlays=[OverlayEvent(text=prompt[:32], role="label", position="center")])
    return SynthMedia(kind=KIND_IMAGE, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT,
                      duration_ms=0, frames=[frame], meta={"prompt_hash": hash_hex(prompt)})


def generate_text_to_video(params: dict[str, Any]) -> SynthMedia:
    prompt = params["prompt"]
    duration = _check_duration(params["duration_ms"])
    return _gradient_video(hash_color(prompt), hash_color(prompt + "|end"), duration,
                           DEFAULT_WIDTH, DEFAULT_HEIGHT, {"prompt_hash": hash_hex(prompt)})


def generate_image_to_video(params: dict[str, Any]) -> SynthMedia:
    image = _image_param(params)
    prompt = params["prompt"]
    duration = _check_duration(params["duration_ms"])
    start = image.payload.frames[0].fill_rgb
    return _gradient_video(start, hash_color(prompt), duration,
                           image.payload.width, image.payload.height,
                           {"prompt_hash": hash_hex(prompt)})


def generate_images_to_video(params: dict[str, Any]) -> SynthMedia:
    mode = params["mode"]
    prompt = params["prompt"]
    duration = _check_duration(params["duration_ms"])
    images: list[ResolvedArtifact] = params["images"]
    for ref in images:
        if ref.payload.kind != KIND_IMAGE:
            raise BadParams(f"images must reference image artifacts, got {ref.payload.kind}")
    if mode == "first_last":
        first, last = images[0].payload, images[1].payload
        if (first.width, first.height) != (last.width, last.height):
            raise BadParams("first and last images must share dimensions")
        return _gradient_video(first.frames[0].fill_rgb, last.frames[0].fill_rgb, duration,
                               first.width, first.height, {"prompt_hash": hash_hex(prompt)})
    meta = {
        "prompt_hash": hash_hex(prompt),
        "reference_images": ",".join(ref.artifact_id for ref in images),
    }
    return _gradient_video(hash_color(prompt), hash_color(prompt + "|end"), duration,
                           DEFAULT_WIDTH, DEFAULT_HEIGHT, meta)


def tts_segments(text: str) -> list[AudioSegment]:
    """One speech segment per whitespace token, 80 ms per character, abutting."""
    segments = []
    cursor = 0
    for token in text.split():
        length = TTS_MS_PER_CHAR * len(token)
        segments.append(AudioSegment(t0_ms=cursor, t1_ms=cursor + length, text=token,
                                     kind="speech", loudness_lufs=TTS_LOUDNESS_LUFS))
        cursor += length
    return segments


def tts_duration_ms(text: str) -> int:
    return sum(TTS_MS_PER_CHAR * len(token) for token in text.split())


def generate_text_to_speech(params: dict[str, Any]) -> SynthMedia:
    segments = tts_segments(params["text"])
    duration = segments[-1].t1_ms if segments else 0
    return SynthMedia(kind=KIND_AUDIO, duration_ms=duration, audio=segments)


def generate_digital_avatar(params: dict[str, Any]) -> SynthMedia:
    text, avatar_id, action_id = params["text"], params["avatar_id"], params["action_id"]
    segments = tts_segments(text)
    speech_ms = segments[-1].t1_ms if segments else 0
    # round the speech length up to the frame grid
    duration = -(-speech_ms // FRAME_INTERVAL_MS) * FRAME_INTERVAL_MS
    fill = hash_color(avatar_id)
    frames = []
    seg_idx = 0
    for k in range(duration // FRAME_INTERVAL_MS):
        t = k * FRAME_INTERVAL_MS
        while seg_idx < len(segments) and segments[seg_idx].t1_ms <= t:
            seg_idx += 1
        lip_token = segments[seg_idx].text if seg_idx < len(segments) else ""
        frames.append(SynthFrame(t_ms=t, fill_rgb=fill,
                                 tags={"action_id": action_id, "lip_token": lip_token}))
    return SynthMedia(kind=KIND_VIDEO, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT, fps=MOCK_FPS,
                      duration_ms=duration, frames=frames,
                      meta={"avatar_id": avatar_id, "action_id": action_id})


def qa_score(fill: tuple[int, int, int], dimension: str) -> int:
    """Per-dimension quality score in [60, 100], a pure function of fill color."""
    return 60 + fnv1a64(f"{fill[0]},{fill[1]},{fill[2]}|{dimension}") % 41


def generate_image_qa(params: dict[str, Any]) -> SynthMedia:
    image = params["image"]
    if not image.payload.frames:
        raise BadParams("image_qa input carries no frames")
    fill = image.payload.frames[0].fill_rgb
    question = params["question"]
    if question.startswith("score:"):
        dimension = question[len("score:"):].split("|", 1)[0]
        answer = str(qa_score(fill, dimension))
    elif question.startswith("refine:"):
        remainder = question[len("refine:"):].strip()
        answer = f"{remainder} | palette:{fill[0]},{fill[1]},{fill[2]}"
    else:
        answer = f"image({fill[0]},{fill[1]},{fill[2]}): {question}"
    return SynthMedia(kind=KIND_TEXT, text=answer)


def generate_text(params: dict[str, Any]) -> SynthMedia:
    prompt, mode = params["prompt"], params["mode"]
    if mode == "storyboard":
        text = storyboard_text(prompt)
    elif mode == "brief":
        text = brief_text(prompt)
    elif mode == "action_plan":
        text = action_plan_text(prompt)
    else:  # freeform
        text = prompt
    return SynthMedia(kind=KIND_TEXT, text=text)


MOCK_HANDLERS: dict[str, Callable[[dict[str, Any]], SynthMedia]] = {
    caps.TEXT_TO_IMAGE: generate_text_to_image,
    caps.IMAGE_QA: generate_image_qa,
    caps.TEXT_TO_VIDEO: generate_text_to_video,
    caps.IMAGE_TO_VIDEO: generate_image_to_video,
    caps.MULTI_IMAGE_TO_VIDEO: generate_images_to_video,
    caps.TEXT_TO_SPEECH: generate_text_to_speech,
    caps.DIGITAL_AVATAR: generate_digital_avatar,
    caps.TEXT_GENERATION: generate_text,
}


def mock_generate(capability: str, params: dict[str, Any]) -> SynthMedia:
    handler = MOCK_HANDLERS.get(capability)
    if handler is None:
        raise BadParams(f"mock provider does not implement {capability}")
    return handler(params)
