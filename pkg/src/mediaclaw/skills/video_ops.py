"""Media-pipeline operations shared by the skills: segment stitching,
transcript extraction, transcript-driven edit planning and application,
loudness normalization, and brightness correction.

All operations are pure: inputs are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..errors import (
    EmptyAfterEdit,
    EmptyInput,
    MixedDimensions,
    NoAudio,
    RangeOutOfBounds,
    WrongKind,
)
from ..media import (
    KIND_VIDEO,
    AudioSegment,
    OverlayEvent,
    SynthFrame,
    SynthMedia,
    canonical_json,
    copy_media,
)

DEFAULT_SILENCE_THRESHOLD_MS = 500
DEFAULT_FILLER_WORDS = ("um", "uh", "er")
DEFAULT_TARGET_LUFS = -14.0
DEFAULT_TARGET_BRIGHTNESS = 128

_TERMINATORS = ".!?;。！？；"

OP_KEEP = "keep"
OP_DROP = "drop"
OP_TRANSITION = "transition"

DROP_SILENCE = "silence"
DROP_FILLER = "filler"
DROP_REPEATED_TAKE = "repeated_take"


def _check_uniform(media_list: list[SynthMedia]) -> None:
    first = media_list[0]
    for m in media_list[1:]:
        if (m.width, m.height, m.fps) != (first.width, first.height, first.fps):
            raise MixedDimensions(
                f"{m.width}x{m.height}@{m.fps} differs from "
                f"{first.width}x{first.height}@{first.fps}")


def concat_videos(segments: list[SynthMedia],
                  source_ids: list[str] | None = None) -> SynthMedia:
    """Concatenate videos end to end, shifting frame and audio timestamps."""
    if not segments:
        raise EmptyInput("concat_videos needs at least one segment")
    for seg in segments:
        if seg.kind != KIND_VIDEO:
            raise WrongKind(f"concat_videos takes videos, got {seg.kind}")
    _check_uniform(segments)

    first = segments[0]
    frames: list[SynthFrame] = []
    audio: list[AudioSegment] = []
    starts: list[int] = []
    offset = 0
    for seg in segments:
        starts.append(offset)
        copied = copy_media(seg)
        for f in copied.frames:
            f.t_ms += offset
            frames.append(f)
        for s in copied.audio:
            audio.append(AudioSegment(s.t0_ms + offset, s.t1_ms + offset,
                                      s.text, s.kind, s.loudness_lufs))
        offset += seg.duration_ms

    meta = {"concat_boundaries_ms": ",".join(str(s) for s in starts)}
    if source_ids is not None:
        meta["concat_sources"] = ",".join(source_ids)
    return SynthMedia(kind=KIND_VIDEO, width=first.width, height=first.height,
                      fps=first.fps, duration_ms=offset, frames=frames, audio=audio,
                      meta=meta)


@dataclass(frozen=True)
class Transcript:
    """Mock speech recognition output: the source's audio segments, verbatim."""

    source_id: str
    width: int
    height: int
    fps: int
    duration_ms: int
    segments: tuple[AudioSegment, ...]

    def to_obj(self) -> dict[str, Any]:
        return {
            "duration_ms": self.duration_ms,
            "segments": [
                {"kind": s.kind, "t0_ms": s.t0_ms, "t1_ms": s.t1_ms, "text": s.text}
                for s in self.segments
            ],
            "source_id": self.source_id,
        }


def transcribe(video: SynthMedia, source_id: str = "") -> Transcript:
    if video.kind != KIND_VIDEO:
        raise WrongKind(f"transcribe takes a video, got {video.kind}")
    if not video.audio:
        raise NoAudio(f"source {source_id or '<unnamed>'} has no audio track")
    return Transcript(source_id=source_id, width=video.width, height=video.height,
                      fps=video.fps, duration_ms=video.duration_ms,
                      segments=tuple(copy_media(video).audio))


@dataclass(frozen=True)
class SegmentRef:
    source_id: str
    t0_ms: int
    t1_ms: int
    text: str
    kind: str


@dataclass(frozen=True)
class EdlOp:
    op: str  # keep | drop | transition
    segment: SegmentRef | None = None
    reason: str = ""
    at_ms: int = -1
    effect: str = "fade"


@dataclass
class EditDecisionList:
    operations: list[EdlOp] = field(default_factory=list)
    sources: list[str] = field(default_factory=list)

    def keeps(self) -> list[EdlOp]:
        return [op for op in self.operations if op.op == OP_KEEP]

    def to_obj(self) -> dict[str, Any]:
        ops = []
        for op in self.operations:
            if op.op == OP_TRANSITION:
                ops.append({"at_ms": op.at_ms, "effect": op.effect, "op": op.op})
            else:
                seg = op.segment
                entry: dict[str, Any] = {
                    "kind": seg.kind, "op": op.op, "source": seg.source_id,
                    "t0_ms": seg.t0_ms, "t1_ms": seg.t1_ms, "text": seg.text,
                }
                if op.op == OP_DROP:
                    entry["reason"] = op.reason
                ops.append(entry)
        return {"operations": ops, "sources": list(self.sources)}


def edl_from_obj(obj: dict[str, Any]) -> EditDecisionList:
    ops: list[EdlOp] = []
    for entry in obj["operations"]:
        if entry["op"] == OP_TRANSITION:
            ops.append(EdlOp(OP_TRANSITION, at_ms=entry["at_ms"], effect=entry["effect"]))
        else:
            seg = SegmentRef(entry["source"], entry["t0_ms"], entry["t1_ms"],
                             entry["text"], entry["kind"])
            ops.append(EdlOp(entry["op"], segment=seg, reason=entry.get("reason", "")))
    return EditDecisionList(operations=ops, sources=list(obj["sources"]))


def normalize_take_text(text: str) -> str:
    lowered = text.lower().strip()
    return lowered.translate(str.maketrans("", "", _TERMINATORS)).strip()


def _is_filler(text: str, lexicon: tuple[str, ...]) -> bool:
    tokens = normalize_take_text(text).split()
    return bool(tokens) and all(t in lexicon for t in tokens)


def plan_edit(transcripts: list[Transcript], goal: str = "",
              silence_threshold_ms: int = DEFAULT_SILENCE_THRESHOLD_MS,
              filler_words: tuple[str, ...] = DEFAULT_FILLER_WORDS) -> EditDecisionList:
    """Transcript-driven edit plan.

    Drops silences longer than the threshold and filler-only speech, then
    collapses runs of equal-normalized-text takes keeping only the last
    (best take = last take). Fade transitions mark every cut junction.
    The goal string is carried for context only; the rules are fixed.
    """
    if not transcripts:
        raise EmptyInput("plan_edit needs at least one transcript")
    dims = {(t.width, t.height, t.fps) for t in transcripts}
    if len(dims) > 1:
        raise MixedDimensions(f"sources disagree on dimensions: {sorted(dims)}")

    # first pass: silence and filler drops
    entries: list[tuple[SegmentRef, str]] = []  # (segment, "" | drop reason)
    for t in transcripts:
        for s in t.segments:
            ref = SegmentRef(t.source_id, s.t0_ms, s.t1_ms, s.text, s.kind)
            if s.kind == "silence" and (s.t1_ms - s.t0_ms) > silence_threshold_ms:
                entries.append((ref, DROP_SILENCE))
            elif s.kind == "speech" and _is_filler(s.text, tuple(filler_words)):
                entries.append((ref, DROP_FILLER))
            else:
                entries.append((ref, ""))

    # second pass: among consecutive surviving speech takes with equal
    # normalized text, only the last survives
    speech_idx = [i for i, (ref, reason) in enumerate(entries)
                  if not reason and ref.kind == "speech"]
    for pos in range(len(speech_idx) - 1):
        cur, nxt = speech_idx[pos], speech_idx[pos + 1]
        if (normalize_take_text(entries[cur][0].text)
                == normalize_take_text(entries[nxt][0].text)):
            entries[cur] = (entries[cur][0], DROP_REPEATED_TAKE)

    kept = [ref for ref, reason in entries if not reason]
    if not kept:
        raise EmptyAfterEdit("every segment was dropped")

    # assemble operations with transitions at non-contiguous keep junctions
    operations: list[EdlOp] = []
    out_cursor = 0
    prev_keep: SegmentRef | None = None
    for ref, reason in entries:
        if reason:
            operations.append(EdlOp(OP_DROP, segment=ref, reason=reason))
            continue
        contiguous = (prev_keep is not None
                      and prev_keep.source_id == ref.source_id
                      and prev_keep.t1_ms == ref.t0_ms)
        if prev_keep is not None and not contiguous:
            operations.append(EdlOp(OP_TRANSITION, at_ms=out_cursor))
        operations.append(EdlOp(OP_KEEP, segment=ref))
        out_cursor += ref.t1_ms - ref.t0_ms
        prev_keep = ref
    return EditDecisionList(operations=operations,
                            sources=[t.source_id for t in transcripts])


def apply_edit(sources: dict[str, SynthMedia], edl: EditDecisionList) -> SynthMedia:
    """Extract kept ranges on the frame grid and splice them into a gapless timeline."""
    media_list = [sources[sid] for sid in edl.sources]
    if not media_list:
        raise EmptyInput("apply_edit needs at least one source")
    _check_uniform(media_list)
    first = media_list[0]
    interval_num, interval_den = 1000, first.fps  # frame interval = 1000/fps ms

    frames: list[SynthFrame] = []
    audio: list[AudioSegment] = []
    transition_marks: list[int] = []
    cursor = 0
    for op in edl.operations:
        if op.op == OP_TRANSITION:
            transition_marks.append(op.at_ms)
            continue
        if op.op != OP_KEEP:
            continue
        seg = op.segment
        src = sources.get(seg.source_id)
        if src is None:
            raise RangeOutOfBounds(f"unknown source {seg.source_id!r}")
        if seg.t0_ms < 0 or seg.t1_ms > src.duration_ms:
            raise RangeOutOfBounds(
                f"[{seg.t0_ms},{seg.t1_ms}) outside source duration {src.duration_ms}")
        if (seg.t0_ms * interval_den) % interval_num or (seg.t1_ms * interval_den) % interval_num:
            raise RangeOutOfBounds(
                f"[{seg.t0_ms},{seg.t1_ms}) not aligned to the {interval_num}/{interval_den} ms "
                f"frame grid")
        for f in copy_media(src).frames:
            if seg.t0_ms <= f.t_ms < seg.t1_ms:
                f.t_ms = cursor + (f.t_ms - seg.t0_ms)
                frames.append(f)
        if seg.text or seg.kind == "silence":
            loudness = next((s.loudness_lufs for s in src.audio
                             if s.t0_ms == seg.t0_ms and s.t1_ms == seg.t1_ms), 0.0)
            audio.append(AudioSegment(cursor, cursor + (seg.t1_ms - seg.t0_ms),
                                      seg.text, seg.kind, loudness))
        cursor += seg.t1_ms - seg.t0_ms

    for at_ms in transition_marks:
        left = max((f for f in frames if f.t_ms < at_ms), key=lambda f: f.t_ms, default=None)
        right = min((f for f in frames if f.t_ms >= at_ms), key=lambda f: f.t_ms, default=None)
        for f in (left, right):
            if f is not None:
                f.overlays.append(OverlayEvent(text="fade", role="transition",
                                               position="center"))

    return SynthMedia(kind=KIND_VIDEO, width=first.width, height=first.height,
                      fps=first.fps, duration_ms=cursor, frames=frames, audio=audio,
                      meta={"edl": canonical_json(edl.to_obj())})


def normalize_loudness(video: SynthMedia,
                       target_lufs: float = DEFAULT_TARGET_LUFS) -> SynthMedia:
    """Set every speech segment to the target loudness; silences stay untouched."""
    if not video.audio:
        raise NoAudio("nothing to normalize: no audio segments")
    out = copy_media(video)
    gains: list[str] = []
    for s in out.audio:
        if s.kind == "speech":
            gains.append(str(target_lufs - s.loudness_lufs))
            s.loudness_lufs = target_lufs
    out.meta["gain_applied"] = ",".join(gains)
    return out


def mean_brightness(video: SynthMedia) -> int:
    """Mean over frames of the per-frame channel mean, rounded half-up."""
    n = len(video.frames)
    total = sum(sum(f.fill_rgb) for f in video.frames)
    return (2 * total + 3 * n) // (6 * n)


def auto_color(video: SynthMedia,
               target_brightness: int = DEFAULT_TARGET_BRIGHTNESS) -> SynthMedia:
    """Shift every channel so the mean frame brightness hits the target, clamped to [0,255]."""
    if video.kind != KIND_VIDEO:
        raise WrongKind(f"auto_color takes a video, got {video.kind}")
    if not video.frames:
        raise WrongKind("auto_color needs at least one frame")
    before = mean_brightness(video)
    shift = target_brightness - before
    out = copy_media(video)
    for f in out.frames:
        f.fill_rgb = tuple(min(255, max(0, c + shift)) for c in f.fill_rgb)  # type: ignore
    out.meta["brightness_before"] = str(before)
    out.meta["brightness_after"] = str(mean_brightness(out))
    return out
