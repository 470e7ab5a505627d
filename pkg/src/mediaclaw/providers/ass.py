"""ASS subtitle subset: the Dialogue/Format slice the local burn tool consumes.

Timestamps are H:MM:SS.cc (centiseconds); override blocks `{...}` are
stripped on parse and literal \\N becomes a single space. The emitter and
parser round-trip exactly on centisecond-aligned events.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import OverlappingEvents, ParseError

_OVERRIDE_RE = re.compile(r"\{[^}]*\}")


@dataclass
class AssEvent:
    start_ms: int
    end_ms: int
    text: str
    style: str = "Default"


def parse_timestamp(raw: str, line_no: int) -> int:
    parts = raw.strip().split(":")
    if len(parts) != 3:
        raise ParseError(line_no, f"bad timestamp {raw!r}")
    try:
        hours = int(parts[0])
        minutes = int(parts[1])
        sec_str, dot, cs_str = parts[2].partition(".")
        seconds = int(sec_str)
        centis = int(cs_str) if dot else 0
    except ValueError:
        raise ParseError(line_no, f"bad timestamp {raw!r}") from None
    if minutes > 59 or seconds > 59 or (dot and len(cs_str) > 2):
        raise ParseError(line_no, f"bad timestamp {raw!r}")
    return ((hours * 60 + minutes) * 60 + seconds) * 1000 + centis * 10


def format_timestamp(ms: int) -> str:
    cs = ms // 10
    seconds, cs = divmod(cs, 100)
    minutes, seconds = divmod(seconds, 60)
    hours, minutes = divmod(minutes, 60)
    return f"{hours}:{minutes:02d}:{seconds:02d}.{cs:02d}"


def _clean_text(raw: str) -> str:
    return _OVERRIDE_RE.sub("", raw).replace("\\N", " ")


def parse_ass(text: str) -> list[AssEvent]:
    """Parse Dialogue events from the [Events] section; other sections ignored."""
    events: list[AssEvent] = []
    in_events = False
    columns: list[str] | None = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            in_events = stripped.lower() == "[events]"
            continue
        if not in_events or not stripped:
            continue
        key, sep, value = stripped.partition(":")
        if not sep:
            continue
        key = key.strip().lower()
        if key == "format":
            columns = [c.strip().lower() for c in value.split(",")]
            if "text" in columns and columns.index("text") != len(columns) - 1:
                raise ParseError(line_no, "Text must be the last Format column")
            continue
        if key != "dialogue":
            continue
        if columns is None:
            raise ParseError(line_no, "Dialogue before Format line")
        for required in ("start", "end", "style", "text"):
            if required not in columns:
                raise ParseError(line_no, f"Format line lacks {required!r} column")
        fields = value.lstrip().split(",", len(columns) - 1)
        if len(fields) != len(columns):
            raise ParseError(line_no, f"expected {len(columns)} fields, got {len(fields)}")
        row = dict(zip(columns, fields))
        start = parse_timestamp(row["start"], line_no)
        end = parse_timestamp(row["end"], line_no)
        if start >= end:
            raise ParseError(line_no, f"start {start} not before end {end}")
        events.append(AssEvent(start_ms=start, end_ms=end,
                               text=_clean_text(row["text"]), style=row["style"].strip()))
    return events


def check_non_overlapping(events: list[AssEvent]) -> list[AssEvent]:
    """Return events sorted by start; raise if any two overlap."""
    ordered = sorted(events, key=lambda e: (e.start_ms, e.end_ms))
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.start_ms < prev.end_ms:
            raise OverlappingEvents(
                f"[{prev.start_ms},{prev.end_ms}) overlaps [{cur.start_ms},{cur.end_ms})")
    return ordered


FORMAT_LINE = "Format: Layer, Start, End, Style, Name, MarginL, MarginR, MarginV, Effect, Text"


def emit_ass(events: list[AssEvent], title: str = "mediaclaw subtitles") -> str:
    ordered = check_non_overlapping(events)
    lines = [
        "[Script Info]",
        f"Title: {title}",
        "ScriptType: v4.00+",
        "",
        "[Events]",
        FORMAT_LINE,
    ]
    for e in ordered:
        start = format_timestamp(e.start_ms)
        end = format_timestamp(e.end_ms)
        lines.append(f"Dialogue: 0,{start},{end},{e.style},,0,0,0,,{e.text}")
    return "\n".join(lines) + "\n"
