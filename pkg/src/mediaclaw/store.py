"""File-backed artifact store with lineage.

One canonical-JSON manifest per artifact under `artifacts/<id>.json` plus an
append-only `artifacts/index.jsonl`. Puts are atomic (write temp, rename);
artifacts are immutable after publication, so reads need no locks.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable

from .errors import InvalidManifest, NotFound
from .media import SynthMedia, canonical_json, media_from_obj, media_to_obj, validate_media

DIRECT_INVOKE = "direct-invoke"


@dataclass
class MediaArtifact:
    artifact_id: str
    kind: str
    payload: SynthMedia
    # Either the string "direct-invoke" or a (run_id, step_index) reference.
    produced_by: str | tuple[str, int]
    inputs: list[str] = field(default_factory=list)
    created_at: str = ""


def _produced_by_to_obj(p: str | tuple[str, int]) -> Any:
    if p == DIRECT_INVOKE:
        return DIRECT_INVOKE
    run_id, step_index = p
    return {"run_id": run_id, "step_index": step_index}


def _produced_by_from_obj(obj: Any) -> str | tuple[str, int]:
    if obj == DIRECT_INVOKE:
        return DIRECT_INVOKE
    return (obj["run_id"], obj["step_index"])


def artifact_to_obj(a: MediaArtifact) -> dict[str, Any]:
    return {
        "artifact_id": a.artifact_id,
        "created_at": a.created_at,
        "inputs": list(a.inputs),
        "kind": a.kind,
        "payload": media_to_obj(a.payload),
        "produced_by": _produced_by_to_obj(a.produced_by),
    }


def artifact_from_obj(obj: dict[str, Any]) -> MediaArtifact:
    return MediaArtifact(
        artifact_id=obj["artifact_id"],
        kind=obj["kind"],
        payload=media_from_obj(obj["payload"]),
        produced_by=_produced_by_from_obj(obj["produced_by"]),
        inputs=list(obj["inputs"]),
        created_at=obj["created_at"],
    )


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class ArtifactStore:
    """Thread-safe artifact storage. No deduplication: identical payloads get distinct ids."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._index_path = self.root / "index.jsonl"
        self._lock = threading.Lock()
        self._cache: dict[str, MediaArtifact] = {}

    def put(self, payload: SynthMedia,
            produced_by: str | tuple[str, int] = DIRECT_INVOKE,
            inputs: Iterable[str] = ()) -> str:
        validate_media(payload)
        inputs = list(inputs)
        for ref in inputs:
            if not self.exists(ref):
                raise InvalidManifest(f"unknown input artifact {ref!r}", rule="unknown_input")
        artifact = MediaArtifact(
            artifact_id=uuid.uuid4().hex,
            kind=payload.kind,
            payload=media_from_obj(media_to_obj(payload)),  # defensive copy
            produced_by=produced_by,
            inputs=inputs,
            created_at=_now_iso(),
        )
        body = canonical_json(artifact_to_obj(artifact))
        index_line = canonical_json({
            "artifact_id": artifact.artifact_id,
            "created_at": artifact.created_at,
            "kind": artifact.kind,
            "produced_by": _produced_by_to_obj(artifact.produced_by),
        })
        final = self.root / f"{artifact.artifact_id}.json"
        tmp = self.root / f".{artifact.artifact_id}.tmp"
        tmp.write_text(body, encoding="utf-8")
        os.replace(tmp, final)
        with self._lock:
            with open(self._index_path, "a", encoding="utf-8") as fh:
                fh.write(index_line + "\n")
            self._cache[artifact.artifact_id] = artifact
        return artifact.artifact_id

    def get(self, artifact_id: str) -> MediaArtifact:
        with self._lock:
            cached = self._cache.get(artifact_id)
        if cached is not None:
            return cached
        path = self.root / f"{artifact_id}.json"
        if not path.is_file():
            raise NotFound(f"no artifact {artifact_id!r}")
        artifact = artifact_from_obj(json.loads(path.read_text(encoding="utf-8")))
        with self._lock:
            self._cache[artifact_id] = artifact
        return artifact

    def get_payload(self, artifact_id: str) -> SynthMedia:
        return self.get(artifact_id).payload

    def exists(self, artifact_id: str) -> bool:
        with self._lock:
            if artifact_id in self._cache:
                return True
        return (self.root / f"{artifact_id}.json").is_file()

    def count(self) -> int:
        return sum(1 for p in self.root.glob("*.json"))

    def index_entries(self) -> list[dict[str, Any]]:
        if not self._index_path.is_file():
            return []
        entries = []
        with open(self._index_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    entries.append(json.loads(line))
        return entries
