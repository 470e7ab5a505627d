"""Skill workflow runtime.

Executes a skill as a planned, static sequence of steps (with parallel
fan-out groups), records lineage, streams a gapless per-run event log, and
persists everything under `runs/<run_id>/` so replay works after restart.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Iterator

from .capabilities import ParamSpec, validate_params
from .errors import MediaClawError, ParamViolation, SchemaViolation, UnknownRun, UnknownSkill
from .media import SynthMedia, canonical_json
from .registry import CapabilityRegistry, InvokeRequest, InvokeResult
from .store import ArtifactStore

RETRYABLE_ERRORS = frozenset({"TRANSPORT_ERROR", "REMOTE_ERROR", "HANDLER_FAILURE"})
RETRY_BACKOFF_S = 0.1

RUN_PENDING = "pending"
RUN_RUNNING = "running"
RUN_SUCCEEDED = "succeeded"
RUN_FAILED = "failed"

EV_RUN_STARTED = "run_started"
EV_STEP_STARTED = "step_started"
EV_ARTIFACT_PRODUCED = "artifact_produced"
EV_STEP_RETRIED = "step_retried"
EV_STEP_FAILED = "step_failed"
EV_STEP_SUCCEEDED = "step_succeeded"
EV_RUN_FINISHED = "run_finished"

RESTART_CODE = "RESTART"


@dataclass(frozen=True)
class RetryPolicy:
    """Only transport/remote/handler failures are ever retryable."""

    max_attempts: int = 1
    retry_on: frozenset[str] = RETRYABLE_ERRORS


@dataclass(frozen=True)
class StepSpec:
    name: str
    body: Callable[["StepContext"], None]
    inputs: tuple[str, ...] = ()  # names of earlier steps this step reads
    group: str | None = None  # consecutive steps sharing a group run in parallel
    retry: RetryPolicy = RetryPolicy()


@dataclass
class StepRecord:
    name: str
    state: str = RUN_PENDING
    attempts: int = 0
    outputs: list[str] = field(default_factory=list)


@dataclass
class SkillRun:
    run_id: str
    skill_name: str = ""
    params: dict[str, Any] = field(default_factory=dict)
    state: str = RUN_PENDING
    steps: list[StepRecord] = field(default_factory=list)
    final_outputs: list[str] = field(default_factory=list)
    started_at: str = ""
    ended_at: str = ""


@dataclass(frozen=True)
class RunEvent:
    run_id: str
    seq: int
    kind: str
    payload: dict[str, Any]

    def to_obj(self) -> dict[str, Any]:
        return {"kind": self.kind, "payload": self.payload,
                "run_id": self.run_id, "seq": self.seq}


@dataclass(frozen=True)
class SkillDefinition:
    name: str
    params: tuple[ParamSpec, ...]
    plan: Callable[[dict[str, Any]], list[StepSpec]]
    description: str = ""


def run_to_obj(run: SkillRun) -> dict[str, Any]:
    return {
        "ended_at": run.ended_at,
        "final_outputs": list(run.final_outputs),
        "params": run.params,
        "run_id": run.run_id,
        "skill_name": run.skill_name,
        "started_at": run.started_at,
        "state": run.state,
        "steps": [
            {"attempts": s.attempts, "name": s.name, "outputs": list(s.outputs),
             "state": s.state}
            for s in run.steps
        ],
    }


def run_from_obj(obj: dict[str, Any]) -> SkillRun:
    return SkillRun(
        run_id=obj["run_id"],
        skill_name=obj["skill_name"],
        params=obj["params"],
        state=obj["state"],
        steps=[StepRecord(name=s["name"], state=s["state"], attempts=s["attempts"],
                          outputs=list(s["outputs"])) for s in obj["steps"]],
        final_outputs=list(obj["final_outputs"]),
        started_at=obj["started_at"],
        ended_at=obj["ended_at"],
    )


def fold_events(run_id: str, events: list[RunEvent]) -> SkillRun:
    """Rebuild the run record purely from its event log (the replay property)."""
    run = SkillRun(run_id=run_id)
    for ev in events:
        p = ev.payload
        if ev.kind == EV_RUN_STARTED:
            run.skill_name = p["skill_name"]
            run.params = p["params"]
            run.started_at = p["started_at"]
            run.state = RUN_RUNNING
            run.steps = [StepRecord(name=name) for name in p["step_names"]]
        elif ev.kind == EV_STEP_STARTED:
            run.steps[p["step_index"]].state = RUN_RUNNING
        elif ev.kind == EV_STEP_SUCCEEDED:
            step = run.steps[p["step_index"]]
            step.state = RUN_SUCCEEDED
            step.attempts = p["attempts"]
            step.outputs = list(p["outputs"])
        elif ev.kind == EV_STEP_FAILED:
            step = run.steps[p["step_index"]]
            step.state = RUN_FAILED
            step.attempts = p["attempts"]
        elif ev.kind == EV_RUN_FINISHED:
            run.state = p["state"]
            run.final_outputs = list(p["final_outputs"])
            run.ended_at = p["ended_at"]
    return run


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class _RunHandle:
    def __init__(self, record: SkillRun, run_dir: Path, plan: list[StepSpec] | None):
        self.record = record
        self.run_dir = run_dir
        self.plan = plan
        self.lock = threading.RLock()
        self.cond = threading.Condition(self.lock)
        self.events: list[RunEvent] = []
        self.finished = False
        self.final_override: list[str] | None = None
        self.thread: threading.Thread | None = None

    @property
    def events_path(self) -> Path:
        return self.run_dir / "events.jsonl"

    @property
    def record_path(self) -> Path:
        return self.run_dir / "record.json"

    def persist_record(self) -> None:
        tmp = self.run_dir / ".record.tmp"
        tmp.write_text(canonical_json(run_to_obj(self.record)), encoding="utf-8")
        tmp.replace(self.record_path)

    def emit(self, kind: str, payload: dict[str, Any]) -> RunEvent:
        with self.cond:
            ev = RunEvent(self.record.run_id, len(self.events), kind, payload)
            self.events.append(ev)
            with open(self.events_path, "a", encoding="utf-8") as fh:
                fh.write(canonical_json(ev.to_obj()) + "\n")
            if kind == EV_RUN_FINISHED:
                self.finished = True
            self.cond.notify_all()
            return ev


class StepContext:
    """What a step body sees: validated params, prior outputs, invoke and store access."""

    def __init__(self, engine: "SkillEngine", handle: _RunHandle, spec: StepSpec, index: int):
        self._engine = engine
        self._handle = handle
        self._spec = spec
        self._index = index
        self.produced: list[str] = []

    @property
    def params(self) -> dict[str, Any]:
        return self._handle.record.params

    @property
    def store(self) -> ArtifactStore:
        return self._engine.store

    def outputs(self, step_name: str) -> list[str]:
        if step_name not in self._spec.inputs:
            raise RuntimeError(
                f"step {self._spec.name!r} reads {step_name!r} without declaring it")
        for step in self._handle.record.steps:
            if step.name == step_name:
                return list(step.outputs)
        raise RuntimeError(f"no step named {step_name!r}")

    def get_payload(self, artifact_id: str) -> SynthMedia:
        return self._engine.store.get_payload(artifact_id)

    def _record_artifact(self, artifact_id: str) -> None:
        self.produced.append(artifact_id)
        kind = self._engine.store.get(artifact_id).kind
        self._handle.emit(EV_ARTIFACT_PRODUCED, {
            "artifact_id": artifact_id, "kind": kind, "step_index": self._index,
        })

    def invoke(self, capability: str, params: dict[str, Any],
               provider: str | None = None, model: str | None = None) -> InvokeResult:
        result = self._engine.registry.invoke(
            InvokeRequest(capability, params, provider, model),
            run_context=(self._handle.record.run_id, self._index))
        self._record_artifact(result.artifact_id)
        return result

    def put(self, payload: SynthMedia, inputs: tuple[str, ...] | list[str] = ()) -> str:
        artifact_id = self._engine.store.put(
            payload, produced_by=(self._handle.record.run_id, self._index), inputs=inputs)
        self._record_artifact(artifact_id)
        return artifact_id

    def set_final_outputs(self, artifact_ids: list[str]) -> None:
        self._handle.final_override = list(artifact_ids)


class SkillEngine:
    def __init__(self, registry: CapabilityRegistry, store: ArtifactStore,
                 runs_dir: Path | str):
        self.registry = registry
        self.store = store
        self.runs_dir = Path(runs_dir)
        self.runs_dir.mkdir(parents=True, exist_ok=True)
        self._skills: dict[str, SkillDefinition] = {}
        self._handles: dict[str, _RunHandle] = {}
        self._lock = threading.Lock()

    # skills

    def register_skill(self, skill: SkillDefinition) -> None:
        self._skills[skill.name] = skill

    def skills(self) -> list[SkillDefinition]:
        return list(self._skills.values())

    def validate_skill_params(self, skill: SkillDefinition,
                              params: dict[str, Any]) -> dict[str, Any]:
        def keep_id(param: str, artifact_id: str) -> str:
            if not self.store.exists(artifact_id):
                raise SchemaViolation(param,
                                      f"{param} references unknown artifact {artifact_id!r}")
            return artifact_id

        try:
            return validate_params(skill.params, params, keep_id)
        except SchemaViolation as exc:
            raise ParamViolation(str(exc), param=exc.param) from None

    @staticmethod
    def _check_plan(steps: list[StepSpec]) -> None:
        seen: set[str] = set()
        for step in steps:
            for ref in step.inputs:
                if ref not in seen:
                    raise RuntimeError(
                        f"step {step.name!r} references {ref!r} which is not an earlier step")
            seen.add(step.name)

    # run lifecycle

    def run_skill(self, skill_name: str, params: dict[str, Any]) -> str:
        skill = self._skills.get(skill_name)
        if skill is None:
            raise UnknownSkill(f"no skill named {skill_name!r}", skill=skill_name)
        clean = self.validate_skill_params(skill, params)
        steps = skill.plan(clean)
        self._check_plan(steps)

        run_id = uuid.uuid4().hex
        run_dir = self.runs_dir / run_id
        run_dir.mkdir(parents=True)
        record = SkillRun(run_id=run_id, skill_name=skill_name, params=clean,
                          steps=[StepRecord(name=s.name) for s in steps])
        handle = _RunHandle(record, run_dir, steps)
        handle.persist_record()
        with self._lock:
            self._handles[run_id] = handle
        handle.thread = threading.Thread(target=self._execute, args=(handle,), daemon=True)
        handle.thread.start()
        return run_id

    def _execute(self, handle: _RunHandle) -> None:
        record = handle.record
        with handle.lock:
            record.state = RUN_RUNNING
            record.started_at = _now_iso()
        handle.emit(EV_RUN_STARTED, {
            "params": record.params,
            "skill_name": record.skill_name,
            "started_at": record.started_at,
            "step_names": [s.name for s in record.steps],
        })
        handle.persist_record()

        steps = handle.plan or []
        failed = False
        i = 0
        while i < len(steps) and not failed:
            group = steps[i].group
            if group is None:
                failed = not self._run_step(handle, steps[i], i)
                i += 1
                continue
            j = i
            while j < len(steps) and steps[j].group == group:
                j += 1
            with ThreadPoolExecutor(max_workers=j - i) as pool:
                futures = [pool.submit(self._run_step, handle, steps[k], k)
                           for k in range(i, j)]
                results = [f.result() for f in futures]
            failed = not all(results)
            i = j

        with handle.lock:
            record.state = RUN_FAILED if failed else RUN_SUCCEEDED
            record.ended_at = _now_iso()
            if failed:
                record.final_outputs = []
            elif handle.final_override is not None:
                record.final_outputs = list(handle.final_override)
            elif record.steps:
                record.final_outputs = list(record.steps[-1].outputs)
        # record hits disk before the final event so anyone who observes
        # run_finished can trust the persisted record
        handle.persist_record()
        handle.emit(EV_RUN_FINISHED, {
            "ended_at": record.ended_at,
            "final_outputs": list(record.final_outputs),
            "state": record.state,
        })

    def _run_step(self, handle: _RunHandle, spec: StepSpec, index: int) -> bool:
        record_step = handle.record.steps[index]
        attempt = 0
        while True:
            attempt += 1
            with handle.lock:
                record_step.state = RUN_RUNNING
            handle.emit(EV_STEP_STARTED, {
                "attempt": attempt, "step_index": index, "step_name": spec.name,
            })
            ctx = StepContext(self, handle, spec, index)
            try:
                spec.body(ctx)
            except MediaClawError as exc:
                if exc.code in spec.retry.retry_on and attempt < spec.retry.max_attempts:
                    handle.emit(EV_STEP_RETRIED, {
                        "attempt": attempt, "error_code": exc.code,
                        "message": exc.message, "step_index": index,
                    })
                    time.sleep(RETRY_BACKOFF_S)
                    continue
                self._fail_step(handle, record_step, index, attempt, exc.code, exc.message)
                return False
            except Exception as exc:  # step body bug: fail without retry
                self._fail_step(handle, record_step, index, attempt,
                                "INTERNAL", f"{type(exc).__name__}: {exc}")
                return False
            with handle.lock:
                record_step.state = RUN_SUCCEEDED
                record_step.attempts = attempt
                record_step.outputs = list(ctx.produced)
            handle.emit(EV_STEP_SUCCEEDED, {
                "attempts": attempt, "outputs": list(ctx.produced), "step_index": index,
            })
            return True

    @staticmethod
    def _fail_step(handle: _RunHandle, record_step: StepRecord, index: int,
                   attempts: int, code: str, message: str) -> None:
        with handle.lock:
            record_step.state = RUN_FAILED
            record_step.attempts = attempts
        handle.emit(EV_STEP_FAILED, {
            "attempts": attempts, "error_code": code, "message": message,
            "step_index": index,
        })

    # queries

    def _load_handle(self, run_id: str) -> _RunHandle:
        run_dir = self.runs_dir / run_id
        record_path = run_dir / "record.json"
        if not record_path.is_file():
            raise UnknownRun(f"no run {run_id!r}", run_id=run_id)
        events: list[RunEvent] = []
        events_path = run_dir / "events.jsonl"
        if events_path.is_file():
            with open(events_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        obj = json.loads(line)
                        events.append(RunEvent(obj["run_id"], obj["seq"], obj["kind"],
                                               obj["payload"]))
        record = run_from_obj(json.loads(record_path.read_text(encoding="utf-8")))
        handle = _RunHandle(record, run_dir, plan=None)
        handle.events = events
        if events and events[-1].kind != EV_RUN_FINISHED:
            # crash leftover: close the log so replay and streaming terminate
            handle.record.state = RUN_FAILED
            handle.record.ended_at = _now_iso()
            handle.record.final_outputs = []
            handle.emit(EV_RUN_FINISHED, {
                "ended_at": handle.record.ended_at,
                "error_code": RESTART_CODE,
                "final_outputs": [],
                "state": RUN_FAILED,
            })
            handle.record = fold_events(run_id, handle.events)
            handle.persist_record()
        handle.finished = bool(events) and handle.events[-1].kind == EV_RUN_FINISHED
        return handle

    def _get_handle(self, run_id: str) -> _RunHandle:
        with self._lock:
            handle = self._handles.get(run_id)
            if handle is None:
                handle = self._load_handle(run_id)
                self._handles[run_id] = handle
            return handle

    def get_run(self, run_id: str) -> SkillRun:
        handle = self._get_handle(run_id)
        with handle.lock:
            return run_from_obj(run_to_obj(handle.record))

    def list_runs(self) -> list[SkillRun]:
        ids = {p.name for p in self.runs_dir.iterdir() if p.is_dir()}
        with self._lock:
            ids.update(self._handles)
        runs = [self.get_run(run_id) for run_id in sorted(ids)]
        runs.sort(key=lambda r: (r.started_at or "~", r.run_id))
        return runs

    def stream_events(self, run_id: str, from_seq: int = 0) -> Iterator[RunEvent]:
        """Yield events with seq >= from_seq in order; ends after run_finished."""
        handle = self._get_handle(run_id)
        seq = max(from_seq, 0)
        while True:
            with handle.cond:
                while len(handle.events) <= seq and not handle.finished:
                    handle.cond.wait(timeout=30)
                batch = handle.events[seq:]
                done = handle.finished and not batch
            if done:
                return
            for ev in batch:
                yield ev
                seq = ev.seq + 1
            if batch and batch[-1].kind == EV_RUN_FINISHED:
                return

    def wait(self, run_id: str, timeout: float = 60.0) -> SkillRun:
        handle = self._get_handle(run_id)
        deadline = time.monotonic() + timeout
        with handle.cond:
            while not handle.finished:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    raise TimeoutError(f"run {run_id} did not finish within {timeout}s")
                handle.cond.wait(timeout=remaining)
        return self.get_run(run_id)

    def drain(self, timeout: float = 60.0) -> None:
        with self._lock:
            threads = [h.thread for h in self._handles.values() if h.thread is not None]
        for t in threads:
            t.join(timeout=timeout)
