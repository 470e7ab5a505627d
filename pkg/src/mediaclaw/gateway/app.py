"""HTTP gateway: the /v1 surface consumed by MediaUI and external systems.

Thin shim over the registry and engine; the CLI goes through the same entry
points, so both surfaces behave identically by construction.
"""

from __future__ import annotations

from typing import Any, Iterator

from fastapi import Body, FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse

from ..engine import run_to_obj
from ..errors import MediaClawError
from ..media import canonical_json, media_to_obj
from ..routing import config_from_obj, config_to_obj, validate_config
from ..store import artifact_to_obj
from ..system import MediaClawSystem

_STATUS_BY_CODE = {
    "NOT_FOUND": 404,
    "UNKNOWN_TOOL": 404,
    "UNKNOWN_SKILL": 404,
    "UNKNOWN_RUN": 404,
    "STALE_VERSION": 409,
    "TRANSPORT_ERROR": 502,
    "REMOTE_ERROR": 502,
    "INVALID_REMOTE_MANIFEST": 502,
    "HANDLER_FAILURE": 502,
}


def http_status(code: str) -> int:
    return _STATUS_BY_CODE.get(code, 400)


def _json(obj: Any, status: int = 200) -> Response:
    return Response(content=canonical_json(obj), status_code=status,
                    media_type="application/json")


def create_app(system: MediaClawSystem) -> FastAPI:
    app = FastAPI(title="mediaclaw", docs_url=None, redoc_url=None)
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    app.state.system = system

    @app.exception_handler(MediaClawError)
    async def handle_mediaclaw_error(_request: Request, exc: MediaClawError):
        return JSONResponse(status_code=http_status(exc.code), content=exc.to_api_error())

    @app.get("/healthz")
    def healthz():
        return _json({"config_version": system.routing.config.version, "status": "ok"})

    @app.get("/v1/capabilities")
    def list_capabilities():
        entries = []
        for descriptor, providers in system.registry.list_capabilities():
            obj = descriptor.to_obj()
            obj["providers"] = providers
            entries.append(obj)
        return _json({"capabilities": entries})

    @app.post("/v1/capabilities/{tool_name}:invoke")
    def invoke_tool(tool_name: str, body: dict = Body(default={})):
        result = system.registry.invoke_tool(
            tool_name,
            body.get("params") or {},
            provider_hint=body.get("provider"),
            model_hint=body.get("model"),
        )
        return _json(result.to_obj())

    @app.get("/v1/skills")
    def list_skills():
        skills = [
            {
                "description": s.description,
                "name": s.name,
                "params": [p.to_obj() for p in s.params],
            }
            for s in system.engine.skills()
        ]
        return _json({"skills": skills})

    @app.post("/v1/skills/{name}:run")
    def run_skill(name: str, body: dict = Body(default={})):
        run_id = system.engine.run_skill(name, body.get("params") or {})
        return _json({"run_id": run_id}, status=202)

    @app.get("/v1/runs")
    def list_runs():
        return _json({"runs": [run_to_obj(r) for r in system.engine.list_runs()]})

    @app.get("/v1/runs/{run_id}")
    def get_run(run_id: str):
        return _json(run_to_obj(system.engine.get_run(run_id)))

    @app.get("/v1/runs/{run_id}/events")
    def stream_run_events(run_id: str, request: Request, from_seq: int = 0):
        last_event_id = request.headers.get("last-event-id")
        if last_event_id is not None and last_event_id.isdigit():
            from_seq = int(last_event_id) + 1
        system.engine.get_run(run_id)  # raise UNKNOWN_RUN before streaming starts

        def sse() -> Iterator[str]:
            for ev in system.engine.stream_events(run_id, from_seq):
                yield (f"id: {ev.seq}\nevent: {ev.kind}\n"
                       f"data: {canonical_json(ev.to_obj())}\n\n")

        return StreamingResponse(sse(), media_type="text/event-stream",
                                 headers={"cache-control": "no-store"})

    @app.get("/v1/artifacts/{artifact_id}")
    def get_artifact(artifact_id: str):
        return _json(artifact_to_obj(system.store.get(artifact_id)))

    @app.get("/v1/artifacts/{artifact_id}/content")
    def get_artifact_content(artifact_id: str):
        return _json(media_to_obj(system.store.get(artifact_id).payload))

    @app.get("/v1/routing")
    def get_routing():
        return _json(config_to_obj(system.routing.config))

    @app.put("/v1/routing")
    def put_routing(body: dict = Body(default={})):
        config = config_from_obj(body)
        version = system.apply_config(config)
        return _json({"version": version})

    @app.post("/v1/routing:validate")
    def validate_routing(body: dict = Body(default={})):
        return _json({"violations": validate_config(config_from_obj(body))})

    return app
