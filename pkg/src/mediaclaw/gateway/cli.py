"""Command-line surface over the same registry/engine entry points the
gateway serves. Exit codes: 0 success, 1 platform error, 2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..engine import RUN_SUCCEEDED, run_to_obj
from ..errors import MediaClawError
from ..media import canonical_json, media_to_obj
from ..routing import config_from_obj, config_to_obj, validate_config
from ..store import artifact_to_obj
from ..system import MediaClawSystem, resolve_home


def _fail(exc: MediaClawError) -> None:
    click.echo(canonical_json(exc.to_api_error()), err=True)
    sys.exit(1)


def _parse_json_params(raw: str) -> dict:
    try:
        params = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"--params must be valid JSON: {exc}")
    if not isinstance(params, dict):
        raise click.UsageError("--params must be a JSON object")
    return params


@click.group()
@click.option("--home", type=click.Path(path_type=Path), default=None,
              help="Data directory (defaults to $MEDIACLAW_HOME or ./mediaclaw_home).")
@click.pass_context
def main(ctx: click.Context, home: Path | None):
    """MediaClaw: deterministic multimodal capability orchestration."""
    ctx.obj = {"home": resolve_home(home)}


def _system(ctx: click.Context) -> MediaClawSystem:
    try:
        return MediaClawSystem(home=ctx.obj["home"])
    except MediaClawError as exc:  # e.g. routing.json fails validation
        _fail(exc)
        raise AssertionError("unreachable")


@main.group()
def capabilities():
    """Inspect the unified tool pool."""


@capabilities.command("list")
@click.pass_context
def capabilities_list(ctx):
    system = _system(ctx)
    for descriptor, providers in system.registry.list_capabilities():
        obj = descriptor.to_obj()
        obj["providers"] = providers
        click.echo(canonical_json(obj))


@main.command()
@click.argument("tool_name")
@click.option("--params", "params_json", default="{}", help="Tool parameters as JSON.")
@click.option("--provider", default=None, help="Request-level provider hint.")
@click.option("--model", default=None, help="Request-level model hint.")
@click.pass_context
def invoke(ctx, tool_name: str, params_json: str, provider: str | None, model: str | None):
    """Invoke one tool directly."""
    params = _parse_json_params(params_json)
    system = _system(ctx)
    try:
        result = system.registry.invoke_tool(tool_name, params,
                                             provider_hint=provider, model_hint=model)
    except MediaClawError as exc:
        _fail(exc)
    click.echo(canonical_json(result.to_obj()))


@main.group()
def skill():
    """Run skill workflows."""


@skill.command("run")
@click.argument("name")
@click.option("--params", "params_json", default="{}", help="Skill parameters as JSON.")
@click.option("--follow", is_flag=True, help="Print run events as they arrive.")
@click.pass_context
def skill_run(ctx, name: str, params_json: str, follow: bool):
    """Run a skill and wait for it to finish."""
    params = _parse_json_params(params_json)
    system = _system(ctx)
    try:
        run_id = system.engine.run_skill(name, params)
        click.echo(canonical_json({"run_id": run_id}))
        if follow:
            for ev in system.engine.stream_events(run_id):
                click.echo(canonical_json(ev.to_obj()))
        record = system.engine.wait(run_id)
    except MediaClawError as exc:
        _fail(exc)
    click.echo(canonical_json(run_to_obj(record)))
    if record.state != RUN_SUCCEEDED:
        sys.exit(1)


@main.group()
def runs():
    """Inspect skill runs."""


@runs.command("list")
@click.pass_context
def runs_list(ctx):
    system = _system(ctx)
    for record in system.engine.list_runs():
        obj = run_to_obj(record)
        click.echo(canonical_json({k: obj[k] for k in
                                   ("run_id", "skill_name", "state", "started_at", "ended_at")}))


@runs.command("show")
@click.argument("run_id")
@click.pass_context
def runs_show(ctx, run_id: str):
    system = _system(ctx)
    try:
        record = system.engine.get_run(run_id)
    except MediaClawError as exc:
        _fail(exc)
    click.echo(canonical_json(run_to_obj(record)))


@main.group()
def artifacts():
    """Inspect stored artifacts."""


@artifacts.command("get")
@click.argument("artifact_id")
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Write the payload manifest to this path instead of stdout.")
@click.pass_context
def artifacts_get(ctx, artifact_id: str, out: Path | None):
    system = _system(ctx)
    try:
        artifact = system.store.get(artifact_id)
    except MediaClawError as exc:
        _fail(exc)
    if out is not None:
        out.write_text(canonical_json(media_to_obj(artifact.payload)), encoding="utf-8")
        click.echo(canonical_json({"artifact_id": artifact_id, "written": str(out)}))
    else:
        click.echo(canonical_json(artifact_to_obj(artifact)))


@main.group()
def config():
    """Validate and apply routing configuration."""


def _load_config_file(path: Path):
    try:
        return config_from_obj(json.loads(path.read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read config {path}: {exc}")


@config.command("validate")
@click.argument("path", type=click.Path(path_type=Path, exists=True))
@click.pass_context
def config_validate(ctx, path: Path):
    violations = validate_config(_load_config_file(path))
    click.echo(canonical_json({"violations": violations}))
    if violations:
        sys.exit(1)


@config.command("apply")
@click.argument("path", type=click.Path(path_type=Path, exists=True))
@click.pass_context
def config_apply(ctx, path: Path):
    system = _system(ctx)
    try:
        version = system.apply_config(_load_config_file(path))
    except MediaClawError as exc:
        _fail(exc)
    click.echo(canonical_json({"version": version}))


@config.command("show")
@click.pass_context
def config_show(ctx):
    system = _system(ctx)
    click.echo(canonical_json(config_to_obj(system.routing.config)))


def _parse_listen(listen: str) -> tuple[str, int]:
    host, sep, port = listen.rpartition(":")
    if not sep or not port.isdigit():
        raise click.UsageError("--listen must look like HOST:PORT")
    return host or "127.0.0.1", int(port)


@main.command()
@click.option("--listen", default="127.0.0.1:8787", help="Bind address HOST:PORT.")
@click.pass_context
def serve(ctx, listen: str):
    """Serve the HTTP gateway."""
    import uvicorn

    from .app import create_app

    host, port = _parse_listen(listen)
    system = _system(ctx)
    uvicorn.run(create_app(system), host=host, port=port, log_level="warning")


@main.command("stub-serve")
@click.option("--listen", default="127.0.0.1:8788", help="Bind address HOST:PORT.")
def stub_serve(listen: str):
    """Serve the deterministic stub provider (mirrors the mock rules over HTTP)."""
    from ..providers.stub_server import StubProviderServer

    host, port = _parse_listen(listen)
    server = StubProviderServer(host, port)
    click.echo(canonical_json({"base_url": server.base_url}))
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.server_close()


if __name__ == "__main__":
    main()
