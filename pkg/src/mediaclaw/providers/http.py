"""Generic HTTP provider adapter.

Speaks the in-house manifest protocol: POST {base_url}/invoke with a
canonical-JSON body {capability, model, params}, artifact params inlined as
their manifests; the response body is a manifest, validated before use.
"""

from __future__ import annotations

from typing import Any, Callable

import httpx

from ..capabilities import ResolvedArtifact
from ..errors import InvalidManifest, InvalidRemoteManifest, RemoteError, TransportError
from ..media import SynthMedia, canonical_json, media_from_obj, media_to_obj, validate_media

DEFAULT_TIMEOUT_S = 10.0


def serialize_params(params: dict[str, Any]) -> dict[str, Any]:
    """Inline resolved artifacts as manifest objects for the wire."""
    wire: dict[str, Any] = {}
    for key, value in params.items():
        if isinstance(value, ResolvedArtifact):
            wire[key] = media_to_obj(value.payload)
        elif isinstance(value, list) and value and isinstance(value[0], ResolvedArtifact):
            wire[key] = [media_to_obj(v.payload) for v in value]
        else:
            wire[key] = value
    return wire


def deserialize_params(wire: dict[str, Any]) -> dict[str, Any]:
    """Server side of the wire format: manifest objects become resolved artifacts."""
    params: dict[str, Any] = {}
    for key, value in wire.items():
        if isinstance(value, dict) and "kind" in value:
            params[key] = ResolvedArtifact("", media_from_obj(value))
        elif (isinstance(value, list) and value
              and all(isinstance(v, dict) and "kind" in v for v in value)):
            params[key] = [ResolvedArtifact("", media_from_obj(v)) for v in value]
        else:
            params[key] = value
    return params


def http_dispatch(base_url: str, capability: str, model: str,
                  params: dict[str, Any], timeout: float = DEFAULT_TIMEOUT_S) -> SynthMedia:
    body = canonical_json({
        "capability": capability,
        "model": model,
        "params": serialize_params(params),
    })
    url = base_url.rstrip("/") + "/invoke"
    try:
        response = httpx.post(url, content=body.encode("utf-8"),
                              headers={"content-type": "application/json"}, timeout=timeout)
    except httpx.HTTPError as exc:
        raise TransportError(f"POST {url} failed: {exc}", url=url) from exc
    if response.status_code != 200:
        raise RemoteError(response.status_code, response.text)
    try:
        payload = media_from_obj(response.json())
        validate_media(payload)
    except (InvalidManifest, ValueError) as exc:
        raise InvalidRemoteManifest(f"remote manifest rejected: {exc}", url=url) from exc
    return payload


def make_http_handler(base_url: str,
                      capability: str) -> Callable[[dict[str, Any], str], SynthMedia]:
    def handler(params: dict[str, Any], model: str) -> SynthMedia:
        return http_dispatch(base_url, capability, model, params)

    return handler
