"""Capability registry: provider bindings and the single invoke entry point.

Every caller (skills, gateway, CLI) goes through `invoke`; routed capabilities
resolve a provider via the routing table, local tools bypass routing entirely.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable

from . import capabilities as caps
from .capabilities import (
    BY_CAPABILITY,
    BY_TOOL_NAME,
    DESCRIPTORS,
    LOCAL,
    ResolvedArtifact,
    ToolDescriptor,
    validate_params,
)
from .errors import (
    DuplicateProvider,
    HandlerFailure,
    HintRejectedForLocalTool,
    MediaClawError,
    MissingHandler,
    SchemaViolation,
    UnknownTool,
)
from .media import SynthMedia, media_from_obj, media_to_obj
from .providers import http as http_provider
from .providers import local_tools
from .providers.ass import parse_ass
from .providers.mock import MOCK_HANDLERS
from .routing import STYLE_HTTP, STYLE_MOCK, ProviderSpec, RoutingTable
from .store import DIRECT_INVOKE, ArtifactStore

# Routed handlers receive the validated params and the resolved model name.
Handler = Callable[[dict[str, Any], str], SynthMedia]


def ignore_model(fn: Callable[[dict[str, Any]], SynthMedia]) -> Handler:
    """Adapt a params-only generator (like the mock rules) to the handler signature."""
    return lambda params, _model: fn(params)


@dataclass
class InvokeRequest:
    capability: str
    params: dict[str, Any] = field(default_factory=dict)
    provider_hint: str | None = None
    model_hint: str | None = None


@dataclass
class InvokeResult:
    artifact_id: str
    provider_used: str
    model_used: str
    elapsed_ms: int

    def to_obj(self) -> dict[str, Any]:
        return {
            "artifact_id": self.artifact_id,
            "elapsed_ms": self.elapsed_ms,
            "model_used": self.model_used,
            "provider_used": self.provider_used,
        }


def _local_burn_subtitles(params: dict[str, Any]) -> SynthMedia:
    video: ResolvedArtifact = params["video"]
    events = parse_ass(params["subtitles_ass"])
    return local_tools.burn_subtitles(video.payload, events)


def _local_replace_background(params: dict[str, Any]) -> SynthMedia:
    video: ResolvedArtifact = params["video"]
    background: ResolvedArtifact = params["background"]
    return local_tools.replace_background(video.payload, background.payload)


LOCAL_HANDLERS: dict[str, Handler] = {
    caps.BURN_SUBTITLES: _local_burn_subtitles,
    caps.REPLACE_BACKGROUND: _local_replace_background,
}


class CapabilityRegistry:
    """Read-mostly registry; registration goes through an exclusive writer lock."""

    def __init__(self, store: ArtifactStore, routing: RoutingTable):
        self.store = store
        self.routing = routing
        self._lock = threading.Lock()
        self._bindings: dict[str, dict[str, Handler]] = {}       # explicit registrations
        self._auto_bindings: dict[str, dict[str, Handler]] = {}  # derived from config
        self.bind_from_config()

    # registration

    def register_provider_binding(self, provider: ProviderSpec,
                                  implementations: dict[str, Handler]) -> None:
        with self._lock:
            if provider.name in self._bindings:
                raise DuplicateProvider(f"provider {provider.name!r} already registered",
                                        provider=provider.name)
            for capability in provider.supported:
                if capability not in implementations:
                    raise MissingHandler(
                        f"provider {provider.name!r} declares {capability} without a handler",
                        provider=provider.name, capability=capability)
            self._bindings[provider.name] = dict(implementations)

    def bind_from_config(self, config=None, merge: bool = False) -> None:
        """Derive handlers for config providers that have no explicit registration.

        Mock-style providers share the deterministic mock handlers; http-style
        providers get a generic adapter against their base_url. With `merge`,
        new bindings are added without dropping current ones (used to pre-bind
        an incoming config before the routing snapshot swaps).
        """
        config = config if config is not None else self.routing.config
        auto: dict[str, dict[str, Handler]] = {}
        with self._lock:
            for spec in config.providers:
                if spec.name in self._bindings:
                    continue
                if spec.style == STYLE_MOCK:
                    auto[spec.name] = {c: ignore_model(MOCK_HANDLERS[c])
                                       for c in spec.supported if c in MOCK_HANDLERS}
                elif spec.style == STYLE_HTTP:
                    auto[spec.name] = {c: http_provider.make_http_handler(spec.base_url, c)
                                       for c in spec.supported}
            if merge:
                self._auto_bindings.update(auto)
            else:
                self._auto_bindings = auto

    def _handler(self, provider: str, capability: str) -> Handler:
        with self._lock:
            explicit = self._bindings.get(provider)
            if explicit is not None:
                handler = explicit.get(capability)
            else:
                handler = (self._auto_bindings.get(provider) or {}).get(capability)
        if handler is None:
            raise HandlerFailure(provider, f"no implementation bound for {capability}")
        return handler

    # queries

    def list_capabilities(self) -> list[tuple[ToolDescriptor, list[str]]]:
        config = self.routing.config
        out: list[tuple[ToolDescriptor, list[str]]] = []
        for descriptor in DESCRIPTORS:
            if descriptor.routing_class == LOCAL:
                out.append((descriptor, ["local"]))
            else:
                supporting = [p.name for p in config.providers
                              if descriptor.capability in p.supported]
                out.append((descriptor, supporting))
        return out

    def descriptor_for_tool(self, tool_name: str) -> ToolDescriptor:
        descriptor = BY_TOOL_NAME.get(tool_name)
        if descriptor is None:
            raise UnknownTool(f"no tool named {tool_name!r}", tool_name=tool_name)
        return descriptor

    # invocation

    def invoke(self, request: InvokeRequest,
               run_context: tuple[str, int] | None = None) -> InvokeResult:
        descriptor = BY_CAPABILITY.get(request.capability)
        if descriptor is None:
            raise UnknownTool(f"no capability named {request.capability!r}",
                              capability=request.capability)

        input_ids: list[str] = []

        def resolve(param: str, artifact_id: str) -> ResolvedArtifact:
            if not self.store.exists(artifact_id):
                raise SchemaViolation(param, f"{param} references unknown artifact {artifact_id!r}")
            if artifact_id not in input_ids:
                input_ids.append(artifact_id)
            return ResolvedArtifact(artifact_id, self.store.get_payload(artifact_id))

        resolved = validate_params(descriptor.param_schema, request.params, resolve)

        started = time.monotonic()
        if descriptor.routing_class == LOCAL:
            if request.provider_hint is not None or request.model_hint is not None:
                raise HintRejectedForLocalTool(
                    f"{descriptor.tool_name} runs locally; provider/model hints are not allowed",
                    tool_name=descriptor.tool_name)
            payload = LOCAL_HANDLERS[request.capability](resolved)
            provider_used, model_used = "local", ""
        else:
            binding = self.routing.resolve(request.capability,
                                           request.provider_hint, request.model_hint)
            handler = self._handler(binding.provider, request.capability)
            try:
                payload = handler(resolved, binding.model)
            except MediaClawError:
                raise
            except Exception as exc:  # provider bugs become HandlerFailure
                raise HandlerFailure(binding.provider, f"{type(exc).__name__}: {exc}") from exc
            provider_used, model_used = binding.provider, binding.model

        payload = media_from_obj(media_to_obj(payload))
        payload.meta["provider"] = provider_used
        payload.meta["model"] = model_used
        artifact_id = self.store.put(payload,
                                     produced_by=run_context or DIRECT_INVOKE,
                                     inputs=input_ids)
        elapsed_ms = int((time.monotonic() - started) * 1000)
        return InvokeResult(artifact_id, provider_used, model_used, elapsed_ms)

    def invoke_tool(self, tool_name: str, params: dict[str, Any],
                    provider_hint: str | None = None, model_hint: str | None = None,
                    run_context: tuple[str, int] | None = None) -> InvokeResult:
        descriptor = self.descriptor_for_tool(tool_name)
        return self.invoke(InvokeRequest(descriptor.capability, params,
                                         provider_hint, model_hint), run_context)
