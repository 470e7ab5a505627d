"""Three-level provider routing: request hint > capability default > global default.

Resolution is a pure function over an immutable config snapshot; updates go
through a single-writer gate and swap the snapshot atomically.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any

from .capabilities import LOCAL_CAPABILITIES, ROUTED_CAPABILITIES
from .errors import (
    NoRoute,
    StaleVersion,
    UnknownModel,
    UnknownProvider,
    UnsupportedCapability,
    ValidationFailed,
)

STYLE_MOCK = "mock"
STYLE_HTTP = "http"

LEVEL_REQUEST = "request"
LEVEL_CAPABILITY = "capability"
LEVEL_GLOBAL = "global"


@dataclass(frozen=True)
class ProviderSpec:
    name: str
    style: str  # mock | http
    base_url: str = ""
    supported: dict[str, tuple[str, ...]] = field(default_factory=dict)
    default_model: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class RoutingConfig:
    providers: tuple[ProviderSpec, ...] = ()
    capability_defaults: dict[str, str] = field(default_factory=dict)
    global_default: str = ""
    version: int = 1

    def provider(self, name: str) -> ProviderSpec | None:
        for p in self.providers:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class RouteBinding:
    provider: str
    model: str
    resolved_level: str  # request | capability | global


def _model_for(provider: ProviderSpec, capability: str, model_hint: str | None) -> str:
    models = provider.supported.get(capability, ())
    if model_hint is not None:
        if model_hint not in models:
            raise UnknownModel(f"provider {provider.name!r} has no model {model_hint!r} "
                               f"for {capability}", provider=provider.name, model=model_hint)
        return model_hint
    default = provider.default_model.get(capability)
    if default is None or default not in models:
        raise UnknownModel(f"provider {provider.name!r} declares no default model "
                           f"for {capability}", provider=provider.name, model=default or "")
    return default


def resolve_route(config: RoutingConfig, capability: str,
                  provider_hint: str | None = None,
                  model_hint: str | None = None) -> RouteBinding:
    """Resolve provider and model for one invocation.

    Order: (1) provider hint, which must exist and support the capability;
    (2) the capability default; (3) the global default if it supports the
    capability. A bare model hint applies to whichever provider levels 2-3
    select. Hinted or defaulted providers that lack the capability fail
    loudly instead of falling through.
    """
    if provider_hint is not None:
        provider = config.provider(provider_hint)
        if provider is None:
            raise UnknownProvider(f"no provider named {provider_hint!r}", provider=provider_hint)
        if capability not in provider.supported:
            raise UnsupportedCapability(
                f"provider {provider_hint!r} does not support {capability}",
                provider=provider_hint, capability=capability)
        return RouteBinding(provider.name, _model_for(provider, capability, model_hint),
                            LEVEL_REQUEST)

    if capability in config.capability_defaults:
        name = config.capability_defaults[capability]
        provider = config.provider(name)
        if provider is None:
            raise UnknownProvider(f"capability default names unknown provider {name!r}",
                                  provider=name)
        if capability not in provider.supported:
            raise UnsupportedCapability(
                f"capability default {name!r} does not support {capability}",
                provider=name, capability=capability)
        return RouteBinding(provider.name, _model_for(provider, capability, model_hint),
                            LEVEL_CAPABILITY)

    provider = config.provider(config.global_default)
    if provider is not None and capability in provider.supported:
        return RouteBinding(provider.name, _model_for(provider, capability, model_hint),
                            LEVEL_GLOBAL)
    detail = ("global default does not support this capability"
              if provider is not None else "no level resolved")
    raise NoRoute(f"no route for {capability}: {detail}", capability=capability, detail=detail)


def validate_config(config: RoutingConfig) -> list[dict[str, str]]:
    """All config invariant violations as data: {code, path, message} records."""
    violations: list[dict[str, str]] = []

    def flag(code: str, path: str, message: str):
        violations.append({"code": code, "path": path, "message": message})

    seen: set[str] = set()
    for i, p in enumerate(config.providers):
        root = f"providers[{i}]"
        if not p.name:
            flag("EmptyProviderName", root, "provider name must be non-empty")
        if p.name in seen:
            flag("DuplicateProvider", root, f"provider {p.name!r} listed twice")
        seen.add(p.name)
        if p.style not in (STYLE_MOCK, STYLE_HTTP):
            flag("UnknownStyle", f"{root}.style", f"unknown style {p.style!r}")
        if p.style == STYLE_HTTP and not p.base_url:
            flag("MissingBaseUrl", f"{root}.base_url", "http providers need a base_url")
        if p.style == STYLE_MOCK and p.base_url:
            flag("UnexpectedBaseUrl", f"{root}.base_url", "mock providers take no base_url")
        for capability, models in p.supported.items():
            cpath = f"{root}.supported.{capability}"
            if capability in LOCAL_CAPABILITIES:
                flag("LocalCapabilitySupported", cpath,
                     f"{capability} is a local tool and cannot be provider-routed")
                continue
            if capability not in ROUTED_CAPABILITIES:
                flag("UnknownCapability", cpath, f"unknown capability {capability!r}")
                continue
            if not models:
                flag("EmptyModelList", cpath, "supported capability needs at least one model")
                continue
            default = p.default_model.get(capability)
            if default is None:
                flag("DefaultModelMissing", f"{root}.default_model.{capability}",
                     f"no default model for supported capability {capability}")
            elif default not in models:
                flag("DefaultModelUnknown", f"{root}.default_model.{capability}",
                     f"default model {default!r} not in supported list")
        for capability in p.default_model:
            if capability not in p.supported:
                flag("DefaultForUnsupported", f"{root}.default_model.{capability}",
                     f"default model given for unsupported capability {capability}")

    for capability, name in config.capability_defaults.items():
        path = f"capability_defaults.{capability}"
        if capability in LOCAL_CAPABILITIES:
            flag("LocalCapabilityDefault", path, f"{capability} is a local tool")
            continue
        if capability not in ROUTED_CAPABILITIES:
            flag("UnknownCapability", path, f"unknown capability {capability!r}")
            continue
        provider = config.provider(name)
        if provider is None:
            flag("UnknownDefaultProvider", path, f"no provider named {name!r}")
        elif capability not in provider.supported:
            flag("DefaultUnsupported", path,
                 f"provider {name!r} does not support {capability}")

    if not config.global_default:
        flag("MissingGlobalDefault", "global_default", "global default provider required")
    elif config.provider(config.global_default) is None:
        flag("UnknownGlobalDefault", "global_default",
             f"no provider named {config.global_default!r}")

    if config.version < 1:
        flag("BadVersion", "version", "version must be a positive integer")
    return violations


class RoutingTable:
    """Holds the active config snapshot; resolve is lock-free, updates serialized."""

    def __init__(self, config: RoutingConfig):
        violations = validate_config(config)
        if violations:
            raise ValidationFailed(violations)
        self._config = config
        self._write_lock = threading.Lock()
        self.resolve_calls = 0  # observability: local tools must never bump this

    @property
    def config(self) -> RoutingConfig:
        return self._config

    def resolve(self, capability: str, provider_hint: str | None = None,
                model_hint: str | None = None) -> RouteBinding:
        snapshot = self._config  # single read: immutable snapshot
        self.resolve_calls += 1
        return resolve_route(snapshot, capability, provider_hint, model_hint)

    def apply_config_update(self, new: RoutingConfig) -> int:
        with self._write_lock:
            violations = validate_config(new)
            if violations:
                raise ValidationFailed(violations)
            if new.version <= self._config.version:
                raise StaleVersion(
                    f"version {new.version} not greater than current {self._config.version}",
                    current=self._config.version, offered=new.version)
            self._config = new
            return new.version


# routing.json (de)serialization

def config_to_obj(config: RoutingConfig) -> dict[str, Any]:
    return {
        "capability_defaults": dict(config.capability_defaults),
        "global_default": config.global_default,
        "providers": [
            {
                "base_url": p.base_url,
                "default_model": dict(p.default_model),
                "name": p.name,
                "style": p.style,
                "supported": {c: list(m) for c, m in p.supported.items()},
            }
            for p in config.providers
        ],
        "version": config.version,
    }


def config_from_obj(obj: dict[str, Any]) -> RoutingConfig:
    providers = []
    for raw in obj.get("providers", []):
        providers.append(ProviderSpec(
            name=str(raw.get("name", "")),
            style=str(raw.get("style", "")),
            base_url=str(raw.get("base_url", "")),
            supported={str(c): tuple(str(m) for m in models)
                       for c, models in (raw.get("supported") or {}).items()},
            default_model={str(c): str(m)
                           for c, m in (raw.get("default_model") or {}).items()},
        ))
    return RoutingConfig(
        providers=tuple(providers),
        capability_defaults={str(c): str(p)
                             for c, p in (obj.get("capability_defaults") or {}).items()},
        global_default=str(obj.get("global_default", "")),
        version=int(obj.get("version", 0)),
    )
