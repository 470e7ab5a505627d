"""System assembly: wires the store, routing table, registry, engine, and the
built-in skills over one data directory.

Layout under the home directory:
    routing.json         active routing config
    artifacts/           artifact manifests + index.jsonl
    runs/<run_id>/       record.json + events.jsonl
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from .capabilities import ROUTED_CAPABILITIES
from .engine import SkillEngine
from .media import canonical_json
from .registry import CapabilityRegistry
from .routing import (
    STYLE_HTTP,
    STYLE_MOCK,
    ProviderSpec,
    RoutingConfig,
    RoutingTable,
    config_from_obj,
    config_to_obj,
)
from .skills import register_all
from .store import ArtifactStore

HOME_ENV = "MEDIACLAW_HOME"
DEFAULT_HOME = "mediaclaw_home"

# Capabilities an sglang-style deployment can serve (image/video generation,
# vision QA, and text generation; no speech or avatar rendering).
SGLANG_STYLE_CAPABILITIES = (
    "text_to_image", "image_qa", "text_to_video", "image_to_video", "text_generation",
)

DEFAULT_MODEL_NAME = "default"


def mock_provider_spec(name: str = "mock") -> ProviderSpec:
    return ProviderSpec(
        name=name,
        style=STYLE_MOCK,
        supported={c: (DEFAULT_MODEL_NAME,) for c in ROUTED_CAPABILITIES},
        default_model={c: DEFAULT_MODEL_NAME for c in ROUTED_CAPABILITIES},
    )


def stub_provider_spec(base_url: str, name: str = "sglang-stub") -> ProviderSpec:
    return ProviderSpec(
        name=name,
        style=STYLE_HTTP,
        base_url=base_url,
        supported={c: (DEFAULT_MODEL_NAME,) for c in SGLANG_STYLE_CAPABILITIES},
        default_model={c: DEFAULT_MODEL_NAME for c in SGLANG_STYLE_CAPABILITIES},
    )


def default_config(version: int = 1) -> RoutingConfig:
    return RoutingConfig(providers=(mock_provider_spec(),),
                         global_default="mock", version=version)


def demo_config(stub_base_url: str, version: int = 1,
                global_default: str = "mock") -> RoutingConfig:
    """Two-provider config mirroring the published support matrix: a full-support
    mock provider plus an sglang-style HTTP provider with partial support."""
    return RoutingConfig(
        providers=(mock_provider_spec(), stub_provider_spec(stub_base_url)),
        global_default=global_default,
        version=version,
    )


def resolve_home(home: str | Path | None = None) -> Path:
    if home is not None:
        return Path(home)
    return Path(os.environ.get(HOME_ENV, DEFAULT_HOME))


class MediaClawSystem:
    """One fully wired platform instance over a data directory."""

    def __init__(self, home: str | Path | None = None,
                 config: RoutingConfig | None = None):
        self.home = resolve_home(home)
        self.home.mkdir(parents=True, exist_ok=True)
        self.routing_path = self.home / "routing.json"

        if config is None:
            if self.routing_path.is_file():
                config = config_from_obj(
                    json.loads(self.routing_path.read_text(encoding="utf-8")))
            else:
                config = default_config()
        self._config_lock = threading.Lock()
        self.store = ArtifactStore(self.home / "artifacts")
        self.routing = RoutingTable(config)
        self.registry = CapabilityRegistry(self.store, self.routing)
        self.engine = SkillEngine(self.registry, self.store, self.home / "runs")
        register_all(self.engine)
        self._persist_config()

    def _persist_config(self) -> None:
        tmp = self.home / ".routing.tmp"
        tmp.write_text(canonical_json(config_to_obj(self.routing.config)),
                       encoding="utf-8")
        tmp.replace(self.routing_path)

    def apply_config(self, new: RoutingConfig) -> int:
        """Validate-then-swap: pre-bind the incoming providers, swap the routing
        snapshot, prune bindings to the active config, persist."""
        with self._config_lock:
            self.registry.bind_from_config(new, merge=True)
            try:
                version = self.routing.apply_config_update(new)
            finally:
                self.registry.bind_from_config()
            self._persist_config()
            return version
