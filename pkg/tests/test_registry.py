from __future__ import annotations

import pytest

from mediaclaw.capabilities import DESCRIPTORS
from mediaclaw.errors import (
    DuplicateProvider,
    HandlerFailure,
    HintRejectedForLocalTool,
    MissingHandler,
    SchemaViolation,
    UnknownTool,
    UnsupportedCapability,
)
from mediaclaw.media import make_image, media_to_obj
from mediaclaw.providers.ass import emit_ass
from mediaclaw.providers.mock import mock_generate
from mediaclaw.registry import InvokeRequest
from mediaclaw.routing import ProviderSpec, RoutingConfig
from mediaclaw.system import MediaClawSystem, demo_config, mock_provider_spec

TABLE_ORDER = [
    "mediaclaw_text_to_image",
    "mediaclaw_image_qa",
    "mediaclaw_text_to_video",
    "mediaclaw_image_to_video",
    "mediaclaw_images_to_video",
    "mediaclaw_text_to_speech",
    "mediaclaw_digital_avatar",
    "mediaclaw_burn_subtitles",
    "mediaclaw_replace_background",
    "mediaclaw_text_generation",
]


class TestDescriptors:
    def test_tool_names_and_order(self):
        assert [d.tool_name for d in DESCRIPTORS] == TABLE_ORDER

    def test_local_tools(self):
        local = [d.tool_name for d in DESCRIPTORS if d.routing_class == "local"]
        assert local == ["mediaclaw_burn_subtitles", "mediaclaw_replace_background"]


class TestListCapabilities:
    def test_support_matrix(self, tmp_path, stub_server):
        system = MediaClawSystem(home=tmp_path, config=demo_config(stub_server.base_url))
        by_name = {d.tool_name: providers
                   for d, providers in system.registry.list_capabilities()}
        assert by_name["mediaclaw_text_to_image"] == ["mock", "sglang-stub"]
        assert by_name["mediaclaw_images_to_video"] == ["mock"]
        assert by_name["mediaclaw_text_to_speech"] == ["mock"]
        assert by_name["mediaclaw_digital_avatar"] == ["mock"]
        assert by_name["mediaclaw_burn_subtitles"] == ["local"]
        assert by_name["mediaclaw_replace_background"] == ["local"]

    def test_order_is_stable(self, system):
        names = [d.tool_name for d, _ in system.registry.list_capabilities()]
        assert names == TABLE_ORDER


class TestRegistration:
    def test_duplicate_provider(self, system):
        spec = ProviderSpec(name="custom", style="mock",
                            supported={"text_to_image": ("m",)},
                            default_model={"text_to_image": "m"})
        handlers = {"text_to_image": lambda p, m: mock_generate("text_to_image", p)}
        system.registry.register_provider_binding(spec, handlers)
        with pytest.raises(DuplicateProvider):
            system.registry.register_provider_binding(spec, handlers)

    def test_missing_handler(self, system):
        spec = ProviderSpec(name="partial", style="mock",
                            supported={"text_to_speech": ("m",)},
                            default_model={"text_to_speech": "m"})
        with pytest.raises(MissingHandler) as exc:
            system.registry.register_provider_binding(spec, {})
        assert exc.value.details["capability"] == "text_to_speech"


class TestInvoke:
    def test_default_route_path(self, system):
        result = system.registry.invoke(
            InvokeRequest("text_to_image", {"prompt": "red fox"}))
        assert result.provider_used == "mock"
        assert result.model_used == "default"
        artifact = system.store.get(result.artifact_id)
        assert artifact.kind == "image"
        assert artifact.produced_by == "direct-invoke"
        assert artifact.payload.meta["provider"] == "mock"

    def test_unsupported_capability_via_hint(self, tmp_path, stub_server):
        system = MediaClawSystem(home=tmp_path, config=demo_config(stub_server.base_url))
        image_id = system.store.put(make_image((1, 1, 1)))
        with pytest.raises(UnsupportedCapability):
            system.registry.invoke(InvokeRequest(
                "multi_image_to_video",
                {"mode": "reference", "images": [image_id], "prompt": "x"},
                provider_hint="sglang-stub"))

    def test_local_tool_hint_is_a_hard_error(self, system):
        video_id = system.registry.invoke(
            InvokeRequest("text_to_video", {"prompt": "v", "duration_ms": 1000})).artifact_id
        with pytest.raises(HintRejectedForLocalTool):
            system.registry.invoke(InvokeRequest(
                "burn_subtitles",
                {"video": video_id, "subtitles_ass": emit_ass([])},
                provider_hint="mock"))

    def test_local_tool_never_consults_routing(self, system):
        video_id = system.registry.invoke(
            InvokeRequest("text_to_video", {"prompt": "v", "duration_ms": 1000})).artifact_id
        before = system.routing.resolve_calls
        result = system.registry.invoke(InvokeRequest(
            "burn_subtitles", {"video": video_id, "subtitles_ass": emit_ass([])}))
        assert system.routing.resolve_calls == before
        assert result.provider_used == "local" and result.model_used == ""

    def test_unknown_tool(self, system):
        with pytest.raises(UnknownTool):
            system.registry.invoke_tool("mediaclaw_nope", {})

    def test_schema_missing_required(self, system):
        with pytest.raises(SchemaViolation) as exc:
            system.registry.invoke(InvokeRequest("text_to_image", {}))
        assert exc.value.param == "prompt"

    def test_schema_unknown_param(self, system):
        with pytest.raises(SchemaViolation):
            system.registry.invoke(
                InvokeRequest("text_to_image", {"prompt": "x", "seed": 3}))

    def test_schema_rejection_before_side_effects(self, system):
        before = system.store.count()
        with pytest.raises(SchemaViolation):
            system.registry.invoke(InvokeRequest("text_to_image", {"prompt": 42}))
        assert system.store.count() == before

    def test_unknown_artifact_reference(self, system):
        with pytest.raises(SchemaViolation) as exc:
            system.registry.invoke(InvokeRequest(
                "image_qa", {"image": "missing", "question": "q"}))
        assert exc.value.param == "image"

    def test_images_min_count_depends_on_mode(self, system):
        image_id = system.store.put(make_image((1, 1, 1)))
        with pytest.raises(SchemaViolation):
            system.registry.invoke(InvokeRequest("multi_image_to_video", {
                "mode": "first_last", "images": [image_id], "prompt": "p"}))
        result = system.registry.invoke(InvokeRequest("multi_image_to_video", {
            "mode": "reference", "images": [image_id], "prompt": "p"}))
        assert system.store.get(result.artifact_id).inputs == [image_id]

    def test_default_duration_applied(self, system):
        result = system.registry.invoke(InvokeRequest("text_to_video", {"prompt": "p"}))
        assert system.store.get_payload(result.artifact_id).duration_ms == 5000

    def test_handler_exception_becomes_handler_failure(self, system):
        spec = ProviderSpec(name="broken", style="mock",
                            supported={"text_to_image": ("m",)},
                            default_model={"text_to_image": "m"})

        def boom(params, model):
            raise RuntimeError("kaput")

        system.registry.register_provider_binding(spec, {"text_to_image": boom})
        config = RoutingConfig(providers=(mock_provider_spec(), spec),
                               global_default="mock", version=2)
        system.apply_config(config)
        listed = {d.capability: providers
                  for d, providers in system.registry.list_capabilities()}
        assert listed["text_to_image"] == ["mock", "broken"]
        with pytest.raises(HandlerFailure) as exc:
            system.registry.invoke(InvokeRequest("text_to_image", {"prompt": "x"},
                                                 provider_hint="broken"))
        assert exc.value.provider == "broken"
        assert "kaput" in exc.value.details["cause"]

    def test_run_context_lineage(self, system):
        result = system.registry.invoke(
            InvokeRequest("text_to_image", {"prompt": "x"}), run_context=("run9", 4))
        assert system.store.get(result.artifact_id).produced_by == ("run9", 4)


class TestInvocationUniformity:
    def test_same_request_shape_across_providers(self, tmp_path, stub_server):
        """Identical requests differ only in provider/model/meta across providers."""
        system = MediaClawSystem(home=tmp_path, config=demo_config(stub_server.base_url))
        image_id = system.store.put(make_image((12, 34, 56)))
        requests = [
            ("text_to_image", {"prompt": "fox"}),
            ("text_to_video", {"prompt": "fox", "duration_ms": 1000}),
            ("image_to_video", {"image": image_id, "prompt": "fox", "duration_ms": 600}),
            ("image_qa", {"image": image_id, "question": "what?"}),
            ("text_generation", {"prompt": "say", "mode": "freeform"}),
        ]
        for capability, params in requests:
            payloads = {}
            for provider in ("mock", "sglang-stub"):
                result = system.registry.invoke(
                    InvokeRequest(capability, dict(params), provider_hint=provider))
                assert result.provider_used == provider
                obj = media_to_obj(system.store.get_payload(result.artifact_id))
                obj.pop("meta")
                payloads[provider] = obj
            assert payloads["mock"] == payloads["sglang-stub"], capability
