from __future__ import annotations

import httpx
import pytest

from mediaclaw.capabilities import ResolvedArtifact
from mediaclaw.errors import InvalidRemoteManifest, RemoteError, TransportError
from mediaclaw.media import make_image, media_to_json
from mediaclaw.providers.http import http_dispatch
from mediaclaw.providers.mock import mock_generate


class TestStubParity:
    CASES = [
        ("text_to_image", {"prompt": "red fox"}),
        ("text_to_video", {"prompt": "red fox", "duration_ms": 1000}),
        ("image_to_video", {"image": ResolvedArtifact("", make_image((10, 20, 30))),
                            "prompt": "p", "duration_ms": 600}),
        ("image_qa", {"image": ResolvedArtifact("", make_image((1, 2, 3))),
                      "question": "score:visual_appeal|x"}),
        ("text_generation", {"prompt": "3|sea", "mode": "storyboard"}),
        ("text_to_speech", {"text": "hello world"}),
        ("digital_avatar", {"text": "hi", "avatar_id": "a", "action_id": "b"}),
    ]

    @pytest.mark.parametrize("capability,params", CASES,
                             ids=[c for c, _ in CASES])
    def test_byte_identical_to_mock(self, stub_server, capability, params):
        remote = http_dispatch(stub_server.base_url, capability, "default", dict(params))
        local = mock_generate(capability, dict(params))
        assert media_to_json(remote) == media_to_json(local)

    def test_reference_mode_matches_except_reference_ids(self, stub_server):
        # artifact ids never cross the wire, so the stub cannot echo them back
        params = {"mode": "reference",
                  "images": [ResolvedArtifact("local-id", make_image((1, 1, 1)))],
                  "prompt": "p", "duration_ms": 600}
        remote = http_dispatch(stub_server.base_url, "multi_image_to_video",
                               "default", dict(params))
        local = mock_generate("multi_image_to_video", dict(params))
        assert local.meta.pop("reference_images") == "local-id"
        assert remote.meta.pop("reference_images") == ""
        assert media_to_json(remote) == media_to_json(local)


class TestErrors:
    def test_remote_500(self, stub_server):
        stub_server.force_status(500)
        with pytest.raises(RemoteError) as exc:
            http_dispatch(stub_server.base_url, "text_to_image", "default",
                          {"prompt": "x"})
        assert exc.value.status == 500

    def test_remote_bad_request_maps_to_remote_error(self, stub_server):
        with pytest.raises(RemoteError) as exc:
            http_dispatch(stub_server.base_url, "text_to_video", "default",
                          {"prompt": "x", "duration_ms": 123})  # off-grid duration
        assert exc.value.status == 400

    def test_invalid_remote_manifest(self, stub_server):
        stub_server.mangle_next_manifest()
        with pytest.raises(InvalidRemoteManifest):
            http_dispatch(stub_server.base_url, "text_to_image", "default",
                          {"prompt": "x"})

    def test_transport_error_on_dead_endpoint(self):
        with pytest.raises(TransportError):
            http_dispatch("http://127.0.0.1:1", "text_to_image", "default",
                          {"prompt": "x"}, timeout=0.5)


class TestStubServer:
    def test_healthz(self, stub_server):
        response = httpx.get(stub_server.base_url + "/healthz")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_unknown_path_404(self, stub_server):
        assert httpx.get(stub_server.base_url + "/nope").status_code == 404

    def test_concurrent_requests(self, stub_server):
        import threading

        results = []

        def call(i):
            media = http_dispatch(stub_server.base_url, "text_to_image",
                                  "default", {"prompt": f"p{i}"})
            results.append(media.frames[0].fill_rgb)

        threads = [threading.Thread(target=call, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(results) == 8
