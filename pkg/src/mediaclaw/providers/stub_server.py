"""In-repo stub provider server mirroring the mock generation rules.

Used to exercise the HTTP adapter end to end: anything the mock produces,
the stub produces byte-identically for the same wire inputs. Test hooks can
force error statuses or an invariant-violating manifest.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from ..errors import MediaClawError
from ..media import canonical_json, media_to_obj
from .http import deserialize_params
from .mock import mock_generate


class _StubHandler(BaseHTTPRequestHandler):
    server: "StubProviderServer"

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def _send(self, status: int, obj) -> None:
        body = canonical_json(obj).encode("utf-8")
        self.send_response(status)
        self.send_header("content-type", "application/json")
        self.send_header("content-length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path == "/healthz":
            self._send(200, {"status": "ok"})
        else:
            self._send(404, {"error": "not found"})

    def do_POST(self):
        if self.path != "/invoke":
            self._send(404, {"error": "not found"})
            return
        forced = self.server.pop_forced_status()
        if forced is not None:
            self._send(forced, {"error": f"forced status {forced}"})
            return
        try:
            length = int(self.headers.get("content-length", "0"))
            body = json.loads(self.rfile.read(length).decode("utf-8"))
            params = deserialize_params(body.get("params") or {})
            payload = mock_generate(body["capability"], params)
        except MediaClawError as exc:
            self._send(400, exc.to_api_error())
            return
        except Exception as exc:
            self._send(500, {"error": f"{type(exc).__name__}: {exc}"})
            return
        manifest = media_to_obj(payload)
        if self.server.pop_mangle():
            manifest["duration_ms"] = manifest.get("duration_ms", 0) + 1  # break frame count
        self._send(200, manifest)


class StubProviderServer(ThreadingHTTPServer):
    """Threaded stub provider; bind to port 0 for an ephemeral test port."""

    daemon_threads = True

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        super().__init__((host, port), _StubHandler)
        self._fault_lock = threading.Lock()
        self._forced_statuses: list[int] = []
        self._mangle_next = 0
        self._thread: threading.Thread | None = None

    @property
    def base_url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"

    def force_status(self, status: int, times: int = 1) -> None:
        with self._fault_lock:
            self._forced_statuses.extend([status] * times)

    def pop_forced_status(self) -> int | None:
        with self._fault_lock:
            return self._forced_statuses.pop(0) if self._forced_statuses else None

    def mangle_next_manifest(self, times: int = 1) -> None:
        with self._fault_lock:
            self._mangle_next += times

    def pop_mangle(self) -> bool:
        with self._fault_lock:
            if self._mangle_next > 0:
                self._mangle_next -= 1
                return True
            return False

    def start(self) -> "StubProviderServer":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
