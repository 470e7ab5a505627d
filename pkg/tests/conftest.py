from __future__ import annotations

import pytest

from mediaclaw.providers.stub_server import StubProviderServer
from mediaclaw.system import MediaClawSystem

# (criterion name, passed) pairs filled in by the acceptance suite
ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


@pytest.fixture()
def system(tmp_path) -> MediaClawSystem:
    return MediaClawSystem(home=tmp_path / "home")


@pytest.fixture(scope="session")
def stub_server():
    server = StubProviderServer().start()
    yield server
    server.stop()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")
