import json
import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
import pytest


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class ServiceProcess:
    """A scanrig service running as a real OS process (for kill/restart tests)."""

    def __init__(self, data_dir: Path, port: int):
        self.data_dir = Path(data_dir)
        self.port = port
        self.base = f"http://127.0.0.1:{port}/api/v1"
        cfg = {"host": "127.0.0.1", "port": port, "data_dir": str(data_dir),
               "backend_mode": "instant"}
        self.cfg_path = self.data_dir.parent / f"service-{port}.json"
        self.cfg_path.write_text(json.dumps(cfg))
        self.proc = subprocess.Popen(
            [sys.executable, "-m", "scanrig", "serve", "--config", str(self.cfg_path)],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )

    def wait_ready(self, timeout: float = 15.0) -> None:
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            if self.proc.poll() is not None:
                raise RuntimeError(f"service exited early with {self.proc.returncode}")
            try:
                if httpx.get(self.base + "/status", timeout=1.0).status_code == 200:
                    return
            except httpx.HTTPError:
                time.sleep(0.05)
        raise TimeoutError("service did not become ready")

    def kill(self) -> None:
        self.proc.kill()
        self.proc.wait()

    def terminate(self) -> None:
        if self.proc.poll() is None:
            self.proc.terminate()
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()


@pytest.fixture
def service_factory(tmp_path):
    """Spawns service processes and tears down whatever is still alive."""
    procs: list[ServiceProcess] = []

    def spawn(data_dir=None, port=None):
        svc = ServiceProcess(data_dir or tmp_path / "data", port or free_port())
        procs.append(svc)
        svc.wait_ready()
        return svc

    yield spawn
    for svc in procs:
        svc.terminate()


_CRITERIA = {}


def criterion(number: int, title: str):
    """Tags an acceptance test for the per-criterion summary lines."""

    def mark(fn):
        _CRITERIA[fn.__name__] = (number, title)
        return fn

    return mark


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.getreports(outcome):
            name = report.nodeid.split("::")[-1].split("[")[0]
            if name in _CRITERIA and report.when in ("call", None):
                number, title = _CRITERIA[name]
                status = "PASS" if outcome == "passed" else "FAIL"
                lines.append((number, f"{status}  criterion {number}: {title}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
