"""Shared fixtures: shipped fixture files, a live simulator, and a live service.

Servers bind ephemeral ports, so the registry used by live tests is the
shipped one with endpoint host:port rewritten to the running simulator.
No test talks to anything outside 127.0.0.1.
"""

import dataclasses
import json
import threading
import time
from pathlib import Path

import pytest
import uvicorn
from hypothesis import settings

from spacectl.classifier import train
from spacectl.embeddings import LocalHashProvider
from spacectl.index import load_index
from spacectl.pipeline import Pipeline, load_config
from spacectl.registry import (
    ApiCall,
    ApiMetadata,
    Registry,
    load_registry,
    save_registry,
)
from spacectl.service import create_app
from spacectl.simulator import BuildingSimulator, create_simulator_app

settings.register_profile("suite", derandomize=True, max_examples=60)
settings.load_profile("suite")

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = REPO_ROOT / "fixtures"


class LiveServer:
    """uvicorn on an ephemeral port in a daemon thread."""

    def __init__(self, app):
        config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        self._server = uvicorn.Server(config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)
        self._thread.start()
        deadline = time.monotonic() + 15
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("server did not start within 15s")
            time.sleep(0.01)
        self.port = self._server.servers[0].sockets[0].getsockname()[1]
        self.base_url = f"http://127.0.0.1:{self.port}"

    def stop(self):
        self._server.should_exit = True
        self._thread.join(timeout=10)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(scope="session")
def shipped_config():
    return load_config(FIXTURES_DIR / "config.json")


@pytest.fixture(scope="session")
def provider():
    return LocalHashProvider()


@pytest.fixture(scope="session")
def shipped_index():
    return load_index(FIXTURES_DIR / "exemplars.snapshot.json")


@pytest.fixture(scope="session")
def shipped_model(shipped_index):
    return train(shipped_index.records())


@pytest.fixture(scope="session")
def simulator() -> BuildingSimulator:
    return BuildingSimulator(FIXTURES_DIR / "buildings")


@pytest.fixture(scope="session")
def sim_server(simulator):
    server = LiveServer(create_simulator_app(simulator))
    yield server
    server.stop()


@pytest.fixture
def fresh_sim(simulator, sim_server):
    """The live simulator, state and log reset."""
    simulator.reset()
    return simulator


def rewrite_registry_base(registry: Registry, base_url: str) -> Registry:
    """Same apis and bodies, endpoints repointed at base_url."""
    rewritten = Registry()
    for metadata in registry.entries():
        calls = []
        for call in metadata.transaction:
            path = "/" + call.endpoint.split("/", 3)[3]
            calls.append(ApiCall(call.method, f"{base_url}{path}", call.body))
        rewritten.register(
            ApiMetadata(api_id=metadata.api_id, transaction=tuple(calls))
        )
    return rewritten


@pytest.fixture(scope="session")
def live_registry(sim_server) -> Registry:
    return rewrite_registry_base(
        load_registry(FIXTURES_DIR / "registry.json"), sim_server.base_url
    )


@pytest.fixture(scope="session")
def live_fixtures_dir(tmp_path_factory, sim_server, live_registry) -> Path:
    """A config dir equal to fixtures/ but with the registry aimed at the live sim."""
    directory = tmp_path_factory.mktemp("live-fixtures")
    save_registry(live_registry, directory / "registry.json")
    config_doc = json.loads((FIXTURES_DIR / "config.json").read_text("utf-8"))
    config_doc["exemplars_path"] = str(FIXTURES_DIR / "exemplars.snapshot.json")
    config_doc["registry_path"] = str(directory / "registry.json")
    (directory / "config.json").write_text(
        json.dumps(config_doc, indent=2) + "\n", "utf-8"
    )
    return directory


@pytest.fixture(scope="session")
def live_pipeline(live_fixtures_dir):
    pipeline = Pipeline.from_config(load_config(live_fixtures_dir / "config.json"))
    yield pipeline
    pipeline.close()


@pytest.fixture(scope="session")
def dry_pipeline(live_fixtures_dir):
    config = dataclasses.replace(
        load_config(live_fixtures_dir / "config.json"), dry_run=True
    )
    pipeline = Pipeline.from_config(config)
    yield pipeline
    pipeline.close()


@pytest.fixture(scope="session")
def service_server(live_pipeline):
    server = LiveServer(create_app(live_pipeline))
    yield server
    server.stop()
