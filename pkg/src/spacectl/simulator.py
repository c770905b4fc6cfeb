"""HTTP test double for the building's device APIs.

Models air conditioners, lights, and one elevator, grouped into spaces,
plus a gapless request log so tests can assert exactly what traffic a
transaction produced. Every mutation goes through one lock: the log
order is the serialization order.

Device endpoints respond with ``{"ok": true}`` on success and
``{"ok": false, "error": ...}`` with a 4xx status otherwise. Body schema
is checked before device existence, so a light body sent to the
air-conditioner endpoint is a 400 even when the id happens to exist.
"""

import copy
import json
import re
import threading
import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import FixtureLoadError, UnknownFixtureError

DEFAULT_FIXTURE = "default"

_FIXTURE_NAME_RE = re.compile(r"^[A-Za-z0-9_-]+$")
_OPERATION_RE = re.compile(r"^(\d+)f(up|down)$")
_POWER_VALUES = ("on", "off")


def _load_fixture_file(fixture_dir: Path, name: str) -> dict:
    if not _FIXTURE_NAME_RE.match(name):
        raise UnknownFixtureError(f"invalid fixture name {name!r}")
    path = fixture_dir / f"{name}.json"
    if not path.is_file():
        raise UnknownFixtureError(f"no fixture named {name!r} in {fixture_dir}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FixtureLoadError(f"fixture {name!r} is not valid JSON: {exc}")
    _validate_state(doc, name)
    return doc


def _validate_state(doc: dict, name: str) -> None:
    def bad(msg: str):
        return FixtureLoadError(f"fixture {name!r}: {msg}")

    if not isinstance(doc, dict):
        raise bad("top level must be an object")
    for section in ("aircons", "lights", "elevator", "spaces"):
        if section not in doc:
            raise bad(f"missing section '{section}'")
    for ac_id, ac in doc["aircons"].items():
        if ac.get("power") not in _POWER_VALUES:
            raise bad(f"aircons[{ac_id}].power must be on or off")
        if "setpoint" in ac and not isinstance(ac["setpoint"], (int, float)):
            raise bad(f"aircons[{ac_id}].setpoint must be a number")
    for light_id, light in doc["lights"].items():
        if light.get("power") not in _POWER_VALUES:
            raise bad(f"lights[{light_id}].power must be on or off")
    elevator = doc["elevator"]
    if not isinstance(elevator.get("current_floor"), int):
        raise bad("elevator.current_floor must be an integer")
    if not isinstance(elevator.get("last_operation"), str):
        raise bad("elevator.last_operation must be a string")
    for room_id, space in doc["spaces"].items():
        if not isinstance(space.get("floor"), int):
            raise bad(f"spaces[{room_id}].floor must be an integer")
        for ac_id in space.get("ac_ids", []):
            if ac_id not in doc["aircons"]:
                raise bad(f"spaces[{room_id}] references unknown aircon {ac_id!r}")
        for light_id in space.get("light_ids", []):
            if light_id not in doc["lights"]:
                raise bad(f"spaces[{room_id}] references unknown light {light_id!r}")


class BuildingSimulator:
    """In-memory building state plus the device request log."""

    def __init__(self, fixture_dir: str | Path, fixture: str = DEFAULT_FIXTURE):
        self._fixture_dir = Path(fixture_dir)
        self._lock = threading.Lock()
        self._state: dict = {}
        self._log: list[dict] = []
        self._seq = 0
        with self._lock:
            self._load_locked(fixture)

    def _load_locked(self, fixture: str) -> None:
        self._state = _load_fixture_file(self._fixture_dir, fixture)
        self._fixture = fixture
        self._log = []
        self._seq = 0

    def reset(self, fixture: str | None = None) -> str:
        with self._lock:
            self._load_locked(fixture or self._fixture)
            return self._fixture

    def state_snapshot(self) -> dict:
        with self._lock:
            return copy.deepcopy(self._state)

    def log_entries(self, since_seq: int = 0) -> list[dict]:
        with self._lock:
            return [copy.deepcopy(e) for e in self._log if e["seq"] > since_seq]

    def handle_request(self, method: str, path: str, body: str) -> tuple[int, dict]:
        """Log a device-endpoint request and apply it. Returns (status, payload)."""
        with self._lock:
            self._seq += 1
            self._log.append(
                {
                    "seq": self._seq,
                    "method": method,
                    "path": path,
                    "body": body,
                    "timestamp": time.time(),
                }
            )
            return self._dispatch_locked(method, path, body)

    def _dispatch_locked(self, method: str, path: str, body: str) -> tuple[int, dict]:
        handlers = {
            "/api/airconditioner": self._aircon_locked,
            "/api/light": self._light_locked,
            "/api/elevator": self._elevator_locked,
        }
        handler = handlers.get(path)
        if handler is None:
            return 404, {"ok": False, "error": f"unknown device endpoint {path!r}"}
        if method != "PUT":
            return 405, {"ok": False, "error": f"{path} only accepts PUT"}
        try:
            doc = json.loads(body)
        except json.JSONDecodeError:
            return 400, {"ok": False, "error": "body is not valid JSON"}
        if not isinstance(doc, dict):
            return 400, {"ok": False, "error": "body must be a JSON object"}
        return handler(doc)

    def _aircon_locked(self, doc: dict) -> tuple[int, dict]:
        unknown = set(doc) - {"ac_id", "on_off", "setpoint"}
        if unknown:
            return 400, {
                "ok": False,
                "error": f"unexpected field {sorted(unknown)[0]!r} for airconditioner",
            }
        if not isinstance(doc.get("ac_id"), str):
            return 400, {"ok": False, "error": "ac_id (string) is required"}
        has_power = "on_off" in doc
        has_setpoint = "setpoint" in doc
        if has_power == has_setpoint:
            return 400, {"ok": False, "error": "exactly one of on_off or setpoint is required"}
        if has_power and doc["on_off"] not in _POWER_VALUES:
            return 400, {"ok": False, "error": "on_off must be 'on' or 'off'"}
        if has_setpoint and (
            isinstance(doc["setpoint"], bool)
            or not isinstance(doc["setpoint"], (int, float))
        ):
            return 400, {"ok": False, "error": "setpoint must be a number"}
        aircon = self._state["aircons"].get(doc["ac_id"])
        if aircon is None:
            return 404, {"ok": False, "error": f"no air conditioner {doc['ac_id']!r}"}
        if has_power:
            aircon["power"] = doc["on_off"]
        else:
            aircon["setpoint"] = doc["setpoint"]
        return 200, {"ok": True}

    def _light_locked(self, doc: dict) -> tuple[int, dict]:
        unknown = set(doc) - {"light_id", "on_off"}
        if unknown:
            return 400, {
                "ok": False,
                "error": f"unexpected field {sorted(unknown)[0]!r} for light",
            }
        if not isinstance(doc.get("light_id"), str):
            return 400, {"ok": False, "error": "light_id (string) is required"}
        if doc.get("on_off") not in _POWER_VALUES:
            return 400, {"ok": False, "error": "on_off must be 'on' or 'off'"}
        light = self._state["lights"].get(doc["light_id"])
        if light is None:
            return 404, {"ok": False, "error": f"no light {doc['light_id']!r}"}
        light["power"] = doc["on_off"]
        return 200, {"ok": True}

    def _elevator_locked(self, doc: dict) -> tuple[int, dict]:
        unknown = set(doc) - {"operation"}
        if unknown:
            return 400, {
                "ok": False,
                "error": f"unexpected field {sorted(unknown)[0]!r} for elevator",
            }
        operation = doc.get("operation")
        if not isinstance(operation, str):
            return 400, {"ok": False, "error": "operation (string) is required"}
        match = _OPERATION_RE.match(operation)
        if not match:
            return 400, {
                "ok": False,
                "error": "operation must match <floor>f<up|down>, e.g. '3fdown'",
            }
        self._state["elevator"]["last_operation"] = operation
        self._state["elevator"]["current_floor"] = int(match.group(1))
        return 200, {"ok": True}


def create_simulator_app(simulator: BuildingSimulator) -> FastAPI:
    """HTTP wrapper: device endpoints under /api/, plus state/log/reset."""
    app = FastAPI(title="building simulator")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.api_route(
        "/api/{device_path:path}", methods=["GET", "PUT", "POST", "DELETE"]
    )
    async def device(request: Request, device_path: str) -> JSONResponse:
        body = (await request.body()).decode("utf-8", errors="replace")
        status, payload = simulator.handle_request(
            request.method, f"/api/{device_path}", body
        )
        return JSONResponse(payload, status_code=status)

    @app.get("/state")
    async def state() -> JSONResponse:
        return JSONResponse(simulator.state_snapshot())

    @app.get("/log")
    async def log(since: int = 0) -> JSONResponse:
        return JSONResponse({"entries": simulator.log_entries(since)})

    @app.post("/reset")
    async def reset(request: Request) -> JSONResponse:
        raw = await request.body()
        fixture = None
        if raw:
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError:
                return JSONResponse(
                    {"ok": False, "error": "body is not valid JSON"}, status_code=400
                )
            if not isinstance(doc, dict) or (
                "fixture" in doc and not isinstance(doc["fixture"], str)
            ):
                return JSONResponse(
                    {"ok": False, "error": "body must be {\"fixture\": name}"},
                    status_code=400,
                )
            fixture = doc.get("fixture")
        try:
            loaded = simulator.reset(fixture)
        except UnknownFixtureError as exc:
            return JSONResponse({"ok": False, "error": str(exc)}, status_code=404)
        except FixtureLoadError as exc:
            return JSONResponse({"ok": False, "error": str(exc)}, status_code=500)
        return JSONResponse({"ok": True, "fixture": loaded})

    return app
