"""Building-API metadata: api_id -> ordered list of HTTP calls.

The on-disk format is a JSON array of ``{"api_id", "transaction":
[{"method", "endpoint", "body"}]}`` objects. A single-call API is just a
length-1 transaction; call bodies stay raw JSON strings and are forwarded
byte-for-byte at dispatch time.
"""

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlparse

from .errors import (
    DuplicateApiIdError,
    NotFoundError,
    RegistryValidationError,
    SchemaError,
)

HTTP_METHODS = ("GET", "PUT", "POST", "DELETE")


@dataclass(frozen=True)
class ApiCall:
    method: str
    endpoint: str
    body: str = ""


@dataclass(frozen=True)
class ApiMetadata:
    api_id: str
    transaction: tuple[ApiCall, ...]


def validate_metadata(metadata: ApiMetadata) -> list[str]:
    """All violations found, empty list when the metadata is executable."""
    violations = []
    if not metadata.api_id:
        violations.append("api_id: must be non-empty")
    if not metadata.transaction:
        violations.append("transaction: must contain at least one call")
    for i, call in enumerate(metadata.transaction):
        where = f"transaction[{i}]"
        if call.method not in HTTP_METHODS:
            violations.append(
                f"{where}.method: {call.method!r} is not one of {'/'.join(HTTP_METHODS)}"
            )
        parsed = urlparse(call.endpoint)
        if parsed.scheme not in ("http", "https") or not parsed.netloc:
            violations.append(f"{where}.endpoint: {call.endpoint!r} is not an absolute URL")
        if call.body:
            try:
                json.loads(call.body)
            except json.JSONDecodeError:
                violations.append(f"{where}.body: not valid JSON")
    return violations


class Registry:
    """api_id -> ApiMetadata map with validation on write."""

    def __init__(self):
        self._entries: dict[str, ApiMetadata] = {}
        self._lock = threading.RLock()

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def register(self, metadata: ApiMetadata) -> None:
        violations = validate_metadata(metadata)
        if violations:
            raise RegistryValidationError(violations)
        with self._lock:
            if metadata.api_id in self._entries:
                raise DuplicateApiIdError(f"api_id {metadata.api_id!r} already registered")
            self._entries[metadata.api_id] = metadata

    def get(self, api_id: str) -> ApiMetadata:
        with self._lock:
            try:
                return self._entries[api_id]
            except KeyError:
                raise NotFoundError(f"api_id {api_id!r} not registered")

    def remove(self, api_id: str) -> ApiMetadata:
        with self._lock:
            try:
                return self._entries.pop(api_id)
            except KeyError:
                raise NotFoundError(f"api_id {api_id!r} not registered")

    def api_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._entries)

    def entries(self) -> list[ApiMetadata]:
        """All entries, sorted by api_id."""
        with self._lock:
            return [self._entries[k] for k in sorted(self._entries)]


def metadata_to_dict(metadata: ApiMetadata) -> dict:
    return {
        "api_id": metadata.api_id,
        "transaction": [
            {"method": c.method, "endpoint": c.endpoint, "body": c.body}
            for c in metadata.transaction
        ],
    }


def registry_from_json(text: str) -> Registry:
    """Parse the JSON-array registry format, validating every entry."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"registry is not valid JSON: {exc}")
    if not isinstance(doc, list):
        raise SchemaError("registry must be a JSON array")
    registry = Registry()
    for i, raw in enumerate(doc):
        if not isinstance(raw, dict):
            raise SchemaError(f"entry {i} must be an object")
        for fld in ("api_id", "transaction"):
            if fld not in raw:
                raise SchemaError(f"entry {i} is missing field '{fld}'")
        if not isinstance(raw["api_id"], str):
            raise SchemaError(f"entry {i}.api_id must be a string")
        if not isinstance(raw["transaction"], list):
            raise SchemaError(f"entry {i}.transaction must be a list")
        calls = []
        for j, c in enumerate(raw["transaction"]):
            if not isinstance(c, dict):
                raise SchemaError(f"entry {i}.transaction[{j}] must be an object")
            for fld in ("method", "endpoint"):
                if fld not in c or not isinstance(c[fld], str):
                    raise SchemaError(
                        f"entry {i}.transaction[{j}] needs string field '{fld}'"
                    )
            body = c.get("body", "")
            if not isinstance(body, str):
                raise SchemaError(f"entry {i}.transaction[{j}].body must be a string")
            calls.append(ApiCall(method=c["method"], endpoint=c["endpoint"], body=body))
        metadata = ApiMetadata(api_id=raw["api_id"], transaction=tuple(calls))
        violations = validate_metadata(metadata)
        if violations:
            raise SchemaError(f"entry {i} ({raw['api_id']!r}): " + "; ".join(violations))
        try:
            registry.register(metadata)
        except DuplicateApiIdError:
            raise SchemaError(f"entry {i}: duplicate api_id {raw['api_id']!r}")
    return registry


def load_registry(path: str | Path) -> Registry:
    return registry_from_json(Path(path).read_text(encoding="utf-8"))


def save_registry(registry: Registry, path: str | Path) -> None:
    """Entries sorted by api_id; save -> load -> save is byte-identical."""
    doc = [metadata_to_dict(m) for m in registry.entries()]
    Path(path).write_text(
        json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
