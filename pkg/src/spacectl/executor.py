"""Sequential HTTP dispatch of a registered transaction.

Calls run strictly in the listed order. The first failure (non-2xx
status or a connection-level error) stops the transaction; remaining
calls are reported as skipped. Nothing is retried or rolled back:
building actuation is not idempotent in general, so the report states
exactly what happened.
"""

import time
from dataclasses import dataclass

import httpx

# Response bodies are captured for diagnostics, not streamed; cap the copy.
MAX_CAPTURED_BODY_BYTES = 64 * 1024

STATUS_SUCCESS = "success"
STATUS_FAILED = "failed"
STATUS_SKIPPED = "skipped"

OVERALL_SUCCESS = "success"
OVERALL_PARTIAL_FAILURE = "partial_failure"


@dataclass(frozen=True)
class CallResult:
    call_index: int
    method: str
    endpoint: str
    status: str
    http_status: int | None = None
    response_body: str | None = None
    latency_ms: float = 0.0
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "call_index": self.call_index,
            "method": self.method,
            "endpoint": self.endpoint,
            "status": self.status,
            "http_status": self.http_status,
            "response_body": self.response_body,
            "latency_ms": self.latency_ms,
            "error": self.error,
        }


@dataclass(frozen=True)
class TransactionReport:
    api_id: str
    results: tuple[CallResult, ...]

    @property
    def overall(self) -> str:
        if all(r.status == STATUS_SUCCESS for r in self.results):
            return OVERALL_SUCCESS
        return OVERALL_PARTIAL_FAILURE

    @property
    def executed(self) -> int:
        return sum(1 for r in self.results if r.status != STATUS_SKIPPED)

    def to_dict(self) -> dict:
        return {
            "api_id": self.api_id,
            "overall": self.overall,
            "results": [r.to_dict() for r in self.results],
        }


def _truncate(body: bytes) -> str:
    return body[:MAX_CAPTURED_BODY_BYTES].decode("utf-8", errors="replace")


class Dispatcher:
    """Executes registered transactions against the building backend."""

    def __init__(self, timeout_ms: int = 10_000, client: httpx.Client | None = None):
        if timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        self._owns_client = client is None
        # trust_env=False: proxies from the environment must not reroute
        # device traffic.
        self._client = client or httpx.Client(
            timeout=timeout_ms / 1000.0, trust_env=False
        )

    def close(self) -> None:
        if self._owns_client:
            self._client.close()

    def __enter__(self) -> "Dispatcher":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def execute(self, metadata) -> TransactionReport:
        """Run every call of ``metadata.transaction`` in order, stop on failure."""
        results: list[CallResult] = []
        failed = False
        for call_index, call in enumerate(metadata.transaction):
            if failed:
                results.append(
                    CallResult(
                        call_index=call_index,
                        method=call.method,
                        endpoint=call.endpoint,
                        status=STATUS_SKIPPED,
                        error="skipped after earlier failure",
                    )
                )
                continue
            results.append(self.execute_call(call, call_index))
            if results[-1].status != STATUS_SUCCESS:
                failed = True
        return TransactionReport(api_id=metadata.api_id, results=tuple(results))

    def execute_call(self, call, call_index: int = 0) -> CallResult:
        """Issue exactly one HTTP request; every failure mode lands in the result."""
        headers = {}
        body = call.body.encode("utf-8") if call.body else None
        if body is not None:
            headers["Content-Type"] = "application/json"
        started = time.monotonic()
        try:
            response = self._client.request(
                call.method, call.endpoint, content=body, headers=headers
            )
        except httpx.HTTPError as exc:
            return CallResult(
                call_index=call_index,
                method=call.method,
                endpoint=call.endpoint,
                status=STATUS_FAILED,
                error=f"{type(exc).__name__}: {exc}",
                latency_ms=(time.monotonic() - started) * 1000.0,
            )
        latency_ms = (time.monotonic() - started) * 1000.0
        captured = _truncate(response.content)
        if 200 <= response.status_code < 300:
            return CallResult(
                call_index=call_index,
                method=call.method,
                endpoint=call.endpoint,
                status=STATUS_SUCCESS,
                http_status=response.status_code,
                response_body=captured,
                latency_ms=latency_ms,
            )
        return CallResult(
            call_index=call_index,
            method=call.method,
            endpoint=call.endpoint,
            status=STATUS_FAILED,
            http_status=response.status_code,
            response_body=captured,
            error=f"HTTP {response.status_code}",
            latency_ms=latency_ms,
        )


def execute_call(call, timeout_ms: int = 10_000) -> CallResult:
    """One-shot :meth:`Dispatcher.execute_call`."""
    with Dispatcher(timeout_ms=timeout_ms) as dispatcher:
        return dispatcher.execute_call(call)


def execute_transaction(metadata, timeout_ms: int = 10_000) -> TransactionReport:
    """One-shot :meth:`Dispatcher.execute`."""
    with Dispatcher(timeout_ms=timeout_ms) as dispatcher:
        return dispatcher.execute(metadata)
