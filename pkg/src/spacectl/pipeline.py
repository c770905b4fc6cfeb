"""Message-to-actuation pipeline.

One chat message flows through six steps: receive text, embed it, gate
against the exemplar index, classify to an api_id, look the api_id up in
the registry, and execute the transaction. Rejection at the gate ends
the flow with no outbound call, so the trace carries steps 1 to 3 for
rejected messages and all 6 for accepted ones.
"""

import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

from .classifier import (
    CentroidModel,
    IntentDecision,
    build_decision,
    classify,
    gate,
    train,
)
from .embeddings import (
    DEFAULT_API_KEY_ENV,
    DEFAULT_DIM,
    PROVIDER_LOCAL_HASH,
    EmbeddingProvider,
    ProviderConfig,
    make_provider,
)
from .errors import (
    EmptyTextError,
    MisconfigurationError,
    NotFoundError,
    SchemaError,
)
from .executor import Dispatcher, TransactionReport
from .index import ExemplarRecord, VectorIndex, index_from_snapshot
from .registry import Registry, load_registry

DEFAULT_LISTEN = "127.0.0.1:8400"
DEFAULT_CALL_TIMEOUT_MS = 5_000

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    provider: ProviderConfig
    tau: float
    exemplars_path: Path
    registry_path: Path
    listen_host: str = "127.0.0.1"
    listen_port: int = 8400
    dry_run: bool = False
    call_timeout_ms: int = DEFAULT_CALL_TIMEOUT_MS

    def __post_init__(self):
        if not (0.0 < self.tau <= 1.0):
            raise MisconfigurationError(f"tau must be in (0, 1], got {self.tau}")
        if not (0 < self.listen_port < 65536):
            raise MisconfigurationError(f"invalid listen port {self.listen_port}")
        if self.call_timeout_ms <= 0:
            raise MisconfigurationError("call_timeout_ms must be positive")


def _parse_listen(address: str) -> tuple[str, int]:
    host, sep, port_text = address.rpartition(":")
    if not sep or not host:
        raise MisconfigurationError(
            f"listen_address must be host:port, got {address!r}"
        )
    try:
        port = int(port_text)
    except ValueError:
        raise MisconfigurationError(f"invalid listen port {port_text!r}")
    return host, port


def _provider_from_doc(doc: dict) -> ProviderConfig:
    if not isinstance(doc, dict):
        raise MisconfigurationError("provider must be an object")
    try:
        return ProviderConfig(
            kind=doc.get("kind", PROVIDER_LOCAL_HASH),
            remote_base_url=doc.get("base_url"),
            remote_model_name=doc.get("model"),
            api_key_env_name=doc.get("api_key_env", DEFAULT_API_KEY_ENV),
            dim=doc.get("dim", DEFAULT_DIM),
            timeout_ms=doc.get("timeout_ms", 10_000),
            max_retries=doc.get("max_retries", 3),
        )
    except (ValueError, TypeError) as exc:
        raise MisconfigurationError(f"invalid provider config: {exc}")


def load_config(path: str | Path) -> PipelineConfig:
    """Parse a JSON config file; relative paths resolve against its directory."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise MisconfigurationError(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise MisconfigurationError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise MisconfigurationError("config must be a JSON object")
    for fld in ("tau", "exemplars_path", "registry_path"):
        if fld not in doc:
            raise MisconfigurationError(f"config is missing field '{fld}'")
    if not isinstance(doc["tau"], (int, float)) or isinstance(doc["tau"], bool):
        raise MisconfigurationError("tau must be a number")
    timeout = doc.get("call_timeout_ms", DEFAULT_CALL_TIMEOUT_MS)
    if not isinstance(timeout, int) or isinstance(timeout, bool):
        raise MisconfigurationError("call_timeout_ms must be an integer")
    dry_run = doc.get("dry_run", False)
    if not isinstance(dry_run, bool):
        raise MisconfigurationError("dry_run must be a boolean")

    base = path.parent

    def resolve(p: str) -> Path:
        candidate = Path(p)
        if not candidate.is_absolute():
            candidate = base / candidate
        if not candidate.is_file():
            raise MisconfigurationError(f"config references missing file {candidate}")
        return candidate

    host, port = _parse_listen(doc.get("listen_address", DEFAULT_LISTEN))
    return PipelineConfig(
        provider=_provider_from_doc(doc.get("provider", {})),
        tau=float(doc["tau"]),
        exemplars_path=resolve(doc["exemplars_path"]),
        registry_path=resolve(doc["registry_path"]),
        listen_host=host,
        listen_port=port,
        dry_run=dry_run,
        call_timeout_ms=timeout,
    )


@dataclass(frozen=True)
class StepRecord:
    step: int
    duration_ms: float
    summary: str

    def to_dict(self) -> dict:
        return {"step": self.step, "duration_ms": self.duration_ms, "summary": self.summary}


@dataclass(frozen=True)
class PipelineResponse:
    decision: IntentDecision
    report: TransactionReport | None
    matched_exemplar: dict | None
    trace: tuple[StepRecord, ...]

    def to_dict(self) -> dict:
        return {
            "decision": {
                "status": self.decision.status,
                "api_id": self.decision.api_id,
                "gate_similarity": self.decision.gate_similarity,
                "class_scores": dict(self.decision.class_scores),
                "threshold": self.decision.threshold,
            },
            "report": self.report.to_dict() if self.report else None,
            "matched_exemplar": self.matched_exemplar,
            "trace": [r.to_dict() for r in self.trace],
        }


def load_exemplar_index(provider: EmbeddingProvider, path: str | Path) -> VectorIndex:
    """Load exemplars from a snapshot, or embed a raw utterance list.

    A snapshot (object with "records") loads without touching the
    provider. A raw file is a JSON array of {"apiId", "order"} where
    order is the utterance text; record ids are assigned per class as
    <apiId>-001, <apiId>-002, ... in file order.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"exemplar file {path} is not valid JSON: {exc}")
    if isinstance(doc, dict) and "records" in doc:
        return index_from_snapshot(doc)
    if not isinstance(doc, list):
        raise SchemaError("exemplar file must be a snapshot object or a JSON array")
    entries = []
    for i, raw in enumerate(doc):
        if not isinstance(raw, dict):
            raise SchemaError(f"exemplar {i} must be an object")
        for fld in ("apiId", "order"):
            if fld not in raw or not isinstance(raw[fld], str) or not raw[fld]:
                raise SchemaError(f"exemplar {i} needs non-empty string field '{fld}'")
        entries.append((raw["apiId"], raw["order"]))
    vectors = provider.embed_batch([order for _, order in entries])
    index = VectorIndex()
    counts: dict[str, int] = {}
    for (api_id, order), vector in zip(entries, vectors):
        counts[api_id] = counts.get(api_id, 0) + 1
        index.insert(
            ExemplarRecord(
                record_id=f"{api_id}-{counts[api_id]:03d}",
                api_id=api_id,
                order=order,
                embedding=vector,
            )
        )
    return index


class Pipeline:
    """Shared read-only routing state plus the dispatcher."""

    def __init__(
        self,
        provider: EmbeddingProvider,
        index: VectorIndex,
        model: CentroidModel,
        registry: Registry,
        tau: float,
        dry_run: bool = False,
        call_timeout_ms: int = DEFAULT_CALL_TIMEOUT_MS,
    ):
        if not (0.0 < tau <= 1.0):
            raise MisconfigurationError(f"tau must be in (0, 1], got {tau}")
        self.provider = provider
        self.index = index
        self.model = model
        self.registry = registry
        self.tau = tau
        self.dry_run = dry_run
        self._dispatcher = Dispatcher(timeout_ms=call_timeout_ms)

    @classmethod
    def from_config(cls, config: PipelineConfig) -> "Pipeline":
        provider = make_provider(config.provider)
        index = load_exemplar_index(provider, config.exemplars_path)
        model = train(index.records())
        registry = load_registry(config.registry_path)
        missing = [c for c in model.classes if c not in registry.api_ids()]
        if missing:
            raise MisconfigurationError(
                f"classes with no registry entry: {', '.join(missing)}"
            )
        return cls(
            provider=provider,
            index=index,
            model=model,
            registry=registry,
            tau=config.tau,
            dry_run=config.dry_run,
            call_timeout_ms=config.call_timeout_ms,
        )

    def close(self) -> None:
        self._dispatcher.close()
        self.provider.close()

    def handle_message(self, text: str) -> PipelineResponse:
        trace: list[StepRecord] = []

        def record(step: int, started: float, summary: str, **extra) -> None:
            entry = StepRecord(
                step=step,
                duration_ms=(time.monotonic() - started) * 1000.0,
                summary=summary,
            )
            trace.append(entry)
            logger.info("%s", json.dumps({**entry.to_dict(), **extra}))

        started = time.monotonic()
        if not text or not text.strip():
            record(1, started, "rejected: empty message")
            raise EmptyTextError(trace=tuple(trace))
        record(1, started, f"received message ({len(text)} chars)")

        started = time.monotonic()
        query = self.provider.embed_text(text)
        record(2, started, f"embedded via {self.provider.kind} (dim {query.dim})")

        started = time.monotonic()
        gate_result = gate(self.index, query, self.tau)
        best_record = gate_result.best
        matched = {
            "record_id": best_record.record_id,
            "api_id": best_record.api_id,
            "order": best_record.order,
            "similarity": gate_result.gate_similarity,
        }
        verdict = "passed" if gate_result.passed else "below threshold"
        record(
            3,
            started,
            f"gate {verdict}: similarity {gate_result.gate_similarity:.6f} "
            f"vs tau {self.tau} (nearest {best_record.record_id})",
            gate_similarity=gate_result.gate_similarity,
        )

        # Scores are computed either way so rejections stay explainable,
        # but classification only counts as a step when the gate passed.
        api_id, scores = classify(self.model, query)
        if not gate_result.passed:
            decision = build_decision(
                False, gate_result.gate_similarity, scores, self.tau
            )
            return PipelineResponse(
                decision=decision,
                report=None,
                matched_exemplar=matched,
                trace=tuple(trace),
            )

        started = time.monotonic()
        record(
            4,
            started,
            f"classified as {api_id} (score {scores[api_id]:.6f})",
            api_id=api_id,
        )
        decision = build_decision(True, gate_result.gate_similarity, scores, self.tau)

        started = time.monotonic()
        try:
            metadata = self.registry.get(api_id)
        except NotFoundError:
            raise MisconfigurationError(
                f"classifier produced {api_id!r} but the registry has no such api_id"
            )
        record(
            5,
            started,
            f"registry lookup {api_id}: {len(metadata.transaction)} call transaction",
        )

        started = time.monotonic()
        if self.dry_run:
            record(
                6,
                started,
                f"dry run: {len(metadata.transaction)} calls not dispatched",
            )
            return PipelineResponse(
                decision=decision,
                report=None,
                matched_exemplar=matched,
                trace=tuple(trace),
            )
        report = self._dispatcher.execute(metadata)
        record(
            6,
            started,
            f"executed {report.executed}/{len(report.results)} calls, "
            f"overall {report.overall}",
        )
        return PipelineResponse(
            decision=decision,
            report=report,
            matched_exemplar=matched,
            trace=tuple(trace),
        )
