"""In-memory exemplar store with exact top-k cosine search and JSON persistence.

Exemplar sets are small (tens to hundreds), so search is an exact linear
scan: reproducible, no approximation. The snapshot file keeps the
per-record field names of the source index mapping (``recordId``,
``apiId``, ``order``, ``embedding``) inside a small envelope.
"""

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingVector
from .errors import (
    DimensionMismatchError,
    DuplicateIdError,
    EmptyIndexError,
    NotFoundError,
    SchemaError,
)

_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class ExemplarRecord:
    """One labeled example utterance: (api_id, order, embedding)."""

    record_id: str
    api_id: str
    order: str
    embedding: EmbeddingVector

    def __post_init__(self):
        if not self.record_id:
            raise ValueError("record_id must be non-empty")
        if not self.api_id:
            raise ValueError("api_id must be non-empty")
        if not self.order:
            raise ValueError("order must be non-empty")
        if abs(self.embedding.norm() - 1.0) > _UNIT_TOL:
            raise ValueError("embedding must be unit-normalized")


class VectorIndex:
    """Exact-kNN exemplar index. Many readers or one writer at a time."""

    def __init__(self, dim: int | None = None):
        self._dim = dim
        self._records: dict[str, ExemplarRecord] = {}
        self._lock = threading.RLock()
        self._matrix: np.ndarray | None = None
        self._ids: list[str] | None = None
        self.created_at: str | None = None  # preserved across save/load

    @property
    def dim(self) -> int | None:
        return self._dim

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    def insert(self, record: ExemplarRecord) -> str:
        with self._lock:
            if self._dim is None:
                self._dim = record.embedding.dim
            elif record.embedding.dim != self._dim:
                raise DimensionMismatchError(
                    f"record dim {record.embedding.dim} != index dim {self._dim}"
                )
            if record.record_id in self._records:
                raise DuplicateIdError(f"record_id {record.record_id!r} already present")
            self._records[record.record_id] = record
            self._matrix = None
            return record.record_id

    def remove(self, record_id: str) -> ExemplarRecord:
        with self._lock:
            try:
                record = self._records.pop(record_id)
            except KeyError:
                raise NotFoundError(f"record_id {record_id!r} not in index")
            self._matrix = None
            return record

    def get(self, record_id: str) -> ExemplarRecord:
        with self._lock:
            try:
                return self._records[record_id]
            except KeyError:
                raise NotFoundError(f"record_id {record_id!r} not in index")

    def records(self) -> list[ExemplarRecord]:
        """All records, sorted by record_id."""
        with self._lock:
            return [self._records[rid] for rid in sorted(self._records)]

    def api_ids(self) -> set[str]:
        with self._lock:
            return {r.api_id for r in self._records.values()}

    def _snapshot_matrix(self) -> tuple[np.ndarray, list[str]]:
        with self._lock:
            if self._matrix is None:
                self._ids = sorted(self._records)
                self._matrix = np.array(
                    [self._records[rid].embedding.values for rid in self._ids],
                    dtype=np.float64,
                )
            return self._matrix, self._ids

    def nearest(
        self, query: EmbeddingVector, k: int
    ) -> list[tuple[ExemplarRecord, float]]:
        """Top-k records by cosine similarity, ties broken by ascending id.

        Pure query: the index is not mutated. Rows bitwise-equal to the
        query score exactly 1.0, mirroring ``cosine_similarity``.
        """
        if k < 1:
            raise ValueError("k must be positive")
        with self._lock:
            if not self._records:
                raise EmptyIndexError("nearest() on an empty index")
            if query.dim != self._dim:
                raise DimensionMismatchError(
                    f"query dim {query.dim} != index dim {self._dim}"
                )
            matrix, ids = self._snapshot_matrix()
            records = dict(self._records)
        q = query.as_array()
        qn = float(np.linalg.norm(q))
        row_norms = np.linalg.norm(matrix, axis=1)
        sims = np.clip((matrix @ q) / (row_norms * qn), -1.0, 1.0)
        sims[np.all(matrix == q, axis=1)] = 1.0
        ranked = sorted(zip(ids, sims.tolist()), key=lambda t: (-t[1], t[0]))
        return [(records[rid], sim) for rid, sim in ranked[:k]]


def _utc_now_rfc3339() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def save_index(index: VectorIndex, path: str | Path) -> None:
    """Write a snapshot; floats keep full round-trip precision.

    ``created_at`` is stamped once and preserved by load, so
    save -> load -> save is byte-identical.
    """
    if index.created_at is None:
        index.created_at = _utc_now_rfc3339()
    doc = {
        "dim": index.dim,
        "created_at": index.created_at,
        "records": [
            {
                "recordId": r.record_id,
                "apiId": r.api_id,
                "order": r.order,
                "embedding": list(r.embedding.values),
            }
            for r in index.records()
        ],
    }
    Path(path).write_text(
        json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )


def load_index(path: str | Path) -> VectorIndex:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"snapshot is not valid JSON: {exc}")
    return index_from_snapshot(doc)


def index_from_snapshot(doc) -> VectorIndex:
    if not isinstance(doc, dict):
        raise SchemaError("snapshot must be a JSON object")
    dim = doc.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError("snapshot field 'dim' must be a positive integer")
    records = doc.get("records")
    if not isinstance(records, list):
        raise SchemaError("snapshot field 'records' must be a list")
    index = VectorIndex(dim=dim)
    created_at = doc.get("created_at")
    if created_at is not None and not isinstance(created_at, str):
        raise SchemaError("snapshot field 'created_at' must be a string")
    index.created_at = created_at
    for i, raw in enumerate(records):
        if not isinstance(raw, dict):
            raise SchemaError(f"records[{i}] must be an object")
        for fld in ("recordId", "apiId", "order", "embedding"):
            if fld not in raw:
                raise SchemaError(f"records[{i}] is missing field '{fld}'")
        for fld in ("recordId", "apiId", "order"):
            if not isinstance(raw[fld], str) or not raw[fld]:
                raise SchemaError(f"records[{i}].{fld} must be a non-empty string")
        emb = raw["embedding"]
        if not isinstance(emb, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in emb
        ):
            raise SchemaError(f"records[{i}].embedding must be a list of numbers")
        if len(emb) != dim:
            raise SchemaError(
                f"records[{i}].embedding has dim {len(emb)}, snapshot dim is {dim}"
            )
        try:
            record = ExemplarRecord(
                record_id=raw["recordId"],
                api_id=raw["apiId"],
                order=raw["order"],
                embedding=EmbeddingVector.of(emb),
            )
        except ValueError as exc:
            raise SchemaError(f"records[{i}]: {exc}")
        try:
            index.insert(record)
        except DuplicateIdError:
            raise SchemaError(f"records[{i}]: duplicate recordId {raw['recordId']!r}")
    return index
