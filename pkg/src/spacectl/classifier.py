"""Relevance gate and API-identifier classification over embeddings.

The gate asks "is this message about the building at all?" by comparing
against the single closest exemplar. Classification is nearest-centroid
over cosine: training-free, deterministic, and easy to audit for the
tens of classes a building exposes. The signatures allow swapping in a
learned classifier later without touching callers.
"""

import json
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .embeddings import EmbeddingVector, cosine_similarity
from .errors import (
    DegenerateClassError,
    DimensionMismatchError,
    EmptyTrainingSetError,
    SchemaError,
    UniverseMismatchError,
    ZeroVectorError,
)
from .index import ExemplarRecord, VectorIndex

ACCEPTED = "accepted"
REJECTED = "rejected"


@dataclass(frozen=True)
class CentroidModel:
    """One unit centroid per api_id, with the exemplar count behind each."""

    dim: int
    classes: dict[str, EmbeddingVector]
    trained_from: dict[str, int]


@dataclass(frozen=True)
class IntentDecision:
    """Outcome of gate + classification for one message."""

    status: str
    api_id: str | None
    gate_similarity: float
    class_scores: dict[str, float]
    threshold: float


class GateResult(NamedTuple):
    passed: bool
    gate_similarity: float
    best: ExemplarRecord


def train(exemplars: Sequence[ExemplarRecord]) -> CentroidModel:
    """Centroid per api_id: L2-normalized mean of the class's embeddings."""
    if not exemplars:
        raise EmptyTrainingSetError("no exemplars to train from")
    dim = exemplars[0].embedding.dim
    sums: dict[str, np.ndarray] = {}
    counts: dict[str, int] = {}
    for record in exemplars:
        if record.embedding.dim != dim:
            raise DimensionMismatchError(
                f"exemplar {record.record_id!r} has dim {record.embedding.dim}, expected {dim}"
            )
        if record.api_id not in sums:
            sums[record.api_id] = np.zeros(dim, dtype=np.float64)
            counts[record.api_id] = 0
        sums[record.api_id] += record.embedding.as_array()
        counts[record.api_id] += 1
    classes: dict[str, EmbeddingVector] = {}
    for api_id in sorted(sums):
        mean = sums[api_id] / counts[api_id]
        try:
            classes[api_id] = EmbeddingVector.of(mean).unit()
        except ZeroVectorError:
            raise DegenerateClassError(
                f"class {api_id!r} has a zero mean embedding"
            )
    return CentroidModel(dim=dim, classes=classes, trained_from=dict(counts))


def classify(
    model: CentroidModel, query: EmbeddingVector
) -> tuple[str, dict[str, float]]:
    """Cosine score against every centroid; argmax wins, ties to the
    lexicographically smallest api_id."""
    if query.dim != model.dim:
        raise DimensionMismatchError(
            f"query dim {query.dim} != model dim {model.dim}"
        )
    scores = {
        api_id: cosine_similarity(query, centroid)
        for api_id, centroid in model.classes.items()
    }
    best = min(scores.items(), key=lambda kv: (-kv[1], kv[0]))[0]
    return best, scores


def gate(index: VectorIndex, query: EmbeddingVector, tau: float) -> GateResult:
    """Threshold test on the closest exemplar; the boundary is inclusive."""
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    record, similarity = index.nearest(query, 1)[0]
    return GateResult(similarity >= tau, similarity, record)


def build_decision(
    passed: bool, gate_similarity: float, class_scores: dict[str, float], tau: float
) -> IntentDecision:
    if not passed:
        return IntentDecision(
            status=REJECTED,
            api_id=None,
            gate_similarity=gate_similarity,
            class_scores=class_scores,
            threshold=tau,
        )
    api_id = min(class_scores.items(), key=lambda kv: (-kv[1], kv[0]))[0]
    return IntentDecision(
        status=ACCEPTED,
        api_id=api_id,
        gate_similarity=gate_similarity,
        class_scores=class_scores,
        threshold=tau,
    )


def decide(
    index: VectorIndex,
    model: CentroidModel,
    query: EmbeddingVector,
    tau: float,
) -> IntentDecision:
    """Gate then classify. Rejections still carry class scores so a UI
    can explain what the message was closest to."""
    # An empty index is the gate's error to raise; the universe check
    # only makes sense once there is something to compare against.
    if len(index):
        missing = set(model.classes) - index.api_ids()
        if missing:
            raise UniverseMismatchError(
                f"model classes not present in index: {sorted(missing)}"
            )
    passed, similarity, _best = gate(index, query, tau)
    _, scores = classify(model, query)
    return build_decision(passed, similarity, scores, tau)


def export_model_json(model: CentroidModel) -> str:
    doc = {
        "dim": model.dim,
        "classes": {
            api_id: list(vec.values) for api_id, vec in sorted(model.classes.items())
        },
        "trainedFrom": {
            api_id: model.trained_from[api_id] for api_id in sorted(model.trained_from)
        },
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def model_from_json(text: str) -> CentroidModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"model export is not valid JSON: {exc}")
    try:
        dim = doc["dim"]
        classes = {
            api_id: EmbeddingVector.of(values)
            for api_id, values in doc["classes"].items()
        }
        trained_from = {k: int(v) for k, v in doc["trainedFrom"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad model export: {exc}")
    if not classes:
        raise SchemaError("model export has no classes")
    for api_id, vec in classes.items():
        if vec.dim != dim:
            raise SchemaError(f"class {api_id!r} has dim {vec.dim}, expected {dim}")
    return CentroidModel(dim=dim, classes=classes, trained_from=trained_from)
