import json
import math

import numpy as np
import pytest

import oracles
from spacectl.embeddings import EmbeddingVector
from spacectl.errors import (
    DimensionMismatchError,
    DuplicateIdError,
    EmptyIndexError,
    NotFoundError,
    SchemaError,
)
from spacectl.index import ExemplarRecord, VectorIndex, load_index, save_index


def unit(*values) -> EmbeddingVector:
    return EmbeddingVector.of(values).unit()


def record(record_id, api_id="intent", order="utterance", embedding=None):
    return ExemplarRecord(
        record_id=record_id,
        api_id=api_id,
        order=order,
        embedding=embedding if embedding is not None else unit(1.0, 0.0),
    )


def random_unit_vectors(count: int, dim: int, seed: int) -> list[EmbeddingVector]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        v = rng.normal(size=dim)
        out.append(EmbeddingVector.of(v).unit())
    return out


class TestRecordValidation:
    def test_requires_unit_embedding(self):
        with pytest.raises(ValueError):
            record("r1", embedding=EmbeddingVector.of([3.0, 4.0]))

    def test_requires_non_empty_fields(self):
        with pytest.raises(ValueError):
            record("")
        with pytest.raises(ValueError):
            record("r1", api_id="")
        with pytest.raises(ValueError):
            record("r1", order="")


class TestMutation:
    def test_insert_then_size(self):
        index = VectorIndex()
        index.insert(record("r1"))
        assert len(index) == 1

    def test_first_insert_fixes_dim(self):
        index = VectorIndex()
        index.insert(record("r1", embedding=unit(1.0, 0.0)))
        assert index.dim == 2
        with pytest.raises(DimensionMismatchError):
            index.insert(record("r2", embedding=unit(1.0, 0.0, 0.0)))

    def test_duplicate_id(self):
        index = VectorIndex()
        index.insert(record("r1"))
        with pytest.raises(DuplicateIdError):
            index.insert(record("r1"))

    def test_get_and_remove(self):
        index = VectorIndex()
        index.insert(record("r1"))
        assert index.get("r1").record_id == "r1"
        removed = index.remove("r1")
        assert removed.record_id == "r1"
        assert len(index) == 0
        with pytest.raises(NotFoundError):
            index.get("r1")
        with pytest.raises(NotFoundError):
            index.remove("r1")

    def test_list_empty(self):
        assert VectorIndex().records() == []

    def test_records_sorted_by_id(self):
        index = VectorIndex()
        index.insert(record("b"))
        index.insert(record("a"))
        assert [r.record_id for r in index.records()] == ["a", "b"]


class TestNearest:
    def test_single_record_identity(self):
        index = VectorIndex()
        r = record("r1", embedding=unit(0.3, 0.4, 0.5))
        index.insert(r)
        results = index.nearest(r.embedding, 1)
        assert results[0][0].record_id == "r1"
        assert abs(results[0][1] - 1.0) <= 1e-9

    def test_bitwise_identical_query_scores_exactly_one(self):
        index = VectorIndex()
        r = record("r1", embedding=unit(0.123, 0.456, 0.789))
        index.insert(r)
        assert index.nearest(r.embedding, 1)[0][1] == 1.0

    def test_k_larger_than_size_returns_all_sorted(self):
        index = VectorIndex()
        index.insert(record("r1", embedding=unit(1.0, 0.0)))
        index.insert(record("r2", embedding=unit(0.0, 1.0)))
        results = index.nearest(unit(1.0, 0.1), 10)
        assert len(results) == 2
        assert results[0][0].record_id == "r1"
        assert results[0][1] >= results[1][1]

    def test_ties_broken_by_ascending_record_id(self):
        index = VectorIndex()
        shared = unit(1.0, 0.0)
        index.insert(record("zz", embedding=shared))
        index.insert(record("aa", embedding=shared))
        results = index.nearest(shared, 2)
        assert [r.record_id for r, _ in results] == ["aa", "zz"]

    def test_empty_index(self):
        with pytest.raises(EmptyIndexError):
            VectorIndex().nearest(unit(1.0, 0.0), 1)

    def test_dim_mismatch(self):
        index = VectorIndex()
        index.insert(record("r1"))
        with pytest.raises(DimensionMismatchError):
            index.nearest(unit(1.0, 0.0, 0.0), 1)

    def test_k_must_be_positive(self):
        index = VectorIndex()
        index.insert(record("r1"))
        with pytest.raises(ValueError):
            index.nearest(unit(1.0, 0.0), 0)

    def test_query_purity(self):
        index = VectorIndex()
        index.insert(record("r1"))
        index.insert(record("r2", embedding=unit(0.0, 1.0)))
        before = [(r.record_id, r.embedding.values) for r in index.records()]
        index.nearest(unit(0.6, 0.8), 2)
        after = [(r.record_id, r.embedding.values) for r in index.records()]
        assert before == after

    def test_removed_record_never_returned(self):
        index = VectorIndex()
        index.insert(record("r1", embedding=unit(1.0, 0.0)))
        index.insert(record("r2", embedding=unit(0.9, 0.1)))
        index.remove("r1")
        results = index.nearest(unit(1.0, 0.0), 5)
        assert [r.record_id for r, _ in results] == ["r2"]

    def test_matches_oracle_on_random_vectors(self):
        dim = 32
        vectors = random_unit_vectors(200, dim, seed=7)
        queries = random_unit_vectors(20, dim, seed=11)
        index = VectorIndex()
        labeled = []
        for i, v in enumerate(vectors):
            rid = f"r{i:04d}"
            index.insert(record(rid, embedding=v))
            labeled.append((rid, list(v.values)))
        for q in queries:
            for k in (1, 5, 20):
                ours = [(r.record_id, s) for r, s in index.nearest(q, k)]
                ref = oracles.knn(labeled, list(q.values), k)
                assert [rid for rid, _ in ours] == [rid for rid, _ in ref]
                for (_, s1), (_, s2) in zip(ours, ref):
                    assert abs(s1 - s2) <= 1e-9

    def test_similarities_non_increasing(self):
        vectors = random_unit_vectors(50, 16, seed=3)
        index = VectorIndex()
        for i, v in enumerate(vectors):
            index.insert(record(f"r{i:03d}", embedding=v))
        results = index.nearest(random_unit_vectors(1, 16, seed=4)[0], 50)
        sims = [s for _, s in results]
        assert sims == sorted(sims, reverse=True)


class TestPersistence:
    def build(self) -> VectorIndex:
        index = VectorIndex()
        index.insert(record("r1", api_id="a", order="first", embedding=unit(1.0, 0.0, 0.0)))
        index.insert(record("r2", api_id="b", order="second", embedding=unit(0.0, 1.0, 0.0)))
        index.insert(record("r3", api_id="b", order="third", embedding=unit(1.0, 1.0, 1.0)))
        return index

    def test_round_trip_bit_for_bit(self, tmp_path):
        index = self.build()
        path = tmp_path / "snapshot.json"
        save_index(index, path)
        loaded = load_index(path)
        assert len(loaded) == 3
        for original, back in zip(index.records(), loaded.records()):
            assert original.record_id == back.record_id
            assert original.api_id == back.api_id
            assert original.order == back.order
            assert original.embedding.values == back.embedding.values

    def test_save_load_save_byte_identical(self, tmp_path):
        first = tmp_path / "one.json"
        second = tmp_path / "two.json"
        index = self.build()
        save_index(index, first)
        save_index(load_index(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_snapshot_field_names(self, tmp_path):
        path = tmp_path / "snapshot.json"
        save_index(self.build(), path)
        doc = json.loads(path.read_text("utf-8"))
        assert set(doc) == {"dim", "created_at", "records"}
        assert set(doc["records"][0]) == {"recordId", "apiId", "order", "embedding"}

    def test_missing_order_field_names_it(self, tmp_path):
        path = tmp_path / "snapshot.json"
        save_index(self.build(), path)
        doc = json.loads(path.read_text("utf-8"))
        del doc["records"][1]["order"]
        path.write_text(json.dumps(doc), "utf-8")
        with pytest.raises(SchemaError, match="order"):
            load_index(path)

    def test_mixed_dims_rejected(self, tmp_path):
        path = tmp_path / "snapshot.json"
        save_index(self.build(), path)
        doc = json.loads(path.read_text("utf-8"))
        doc["records"][2]["embedding"] = [1.0, 0.0]
        path.write_text(json.dumps(doc), "utf-8")
        with pytest.raises(SchemaError, match="dim"):
            load_index(path)

    def test_duplicate_record_id_rejected(self, tmp_path):
        path = tmp_path / "snapshot.json"
        save_index(self.build(), path)
        doc = json.loads(path.read_text("utf-8"))
        doc["records"][1]["recordId"] = doc["records"][0]["recordId"]
        path.write_text(json.dumps(doc), "utf-8")
        with pytest.raises(SchemaError, match="duplicate"):
            load_index(path)

    def test_full_precision_floats(self, tmp_path):
        v = unit(1.0, math.pi, math.e)
        index = VectorIndex()
        index.insert(record("r1", embedding=v))
        path = tmp_path / "snapshot.json"
        save_index(index, path)
        assert load_index(path).get("r1").embedding.values == v.values
