import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from spacectl.embeddings import (
    DEFAULT_DIM,
    MIN_HASH_DIM,
    EmbeddingVector,
    LocalHashProvider,
    ProviderConfig,
    cosine_similarity,
    embed_batch,
    embed_text,
    fnv1a_64,
    local_hash_embed,
)
from spacectl.errors import (
    DimensionMismatchError,
    EmptyTextError,
    ZeroVectorError,
)

LOCAL = ProviderConfig(kind="local_hash", dim=DEFAULT_DIM)


def vec(*values) -> EmbeddingVector:
    return EmbeddingVector.of(values)


class TestFnv:
    def test_empty_input_is_offset_basis(self):
        assert fnv1a_64(b"") == 14695981039346656037

    @pytest.mark.parametrize(
        "data", [b"on", b"off", b"light", b"a", b"elevator", bytes(range(7))]
    )
    def test_matches_reference_implementation(self, data):
        assert fnv1a_64(data) == oracles.fnv1a_64(data)

    def test_known_token_slot(self):
        # frozen reference values for the token "on" at dim 256
        assert fnv1a_64(b"on") == 626097138334851952
        assert fnv1a_64(b"on") % 256 == 112


class TestLocalHashEmbed:
    def test_single_short_token_occupies_its_hash_slot(self):
        v = local_hash_embed("on", 256)
        assert v.values[112] == 1.0
        assert sum(1 for x in v.values if x != 0.0) == 1

    def test_case_folding(self):
        assert local_hash_embed("On", 256) == local_hash_embed("on", 256)

    def test_deterministic(self):
        a = local_hash_embed("turn on the light")
        b = local_hash_embed("turn on the light")
        assert a.values == b.values

    def test_repeated_token_is_parallel(self):
        double = local_hash_embed("light light", 256)
        single = local_hash_embed("light", 256)
        assert abs(cosine_similarity(double, single) - 1.0) <= 1e-9

    def test_matches_reference_embedder(self):
        for text in (
            "turn on the light",
            "I'm leaving the office",
            "call the lift to floor three",
            "a305 12f",
        ):
            ours = local_hash_embed(text).values
            ref = oracles.embed(text)
            assert np.allclose(ours, ref, atol=1e-12)

    def test_unit_norm(self):
        for text in ("leave office", "x", "many tokens in this sentence"):
            assert abs(local_hash_embed(text).norm() - 1.0) <= 1e-9

    def test_trigram_windows_weighted_half(self):
        # "abcd" -> token slot 1.0 plus trigrams "abc", "bcd" at 0.5
        v = local_hash_embed("abcd", 256)
        weights = sorted(x for x in v.values if x != 0.0)
        norm = math.sqrt(1.0**2 + 0.5**2 + 0.5**2)
        assert weights == pytest.approx([0.5 / norm, 0.5 / norm, 1.0 / norm])

    def test_dim_floor(self):
        with pytest.raises(ValueError):
            local_hash_embed("on", MIN_HASH_DIM - 1)

    def test_empty_and_whitespace_rejected(self):
        with pytest.raises(EmptyTextError):
            local_hash_embed("")
        with pytest.raises(EmptyTextError):
            local_hash_embed("   ")

    def test_symbol_only_text_is_zero_vector(self):
        with pytest.raises(ZeroVectorError):
            local_hash_embed("!!! ???")


class TestEmbedOps:
    def test_embed_text_unit_norm(self):
        assert abs(embed_text("leave office", LOCAL).norm() - 1.0) <= 1e-9

    def test_embed_text_empty(self):
        with pytest.raises(EmptyTextError):
            embed_text("   ", LOCAL)

    def test_shared_token_orders_similarity(self):
        a = embed_text("turn on the light", LOCAL)
        b = embed_text("switch the light on", LOCAL)
        c = embed_text("elevator down please", LOCAL)
        near = cosine_similarity(a, b)
        far = cosine_similarity(a, c)
        assert near > far
        assert near == pytest.approx(
            oracles.cosine(oracles.embed("turn on the light"), oracles.embed("switch the light on")),
            abs=1e-9,
        )
        assert far == pytest.approx(0.0, abs=1e-9)

    def test_batch_empty_list(self):
        assert embed_batch([], LOCAL) == []

    def test_batch_pointwise(self):
        batch = embed_batch(["a", "b"], LOCAL)
        assert batch[0] == embed_text("a", LOCAL)
        assert batch[1] == embed_text("b", LOCAL)

    def test_batch_reports_failing_index(self):
        with pytest.raises(EmptyTextError, match="1"):
            embed_batch(["a", ""], LOCAL)

    def test_provider_object_matches_module_ops(self):
        provider = LocalHashProvider()
        assert provider.embed_text("leave office") == embed_text("leave office", LOCAL)


class TestEmbeddingVector:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            EmbeddingVector.of([])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            EmbeddingVector.of([1.0, float("nan")])
        with pytest.raises(ValueError):
            EmbeddingVector.of([float("inf"), 0.0])

    def test_unit_rejects_zero(self):
        with pytest.raises(ZeroVectorError):
            vec(0.0, 0.0).unit()

    def test_unit_normalizes(self):
        assert vec(3.0, 4.0).unit().values == (0.6, 0.8)


class TestProviderConfig:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ProviderConfig(kind="fancy")

    def test_local_requires_dim(self):
        with pytest.raises(ValueError):
            ProviderConfig(kind="local_hash", dim=None)

    def test_remote_requires_base_url(self):
        with pytest.raises(ValueError):
            ProviderConfig(kind="remote")


class TestCosine:
    def test_identity(self):
        v = local_hash_embed("anything at all")
        assert cosine_similarity(v, v) == 1.0

    def test_orthogonal(self):
        assert cosine_similarity(vec(1.0, 0.0), vec(0.0, 1.0)) == 0.0

    def test_analytic_forty_five_degrees(self):
        inv = 1.0 / math.sqrt(2.0)
        assert cosine_similarity(vec(inv, inv), vec(1.0, 0.0)) == pytest.approx(
            0.70710678, abs=1e-8
        )

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            cosine_similarity(vec(1.0, 0.0), vec(1.0, 0.0, 0.0))

    def test_zero_vector(self):
        with pytest.raises(ZeroVectorError):
            cosine_similarity(vec(0.0, 0.0), vec(1.0, 0.0))

    def test_matches_reference_cosine(self):
        a = local_hash_embed("leave the office")
        b = local_hash_embed("aircon off")
        ref = oracles.cosine(list(a.values), list(b.values))
        assert cosine_similarity(a, b) == pytest.approx(ref, abs=1e-12)


finite_components = st.floats(
    min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False
)


def nonzero_pair():
    return (
        st.integers(min_value=2, max_value=32)
        .flatmap(
            lambda n: st.tuples(
                st.lists(finite_components, min_size=n, max_size=n),
                st.lists(finite_components, min_size=n, max_size=n),
            )
        )
        .filter(lambda ab: any(ab[0]) and any(ab[1]))
    )


class TestCosineProperties:
    @given(nonzero_pair())
    def test_symmetry(self, pair):
        a, b = EmbeddingVector.of(pair[0]), EmbeddingVector.of(pair[1])
        assert abs(cosine_similarity(a, b) - cosine_similarity(b, a)) <= 1e-12

    @given(nonzero_pair())
    def test_range(self, pair):
        a, b = EmbeddingVector.of(pair[0]), EmbeddingVector.of(pair[1])
        assert -1.0 <= cosine_similarity(a, b) <= 1.0

    @given(nonzero_pair(), st.floats(min_value=1e-3, max_value=1e3))
    def test_scale_invariance(self, pair, c):
        a, b = EmbeddingVector.of(pair[0]), EmbeddingVector.of(pair[1])
        scaled = EmbeddingVector.of([c * x for x in pair[0]])
        assert abs(
            cosine_similarity(scaled, b) - cosine_similarity(a, b)
        ) <= 1e-9
