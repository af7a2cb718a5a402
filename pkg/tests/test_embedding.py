import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modoc.embedding import (
    DIMENSION,
    EmbedderSpec,
    Embedding,
    centroid,
    cosine,
    embed,
    fnv1a64,
    tokenize,
)
from modoc.errors import DimensionMismatch, EmptyList

from oracles import oracle_accumulator, oracle_cosine_raw


def test_tokenize_rule_application():
    assert tokenize("Vocal-learning in Birds!") == ["vocal", "learning", "in", "birds"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_collapses_runs():
    assert tokenize("a  b") == ["a", "b"]


def test_fnv1a64_reference_vectors():
    # Published FNV-1a test vectors.
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_embed_self_cosine_is_one():
    for text in ("a", "vocal learning", "Zebra finches sing."):
        assert cosine(embed(text), embed(text)) == pytest.approx(1.0, abs=1e-9)


def test_embed_empty_is_zero_vector():
    e = embed("")
    assert e.is_zero
    assert e.dimension == DIMENSION


def test_embed_unit_norm():
    e = embed("plasticity of auditory circuits")
    assert abs(np.linalg.norm(e.values) - 1.0) < 1e-6


def test_embed_matches_independent_oracle_accumulators():
    texts = [
        "alpha beta",
        "gamma delta",
        "vocal learning in songbirds",
        "a a a repeated tokens",
        "Umlauts: schön blöd",
        "numbers 42 and 7",
    ]
    for text in texts:
        slots = oracle_accumulator(text)
        raw = np.zeros(DIMENSION)
        for slot, count in slots.items():
            raw[slot] = count
        norm = np.linalg.norm(raw)
        expected = raw / norm if norm else raw
        np.testing.assert_array_equal(embed(text).values, expected)


def test_embed_cross_cosine_frozen_oracle_value():
    # Computed with the independent accumulator oracle: the two feature sets
    # share no slots, so the cosine is exactly zero.
    expected = oracle_cosine_raw(
        oracle_accumulator("alpha beta"), oracle_accumulator("gamma delta")
    )
    assert expected == 0.0
    assert cosine(embed("alpha beta"), embed("gamma delta")) == expected


def test_embed_bigrams_are_order_sensitive():
    assert not np.array_equal(embed("a b").values, embed("b a").values)


def test_embed_deterministic_across_calls():
    a = embed("determinism check").values
    b = embed("determinism check").values
    assert a.tobytes() == b.tobytes()


def test_cosine_zero_vector_defined_case():
    assert cosine(embed("x"), embed("")) == 0.0


def test_cosine_antipodal():
    e = embed("song")
    neg = Embedding(-e.values)
    assert cosine(e, neg) == pytest.approx(-1.0, abs=1e-12)


def test_cosine_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        cosine(embed("x"), Embedding(np.zeros(8)))


def test_centroid_single_is_identity():
    e = embed("single")
    np.testing.assert_allclose(centroid([e]).values, e.values, atol=1e-15)


def test_centroid_cancellation_is_zero():
    e = embed("song")
    assert centroid([e, Embedding(-e.values)]).is_zero


def test_centroid_of_three_matches_mean_then_normalize_oracle():
    rng = random.Random(7)
    vectors = []
    for _ in range(3):
        raw = np.array([rng.gauss(0, 1) for _ in range(DIMENSION)])
        vectors.append(Embedding(raw / np.linalg.norm(raw)))
    mean = np.mean([v.values for v in vectors], axis=0)
    expected = mean / math.sqrt(float(np.dot(mean, mean)))
    np.testing.assert_allclose(centroid(vectors).values, expected, atol=1e-12)


def test_centroid_empty_list_rejected():
    with pytest.raises(EmptyList):
        centroid([])


def test_embedder_spec_rejects_tiny_dimension():
    with pytest.raises(ValueError):
        EmbedderSpec(dimension=8)


def test_embedder_spec_round_trip():
    spec = EmbedderSpec()
    assert EmbedderSpec.from_dict(spec.to_dict()) == spec


@given(st.text(max_size=80))
@settings(max_examples=200, deadline=None)
def test_embed_is_normalized_or_zero(text):
    e = embed(text)
    norm = float(np.linalg.norm(e.values))
    assert norm == 0.0 or abs(norm - 1.0) < 1e-6


@given(st.text(alphabet=st.characters(whitelist_categories=("Ll", "Zs")), max_size=60))
@settings(max_examples=100, deadline=None)
def test_scaling_before_normalization_keeps_ranking(text):
    # cosine ranking is invariant under positive rescaling pre-normalization
    e = embed(text)
    scaled = Embedding(e.values * 3.5)
    probe = embed("probe text for ranking")
    if e.is_zero:
        assert cosine(scaled, probe) == 0.0
    else:
        scaled_norm = Embedding(scaled.values / np.linalg.norm(scaled.values))
        assert cosine(scaled_norm, probe) == pytest.approx(cosine(e, probe), abs=1e-9)
