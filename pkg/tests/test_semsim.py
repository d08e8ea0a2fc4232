import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from plainadapt.errors import ProtocolError, ValidationError
from plainadapt.semsim import (
    HashEmbedder,
    TokenEmbeddings,
    embed,
    greedy_match,
    semsim,
)


def embeddings_from(vectors):
    vectors = np.asarray(vectors, dtype=float)
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return TokenEmbeddings(
        tokens=tuple(f"t{i}" for i in range(len(vectors))), vectors=vectors / norms
    )


class TestEmbed:
    def test_empty_text(self):
        result = embed("", HashEmbedder())
        assert result.tokens == ()

    def test_hash_embedder_deterministic(self):
        result = embed("cat cat", HashEmbedder())
        assert len(result.tokens) == 2
        np.testing.assert_array_equal(result.vectors[0], result.vectors[1])

    def test_rows_unit_norm(self):
        result = embed("patients improved after treatment", HashEmbedder())
        np.testing.assert_allclose(np.linalg.norm(result.vectors, axis=1), 1.0)

    def test_wrong_vector_count_is_protocol_error(self):
        class BadProvider:
            def embed_tokens(self, tokens):
                return np.ones((len(tokens) + 1, 4))

        with pytest.raises(ProtocolError):
            embed("two words", BadProvider())


class TestGreedyMatch:
    def test_identical_inputs(self):
        e = embed("the same words", HashEmbedder())
        score = greedy_match(e, e)
        assert score.precision == pytest.approx(1.0)
        assert score.recall == pytest.approx(1.0)
        assert score.f1 == pytest.approx(1.0)

    def test_orthogonal_vectors_score_zero(self):
        a = embeddings_from([[1, 0, 0]])
        b = embeddings_from([[0, 1, 0], [0, 0, 1]])
        score = greedy_match(a, b)
        assert score.precision == 0.0
        assert score.recall == 0.0
        assert score.f1 == 0.0

    def test_hand_computed_asymmetric_case(self):
        cand = embeddings_from([[1, 0]])
        ref = embeddings_from([[1, 0], [0, 1]])
        score = greedy_match(cand, ref)
        assert score.precision == pytest.approx(1.0)
        assert score.recall == pytest.approx(0.5)
        assert score.f1 == pytest.approx(2 / 3)

    def test_empty_side_raises(self):
        e = embed("word", HashEmbedder())
        empty = TokenEmbeddings(tokens=(), vectors=np.zeros((0, 1)))
        with pytest.raises(ValidationError):
            greedy_match(e, empty)

    @given(
        arrays(float, (3, 4), elements=st.floats(-5, 5)),
        arrays(float, (2, 4), elements=st.floats(-5, 5)),
    )
    @settings(max_examples=100, deadline=None)
    def test_precision_recall_symmetry(self, a_raw, b_raw):
        a = embeddings_from(a_raw)
        b = embeddings_from(b_raw)
        assert greedy_match(a, b).precision == pytest.approx(
            greedy_match(b, a).recall, abs=1e-12
        )

    def test_scale_invariance(self):
        raw = np.array([[1.0, 2.0], [3.0, 1.0]])
        assert greedy_match(
            embeddings_from(raw), embeddings_from(raw * 7.5)
        ).f1 == pytest.approx(1.0)

    def test_adding_matching_reference_token_never_decreases_precision(self):
        cand = embeddings_from([[1, 0], [0.6, 0.8]])
        ref = embeddings_from([[0, 1]])
        bigger_ref = embeddings_from([[0, 1], [1, 0]])
        assert greedy_match(cand, bigger_ref).precision >= greedy_match(cand, ref).precision


class TestSemsim:
    def test_best_reference_selected(self):
        score = semsim("patients improved", ["unrelated words here", "patients improved"],
                       HashEmbedder())
        assert score.f1 == pytest.approx(1.0)

    def test_single_reference_reduces_to_greedy_match(self):
        provider = HashEmbedder()
        direct = greedy_match(
            embed("patients improved", provider), embed("people got better", provider)
        )
        assert semsim("patients improved", ["people got better"], provider) == direct

    def test_empty_reference_list_raises(self):
        with pytest.raises(ValidationError):
            semsim("text", [], HashEmbedder())
