from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vacscreen.errors import EmptyInputError, MissingVectorError, SchemaError
from vacscreen.features import (
    ContextualEmbeddingSource,
    EmbeddingTable,
    TokenizerConfig,
    Vocabulary,
    contextual_matrix,
    embed_average,
    fit_vocabulary,
    load_contextual,
    load_embeddings,
    lookup_contextual,
    tokenize,
    transform_bow,
    transform_bow_matrix,
)


class TestTokenize:
    def test_basic(self):
        assert tokenize("Wij zoeken een man.") == ["wij", "zoeken", "een", "man"]

    def test_empty(self):
        assert tokenize("") == []

    def test_punctuation_split(self):
        assert tokenize("m/v") == ["m", "v"]

    def test_keep_punctuation_tokens(self):
        config = TokenizerConfig(strip_punctuation=False)
        assert tokenize("m/v", config) == ["m", "/", "v"]

    def test_no_lowercase(self):
        config = TokenizerConfig(lowercase=False)
        assert tokenize("Wij Man", config) == ["Wij", "Man"]

    def test_diacritics_survive_nfc(self):
        assert tokenize("carrière") == ["carrière"]


class TestVocabulary:
    def test_unigrams_and_bigrams(self):
        vocab = fit_vocabulary(["a b", "b c"])
        assert set(vocab.entries) == {"a", "b", "c", "a b", "b c"}
        assert sorted(vocab.entries.values()) == list(range(5))

    def test_max_features_by_frequency_then_lexicographic(self):
        # frequencies: b:2, a:1, c:1, "a b":1, "b c":1
        vocab = fit_vocabulary(["a b", "b c"], max_features=3)
        assert set(vocab.entries) == {"b", "a", "a b"}

    def test_refit_identical(self):
        texts = ["een twee drie", "twee drie vier"]
        assert fit_vocabulary(texts) == fit_vocabulary(texts)

    def test_empty_train_rejected(self):
        with pytest.raises(EmptyInputError):
            fit_vocabulary([])

    def test_fingerprint_changes_with_content(self):
        a = fit_vocabulary(["a b"])
        b = fit_vocabulary(["a c"])
        assert a.fingerprint() != b.fingerprint()
        assert a.fingerprint() == fit_vocabulary(["a b"]).fingerprint()

    def test_round_trip_dict(self):
        vocab = fit_vocabulary(["a b c"])
        again = Vocabulary.from_dict(vocab.to_dict())
        assert again.entries == dict(vocab.entries)
        assert again.fingerprint() == vocab.fingerprint()


class TestTransformBow:
    def test_hand_counted(self):
        # hand count over the known n-grams: "b b" never occurs in the
        # training data, so it is not in the vocabulary and not counted
        vocab = fit_vocabulary(["a b", "b c"])
        vec = transform_bow("b b c", vocab)
        inverse = {i: g for g, i in vocab.entries.items()}
        assert {inverse[i]: c for i, c in vec.entries} == {"b": 2, "c": 1, "b c": 1}

    def test_unknown_ngrams_ignored(self):
        vocab = fit_vocabulary(["a b"])
        assert transform_bow("x y z", vocab).entries == ()

    def test_pure_function(self):
        vocab = fit_vocabulary(["a b", "c"])
        assert transform_bow("a c", vocab) == transform_bow("a c", vocab)

    def test_indices_strictly_increasing(self):
        vocab = fit_vocabulary(["een twee drie vier"])
        vec = transform_bow("vier drie twee een", vocab)
        indices = [i for i, _ in vec.entries]
        assert indices == sorted(set(indices))

    @given(st.lists(st.sampled_from(["man", "vrouw", "team", "werk"]), min_size=1, max_size=12))
    @settings(max_examples=100, deadline=None)
    def test_unigram_counts_sum_to_token_count(self, tokens):
        text = " ".join(tokens)
        vocab = fit_vocabulary([text], max_features=None)
        vec = transform_bow(text, vocab)
        unigram_ids = {i for g, i in vocab.entries.items() if " " not in g}
        total = sum(c for i, c in vec.entries if i in unigram_ids)
        assert total == len(tokens)

    def test_train_test_isolation(self):
        vocab = fit_vocabulary(["alpha beta"])
        vec = transform_bow("gamma delta", vocab)
        assert vec.entries == ()
        X = transform_bow_matrix(["alpha gamma", "beta"], vocab)
        assert X.shape == (2, len(vocab))
        assert X.sum() == 2  # only train-known grams counted

    def test_matrix_matches_per_sentence(self):
        texts = ["a b a", "b c", "c c c"]
        vocab = fit_vocabulary(texts)
        X = transform_bow_matrix(texts, vocab)
        for row, text in enumerate(texts):
            assert np.array_equal(
                X[row].toarray().ravel(), transform_bow(text, vocab).to_dense()
            )


def write_embeddings(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TestEmbeddings:
    def test_load_two_tokens(self, tmp_path):
        path = tmp_path / "emb.txt"
        write_embeddings(path, ["2 3", "man 1.0 0.0 0.5", "vrouw 0.0 1.0 0.5"])
        table = load_embeddings(path)
        assert table.dimension == 3
        assert len(table) == 2
        assert np.allclose(table.vectors["man"], [1.0, 0.0, 0.5])

    def test_dimension_error_names_line(self, tmp_path):
        path = tmp_path / "emb.txt"
        write_embeddings(path, ["2 3", "man 1.0 0.0 0.5", "vrouw 0.0 1.0"])
        with pytest.raises(SchemaError, match="emb.txt:3"):
            load_embeddings(path)

    def test_duplicate_token_last_wins_with_warning(self, tmp_path):
        path = tmp_path / "emb.txt"
        write_embeddings(path, ["2 2", "man 1.0 0.0", "man 0.0 1.0"])
        with pytest.warns(UserWarning, match="duplicate"):
            table = load_embeddings(path)
        assert np.allclose(table.vectors["man"], [0.0, 1.0])

    def test_average_of_two(self):
        table = EmbeddingTable(
            dimension=2,
            vectors={"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])},
        )
        avg = embed_average("a b", table)
        assert np.allclose(avg.values, [0.5, 0.5])
        assert not avg.all_oov

    def test_single_token_identity(self):
        table = EmbeddingTable(dimension=2, vectors={"a": np.array([2.0, 3.0])})
        assert np.array_equal(embed_average("a", table).values, [2.0, 3.0])

    def test_all_oov_zero_and_flagged(self):
        table = EmbeddingTable(dimension=2, vectors={"a": np.array([1.0, 1.0])})
        avg = embed_average("x y", table)
        assert avg.all_oov
        assert np.array_equal(avg.values, [0.0, 0.0])

    def test_oov_tokens_skipped(self):
        table = EmbeddingTable(dimension=1, vectors={"a": np.array([4.0])})
        assert embed_average("a onbekend", table).values[0] == 4.0

    @given(st.permutations(["a", "b", "c"]))
    @settings(max_examples=20, deadline=None)
    def test_permutation_invariance(self, order):
        table = EmbeddingTable(
            dimension=2,
            vectors={
                "a": np.array([1.0, 2.0]),
                "b": np.array([3.0, 4.0]),
                "c": np.array([5.0, 6.0]),
            },
        )
        base = embed_average("a b c", table).values
        permuted = embed_average(" ".join(order), table).values
        assert np.allclose(base, permuted)

    def test_scaling_linearity(self):
        rng = np.random.default_rng(0)
        vectors = {t: rng.normal(size=3) for t in ["a", "b", "c"]}
        table = EmbeddingTable(dimension=3, vectors=vectors)
        scaled = EmbeddingTable(
            dimension=3, vectors={t: 2.5 * v for t, v in vectors.items()}
        )
        assert np.allclose(
            2.5 * embed_average("a c", table).values,
            embed_average("a c", scaled).values,
        )


class TestContextual:
    def write(self, path, records):
        path.write_text("\n".join(records) + "\n", encoding="utf-8")

    def test_load_and_lookup(self, tmp_path):
        path = tmp_path / "ctx.jsonl"
        self.write(
            path,
            [
                '{"dimension": 2, "provenance": "external-encoder"}',
                '{"sentence_id": "s1", "vector": [0.1, 0.2]}',
                '{"sentence_id": "s2", "vector": [0.3, 0.4]}',
            ],
        )
        source = load_contextual(path)
        assert source.dimension == 2
        assert source.provenance == "external-encoder"
        assert np.allclose(lookup_contextual("s1", source), [0.1, 0.2])

    def test_missing_id_raises(self, tmp_path):
        path = tmp_path / "ctx.jsonl"
        self.write(path, ['{"dimension": 1}', '{"sentence_id": "s1", "vector": [1.0]}'])
        source = load_contextual(path)
        with pytest.raises(MissingVectorError, match="ghost"):
            lookup_contextual("ghost", source)

    def test_wrong_dimension_rejected(self, tmp_path):
        path = tmp_path / "ctx.jsonl"
        self.write(path, ['{"dimension": 2}', '{"sentence_id": "s1", "vector": [1.0]}'])
        with pytest.raises(SchemaError, match="ctx.jsonl:2"):
            load_contextual(path)

    def test_matrix_stacks_in_order(self, tmp_path):
        path = tmp_path / "ctx.jsonl"
        self.write(
            path,
            [
                '{"dimension": 1}',
                '{"sentence_id": "a", "vector": [1.0]}',
                '{"sentence_id": "b", "vector": [2.0]}',
            ],
        )
        source = load_contextual(path)
        assert np.array_equal(
            contextual_matrix(["b", "a"], source), [[2.0], [1.0]]
        )

    def test_all_vectors_share_dimension(self, tmp_path):
        path = tmp_path / "ctx.jsonl"
        self.write(
            path,
            ['{"dimension": 2}', '{"sentence_id": "a", "vector": [1.0, 2.0]}'],
        )
        source = load_contextual(path)
        for vec in source.vectors.values():
            assert vec.shape == (source.dimension,)
