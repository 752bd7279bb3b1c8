"""GloVe loading and exact nearest-neighbor search against a full-scan oracle."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from agentzero.embeddings import cosine, load_embeddings, nearest_neighbors
from agentzero.errors import DimensionMismatch, UnknownToken, ZeroVector

from .oracles import knn_oracle


def write_glove(path, rows: dict[str, list[float]]):
    lines = [f"{token} " + " ".join(str(v) for v in values) for token, values in rows.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture()
def small_table(tmp_path):
    rows = {
        "alpha": [1.0, 0.0, 0.0, 0.0],
        "beta": [0.9, 0.1, 0.0, 0.0],
        "gamma": [0.0, 1.0, 0.0, 0.0],
    }
    return load_embeddings(write_glove(tmp_path / "glove.txt", rows))


class TestLoader:
    def test_small_fixture(self, small_table):
        assert small_table.dim == 4
        assert len(small_table.vocab) == 3

    def test_rows_are_normalized(self, small_table, embedding_table):
        for table in (small_table, embedding_table):
            norms = np.linalg.norm(table.matrix, axis=1)
            assert np.all(np.abs(norms - 1.0) < 1e-6)

    def test_bundled_table_contains_python(self, embedding_table):
        row = embedding_table.vector("python")
        assert abs(np.linalg.norm(row) - 1.0) < 1e-6

    def test_dimension_mismatch_reports_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("a 1.0 2.0 3.0 4.0\nb 1.0 2.0 3.0\n", encoding="utf-8")
        with pytest.raises(DimensionMismatch, match="line 2"):
            load_embeddings(path)

    def test_zero_vector_rejected(self, tmp_path):
        path = tmp_path / "zero.txt"
        path.write_text("a 1.0 0.0\nb 0.0 0.0\n", encoding="utf-8")
        with pytest.raises(ZeroVector, match="line 2"):
            load_embeddings(path)

    def test_duplicate_tokens_first_wins(self, tmp_path):
        path = tmp_path / "dup.txt"
        path.write_text("a 1.0 0.0\na 0.0 1.0\nb 0.0 1.0\n", encoding="utf-8")
        table = load_embeddings(path)
        assert table.duplicate_count == 1
        assert cosine(table, "a", "b") == pytest.approx(0.0)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("", encoding="utf-8")
        with pytest.raises(DimensionMismatch):
            load_embeddings(path)


class TestCosine:
    def test_self_similarity(self, small_table):
        assert cosine(small_table, "alpha", "alpha") == pytest.approx(1.0)

    def test_orthogonal_pair(self, small_table):
        assert cosine(small_table, "alpha", "gamma") == pytest.approx(0.0)

    def test_unknown_token(self, small_table):
        with pytest.raises(UnknownToken):
            cosine(small_table, "alpha", "missing")

    def test_matches_exact_arithmetic(self, small_table):
        expected = (1.0 * 0.9) / (1.0 * math.sqrt(0.9**2 + 0.1**2))
        assert cosine(small_table, "alpha", "beta") == pytest.approx(expected, abs=1e-9)


class TestNearestNeighbors:
    def test_duplicate_vector_ranks_first_with_cosine_one(self, tmp_path):
        rows = {"a": [0.6, 0.8], "b": [0.6, 0.8], "c": [1.0, 0.0]}
        table = load_embeddings(write_glove(tmp_path / "dup.txt", rows))
        neighbors = nearest_neighbors(table, "a", 2)
        assert neighbors[0][0] == "b"
        assert neighbors[0][1] == pytest.approx(1.0)

    def test_orthogonal_fixture(self, tmp_path):
        rows = {"x": [1.0, 0.0], "y": [0.0, 1.0]}
        table = load_embeddings(write_glove(tmp_path / "orth.txt", rows))
        assert nearest_neighbors(table, "x", 1) == [("y", pytest.approx(0.0))]

    def test_matches_brute_force_oracle_on_random_fixture(self, tmp_path):
        rng = random.Random(11)
        rows = {
            f"w{i:02d}": [rng.uniform(-1, 1) for _ in range(6)] for i in range(10)
        }
        table = load_embeddings(write_glove(tmp_path / "rand.txt", rows))
        for query in rows:
            expected = knn_oracle(rows, query, 5)
            actual = nearest_neighbors(table, query, 5)
            assert [t for t, _ in actual] == [t for t, _ in expected]
            for (_, got), (_, want) in zip(actual, expected):
                assert got == pytest.approx(want, abs=1e-9)

    def test_result_length_and_self_exclusion(self, embedding_table):
        size = len(embedding_table.vocab)
        for token in ("robert", "france", "Python"):
            for k in (1, 5, size + 10):
                neighbors = nearest_neighbors(embedding_table, token, k)
                assert len(neighbors) == min(k, size - 1)
                assert token.lower() not in {t.lower() for t, _ in neighbors}

    def test_unknown_query_returns_empty(self, embedding_table):
        assert nearest_neighbors(embedding_table, "zzzznope", 5) == []

    def test_case_folded_lookup(self, embedding_table):
        assert nearest_neighbors(embedding_table, "Robert", 3) == nearest_neighbors(
            embedding_table, "robert", 3
        )

    def test_phrase_query_averages_in_vocab_words(self, embedding_table):
        neighbors = nearest_neighbors(embedding_table, "robert annie", 3)
        assert neighbors
        returned = {t for t, _ in neighbors}
        assert "robert" not in returned and "annie" not in returned
        # Averaged person vectors stay in the person cluster.
        person_cluster = {"james", "john", "maria", "wei", "sarah", "alice", "tom", "rachel",
                          "bob", "david", "emma", "michael", "lisa", "carlos", "priya",
                          "nina", "omar", "elena"}
        assert returned <= person_cluster

    def test_phrase_with_no_known_words_is_empty(self, embedding_table):
        assert nearest_neighbors(embedding_table, "qqq www", 4) == []

    def test_k_must_be_positive(self, embedding_table):
        with pytest.raises(ValueError):
            nearest_neighbors(embedding_table, "robert", 0)

    def test_ties_broken_lexicographically(self, tmp_path):
        rows = {"q": [1.0, 0.0], "bb": [0.0, 1.0], "aa": [0.0, 1.0]}
        table = load_embeddings(write_glove(tmp_path / "tie.txt", rows))
        assert [t for t, _ in nearest_neighbors(table, "q", 2)] == ["aa", "bb"]
