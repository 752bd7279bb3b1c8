"""Word-embedding store: GloVe-format loading and exact cosine k-NN.

Search is a full scan over the vocabulary. Assessment corpora issue at most
a few thousand queries, so determinism is worth more than an approximate
index here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, UnknownToken, ZeroVector

_ZERO_NORM = 1e-12


@dataclass
class EmbeddingTable:
    """Unit-normalized embedding rows with token lookup.

    Tokens keep the casing stored in the file; lookups fall back to the
    lowercased form so cased queries still resolve against lowercase
    vocabularies (first occurrence wins for duplicates).
    """

    dim: int
    vocab: dict[str, int]
    matrix: np.ndarray
    duplicate_count: int = 0
    _folded: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self._folded:
            for token, index in self.vocab.items():
                self._folded.setdefault(token.lower(), index)

    def lookup(self, token: str) -> int | None:
        index = self.vocab.get(token)
        if index is None:
            index = self._folded.get(token.lower())
        return index

    def __contains__(self, token: str) -> bool:
        return self.lookup(token) is not None

    def vector(self, token: str) -> np.ndarray:
        index = self.lookup(token)
        if index is None:
            raise UnknownToken(token)
        return self.matrix[index]

    def phrase_vector(self, phrase: str) -> np.ndarray | None:
        """Mean of in-vocabulary word vectors, renormalized; None if none hit."""
        rows = [self.lookup(word) for word in phrase.split()]
        rows = [r for r in rows if r is not None]
        if not rows:
            return None
        mean = self.matrix[rows].mean(axis=0)
        norm = np.linalg.norm(mean)
        if norm < _ZERO_NORM:
            return None
        return mean / norm


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Load a GloVe text file (token followed by dim floats per line)."""
    vocab: dict[str, int] = {}
    rows: list[np.ndarray] = []
    dim: int | None = None
    duplicates = 0
    with open(path, encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            fields = line.split()
            token, values = fields[0], fields[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise DimensionMismatch(f"line {number}: no vector components")
            if len(values) != dim:
                raise DimensionMismatch(
                    f"line {number}: expected {dim} components, found {len(values)}"
                )
            if token in vocab:
                duplicates += 1
                continue
            vector = np.asarray([float(v) for v in values], dtype=np.float64)
            norm = np.linalg.norm(vector)
            if norm < _ZERO_NORM:
                raise ZeroVector(f"line {number}: token {token!r} has zero norm")
            vocab[token] = len(rows)
            rows.append(vector / norm)
    if dim is None:
        raise DimensionMismatch("embedding file is empty")
    return EmbeddingTable(
        dim=dim, vocab=vocab, matrix=np.vstack(rows), duplicate_count=duplicates
    )


def cosine(table: EmbeddingTable, a: str, b: str) -> float:
    """Cosine similarity of two vocabulary tokens (rows are unit norm)."""
    return float(np.dot(table.vector(a), table.vector(b)))


def nearest_neighbors(table: EmbeddingTable, token: str, k: int) -> list[tuple[str, float]]:
    """Top-k cosine neighbors, most similar first, ties lexicographic.

    Multi-word queries are embedded as the renormalized mean of their
    in-vocabulary words. The query token and its constituent words are
    excluded from the results; unknown queries return an empty list.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    query = token.strip()
    if not query:
        return []
    if " " in query:
        vector = table.phrase_vector(query)
        if vector is None:
            return []
        excluded = {query.lower()} | {w.lower() for w in query.split()}
    else:
        index = table.lookup(query)
        if index is None:
            return []
        vector = table.matrix[index]
        excluded = {query.lower()}
    scores = table.matrix @ vector
    ranked = sorted(
        (-float(scores[row]), candidate)
        for candidate, row in table.vocab.items()
        if candidate.lower() not in excluded
    )
    return [(candidate, -negative) for negative, candidate in ranked[:k]]
