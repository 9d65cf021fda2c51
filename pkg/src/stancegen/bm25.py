"""Okapi BM25 index and ranker for persona claim selection.

IDF uses the +1-inside-log variant, ln((N - df + 0.5) / (df + 0.5) + 1),
which keeps every IDF positive. Defaults k1=1.5, b=0.75. Tokenization is
delegated to metrics.tokenize so retrieval and evaluation agree on token
boundaries.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import EmptyCorpus, UnknownDocument
from .metrics import tokenize

DEFAULT_K1 = 1.5
DEFAULT_B = 0.75


@dataclass(frozen=True)
class Bm25Index:
    doc_ids: tuple[str, ...]
    term_frequencies: tuple[Mapping[str, int], ...]
    doc_lengths: tuple[int, ...]
    document_frequencies: Mapping[str, int]
    average_document_length: float
    k1: float
    b: float

    def __post_init__(self):
        object.__setattr__(
            self, "_positions", {doc_id: i for i, doc_id in enumerate(self.doc_ids)}
        )

    def __len__(self) -> int:
        return len(self.doc_ids)

    def position(self, doc_id: str) -> int:
        try:
            return self._positions[doc_id]
        except KeyError:
            raise UnknownDocument(f"doc_id {doc_id!r} not in index") from None


def build_index(
    docs: Sequence[tuple[str, str]], k1: float = DEFAULT_K1, b: float = DEFAULT_B
) -> Bm25Index:
    if not docs:
        raise EmptyCorpus("cannot index an empty document collection")
    if k1 < 0:
        raise ValueError(f"k1 must be >= 0, got {k1}")
    if not 0 <= b <= 1:
        raise ValueError(f"b must be in [0, 1], got {b}")
    doc_ids = []
    term_freqs = []
    lengths = []
    df: Counter = Counter()
    for doc_id, text in docs:
        tokens = tokenize(text)
        doc_ids.append(doc_id)
        term_freqs.append(Counter(tokens))
        lengths.append(len(tokens))
        df.update(set(tokens))
    avgdl = sum(lengths) / len(lengths)
    return Bm25Index(
        tuple(doc_ids),
        tuple(term_freqs),
        tuple(lengths),
        dict(df),
        avgdl,
        k1,
        b,
    )


def _idf(index: Bm25Index, term: str) -> float:
    df = index.document_frequencies.get(term, 0)
    n = len(index)
    return math.log((n - df + 0.5) / (df + 0.5) + 1.0)


def score(index: Bm25Index, query: str, doc_id: str) -> float:
    """Okapi BM25 score of one document for the query; unseen query terms
    contribute 0."""
    pos = index.position(doc_id)
    tf = index.term_frequencies[pos]
    dl = index.doc_lengths[pos]
    avgdl = index.average_document_length
    norm = index.k1 * (1.0 - index.b + index.b * dl / avgdl) if avgdl > 0 else index.k1
    total = 0.0
    for term in tokenize(query):
        f = tf.get(term, 0)
        if f == 0 or term not in index.document_frequencies:
            continue
        total += _idf(index, term) * (f * (index.k1 + 1.0)) / (f + norm)
    return total


def rank(index: Bm25Index, query: str, descending: bool = True) -> list[tuple[str, float]]:
    """All documents ordered by score; ties broken by ascending doc_id."""
    scored = [(doc_id, score(index, query, doc_id)) for doc_id in index.doc_ids]
    if descending:
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
    else:
        scored.sort(key=lambda pair: (pair[1], pair[0]))
    return scored
