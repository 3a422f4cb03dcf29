"""Tokenization and sparse TF-IDF features for transcripts.

Tokenization lowercases and splits on runs of non-alphanumeric characters;
both customer and agent text contribute to a transcript's document. Weights
are tf * idf with idf = ln((1+D)/(1+df)) + 1, then L2-normalized.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SchemaError

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def transcript_tokens(transcript) -> list[str]:
    tokens: list[str] = []
    for utt in transcript.utterances:
        tokens.extend(tokenize(utt.text))
    return tokens


@dataclass(frozen=True)
class SparseVector:
    """(index, weight) pairs with strictly increasing indices."""

    indices: np.ndarray
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return self.indices.shape[0]


@dataclass(frozen=True)
class Vocabulary:
    index: dict[str, int]
    doc_freq: np.ndarray
    n_documents: int

    @property
    def size(self) -> int:
        return len(self.index)

    def idf(self) -> np.ndarray:
        return np.log((1.0 + self.n_documents) / (1.0 + self.doc_freq)) + 1.0


def fit_vocabulary(transcripts, min_doc_freq: int = 2) -> Vocabulary:
    """Build a vocabulary over a corpus, dropping tokens below min_doc_freq.

    Column indices are assigned by lexicographic token order, so the result
    is independent of corpus ordering.
    """
    docs = list(transcripts)
    if not docs:
        raise ValueError("cannot fit a vocabulary on an empty corpus")
    df: Counter[str] = Counter()
    for t in docs:
        df.update(set(transcript_tokens(t)))
    kept = sorted(tok for tok, count in df.items() if count >= min_doc_freq)
    index = {tok: i for i, tok in enumerate(kept)}
    freq = np.array([df[tok] for tok in kept], dtype=np.int64)
    return Vocabulary(index=index, doc_freq=freq, n_documents=len(docs))


def vectorize_tokens(vocab: Vocabulary, tokens) -> SparseVector:
    counts: Counter[int] = Counter()
    index = vocab.index
    for tok in tokens:
        col = index.get(tok)
        if col is not None:
            counts[col] += 1
    if not counts:
        return SparseVector(
            indices=np.empty(0, dtype=np.int32), values=np.empty(0, dtype=np.float64)
        )
    cols = np.array(sorted(counts), dtype=np.int32)
    tf = np.array([counts[int(c)] for c in cols], dtype=np.float64)
    idf = np.log((1.0 + vocab.n_documents) / (1.0 + vocab.doc_freq[cols])) + 1.0
    weights = tf * idf
    weights /= np.linalg.norm(weights)
    return SparseVector(indices=cols, values=weights)


def vectorize(vocab: Vocabulary, transcript) -> SparseVector:
    """TF-IDF vector for one transcript; unknown tokens are dropped."""
    return vectorize_tokens(vocab, transcript_tokens(transcript))


def to_csr(vectors, n_features: int):
    """Stack sparse vectors into CSR arrays (data, indices, indptr)."""
    vecs = list(vectors)
    indptr = np.zeros(len(vecs) + 1, dtype=np.int64)
    for i, v in enumerate(vecs):
        indptr[i + 1] = indptr[i] + v.nnz
    data = np.empty(indptr[-1], dtype=np.float64)
    indices = np.empty(indptr[-1], dtype=np.int32)
    for i, v in enumerate(vecs):
        lo, hi = indptr[i], indptr[i + 1]
        data[lo:hi] = v.values
        indices[lo:hi] = v.indices
    if indices.size and indices.max(initial=0) >= n_features:
        raise ValueError("sparse vector index exceeds feature count")
    return data, indices, indptr


def save_vocabulary(path, vocab: Vocabulary) -> None:
    lines = [f"n_documents={vocab.n_documents}", "token,index,df"]
    for tok, col in sorted(vocab.index.items(), key=lambda kv: kv[1]):
        lines.append(f"{tok},{col},{int(vocab.doc_freq[col])}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_vocabulary(path) -> Vocabulary:
    lines = Path(path).read_text().splitlines()
    if len(lines) < 2 or not lines[0].startswith("n_documents="):
        raise SchemaError(f"{path}: missing vocabulary header")
    try:
        n_docs = int(lines[0].split("=", 1)[1])
    except ValueError as exc:
        raise SchemaError(f"{path} line 1: bad document count") from exc
    if lines[1] != "token,index,df":
        raise SchemaError(f"{path} line 2: expected column header 'token,index,df'")
    index: dict[str, int] = {}
    rows: list[tuple[int, int]] = []
    for lineno, line in enumerate(lines[2:], start=3):
        parts = line.split(",")
        if len(parts) != 3:
            raise SchemaError(f"{path} line {lineno}: expected 3 fields")
        tok, col_s, df_s = parts
        try:
            col, df = int(col_s), int(df_s)
        except ValueError as exc:
            raise SchemaError(f"{path} line {lineno}: bad index/df") from exc
        index[tok] = col
        rows.append((col, df))
    freq = np.zeros(len(rows), dtype=np.int64)
    for col, df in rows:
        if not 0 <= col < len(rows):
            raise SchemaError(f"{path}: column index {col} out of range")
        freq[col] = df
    return Vocabulary(index=index, doc_freq=freq, n_documents=n_docs)
