"""Chord-class co-occurrence model.

Every transposed song becomes the token stream START, s_1, ..., s_N, END.
Each adjacent pair (a, b) adds one to ``counts[a, b]`` and one to
``counts[b, a]``; rows, L2-normalized, are the class embeddings.

Model file layout (little-endian)::

    b"CFCM" | u32 version | 63*63 u64 counts, row-major | u64 song count
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .classes import END, N_CLASSES, START, ChordClass, ChordClassSequence
from .pipeline import analyze_corpus

MAGIC = b"CFCM"
VERSION = 1
_HEADER = struct.Struct("<4sI")
_TRAILER = struct.Struct("<Q")


class EmptyCorpus(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


def token_indices(seq: ChordClassSequence) -> np.ndarray:
    return np.array([START.index, *(c.index for c in seq.classes), END.index], dtype=np.intp)


def count_adjacencies(sequences: Iterable[ChordClassSequence]) -> np.ndarray:
    counts = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    for seq in sequences:
        tok = token_indices(seq)
        np.add.at(counts, (tok[:-1], tok[1:]), 1)
        np.add.at(counts, (tok[1:], tok[:-1]), 1)
    return counts


@dataclass(frozen=True, eq=False)
class CooccurrenceModel:
    counts: np.ndarray
    corpus_size: int
    embeddings: np.ndarray = field(init=False, repr=False)
    zero_rows: frozenset[int] = field(init=False)
    fingerprint: str = field(init=False)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (N_CLASSES, N_CLASSES):
            raise ValueError(f"counts must be {N_CLASSES}x{N_CLASSES}, got {counts.shape}")
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        counts.setflags(write=False)
        norms = np.linalg.norm(counts.astype(np.float64), axis=1)
        zero = norms == 0
        emb = counts / np.where(zero, 1.0, norms)[:, None]
        emb.setflags(write=False)
        digest = hashlib.sha256(counts.astype("<u8").tobytes() + _TRAILER.pack(self.corpus_size))
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "embeddings", emb)
        object.__setattr__(self, "zero_rows", frozenset(np.flatnonzero(zero).tolist()))
        object.__setattr__(self, "fingerprint", digest.hexdigest()[:16])

    @classmethod
    def from_sequences(cls, sequences: Iterable[ChordClassSequence]) -> CooccurrenceModel:
        sequences = list(sequences)
        if not sequences:
            raise EmptyCorpus("cannot build a model from an empty corpus")
        return cls(count_adjacencies(sequences), len(sequences))

    def embedding(self, cls_: ChordClass) -> np.ndarray:
        return self.embeddings[cls_.index]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CooccurrenceModel):
            return NotImplemented
        return self.corpus_size == other.corpus_size and np.array_equal(self.counts, other.counts)

    def __hash__(self) -> int:
        return hash(self.fingerprint)

    def to_bytes(self) -> bytes:
        return (
            _HEADER.pack(MAGIC, VERSION)
            + self.counts.astype("<u8").tobytes()
            + _TRAILER.pack(self.corpus_size)
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> CooccurrenceModel:
        expected = _HEADER.size + N_CLASSES * N_CLASSES * 8 + _TRAILER.size
        if len(data) != expected:
            raise ModelFormatError(f"model file is {len(data)} bytes, expected {expected}")
        magic, version = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ModelFormatError("not a co-occurrence model file (bad magic)")
        if version != VERSION:
            raise ModelFormatError(f"unsupported model version {version}")
        counts = np.frombuffer(data, dtype="<u8", count=N_CLASSES * N_CLASSES, offset=_HEADER.size)
        (size,) = _TRAILER.unpack_from(data, expected - _TRAILER.size)
        return cls(counts.reshape(N_CLASSES, N_CLASSES).astype(np.int64), int(size))

    def save(self, path) -> None:
        with open(path, "wb") as f:
            f.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> CooccurrenceModel:
        with open(path, "rb") as f:
            return cls.from_bytes(f.read())


def build_model(corpus, workers: int | None = None) -> CooccurrenceModel:
    """Run the full per-song pipeline over *corpus* and count adjacencies."""
    analyses = analyze_corpus(corpus, workers)
    if not analyses:
        raise EmptyCorpus("cannot build a model from an empty corpus")
    return CooccurrenceModel.from_sequences(a.transposed for a in analyses)


def cosine_similarity(model: CooccurrenceModel, a: ChordClass, b: ChordClass) -> float:
    if a.index in model.zero_rows or b.index in model.zero_rows:
        return 0.0
    if a == b:
        return 1.0
    return float(np.dot(model.embeddings[a.index], model.embeddings[b.index]))


def nearest_classes(model: CooccurrenceModel, query: ChordClass, k: int) -> list[tuple[ChordClass, float]]:
    """Top-*k* classes by cosine similarity to *query*, the query itself included.

    Zero-row classes are never returned. Ties go to the lower class index.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if query.index in model.zero_rows:
        return []
    scored = [
        (cosine_similarity(model, query, ChordClass(j)), j)
        for j in range(N_CLASSES)
        if j not in model.zero_rows
    ]
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [(ChordClass(j), s) for s, j in scored[:k]]
