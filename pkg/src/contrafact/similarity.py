"""Membrane-area distance between song paths, and contrafact search.

The distance is the Riemann sum

    M(f, g) = sum_{n=0}^{N} ||f(n/N) - g(n/N)|| / N

taken literally at finite N (N+1 endpoint samples, each weighted 1/N).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .embedding import CooccurrenceModel
from .paths import SongPath, build_path, eval_path
from .pipeline import analyze_corpus, analyze_song, ordered_map

DEFAULT_SAMPLES = 1024
# Corpus-wide searches sample every path once up front when this fits in memory.
SAMPLE_CACHE_BYTES = 256 << 20


class ModelMismatch(ValueError):
    pass


class UnknownSong(KeyError):
    def __init__(self, song_id: str):
        self.song_id = song_id
        super().__init__(song_id)

    def __str__(self) -> str:
        return f"unknown song {self.song_id!r}"


@dataclass(frozen=True)
class MembraneParams:
    samples: int = DEFAULT_SAMPLES
    convergence_check: bool = False
    rel_tol: float = 1e-3
    max_samples: int = 1 << 20
    normalize: bool = False

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("samples must be at least 2")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")


def _sample_grid(n: int) -> np.ndarray:
    return np.arange(n + 1, dtype=np.float64) / n


def _check_compatible(f: SongPath, g: SongPath) -> None:
    if f.model_fingerprint != g.model_fingerprint:
        raise ModelMismatch("paths were built from different co-occurrence models")
    if f.boundary_beats != g.boundary_beats:
        raise ModelMismatch("paths use different START/END durations")
    if f.dim != g.dim:
        raise ModelMismatch("paths live in different dimensions")


def _riemann_from_samples(fs: np.ndarray, gs: np.ndarray, samples: int) -> float:
    return float(np.linalg.norm(fs - gs, axis=1).sum() / samples)


def riemann_membrane(f: SongPath, g: SongPath, samples: int) -> float:
    ts = _sample_grid(samples)
    return _riemann_from_samples(eval_path(f, ts), eval_path(g, ts), samples)


def _normalized(value: float, f: SongPath, g: SongPath, params: MembraneParams) -> float:
    if not params.normalize:
        return value
    scale = 0.5 * (f.length + g.length)
    return value / scale if scale > 0 else 0.0


def membrane_area(f: SongPath, g: SongPath, params: MembraneParams = MembraneParams()) -> float:
    """Distance between two paths built against the same model."""
    _check_compatible(f, g)
    n = params.samples
    value = riemann_membrane(f, g, n)
    if params.convergence_check:
        while n * 2 <= params.max_samples:
            n *= 2
            refined = riemann_membrane(f, g, n)
            done = abs(refined - value) <= params.rel_tol * max(abs(refined), 1e-300)
            value = refined
            if done:
                break
    return _normalized(value, f, g, params)


class _Sampler:
    """Membrane areas over a fixed set of paths, sampling each path at most once."""

    def __init__(self, paths: dict[str, SongPath], params: MembraneParams, workers: int | None):
        self.paths = paths
        self.params = params
        self.cache = None
        n = params.samples
        budget = sum((n + 1) * p.dim * 8 for p in paths.values())
        if not params.convergence_check and budget <= SAMPLE_CACHE_BYTES:
            grid = _sample_grid(n)
            ids = list(paths)
            self.cache = dict(zip(ids, ordered_map(lambda sid: eval_path(paths[sid], grid), ids, workers)))

    def area(self, a: str, b: str) -> float:
        f, g = self.paths[a], self.paths[b]
        if self.cache is None:
            return membrane_area(f, g, self.params)
        _check_compatible(f, g)
        value = _riemann_from_samples(self.cache[a], self.cache[b], self.params.samples)
        return _normalized(value, f, g, self.params)


@dataclass(frozen=True)
class SearchResult:
    query_id: str
    ranked: list[tuple[str, float]]
    params: MembraneParams


def corpus_paths(corpus, model: CooccurrenceModel, boundary_beats=Fraction(1), workers: int | None = None):
    """Pipeline every song and build its path; returns {song_id: SongPath} in corpus order."""
    analyses = analyze_corpus(corpus, workers)
    return {a.song.id: build_path(a.transposed, model, boundary_beats) for a in analyses}


def song_path(song, model: CooccurrenceModel, boundary_beats=Fraction(1)) -> SongPath:
    return build_path(analyze_song(song).transposed, model, boundary_beats)


def nearest_songs(
    query_id: str,
    corpus,
    model: CooccurrenceModel,
    params: MembraneParams = MembraneParams(),
    k: int = 10,
    boundary_beats=Fraction(1),
    workers: int | None = None,
    paths: dict[str, SongPath] | None = None,
) -> SearchResult:
    """The *k* songs closest to *query_id*, excluding the query itself."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if query_id not in corpus:
        raise UnknownSong(query_id)
    if paths is None:
        paths = corpus_paths(corpus, model, boundary_beats, workers)
    sampler = _Sampler(paths, params, workers)
    others = [sid for sid in paths if sid != query_id]
    dists = ordered_map(lambda sid: sampler.area(query_id, sid), others, workers)
    ranked = sorted(zip(others, dists), key=lambda t: (t[1], t[0]))
    return SearchResult(query_id, ranked[:k], params)


def pairwise_distances(
    corpus,
    model: CooccurrenceModel,
    params: MembraneParams = MembraneParams(),
    boundary_beats=Fraction(1),
    workers: int | None = None,
) -> tuple[list[str], np.ndarray]:
    """Symmetric distance matrix with zero diagonal; rows follow corpus order."""
    paths = corpus_paths(corpus, model, boundary_beats, workers)
    ids = list(paths)
    pairs = [(i, j) for i in range(len(ids)) for j in range(i + 1, len(ids))]
    sampler = _Sampler(paths, params, workers)
    values = ordered_map(lambda ij: sampler.area(ids[ij[0]], ids[ij[1]]), pairs, workers)
    mat = np.zeros((len(ids), len(ids)))
    for (i, j), d in zip(pairs, values):
        mat[i, j] = mat[j, i] = d
    return ids, mat


def distance_between(
    corpus,
    id_a: str,
    id_b: str,
    model: CooccurrenceModel,
    params: MembraneParams = MembraneParams(),
    boundary_beats=Fraction(1),
) -> float:
    for sid in (id_a, id_b):
        if sid not in corpus:
            raise UnknownSong(sid)
    return membrane_area(
        song_path(corpus[id_a], model, boundary_beats),
        song_path(corpus[id_b], model, boundary_beats),
        params,
    )
