"""Per-song preprocessing shared by the model, path and report layers.

reduce to classes -> estimate key signature -> resolve -> transpose to 0 accidentals
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

from .classes import ChordClassSequence, reduce_song
from .corpus import Song
from .keys import (
    EstimationReport,
    KeyEstimate,
    KeySignature,
    MissingDeclaredKey,
    NoTonalContent,
    estimate_key,
    fifths_distance,
    resolve_key,
    transpose,
)

T = TypeVar("T")
R = TypeVar("R")

WORKERS_ENV = "CONTRAFACT_WORKERS"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def ordered_map(fn: Callable[[T], R], items: Sequence[T], workers: int | None = None) -> list[R]:
    """``list(map(fn, items))``, optionally threaded; result order never depends on workers."""
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class SongAnalysis:
    song: Song
    classes: ChordClassSequence
    estimate: KeyEstimate | None
    key: KeySignature
    transposed: ChordClassSequence


def analyze_song(song: Song) -> SongAnalysis:
    """Reduce, estimate and transpose one song.

    Songs with no tonal content (only diminished/no-chord) fall back to the
    declared key, or to no transposition when there is none.
    """
    seq = reduce_song(song.events, song.id)
    try:
        est = estimate_key(seq)
    except NoTonalContent:
        est = None
        key = song.declared_key or KeySignature(0)
    else:
        key = resolve_key(est, song.declared_key)
    return SongAnalysis(song, seq, est, key, transpose(seq, key))


def analyze_corpus(songs: Iterable[Song], workers: int | None = None) -> list[SongAnalysis]:
    return ordered_map(analyze_song, list(songs), workers)


def evaluate_estimation(songs: Iterable[Song]) -> EstimationReport:
    """Circle-of-fifths histogram of (estimate -> declared) over a corpus."""
    songs = list(songs)
    for s in songs:
        if s.declared_key is None:
            raise MissingDeclaredKey(s.id)
    report = EstimationReport()
    for s in songs:
        try:
            est = estimate_key(reduce_song(s.events, s.id))
        except NoTonalContent:
            report.no_tonal_content += 1
            continue
        if est.ambiguous:
            report.ambiguous += 1
        else:
            report.distances[fifths_distance(est.winner, s.declared_key)] += 1
    return report
