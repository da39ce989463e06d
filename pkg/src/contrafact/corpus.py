"""JSON-lines corpus ingestion and chord-category statistics.

One song per line::

    {"id": "...", "title": "...", "key_signature": -1, "beats_per_measure": 4,
     "chords": [["Dm7", 2, 1], ["G7", 1, 2], ...]}

Each chord entry is ``[symbol, beats_numerator, beats_denominator]``.
``key_signature`` counts accidentals (negative = flats) or is null.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .chords import Category, ChordSyntaxError, ParsedChord, parse_chord, render_chord
from .keys import KeySignature


class MalformedRecord(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


@dataclass(frozen=True)
class ChordEvent:
    chord: ParsedChord
    beats: Fraction

    def __post_init__(self):
        if self.beats <= 0:
            raise ValueError(f"chord duration must be positive, got {self.beats}")


@dataclass(frozen=True)
class Song:
    id: str
    title: str
    declared_key: KeySignature | None
    beats_per_measure: int
    events: tuple[ChordEvent, ...]

    def __post_init__(self):
        if not self.events:
            raise ValueError(f"song {self.id!r} has no chords")
        if self.beats_per_measure <= 0:
            raise ValueError("beats_per_measure must be positive")

    @property
    def total_beats(self) -> Fraction:
        return sum((e.beats for e in self.events), Fraction(0))


class Corpus:
    """Ordered, immutable collection of songs with unique ids."""

    def __init__(self, songs: Iterable[Song] = ()):
        self.songs: tuple[Song, ...] = tuple(songs)
        self._by_id = {}
        for s in self.songs:
            if s.id in self._by_id:
                raise ValueError(f"duplicate song id {s.id!r}")
            self._by_id[s.id] = s

    def __len__(self) -> int:
        return len(self.songs)

    def __iter__(self) -> Iterator[Song]:
        return iter(self.songs)

    def __contains__(self, song_id: str) -> bool:
        return song_id in self._by_id

    def __getitem__(self, song_id: str) -> Song:
        return self._by_id[song_id]

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.songs]


def _positive_int(value, what: str, line: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise MalformedRecord(line, f"{what} must be a positive integer, got {value!r}")
    return value


def parse_record(obj, line: int = 0) -> Song:
    if not isinstance(obj, dict):
        raise MalformedRecord(line, "record is not a JSON object")
    try:
        song_id, title, chords = obj["id"], obj.get("title", ""), obj["chords"]
    except KeyError as e:
        raise MalformedRecord(line, f"missing field {e.args[0]!r}") from None
    if not isinstance(song_id, str) or not song_id:
        raise MalformedRecord(line, "id must be a non-empty string")
    if not isinstance(title, str):
        raise MalformedRecord(line, "title must be a string")

    ks = obj.get("key_signature")
    if ks is None:
        key = None
    elif isinstance(ks, int) and not isinstance(ks, bool) and -7 <= ks <= 7:
        key = KeySignature(ks)
    else:
        raise MalformedRecord(line, f"key_signature must be an integer in [-7, 7] or null, got {ks!r}")
    bpm = _positive_int(obj.get("beats_per_measure", 4), "beats_per_measure", line)

    if not isinstance(chords, list) or not chords:
        raise MalformedRecord(line, "chords must be a non-empty list")
    events = []
    for entry in chords:
        if not (isinstance(entry, list) and len(entry) == 3 and isinstance(entry[0], str)):
            raise MalformedRecord(line, f"chord entry must be [symbol, num, den], got {entry!r}")
        symbol = entry[0]
        num = _positive_int(entry[1], "beats numerator", line)
        den = _positive_int(entry[2], "beats denominator", line)
        try:
            chord = parse_chord(symbol)
        except ChordSyntaxError as e:
            e.line = line
            raise
        events.append(ChordEvent(chord, Fraction(num, den)))
    return Song(song_id, title, key, bpm, tuple(events))


def _numbered_records(lines: Iterable[str]) -> Iterator[tuple[int, Song]]:
    for lineno, text in enumerate(lines, start=1):
        if not text.strip():
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise MalformedRecord(lineno, f"invalid JSON ({e.msg})") from None
        yield lineno, parse_record(obj, lineno)


def iter_records(lines: Iterable[str]) -> Iterator[Song]:
    for _, song in _numbered_records(lines):
        yield song


def load_corpus(path) -> Corpus:
    """Load a JSONL corpus. Raises OSError, MalformedRecord or ChordSyntaxError."""
    songs = []
    seen = set()
    with open(path, encoding="utf-8") as f:
        for lineno, song in _numbered_records(f):
            if song.id in seen:
                raise MalformedRecord(lineno, f"duplicate song id {song.id!r}")
            seen.add(song.id)
            songs.append(song)
    return Corpus(songs)


def song_to_record(song: Song) -> dict:
    return {
        "id": song.id,
        "title": song.title,
        "key_signature": None if song.declared_key is None else song.declared_key.accidentals,
        "beats_per_measure": song.beats_per_measure,
        "chords": [
            [e.chord.raw or render_chord(e.chord), e.beats.numerator, e.beats.denominator]
            for e in song.events
        ],
    }


def dump_corpus(corpus: Iterable[Song], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for song in corpus:
            f.write(json.dumps(song_to_record(song), ensure_ascii=False) + "\n")


def make_song(
    song_id: str,
    chords: Iterable[str | tuple[str, object]],
    key: int | None = None,
    title: str = "",
    beats_per_measure: int = 4,
    default_beats=4,
) -> Song:
    """Convenience constructor: chords are symbols or (symbol, beats) pairs."""
    events = []
    for item in chords:
        symbol, beats = (item, default_beats) if isinstance(item, str) else item
        events.append(ChordEvent(parse_chord(symbol), Fraction(beats)))
    declared = None if key is None else KeySignature(key)
    return Song(song_id, title or song_id, declared, beats_per_measure, tuple(events))


@dataclass(frozen=True)
class CategoryStats:
    counts: dict[Category, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def percent(self, category: Category) -> float:
        return 100.0 * self.counts[category] / self.total if self.total else 0.0

    def rows(self) -> list[tuple[str, int, float]]:
        return [(c.value, self.counts[c], self.percent(c)) for c in Category]

    def to_text(self) -> str:
        rows = self.rows()
        width = max(len(r[0]) for r in rows + [("Totals", 0, 0)])
        lines = [f"{'Type':<{width}}  {'Number':>8}  {'Percentage':>10}"]
        lines += [f"{name:<{width}}  {n:>8}  {pct:>9.3f}%" for name, n, pct in rows]
        total_pct = 100.0 if self.total else 0.0
        lines.append(f"{'Totals':<{width}}  {self.total:>8}  {total_pct:>9.3f}%")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["type", "number", "percentage"])
        for name, n, pct in self.rows():
            w.writerow([name, n, f"{pct:.3f}"])
        return buf.getvalue()


def corpus_stats(corpus: Iterable[Song]) -> CategoryStats:
    counter = Counter(e.chord.category for song in corpus for e in song.events)
    return CategoryStats({c: counter.get(c, 0) for c in Category})
