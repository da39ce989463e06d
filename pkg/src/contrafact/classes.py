"""Reduction of parsed chords onto 61 chord classes.

Five chord types on twelve roots plus a no-chord class; two more tokens,
START and END, bracket every song for the co-occurrence model. The canonical
index is ``type_rank * 12 + root`` for pitched classes, then NC=60,
START=61, END=62. Persisted models depend on this ordering.

Triads, sus chords and slash chords that resolve to a sus chord depend on
the class of the *following* chord, so :func:`reduce_song` walks each song
right to left.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .chords import Family, ParsedChord, chord_tones, pitch_name

N_CLASSES = 63
NO_CHORD_INDEX = 60
START_INDEX = 61
END_INDEX = 62


class ChordType(enum.IntEnum):
    M = 0
    m = 1
    DOM7 = 2
    h = 3
    o = 4

    @property
    def suffix(self) -> str:
        return _TYPE_SUFFIX[self]


_TYPE_SUFFIX = {ChordType.M: "M", ChordType.m: "m", ChordType.DOM7: "7", ChordType.h: "h", ChordType.o: "o"}


@dataclass(frozen=True, order=True)
class ChordClass:
    """One of the 63 chord-class tokens, identified by its canonical index."""

    index: int

    def __post_init__(self):
        if not 0 <= self.index < N_CLASSES:
            raise ValueError(f"chord class index out of range: {self.index}")

    @classmethod
    def pitched(cls, type_: ChordType, root: int) -> ChordClass:
        return cls(int(type_) * 12 + root % 12)

    @property
    def is_pitched(self) -> bool:
        return self.index < NO_CHORD_INDEX

    @property
    def type(self) -> ChordType | None:
        return ChordType(self.index // 12) if self.is_pitched else None

    @property
    def root(self) -> int | None:
        return self.index % 12 if self.is_pitched else None

    def shifted(self, semitones: int) -> ChordClass:
        if not self.is_pitched:
            return self
        return ChordClass.pitched(self.type, self.root + semitones)

    def label(self) -> str:
        """Absolute label such as ``Dm`` or ``Bb7``; NC/<START>/<END> otherwise."""
        if self.index == NO_CHORD_INDEX:
            return "NC"
        if self.index == START_INDEX:
            return "<START>"
        if self.index == END_INDEX:
            return "<END>"
        return pitch_name(self.root, prefer_flats=True) + self.type.suffix

    def __repr__(self) -> str:
        if self.is_pitched:
            return f"{self.type.suffix}@{pitch_name(self.root, prefer_flats=True)}"
        return self.label()


NO_CHORD = ChordClass(NO_CHORD_INDEX)
START = ChordClass(START_INDEX)
END = ChordClass(END_INDEX)
ALL_CLASSES = tuple(ChordClass(i) for i in range(N_CLASSES))
PITCHED_CLASSES = ALL_CLASSES[:NO_CHORD_INDEX]


@dataclass(frozen=True)
class ChordClassSequence:
    song_id: str
    classes: tuple[ChordClass, ...]
    beats: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.classes) != len(self.beats):
            raise ValueError("classes and beats differ in length")
        if START in self.classes or END in self.classes:
            raise ValueError("START/END tokens are added by consumers, not stored")

    def __len__(self) -> int:
        return len(self.classes)

    def with_classes(self, classes: Iterable[ChordClass]) -> ChordClassSequence:
        return ChordClassSequence(self.song_id, tuple(classes), self.beats)


_CONTEXT_FREE = {
    Family.MAJOR7: ChordType.M,
    Family.MAJOR6: ChordType.M,
    Family.DOMINANT7: ChordType.DOM7,
    Family.AUGMENTED_TRIAD: ChordType.DOM7,
    Family.MINOR7: ChordType.m,
    Family.MINOR_MAJOR7: ChordType.m,
    Family.MINOR6: ChordType.m,
    Family.MINOR_TRIAD: ChordType.m,
    Family.MINOR7_FLAT5: ChordType.h,
    Family.DIMINISHED7: ChordType.o,
    Family.DIMINISHED_TRIAD: ChordType.o,
}

# Upper structures that, over a bass a fifth below their root, voice a sus chord.
_SUS_SHAPED = frozenset({Family.MINOR7, Family.MINOR_TRIAD})


def classify_major_triad(triad_root: int, next_class: ChordClass | None) -> ChordClass:
    """Dominant7 if the next chord is a major7/minor7 class a fifth down, else major7."""
    if (
        next_class is not None
        and next_class.type in (ChordType.M, ChordType.m)
        and next_class.root == (triad_root + 5) % 12
    ):
        return ChordClass.pitched(ChordType.DOM7, triad_root)
    return ChordClass.pitched(ChordType.M, triad_root)


def classify_sus(sus_root: int, next_class: ChordClass | None) -> ChordClass:
    """Minor7 a fifth above if followed by the same-root dominant7, else dominant7."""
    if next_class is not None and next_class.type is ChordType.DOM7 and next_class.root == sus_root % 12:
        return ChordClass.pitched(ChordType.m, sus_root + 7)
    return ChordClass.pitched(ChordType.DOM7, sus_root)


def classify_slash(chord: ParsedChord, next_class: ChordClass | None) -> ChordClass:
    if chord.bass is None:
        raise ValueError(f"not a slash chord: {chord.raw!r}")
    upper = chord.without_bass()
    if chord.bass in chord_tones(upper):
        return classify_chord(upper, next_class)
    if chord.family in _SUS_SHAPED and chord.root == (chord.bass + 7) % 12:
        return classify_sus(chord.bass, next_class)
    return classify_chord(upper, next_class)


def classify_chord(chord: ParsedChord, next_class: ChordClass | None = None) -> ChordClass:
    """Class of one chord given the class of the chord after it (None at song end).

    Polychords reach this function already reduced to their lower structure,
    since :class:`ParsedChord` stores the lower part's fields at top level.
    """
    if chord.bass is not None:
        return classify_slash(chord, next_class)
    family = chord.family
    if family in (Family.NO_CHORD, Family.POWER):
        return NO_CHORD
    if family in (Family.MAJOR_TRIAD, Family.MAJOR_TRIAD_ADD9):
        return classify_major_triad(chord.root, next_class)
    if family is Family.SUS:
        return classify_sus(chord.root, next_class)
    return ChordClass.pitched(_CONTEXT_FREE[family], chord.root)


def reduce_chords(chords: Sequence[ParsedChord]) -> list[ChordClass]:
    out: list[ChordClass | None] = [None] * len(chords)
    next_class = None
    for i in range(len(chords) - 1, -1, -1):
        next_class = out[i] = classify_chord(chords[i], next_class)
    return out


def reduce_song(events, song_id: str = "") -> ChordClassSequence:
    """Reduce a list of ChordEvents (or anything with .chord/.beats) to classes."""
    events = list(events)
    if not events:
        raise ValueError("cannot reduce an empty song")
    classes = reduce_chords([e.chord for e in events])
    return ChordClassSequence(song_id, tuple(classes), tuple(Fraction(e.beats) for e in events))
