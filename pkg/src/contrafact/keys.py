"""Key-signature estimation, transposition and Roman-numeral rendering.

A key signature is counted in accidentals (negative = flats). Estimation
credits every chord's beats to each major scale whose diatonic seventh
chords contain the chord's class; the signature with the most beats wins.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .classes import (
    END,
    NO_CHORD,
    START,
    ChordClass,
    ChordClassSequence,
    ChordType,
)


class NonPitchedClass(ValueError):
    pass


class NoTonalContent(ValueError):
    pass


class MissingDeclaredKey(ValueError):
    def __init__(self, song_id: str):
        self.song_id = song_id
        super().__init__(f"song {song_id!r} has no declared key signature")


@dataclass(frozen=True, order=True)
class KeySignature:
    accidentals: int

    def __post_init__(self):
        if not -7 <= self.accidentals <= 7:
            raise ValueError(f"key signature out of range: {self.accidentals}")

    @property
    def major_root(self) -> int:
        return (self.accidentals * 7) % 12

    @classmethod
    def from_major_root(cls, pc: int) -> KeySignature:
        """Spelling with at most six accidentals; six flats rather than six sharps."""
        acc = (pc * 7) % 12
        if acc >= 6:
            acc -= 12
        return cls(acc)

    def canonical(self) -> KeySignature:
        return KeySignature.from_major_root(self.major_root)

    def __str__(self) -> str:
        return format_accidentals(self.accidentals)


def format_accidentals(n: int) -> str:
    if n == 0:
        return "0"
    return f"{abs(n)}{'b' if n < 0 else '#'}"


def _key(pc: int) -> KeySignature:
    return KeySignature.from_major_root(pc % 12)


# Major-scale roots (relative to the chord root) that contain each type diatonically.
_DIATONIC_OFFSETS = {
    ChordType.M: (0, 7),
    ChordType.DOM7: (5,),
    ChordType.m: (-2, -4, -9),
    ChordType.h: (1,),
    ChordType.o: (),
}


def diatonic_keys(cls: ChordClass) -> frozenset[KeySignature]:
    """Major keys whose diatonic seventh chords include *cls*."""
    if not cls.is_pitched:
        raise NonPitchedClass(f"{cls!r} has no scale membership")
    return frozenset(_key(cls.root + off) for off in _DIATONIC_OFFSETS[cls.type])


@dataclass(frozen=True)
class KeyEstimate:
    song_id: str
    winners: frozenset[KeySignature]
    beat_tally: Mapping[KeySignature, Fraction] = field(compare=False)

    @property
    def ambiguous(self) -> bool:
        return len(self.winners) > 1

    @property
    def winner(self) -> KeySignature | None:
        return next(iter(self.winners)) if len(self.winners) == 1 else None


def estimate_key(seq: ChordClassSequence) -> KeyEstimate:
    if len(seq) == 0:
        raise ValueError("cannot estimate the key of an empty sequence")
    tally: dict[KeySignature, Fraction] = {}
    for cls, beats in zip(seq.classes, seq.beats):
        if not cls.is_pitched:
            continue
        for key in diatonic_keys(cls):
            tally[key] = tally.get(key, Fraction(0)) + beats
    if not tally:
        raise NoTonalContent(f"song {seq.song_id!r} has only diminished or no-chord content")
    best = max(tally.values())
    winners = frozenset(k for k, v in tally.items() if v == best)
    return KeyEstimate(seq.song_id, winners, tally)


def _fewest_accidentals(keys: Iterable[KeySignature]) -> KeySignature:
    return min(keys, key=lambda k: (abs(k.accidentals), k.accidentals))


def resolve_key(est: KeyEstimate, declared: KeySignature | None) -> KeySignature:
    """Pick one signature: the unique winner, else the declared key, else the plainest winner."""
    if not est.ambiguous:
        return est.winner
    if declared is not None:
        return declared
    return _fewest_accidentals(est.winners)


def fifths_distance(a: KeySignature, b: KeySignature) -> int:
    """Signed circle-of-fifths steps from *a* to *b* (negative = flatward), in [-6, 5]."""
    d = (b.accidentals - a.accidentals) % 12
    return d - 12 if d >= 6 else d


def transpose(seq: ChordClassSequence, from_key: KeySignature) -> ChordClassSequence:
    """Move a sequence from *from_key* to the signature with no accidentals."""
    shift = -from_key.major_root
    return seq.with_classes(c.shifted(shift) for c in seq.classes)


ROMAN_ROOTS = ("i", "♭ii", "ii", "♭iii", "iii", "iv", "♭v", "v", "♭vi", "vi", "♭vii", "vii")


def roman_numeral(cls: ChordClass, ascii: bool = False) -> str:
    """Roman numeral (relative to C) plus type suffix, e.g. ``iim`` or ``♭ii7``."""
    if not cls.is_pitched:
        raise NonPitchedClass(f"{cls!r} has no Roman numeral")
    text = ROMAN_ROOTS[cls.root] + cls.type.suffix
    return text.replace("♭", "b") if ascii else text


def class_name(cls: ChordClass, ascii: bool = False) -> str:
    """Roman numeral for pitched classes, ``NC``/``<START>``/``<END>`` otherwise."""
    return roman_numeral(cls, ascii) if cls.is_pitched else cls.label()


_ROMAN_RE = re.compile(r"^([b♭]?)(vii|vi|v|iv|iii|ii|i)(M|m|7|h|o)$")
_SUFFIX_TYPE = {t.suffix: t for t in ChordType}


def parse_class_name(text: str) -> ChordClass:
    """Inverse of :func:`class_name`; also accepts ASCII ``b`` and START/END/NC spellings."""
    t = text.strip()
    special = {"NC": NO_CHORD, "<START>": START, "START": START, "<END>": END, "END": END}
    if t in special:
        return special[t]
    m = _ROMAN_RE.match(t)
    if m is None:
        raise ValueError(f"not a chord-class name: {text!r}")
    root = ROMAN_ROOTS.index(("♭" if m.group(1) else "") + m.group(2))
    return ChordClass.pitched(_SUFFIX_TYPE[m.group(3)], root)


@dataclass
class EstimationReport:
    """Agreement between estimated and declared signatures across a corpus."""

    distances: Counter = field(default_factory=Counter)
    ambiguous: int = 0
    no_tonal_content: int = 0

    @property
    def total(self) -> int:
        return sum(self.distances.values()) + self.ambiguous + self.no_tonal_content

    def rows(self) -> list[tuple[str, int, float]]:
        """(label, count, percent) from 6 flats to 5 sharps, then ambiguous."""
        total = self.total or 1
        out = []
        for d in range(-6, 6):
            n = self.distances.get(d, 0)
            out.append((format_accidentals(d), n, 100.0 * n / total))
        out.append(("Ambig.", self.ambiguous, 100.0 * self.ambiguous / total))
        if self.no_tonal_content:
            out.append(("Atonal", self.no_tonal_content, 100.0 * self.no_tonal_content / total))
        return out
