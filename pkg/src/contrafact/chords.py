"""Chord-symbol parsing.

Symbols follow a compact lead-sheet grammar::

    chord   := root quality? modifier* ("/" root)? | chord "|" chord | "NC"
    root    := [A-G] ("#" | "b"){0,2}
    quality := M7 | maj7 | m7b5 | m7 | m6 | mM7 | m | dim7 | o7 | o | dim
             | aug | + | 7 | 6 | 5 | sus4 | sus2 | sus | M | add9 | ...
    modifier:= ("b" | "#")? (5 | 9 | 11 | 13) | sus4 | sus2 | sus | add9 | alt | 7

Tokenization is longest-match. Parentheses and commas around modifiers are
ignored, so ``C7(b9,#11)`` and ``C7b9#11`` are the same chord.

A polychord is written ``upper|lower``; it carries the fields of the lower
structure and keeps the upper one in :attr:`ParsedChord.upper`.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

__all__ = [
    "ChordSyntaxError",
    "UnparseableSymbol",
    "UnknownQuality",
    "Family",
    "Category",
    "ParsedChord",
    "parse_chord",
    "parse_root",
    "pitch_name",
    "render_chord",
    "chord_tones",
]

SHARP_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")
FLAT_NAMES = ("C", "Db", "D", "Eb", "E", "F", "Gb", "G", "Ab", "A", "Bb", "B")
NATURALS = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
NO_CHORD_SYMBOLS = frozenset({"NC", "N.C.", "N.C"})

_ROOT_RE = re.compile(r"([A-G])([#b♯♭]{0,2})")


class ChordSyntaxError(ValueError):
    """Base class for chord-symbol errors.

    ``line`` is filled in by corpus loaders so the message can point at the
    offending record.
    """

    def __init__(self, symbol: str, reason: str, line: int | None = None):
        self.symbol = symbol
        self.reason = reason
        self.line = line
        super().__init__(str(self))

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{where}{self.reason}: {self.symbol!r}"


class UnparseableSymbol(ChordSyntaxError):
    pass


class UnknownQuality(ChordSyntaxError):
    pass


class Family(enum.Enum):
    MAJOR7 = "major7"
    DOMINANT7 = "dominant7"
    MINOR7 = "minor7"
    MINOR7_FLAT5 = "minor7b5"
    DIMINISHED7 = "diminished7"
    MAJOR_TRIAD = "major triad"
    MAJOR_TRIAD_ADD9 = "major triad add9"
    MINOR_TRIAD = "minor triad"
    DIMINISHED_TRIAD = "diminished triad"
    AUGMENTED_TRIAD = "augmented triad"
    SUS = "sus"
    POWER = "power"
    NO_CHORD = "no chord"
    MINOR_MAJOR7 = "minor-major7"
    MAJOR6 = "major6"
    MINOR6 = "minor6"


class Category(enum.Enum):
    """The fifteen corpus-statistics categories, in report order."""

    MAJOR7 = "major7"
    DOMINANT7 = "dominant7"
    MINOR7 = "minor7"
    MINOR7_FLAT5 = "minor7b5"
    DIMINISHED7 = "diminished7"
    MAJOR_TRIAD = "major triad"
    MAJOR_TRIAD_ADD9 = "major triad add9"
    MINOR_TRIAD = "minor triad"
    DIMINISHED_TRIAD = "diminished triad"
    AUGMENTED_TRIAD = "augmented triad"
    SLASH = "slash chord"
    SUS = "sus chord"
    NO_CHORD = "no chord"
    POWER = "power chord"
    POLYCHORD = "polychord"


_FAMILY_CATEGORY = {
    Family.MAJOR7: Category.MAJOR7,
    Family.MAJOR6: Category.MAJOR7,
    Family.DOMINANT7: Category.DOMINANT7,
    Family.MINOR7: Category.MINOR7,
    Family.MINOR_MAJOR7: Category.MINOR7,
    Family.MINOR6: Category.MINOR7,
    Family.MINOR7_FLAT5: Category.MINOR7_FLAT5,
    Family.DIMINISHED7: Category.DIMINISHED7,
    Family.MAJOR_TRIAD: Category.MAJOR_TRIAD,
    Family.MAJOR_TRIAD_ADD9: Category.MAJOR_TRIAD_ADD9,
    Family.MINOR_TRIAD: Category.MINOR_TRIAD,
    Family.DIMINISHED_TRIAD: Category.DIMINISHED_TRIAD,
    Family.AUGMENTED_TRIAD: Category.AUGMENTED_TRIAD,
    Family.SUS: Category.SUS,
    Family.POWER: Category.POWER,
    Family.NO_CHORD: Category.NO_CHORD,
}

# Semitones above the root, without extensions.
_FAMILY_TONES = {
    Family.MAJOR7: (0, 4, 7, 11),
    Family.DOMINANT7: (0, 4, 7, 10),
    Family.MINOR7: (0, 3, 7, 10),
    Family.MINOR7_FLAT5: (0, 3, 6, 10),
    Family.DIMINISHED7: (0, 3, 6, 9),
    Family.MAJOR_TRIAD: (0, 4, 7),
    Family.MAJOR_TRIAD_ADD9: (0, 2, 4, 7),
    Family.MINOR_TRIAD: (0, 3, 7),
    Family.DIMINISHED_TRIAD: (0, 3, 6),
    Family.AUGMENTED_TRIAD: (0, 4, 8),
    Family.SUS: (0, 5, 7),
    Family.POWER: (0, 7),
    Family.NO_CHORD: (),
    Family.MINOR_MAJOR7: (0, 3, 7, 11),
    Family.MAJOR6: (0, 4, 7, 9),
    Family.MINOR6: (0, 3, 7, 9),
}

# Quality spellings -> canonical quality key. Longest match wins.
_QUALITIES = {
    "M7": "M7", "maj7": "M7", "Maj7": "M7", "Δ7": "M7", "Δ": "M7",
    "m7b5": "h", "mi7b5": "h", "min7b5": "h", "-7b5": "h",
    "h7": "h", "h": "h", "ø7": "h", "ø": "h",
    "m7": "m7", "mi7": "m7", "min7": "m7", "-7": "m7",
    "m6": "m6", "mi6": "m6", "min6": "m6", "-6": "m6",
    "mM7": "mM7", "minMaj7": "mM7", "mMaj7": "mM7", "m(maj7)": "mM7", "-M7": "mM7",
    "m": "m", "mi": "m", "min": "m", "-": "m",
    "dim7": "o7", "o7": "o7", "°7": "o7",
    "dim": "o", "o": "o", "°": "o",
    "aug": "+", "+": "+",
    "7": "7",
    "6": "6",
    "5": "5",
    "sus4": "sus4", "sus2": "sus2", "sus": "sus4",
    "M": "M", "maj": "M", "Maj": "M",
    "add9": "add9", "add2": "add9",
}
_QUALITY_KEYS = sorted(_QUALITIES, key=len, reverse=True)

_EXT_RE = re.compile(r"([b#♭♯]?)(13|11|9|5)")
_WORD_MODIFIERS = {
    "sus4": "sus4", "sus2": "sus2", "sus": "sus4",
    "add9": "add9", "add2": "add9", "alt": "alt", "7": "7", "+": "#5",
}
_WORD_KEYS = sorted(_WORD_MODIFIERS, key=len, reverse=True)

# A natural 9/11/13 on a bare triad quality implies a seventh chord.
_SEVENTH_IMPLYING = frozenset({"9", "11", "13"})
_DOMINANT_IMPLYING = frozenset(
    {acc + n for acc in ("", "b", "#") for n in ("9", "11", "13")} | {"b5", "#5", "alt"}
)

_QUALITY_RENDER = {
    Family.MAJOR7: "M7",
    Family.DOMINANT7: "7",
    Family.MINOR7: "m7",
    Family.MINOR7_FLAT5: "m7b5",
    Family.DIMINISHED7: "dim7",
    Family.MAJOR_TRIAD: "M",
    Family.MAJOR_TRIAD_ADD9: "add9",
    Family.MINOR_TRIAD: "m",
    Family.DIMINISHED_TRIAD: "dim",
    Family.AUGMENTED_TRIAD: "aug",
    Family.POWER: "5",
    Family.MINOR_MAJOR7: "mM7",
    Family.MAJOR6: "6",
    Family.MINOR6: "m6",
}


@dataclass(frozen=True)
class ParsedChord:
    """Syntactic decomposition of one chord symbol.

    ``root`` is ``None`` only for the no-chord symbol. ``raw`` does not take
    part in equality, so a re-rendered chord compares equal to its source.
    """

    root: int | None
    family: Family
    extensions: frozenset[str] = frozenset()
    bass: int | None = None
    upper: ParsedChord | None = None
    raw: str = field(default="", compare=False)

    @property
    def category(self) -> Category:
        if self.upper is not None:
            return Category.POLYCHORD
        if self.bass is not None:
            return Category.SLASH
        return _FAMILY_CATEGORY[self.family]

    @property
    def is_no_chord(self) -> bool:
        return self.family is Family.NO_CHORD

    def without_bass(self) -> ParsedChord:
        return ParsedChord(self.root, self.family, self.extensions, None, None, self.raw)

    def __str__(self) -> str:
        return render_chord(self)


def pitch_name(pc: int, prefer_flats: bool = False) -> str:
    """Canonical spelling of a pitch class (0 = C)."""
    names = FLAT_NAMES if prefer_flats else SHARP_NAMES
    return names[pc % 12]


def parse_root(text: str) -> tuple[int, int]:
    """Parse a root at the start of *text*; return (pitch class, chars consumed)."""
    m = _ROOT_RE.match(text)
    if m is None:
        raise UnparseableSymbol(text, "no valid root letter")
    pc = NATURALS[m.group(1)]
    for acc in m.group(2):
        pc += 1 if acc in "#♯" else -1
    return pc % 12, m.end()


def chord_tones(chord: ParsedChord) -> frozenset[int]:
    """Pitch classes of the basic chord (root-relative tones, no extensions)."""
    if chord.root is None:
        return frozenset()
    tones = set(_FAMILY_TONES[chord.family])
    if chord.family is Family.SUS:
        if "sus2" in chord.extensions:
            tones.discard(5)
            tones.add(2)
        if "7" in chord.extensions:
            tones.add(10)
    return frozenset((chord.root + t) % 12 for t in tones)


def _norm_acc(text: str) -> str:
    return text.replace("♭", "b").replace("♯", "#")


def _split_modifiers(symbol: str, rest: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(rest):
        ch = rest[i]
        if ch in "(),/ ":
            i += 1
            continue
        for word in _WORD_KEYS:
            if rest.startswith(word, i):
                tokens.append(_WORD_MODIFIERS[word])
                i += len(word)
                break
        else:
            m = _EXT_RE.match(rest, i)
            if m is None:
                raise UnknownQuality(symbol, f"unrecognized chord suffix {rest[i:]!r}")
            tokens.append(_norm_acc(m.group(1)) + m.group(2))
            i = m.end()
    return tokens


def _resolve_family(symbol: str, quality: str | None, mods: list[str]) -> tuple[Family, set[str]]:
    exts = set(mods)
    if "sus4" in exts or "sus2" in exts or quality in ("sus4", "sus2"):
        if quality in ("sus4", "sus2"):
            exts.add(quality)
        if "sus2" in exts and "sus4" in exts:
            exts.discard("sus2")
        if quality == "7":
            exts.add("7")
        return Family.SUS, exts

    seven = "7" in exts
    exts.discard("7")
    if seven and quality not in ("+", None):
        raise UnknownQuality(symbol, "unexpected 7 after quality")

    if quality == "+":
        if seven:
            exts.add("#5")
            return Family.DOMINANT7, exts
        return Family.AUGMENTED_TRIAD, exts
    if quality is None and seven:
        return Family.DOMINANT7, exts
    if quality == "add9":
        return Family.MAJOR_TRIAD_ADD9, exts
    if "add9" in exts and quality in (None, "M"):
        exts.discard("add9")
        return Family.MAJOR_TRIAD_ADD9, exts
    if quality is None:
        if exts & _DOMINANT_IMPLYING:
            return Family.DOMINANT7, exts
        if exts:
            raise UnknownQuality(symbol, "extension without a quality")
        return Family.MAJOR_TRIAD, exts
    if quality == "M":
        if exts & _SEVENTH_IMPLYING:
            return Family.MAJOR7, exts
        return Family.MAJOR_TRIAD, exts
    if quality == "m":
        if exts & _SEVENTH_IMPLYING:
            return Family.MINOR7, exts
        return Family.MINOR_TRIAD, exts
    simple = {
        "M7": Family.MAJOR7,
        "h": Family.MINOR7_FLAT5,
        "m7": Family.MINOR7,
        "m6": Family.MINOR6,
        "mM7": Family.MINOR_MAJOR7,
        "o7": Family.DIMINISHED7,
        "o": Family.DIMINISHED_TRIAD,
        "7": Family.DOMINANT7,
        "6": Family.MAJOR6,
        "5": Family.POWER,
    }
    return simple[quality], exts


def _parse_simple(symbol: str, text: str) -> ParsedChord:
    if text in NO_CHORD_SYMBOLS:
        return ParsedChord(None, Family.NO_CHORD, raw=symbol)
    root, pos = parse_root(text)
    rest = text[pos:]

    bass = None
    slash = rest.rfind("/")
    # "C6/9" is an extension, not a bass note.
    if slash >= 0 and rest[slash + 1 : slash + 2] in NATURALS:
        bass_text = rest[slash + 1 :]
        try:
            bass, used = parse_root(bass_text)
        except UnparseableSymbol:
            raise UnknownQuality(symbol, "bad bass note") from None
        if used != len(bass_text):
            raise UnknownQuality(symbol, f"trailing text after bass {bass_text[used:]!r}")
        rest = rest[:slash]

    quality = None
    for key in _QUALITY_KEYS:
        if rest.startswith(key):
            quality = _QUALITIES[key]
            rest = rest[len(key) :]
            break
    family, exts = _resolve_family(symbol, quality, _split_modifiers(symbol, rest))
    return ParsedChord(root, family, frozenset(exts), bass, None, symbol)


def parse_chord(symbol: str) -> ParsedChord:
    """Parse a chord symbol.

    >>> parse_chord("Dm7/G")
    ParsedChord(root=2, family=<Family.MINOR7: 'minor7'>, extensions=frozenset(), bass=7, upper=None, raw='Dm7/G')
    """
    text = symbol.strip()
    if not text:
        raise UnparseableSymbol(symbol, "empty chord symbol")
    if text.count("|") > 1:
        raise UnknownQuality(symbol, "nested polychord")
    if "|" in text:
        upper_text, lower_text = text.split("|", 1)
        upper = parse_chord(upper_text)
        lower = parse_chord(lower_text)
        if upper.is_no_chord or lower.is_no_chord:
            raise UnknownQuality(symbol, "no-chord inside a polychord")
        return ParsedChord(lower.root, lower.family, lower.extensions, lower.bass, upper, symbol)
    return _parse_simple(symbol, text)


def _render_exts(exts: frozenset[str]) -> str:
    def order(tok: str) -> tuple[int, str]:
        digits = tok.lstrip("b#")
        return (int(digits) if digits.isdigit() else 99, tok)

    if not exts:
        return ""
    return "(" + ",".join(sorted(exts, key=order)) + ")"


def render_chord(chord: ParsedChord, prefer_flats: bool = False) -> str:
    """Render a chord back to a symbol that parses to an equal ParsedChord."""
    if chord.upper is not None:
        lower = ParsedChord(chord.root, chord.family, chord.extensions, chord.bass)
        return f"{render_chord(chord.upper, prefer_flats)}|{render_chord(lower, prefer_flats)}"
    if chord.family is Family.NO_CHORD:
        return "NC"
    text = pitch_name(chord.root, prefer_flats)
    exts = chord.extensions
    if chord.family is Family.SUS:
        sus = "sus2" if "sus2" in exts else "sus4"
        seven = "7" if "7" in exts else ""
        text += seven + sus + _render_exts(exts - {"sus2", "sus4", "7"})
    elif chord.family is Family.MAJOR_TRIAD and not exts:
        pass
    else:
        text += _QUALITY_RENDER[chord.family] + _render_exts(exts)
    if chord.bass is not None:
        text += "/" + pitch_name(chord.bass, prefer_flats)
    return text
