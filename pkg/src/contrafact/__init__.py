"""Jazz chord progressions as paths in chord-class space, with contrafact search."""

from .chords import Category, Family, ParsedChord, parse_chord, pitch_name, render_chord
from .classes import (
    END,
    NO_CHORD,
    START,
    ChordClass,
    ChordClassSequence,
    ChordType,
    classify_major_triad,
    classify_slash,
    classify_sus,
    reduce_song,
)
from .corpus import ChordEvent, Corpus, Song, corpus_stats, load_corpus, make_song
from .embedding import CooccurrenceModel, build_model, cosine_similarity, nearest_classes
from .keys import (
    KeyEstimate,
    KeySignature,
    diatonic_keys,
    estimate_key,
    fifths_distance,
    resolve_key,
    roman_numeral,
    transpose,
)
from .paths import SongPath, build_path, eval_path
from .pipeline import analyze_song, evaluate_estimation
from .similarity import MembraneParams, SearchResult, membrane_area, nearest_songs, pairwise_distances

__version__ = "0.1.0"

__all__ = [
    "Category",
    "Family",
    "ParsedChord",
    "parse_chord",
    "pitch_name",
    "render_chord",
    "END",
    "NO_CHORD",
    "START",
    "ChordClass",
    "ChordClassSequence",
    "ChordType",
    "classify_major_triad",
    "classify_slash",
    "classify_sus",
    "reduce_song",
    "ChordEvent",
    "Corpus",
    "Song",
    "corpus_stats",
    "load_corpus",
    "make_song",
    "CooccurrenceModel",
    "build_model",
    "cosine_similarity",
    "nearest_classes",
    "KeyEstimate",
    "KeySignature",
    "diatonic_keys",
    "estimate_key",
    "fifths_distance",
    "resolve_key",
    "roman_numeral",
    "transpose",
    "SongPath",
    "build_path",
    "eval_path",
    "analyze_song",
    "evaluate_estimation",
    "MembraneParams",
    "SearchResult",
    "membrane_area",
    "nearest_songs",
    "pairwise_distances",
]
