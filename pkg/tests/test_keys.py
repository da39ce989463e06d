from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from contrafact.classes import NO_CHORD, PITCHED_CLASSES, START, ChordClass, ChordClassSequence, ChordType
from contrafact.corpus import make_song
from contrafact.keys import (
    KeyEstimate,
    KeySignature,
    MissingDeclaredKey,
    NonPitchedClass,
    NoTonalContent,
    class_name,
    diatonic_keys,
    estimate_key,
    fifths_distance,
    parse_class_name,
    resolve_key,
    roman_numeral,
    transpose,
)
from contrafact.pipeline import analyze_song, evaluate_estimation

M, m, D7, h, o = ChordType.M, ChordType.m, ChordType.DOM7, ChordType.h, ChordType.o
P = ChordClass.pitched
C, G, F, D, Bb, Eb = (KeySignature(a) for a in (0, 1, -1, 2, -2, -3))

MAJOR_SCALE = (0, 2, 4, 5, 7, 9, 11)
SEVENTH_SHAPES = {(4, 7, 11): M, (3, 7, 10): m, (4, 7, 10): D7, (3, 6, 10): h}


def brute_force_diatonic(cls: ChordClass) -> set[KeySignature]:
    """Stack thirds on every degree of every major scale and keep the keys producing *cls*."""
    keys = set()
    for tonic in range(12):
        scale = [(tonic + s) % 12 for s in MAJOR_SCALE]
        for deg in range(7):
            notes = [scale[(deg + k) % 7] for k in (0, 2, 4, 6)]
            shape = tuple((n - notes[0]) % 12 for n in notes[1:])
            if P(SEVENTH_SHAPES[shape], notes[0]) == cls:
                keys.add(KeySignature.from_major_root(tonic))
    return keys


def seq(*pairs, song_id="t"):
    return ChordClassSequence(song_id, tuple(c for c, _ in pairs), tuple(Fraction(b) for _, b in pairs))


def test_major_root_circle_of_fifths():
    assert [KeySignature(a).major_root for a in (0, 1, -1, 2, -3, 6, -6, 7, -7)] == [0, 7, 5, 2, 3, 6, 6, 1, 11]


def test_from_major_root_prefers_six_flats():
    assert KeySignature.from_major_root(6) == KeySignature(-6)
    assert {KeySignature.from_major_root(pc).accidentals for pc in range(12)} == set(range(-6, 6))
    for pc in range(12):
        assert KeySignature.from_major_root(pc).major_root == pc


def test_key_signature_range():
    with pytest.raises(ValueError):
        KeySignature(8)


@pytest.mark.parametrize(
    "cls, expected",
    [
        (P(m, 2), {Bb, C, F}),
        (P(D7, 9), {D}),
        (P(M, 0), {C, G}),
        (P(o, 0), set()),
        (P(h, 11), {C}),
    ],
)
def test_diatonic_keys_examples(cls, expected):
    assert diatonic_keys(cls) == expected


@pytest.mark.parametrize("cls", PITCHED_CLASSES, ids=repr)
def test_diatonic_keys_match_scale_enumeration(cls):
    assert diatonic_keys(cls) == brute_force_diatonic(cls)


def test_diatonic_cardinalities_and_transposition_symmetry():
    sizes = {M: 2, m: 3, D7: 1, h: 1, o: 0}
    for cls in PITCHED_CLASSES:
        assert len(diatonic_keys(cls)) == sizes[cls.type]
        for k in range(12):
            shifted = {KeySignature.from_major_root(key.major_root + k) for key in diatonic_keys(cls)}
            assert diatonic_keys(cls.shifted(k)) == shifted


def test_diatonic_keys_rejects_non_pitched():
    for cls in (NO_CHORD, START):
        with pytest.raises(NonPitchedClass):
            diatonic_keys(cls)


def test_ii_v_i_worked_example():
    s = seq((P(D7, 9), 4), (P(m, 2), 4), (P(D7, 7), 4), (P(M, 0), 4), (P(M, 0), 4))
    est = estimate_key(s)
    assert est.beat_tally[C] == 16
    assert est.beat_tally == {C: 16, G: 8, D: 4, F: 4, Bb: 4}
    assert est.winners == {C} and not est.ambiguous


def test_single_major7_is_ambiguous():
    est = estimate_key(seq((P(M, 0), 4)))
    assert est.winners == {C, G} and est.ambiguous


def test_diminished_and_no_chord_carry_no_weight():
    with pytest.raises(NoTonalContent):
        estimate_key(seq((P(o, 0), 4)))
    with pytest.raises(NoTonalContent):
        estimate_key(seq((NO_CHORD, 4), (P(o, 3), 2)))
    est = estimate_key(seq((P(o, 0), 100), (P(D7, 7), 1), (NO_CHORD, 50)))
    assert est.beat_tally == {C: 1}


@pytest.mark.parametrize(
    "winners, declared, expected",
    [
        ({C}, F, C),
        ({C, G}, G, G),
        ({C, G}, None, C),
        ({C, G}, Eb, Eb),
        ({F, G}, None, F),
        ({KeySignature(-6), KeySignature(5)}, None, KeySignature(5)),
    ],
)
def test_resolve_key(winners, declared, expected):
    est = KeyEstimate("x", frozenset(winners), {})
    assert resolve_key(est, declared) == expected


@pytest.mark.parametrize(
    "a, b, d",
    [(C, F, -1), (C, G, 1), (C, C, 0), (C, KeySignature(-6), -6), (C, KeySignature(6), -6),
     (KeySignature(-5), KeySignature(7), 0), (G, F, -2), (C, KeySignature(5), 5)],
)
def test_fifths_distance(a, b, d):
    assert fifths_distance(a, b) == d


def test_transpose_examples():
    assert transpose(seq((P(M, 3), 4)), Eb).classes == (P(M, 0),)
    assert transpose(seq((P(D7, 10), 4)), Eb).classes == (P(D7, 7),)
    s = seq((P(m, 2), 1), (NO_CHORD, 2), (P(o, 5), 3))
    assert transpose(s, C) == s
    assert transpose(s, Eb).beats == s.beats
    assert transpose(s, Eb).classes[1] == NO_CHORD


pitched = st.sampled_from(PITCHED_CLASSES + (NO_CHORD,))
durations = st.fractions(min_value=Fraction(1, 4), max_value=8, max_denominator=8)
sequences = st.lists(st.tuples(pitched, durations), min_size=1, max_size=12).map(lambda ps: seq(*ps))


@given(sequences, st.integers(0, 11))
def test_transpose_invertible(s, k):
    key = KeySignature.from_major_root(k)
    back = transpose(transpose(s, key), KeySignature.from_major_root(-k % 12))
    assert back == s


@given(sequences, st.integers(1, 11))
def test_estimate_is_transposition_covariant(s, k):
    shifted = s.with_classes(c.shifted(k) for c in s.classes)
    try:
        est = estimate_key(s)
    except NoTonalContent:
        with pytest.raises(NoTonalContent):
            estimate_key(shifted)
        return
    est2 = estimate_key(shifted)
    assert est2.winners == {KeySignature.from_major_root(w.major_root + k) for w in est.winners}
    assert est2.ambiguous == est.ambiguous
    for key, beats in est.beat_tally.items():
        assert est2.beat_tally[KeySignature.from_major_root(key.major_root + k)] == beats


@given(sequences, st.fractions(min_value=Fraction(1, 8), max_value=16))
def test_estimate_is_beat_scale_invariant(s, c):
    scaled = ChordClassSequence(s.song_id, s.classes, tuple(b * c for b in s.beats))
    try:
        assert estimate_key(scaled).winners == estimate_key(s).winners
    except NoTonalContent:
        pass


@pytest.mark.parametrize(
    "symbols, expected",
    [
        (["A7", "Dm", "G7", "CM"], "vi7-iim-v7-iM"),
        (["Bh", "E7", "Am"], "viih-iii7-vim"),
    ],
)
def test_roman_numerals(symbols, expected):
    a = analyze_song(make_song("x", symbols, key=0))
    assert "-".join(roman_numeral(c) for c in a.transposed.classes) == expected


def test_roman_numeral_table():
    names = [roman_numeral(P(M, r)) for r in range(12)]
    assert names == ["iM", "♭iiM", "iiM", "♭iiiM", "iiiM", "ivM", "♭vM", "vM", "♭viM", "viM", "♭viiM", "viiM"]
    assert roman_numeral(P(D7, 1)) == "♭ii7"
    assert roman_numeral(P(D7, 1), ascii=True) == "bii7"
    with pytest.raises(NonPitchedClass):
        roman_numeral(NO_CHORD)


def test_roman_identical_for_transposed_songs():
    a = analyze_song(make_song("a", ["Dm7", "G7", "CM7", "A7"], key=0))
    b = analyze_song(make_song("b", ["Fm7", "Bb7", "EbM7", "C7"], key=-3))
    assert [roman_numeral(c) for c in a.transposed.classes] == [roman_numeral(c) for c in b.transposed.classes]


def test_class_name_round_trip():
    for cls in PITCHED_CLASSES + (NO_CHORD, START):
        assert parse_class_name(class_name(cls)) == cls
        assert parse_class_name(class_name(cls, ascii=True)) == cls
    assert parse_class_name("bii7") == P(D7, 1)
    with pytest.raises(ValueError):
        parse_class_name("xx7")


def test_evaluate_estimation():
    agree = [make_song(f"a{i}", ["Dm7", "G7", "CM7"], key=0) for i in range(3)]
    report = evaluate_estimation(agree)
    assert report.distances == {0: 3} and report.ambiguous == 0
    assert dict((lbl, pct) for lbl, _, pct in report.rows())["0"] == 100.0

    off = evaluate_estimation([make_song("b", ["Dm7", "G7", "CM7"], key=-1)])
    assert off.distances == {-1: 1}
    assert ("1b", 1, 100.0) in off.rows()

    amb = evaluate_estimation([make_song("c", ["CM7"], key=0)])
    assert amb.ambiguous == 1 and not amb.distances
    assert amb.rows()[-1] == ("Ambig.", 1, 100.0)


def test_evaluate_estimation_requires_declared_key():
    with pytest.raises(MissingDeclaredKey):
        evaluate_estimation([make_song("x", ["CM7"])])
